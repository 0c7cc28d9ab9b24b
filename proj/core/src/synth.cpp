#include "canopy/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <random>
#include <sstream>

#include "canopy/error.hpp"
#include "canopy/hash.hpp"
#include "canopy/raster_io.hpp"

namespace canopy {

namespace {

constexpr std::size_t kMaxAttempts = 10000;
constexpr std::size_t kOutlineVertices = 64;
constexpr double kSpotCell = 2.0;      // value-noise lattice spacing, pixels
constexpr double kStripePeriod = 4.0;  // pixels

struct Blob {
  double cx, cy;  // pixel coordinates of the centre
  double radius;  // pixels
  std::array<double, 2> amp;
  std::array<double, 2> phase;
  double angle;
  double cap;  // cap height, m
  std::size_t cls;
  std::uint64_t seed;

  double radius_at(double theta) const {
    return radius * (1.0 + amp[0] * std::cos(2.0 * theta + phase[0]) + amp[1] * std::cos(3.0 * theta + phase[1]));
  }
  double max_radius() const { return radius * (1.0 + amp[0] + amp[1]); }
};

double lattice(std::int64_t ix, std::int64_t iy, std::uint64_t seed) {
  const std::uint64_t h = mix_seed(seed, static_cast<std::uint64_t>(ix) * 0x9E3779B1ull ^ static_cast<std::uint64_t>(iy) * 0x85EBCA77ull);
  return static_cast<double>(h >> 11) / 9007199254740992.0 * 2.0 - 1.0;
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(double x, double y, std::uint64_t seed) {
  const double gx = x / kSpotCell, gy = y / kSpotCell;
  const auto ix = static_cast<std::int64_t>(std::floor(gx)), iy = static_cast<std::int64_t>(std::floor(gy));
  const double fx = smooth(gx - static_cast<double>(ix)), fy = smooth(gy - static_cast<double>(iy));
  const double a = lattice(ix, iy, seed), b = lattice(ix + 1, iy, seed);
  const double c = lattice(ix, iy + 1, seed), d = lattice(ix + 1, iy + 1, seed);
  return (a + (b - a) * fx) * (1.0 - fy) + (c + (d - c) * fx) * fy;
}

std::array<double, 2> read_pair(const nlohmann::json& j, const char* key, std::array<double, 2> fallback) {
  if (!j.contains(key)) return fallback;
  const auto v = j.at(key).get<std::vector<double>>();
  if (v.size() != 2) throw ValidationError(std::string("scene spec '") + key + "' must have 2 values");
  return {v[0], v[1]};
}

}  // namespace

std::string_view to_string(TextureKind t) {
  switch (t) {
    case TextureKind::smooth: return "smooth";
    case TextureKind::spotted: return "spotted";
    case TextureKind::striped: return "striped";
    case TextureKind::jagged: return "jagged";
  }
  return "smooth";
}

TextureKind texture_from_string(std::string_view s) {
  if (s == "smooth") return TextureKind::smooth;
  if (s == "spotted") return TextureKind::spotted;
  if (s == "striped") return TextureKind::striped;
  if (s == "jagged") return TextureKind::jagged;
  throw ValidationError("unknown texture kind '" + std::string(s) + "'");
}

double texture_value(TextureKind kind, double x, double y, double angle, std::uint64_t seed) {
  switch (kind) {
    case TextureKind::smooth: return 0.0;
    case TextureKind::spotted: return value_noise(x, y, seed) >= 0.0 ? 1.0 : -1.0;
    case TextureKind::striped: {
      const double u = x * std::cos(angle) + y * std::sin(angle);
      return std::sin(2.0 * std::numbers::pi * u / kStripePeriod) >= 0.0 ? 1.0 : -1.0;
    }
    case TextureKind::jagged: {
      const auto ix = static_cast<std::int64_t>(std::floor(x)), iy = static_cast<std::int64_t>(std::floor(y));
      return lattice(ix, iy, seed) >= 0.0 ? 1.0 : -1.0;
    }
  }
  return 0.0;
}

SceneSpec SceneSpec::defaults() {
  SceneSpec s;
  const std::array<double, 3> leaf{0.28, 0.46, 0.22};
  const std::array<double, 4> leaf_ms{0.09, 0.05, 0.22, 0.42};
  s.classes = {
      {"species_spotted", leaf, leaf_ms, TextureKind::spotted, 0.12, {9.0, 14.0}},
      {"species_striped", leaf, leaf_ms, TextureKind::striped, 0.12, {9.0, 14.0}},
      {"species_jagged", leaf, leaf_ms, TextureKind::jagged, 0.12, {9.0, 14.0}},
      {"background_vegetation", {0.18, 0.32, 0.14}, {0.07, 0.04, 0.16, 0.30}, TextureKind::smooth, 0.0, {1.0, 1.0}},
      {"bare_ground", {0.55, 0.45, 0.35}, {0.16, 0.20, 0.24, 0.26}, TextureKind::smooth, 0.0, {0.0, 0.0}},
  };
  s.background = "background_vegetation";
  return s;
}

std::size_t SceneSpec::class_index(const std::string& name) const {
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i].name == name) return i;
  throw ValidationError("scene spec has no class '" + name + "'");
}

void SceneSpec::validate() const {
  if (width < 16 || height < 16) throw ValidationError("scene spec: width and height must be at least 16");
  if (!(pixel_size > 0.0)) throw ValidationError("scene spec: pixel_size must be positive");
  if (!(ms_factor >= 1.0) || !(dsm_factor >= 1.0)) throw ValidationError("scene spec: ms_factor and dsm_factor must be >= 1");
  if (classes.size() < 2) throw ValidationError("scene spec: at least 2 classes are required");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const auto& c = classes[i];
    if (c.name.empty()) throw ValidationError("scene spec: classes[" + std::to_string(i) + "].name is empty");
    for (std::size_t j = 0; j < i; ++j)
      if (classes[j].name == c.name) throw ValidationError("scene spec: duplicate class '" + c.name + "'");
    if (!(c.amplitude >= 0.0)) throw ValidationError("scene spec: class '" + c.name + "' amplitude must be >= 0");
    for (double v : c.rgb)
      if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("scene spec: class '" + c.name + "' rgb must be in [0,1]");
    if (!(c.height[0] >= 0.0 && c.height[1] >= c.height[0]))
      throw ValidationError("scene spec: class '" + c.name + "' height range invalid");
  }
  class_index(background);
  if (!(radius[0] > 0.0 && radius[1] >= radius[0])) throw ValidationError("scene spec: radius range invalid");
  if (radius[0] < 2.0 * pixel_size) throw ValidationError("scene spec: crowns must span several pixels");
  if (!(noise_sigma >= 0.0)) throw ValidationError("scene spec: noise_sigma must be >= 0");
}

std::string scene_spec_json(const SceneSpec& s) {
  nlohmann::ordered_json j;
  j["width"] = s.width;
  j["height"] = s.height;
  j["pixel_size"] = s.pixel_size;
  j["ms_factor"] = s.ms_factor;
  j["dsm_factor"] = s.dsm_factor;
  j["origin"] = {s.origin_x, s.origin_y};
  j["background"] = s.background;
  j["crowns_per_class"] = s.crowns_per_class;
  j["radius_range"] = s.radius;
  j["noise_sigma"] = s.noise_sigma;
  j["ground_slope"] = s.ground_slope;
  j["seed"] = s.seed;
  auto& classes = j["classes"] = nlohmann::ordered_json::array();
  for (const auto& c : s.classes)
    classes.push_back({{"name", c.name},
                       {"rgb", c.rgb},
                       {"ms", c.ms},
                       {"texture", to_string(c.texture)},
                       {"amplitude", c.amplitude},
                       {"height_range", c.height}});
  return j.dump(1) + "\n";
}

SceneSpec parse_scene_spec(const std::string& text, const std::string& origin) {
  SceneSpec s;
  try {
    const auto j = nlohmann::json::parse(text);
    s.width = j.value("width", s.width);
    s.height = j.value("height", s.height);
    s.pixel_size = j.value("pixel_size", s.pixel_size);
    s.ms_factor = j.value("ms_factor", s.ms_factor);
    s.dsm_factor = j.value("dsm_factor", s.dsm_factor);
    const auto o = read_pair(j, "origin", {s.origin_x, s.origin_y});
    s.origin_x = o[0];
    s.origin_y = o[1];
    s.crowns_per_class = j.value("crowns_per_class", s.crowns_per_class);
    s.radius = read_pair(j, "radius_range", s.radius);
    s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
    s.ground_slope = j.value("ground_slope", s.ground_slope);
    s.seed = j.value("seed", s.seed);
    if (j.contains("classes")) {
      for (const auto& c : j.at("classes")) {
        SynthClass k;
        k.name = c.at("name").get<std::string>();
        const auto rgb = c.at("rgb").get<std::vector<double>>();
        const auto ms = c.at("ms").get<std::vector<double>>();
        if (rgb.size() != 3 || ms.size() != 4) throw ValidationError(origin + ": class '" + k.name + "' needs rgb[3] and ms[4]");
        std::copy(rgb.begin(), rgb.end(), k.rgb.begin());
        std::copy(ms.begin(), ms.end(), k.ms.begin());
        k.texture = texture_from_string(c.value("texture", std::string("smooth")));
        k.amplitude = c.value("amplitude", 0.0);
        k.height = read_pair(c, "height_range", {0.0, 0.0});
        s.classes.push_back(std::move(k));
      }
      s.background = j.at("background").get<std::string>();
    } else {
      const auto d = SceneSpec::defaults();
      s.classes = d.classes;
      s.background = j.value("background", d.background);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(origin + ": " + e.what());
  }
  s.validate();
  return s;
}

SceneSpec read_scene_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene_spec(ss.str(), path);
}

Scene generate_scene(const SceneSpec& spec) {
  spec.validate();
  Scene scene;
  scene.spec = spec;
  const std::size_t w = spec.width, h = spec.height, k = spec.classes.size();
  const std::size_t bg = spec.class_index(spec.background);
  scene.rgb_geo = {spec.origin_x, spec.origin_y, spec.pixel_size, spec.pixel_size};

  // Crown placement.
  std::mt19937_64 rng(mix_seed(spec.seed, 1));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Blob> blobs;
  const double margin = 2.0;
  for (std::size_t round = 0; round < spec.crowns_per_class; ++round)
    for (std::size_t c = 0; c < k; ++c) {
      Blob b{};
      b.cls = c;
      b.radius = (spec.radius[0] + (spec.radius[1] - spec.radius[0]) * unit(rng)) / spec.pixel_size;
      b.amp = {0.10 * unit(rng), 0.06 * unit(rng)};
      b.phase = {2.0 * std::numbers::pi * unit(rng), 2.0 * std::numbers::pi * unit(rng)};
      b.angle = std::numbers::pi * unit(rng);
      const auto& hr = spec.classes[c].height;
      b.cap = hr[0] + (hr[1] - hr[0]) * unit(rng);
      b.seed = rng();
      const double rmax = b.max_radius();
      if (2.0 * (rmax + margin) >= static_cast<double>(std::min(w, h)))
        throw ValidationError("crown radius too large for the scene; use smaller crowns");
      bool placed = false;
      for (std::size_t attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
        b.cx = rmax + margin + unit(rng) * (static_cast<double>(w) - 2.0 * (rmax + margin));
        b.cy = rmax + margin + unit(rng) * (static_cast<double>(h) - 2.0 * (rmax + margin));
        placed = std::all_of(blobs.begin(), blobs.end(), [&](const Blob& o) {
          return std::hypot(o.cx - b.cx, o.cy - b.cy) > rmax + o.max_radius() + margin;
        });
      }
      if (!placed)
        throw ValidationError("could not place crown " + std::to_string(blobs.size() + 1) + " in " +
                              std::to_string(kMaxAttempts) + " attempts; request fewer or smaller crowns");
      blobs.push_back(b);
    }

  // Outlines in map units; rendering uses the same polygons.
  for (std::size_t i = 0; i < blobs.size(); ++i) {
    const Blob& b = blobs[i];
    Polygon p;
    p.id = std::to_string(i + 1);
    p.label = spec.classes[b.cls].name;
    p.source = "synthetic";
    for (std::size_t v = 0; v <= kOutlineVertices; ++v) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(v % kOutlineVertices) / kOutlineVertices;
      const double r = b.radius_at(t);
      const double px = b.cx + r * std::cos(t), py = b.cy + r * std::sin(t);
      p.ring.push_back({spec.origin_x + px * spec.pixel_size, spec.origin_y - py * spec.pixel_size});
    }
    scene.crowns.push_back(std::move(p));
  }

  // Truth raster and the crown of every RGB pixel.
  const auto crown_of = rasterize_polygons(scene.crowns, scene.rgb_geo, w, h);
  scene.truth.assign(w * h, static_cast<int>(bg));
  for (std::size_t p = 0; p < w * h; ++p)
    if (crown_of[p] >= 0) scene.truth[p] = static_cast<int>(blobs[static_cast<std::size_t>(crown_of[p])].cls);
  scene.cover.assign(k, 0.0);
  for (int c : scene.truth) scene.cover[static_cast<std::size_t>(c)] += 1.0;
  for (double& v : scene.cover) v /= static_cast<double>(w * h);

  // RGB with textures and noise.
  scene.rgb = Raster(w, h, {BandRole::red, BandRole::green, BandRole::blue});
  std::mt19937_64 noise_rng(mix_seed(spec.seed, 2));
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t p = y * w + x;
      const auto cls = static_cast<std::size_t>(scene.truth[p]);
      const auto& kc = spec.classes[cls];
      double m = 0.0;
      if (crown_of[p] >= 0) {
        const Blob& b = blobs[static_cast<std::size_t>(crown_of[p])];
        m = texture_value(kc.texture, static_cast<double>(x) - b.cx, static_cast<double>(y) - b.cy, b.angle, b.seed);
      } else {
        m = texture_value(kc.texture, static_cast<double>(x), static_cast<double>(y), 0.0, spec.seed);
      }
      for (std::size_t band = 0; band < 3; ++band) {
        double v = kc.rgb[band] + kc.amplitude * m;
        if (spec.noise_sigma > 0.0) v += spec.noise_sigma * noise(noise_rng);
        scene.rgb.band(band)[p] = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }

  // MS: coarser grid sampled at cell centres, no texture.
  const double ms_px = spec.pixel_size * spec.ms_factor;
  const auto mw = static_cast<std::size_t>(std::ceil(static_cast<double>(w) / spec.ms_factor));
  const auto mh = static_cast<std::size_t>(std::ceil(static_cast<double>(h) / spec.ms_factor));
  scene.ms_geo = {spec.origin_x, spec.origin_y, ms_px, ms_px};
  scene.ms = Raster(mw, mh, {BandRole::ms_green, BandRole::ms_red, BandRole::ms_rededge, BandRole::ms_nir});
  std::mt19937_64 ms_rng(mix_seed(spec.seed, 3));
  for (std::size_t y = 0; y < mh; ++y)
    for (std::size_t x = 0; x < mw; ++x) {
      const auto sx = std::min(w - 1, static_cast<std::size_t>((static_cast<double>(x) + 0.5) * spec.ms_factor));
      const auto sy = std::min(h - 1, static_cast<std::size_t>((static_cast<double>(y) + 0.5) * spec.ms_factor));
      const auto& kc = spec.classes[static_cast<std::size_t>(scene.truth[sy * w + sx])];
      for (std::size_t band = 0; band < 4; ++band) {
        double v = kc.ms[band];
        if (spec.noise_sigma > 0.0) v += 0.5 * spec.noise_sigma * noise(ms_rng);
        scene.ms.band(band)[y * mw + x] = static_cast<float>(std::max(0.0, v));
      }
    }

  // DSM: sloping ground plus hemispherical caps.
  const double dsm_px = spec.pixel_size * spec.dsm_factor;
  const auto dw = static_cast<std::size_t>(std::ceil(static_cast<double>(w) / spec.dsm_factor));
  const auto dh = static_cast<std::size_t>(std::ceil(static_cast<double>(h) / spec.dsm_factor));
  scene.dsm_geo = {spec.origin_x, spec.origin_y, dsm_px, dsm_px};
  scene.dsm = Raster(dw, dh, {BandRole::dsm_height_m});
  std::mt19937_64 dsm_rng(mix_seed(spec.seed, 4));
  const auto& bg_height = spec.classes[bg].height;
  for (std::size_t y = 0; y < dh; ++y)
    for (std::size_t x = 0; x < dw; ++x) {
      const double mx = (static_cast<double>(x) + 0.5) * dsm_px;
      const double px = mx / spec.pixel_size;
      const double py = (static_cast<double>(y) + 0.5) * dsm_px / spec.pixel_size;
      double z = 20.0 + spec.ground_slope * mx;
      const auto sx = std::min(w - 1, static_cast<std::size_t>(px));
      const auto sy = std::min(h - 1, static_cast<std::size_t>(py));
      const std::int32_t crown = crown_of[sy * w + sx];
      if (crown >= 0 && blobs[static_cast<std::size_t>(crown)].cls != bg) {
        const Blob& b = blobs[static_cast<std::size_t>(crown)];
        const double dx = px - b.cx, dy = py - b.cy;
        const double r = b.radius_at(std::atan2(dy, dx));
        const double t = std::min(1.0, std::hypot(dx, dy) / r);
        z += b.cap * std::sqrt(1.0 - t * t);
      } else {
        z += 0.5 * (bg_height[0] + bg_height[1]);
      }
      if (spec.noise_sigma > 0.0) z += 2.0 * spec.noise_sigma * noise(dsm_rng);
      scene.dsm.band(0)[y * dw + x] = static_cast<float>(z);
    }
  return scene;
}

void write_scene(const Scene& scene, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path d(dir);
  write_fbr(scene.rgb, scene.rgb_geo, (d / "rgb.fbr").string());
  write_fbr(scene.ms, scene.ms_geo, (d / "ms.fbr").string());
  write_fbr(scene.dsm, scene.dsm_geo, (d / "dsm.fbr").string());
  write_polygons(scene.crowns, (d / "crowns.geojson").string());
  std::vector<float> truth(scene.truth.begin(), scene.truth.end());
  write_fbr(Raster(scene.spec.width, scene.spec.height, {BandRole::derived}, std::move(truth)), scene.rgb_geo,
            (d / "truth.fbr").string());

  nlohmann::ordered_json legend;
  legend["format"] = "canopy-class-legend";
  legend["masked_code"] = -1;
  auto& classes = legend["classes"] = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < scene.spec.classes.size(); ++c)
    classes.push_back({{"code", c}, {"name", scene.spec.classes[c].name}});
  std::ofstream lf((d / "truth_legend.json").string(), std::ios::trunc);
  lf << legend.dump(1) << '\n';

  auto j = nlohmann::ordered_json::parse(scene_spec_json(scene.spec));
  nlohmann::ordered_json cover;
  for (std::size_t c = 0; c < scene.cover.size(); ++c) cover[scene.spec.classes[c].name] = scene.cover[c];
  j["true_cover"] = cover;
  std::ofstream sf((d / "scene.json").string(), std::ios::trunc);
  if (!sf) throw Error("cannot create scene.json in '" + dir + "'");
  sf << j.dump(1) << '\n';
}

}  // namespace canopy
