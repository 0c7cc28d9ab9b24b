#include "canopy/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "canopy/error.hpp"
#include "canopy/hash.hpp"
#include "canopy/indices.hpp"
#include "canopy/parallel.hpp"
#include "canopy/stats.hpp"

namespace canopy {

namespace {

constexpr std::array<std::string_view, 3> kRgbBandNames{"red", "green", "blue"};
constexpr std::array<std::string_view, 4> kMsBandNames{"green", "red", "rededge", "nir"};
constexpr std::array<std::string_view, 3> kHsvBandNames{"hue", "saturation", "value"};
constexpr std::array<int, 3> kOffsets{1, 2, 3};

// Collects manifest entries and, when computing, the matching values.
class Emitter {
 public:
  Emitter(std::vector<ManifestEntry>* entries, std::vector<double>* values) : entries_(entries), values_(values) {}

  bool computing() const { return values_ != nullptr; }

  void push(const ManifestEntry& e, double v) {
    if (entries_) entries_->push_back(e);
    if (values_) values_->push_back(std::isfinite(v) ? v : 0.0);
  }

  bool degenerate = false;

 private:
  std::vector<ManifestEntry>* entries_;
  std::vector<double>* values_;
};

struct BandSamples {
  std::string name;
  const std::vector<double>* values;  // null in manifest-only mode
};

void spectral_block(Emitter& em, Imagery imagery, const std::string& source, const std::vector<BandSamples>& bands,
                    StatsVariant variant, bool with_ratio) {
  const auto& stat_names = spectral_stat_names(variant);
  std::vector<SpectralStats> stats(bands.size());
  double mean_sum = 0.0;
  if (em.computing()) {
    for (std::size_t b = 0; b < bands.size(); ++b) {
      stats[b] = spectral_stats(*bands[b].values, variant);
      em.degenerate = em.degenerate || stats[b].degenerate;
      if (with_ratio) mean_sum += stats[b].get("mean", variant);
    }
  }
  for (std::size_t b = 0; b < bands.size(); ++b) {
    for (std::size_t s = 0; s < stat_names.size(); ++s)
      em.push({imagery, FeatureFamily::spectral, source, "stats", bands[b].name, stat_names[s], 0},
              em.computing() ? stats[b].values[s] : 0.0);
    if (with_ratio) {
      double ratio = 0.0;
      if (em.computing()) {
        const double m = stats[b].get("mean", variant);
        if (std::abs(mean_sum) > 1e-12)
          ratio = m / mean_sum;
        else
          em.degenerate = true;
      }
      em.push({imagery, FeatureFamily::spectral, source, "ratio", bands[b].name, "ratio", 0}, ratio);
    }
  }
}

LevelImage quantize_image(const Image& img, const Mask& mask) {
  std::vector<double> region;
  region.reserve(img.values.size());
  for (std::size_t i = 0; i < img.values.size(); ++i)
    if (mask_allows(mask, i)) region.push_back(img.values[i]);
  const auto range = quantize_range(region);
  LevelImage out{img.width, img.height, std::vector<int>(img.values.size())};
  for (std::size_t i = 0; i < img.values.size(); ++i) out.levels[i] = quantize_value(img.values[i], range);
  return out;
}

Image levels_as_image(const LevelImage& lv) {
  Image out(lv.width, lv.height);
  for (std::size_t i = 0; i < lv.levels.size(); ++i) out.values[i] = lv.levels[i];
  return out;
}

// GLCM, LBP, Laws and autocorrelation for one greyscale image. `quantized_lbp`
// selects the quantized image for LBP (DSM); otherwise LBP runs on floats.
void texture_block(Emitter& em, Imagery imagery, const std::string& source, const std::string& band,
                   const Image* img, const Mask* mask, bool quantized_lbp) {
  const auto tex = FeatureFamily::textural;
  LevelImage levels;
  if (em.computing()) levels = quantize_image(*img, *mask);

  const auto hnames = haralick_names();
  for (int d : kOffsets) {
    GlcmFeatures g;
    if (em.computing()) {
      g = glcm_features(levels, *mask, d);
      em.degenerate = em.degenerate || g.degenerate;
    }
    for (std::size_t s = 0; s < kHaralickCount; ++s) {
      em.push({imagery, tex, source, "glcm", band, std::string(hnames[s]) + "_mean", d}, g.mean[s]);
      em.push({imagery, tex, source, "glcm", band, std::string(hnames[s]) + "_range", d}, g.range[s]);
    }
  }

  Image lbp_input;
  if (em.computing() && quantized_lbp) lbp_input = levels_as_image(levels);
  for (int r : kOffsets) {
    LbpHistogram h;
    if (em.computing()) {
      h = lbp_histogram(quantized_lbp ? lbp_input : *img, *mask, r);
      em.degenerate = em.degenerate || h.degenerate;
    } else {
      h.bins.assign(lbp_bin_count(r), 0.0);
    }
    for (std::size_t b = 0; b < h.bins.size(); ++b) {
      const std::string bin = b + 1 == h.bins.size() ? "nonuniform" : "u" + std::to_string(b);
      em.push({imagery, tex, source, "lbp", band, bin, r}, h.bins[b]);
    }
  }

  LawsFeatures laws;
  if (em.computing()) {
    laws = laws_features(*img, *mask);
    em.degenerate = em.degenerate || laws.degenerate;
  }
  const auto lnames = laws_names();
  for (std::size_t k = 0; k < kLawsCount; ++k) {
    em.push({imagery, tex, source, "laws", band, std::string(lnames[k]) + "_mean", 0}, laws.mean[k]);
    em.push({imagery, tex, source, "laws", band, std::string(lnames[k]) + "_std", 0}, laws.std[k]);
  }

  for (int d : kOffsets) {
    AutocorrFeatures a;
    if (em.computing()) {
      a = autocorrelation_features(*img, *mask, d);
      em.degenerate = em.degenerate || a.degenerate;
    }
    em.push({imagery, tex, source, "acor", band, "mean", d}, a.mean);
    em.push({imagery, tex, source, "acor", band, "rng", d}, a.range);
  }
}

std::vector<double> pick(const std::vector<double>& v, const std::vector<std::size_t>& idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(v[i]);
  return out;
}

void require_nonempty(const std::vector<double>& v, const char* source) {
  if (v.empty()) throw ValidationError(std::string("region has no ") + source + " pixels");
}

// Shared traversal: manifest-only when region == nullptr.
void visit_features(const RegionImagery* region, const FeatureConfig& cfg, Emitter& em) {
  cfg.validate();
  const bool compute = region != nullptr;
  if (compute) {
    if (cfg.rgb) require_nonempty(region->rgb[0], "RGB");
    if (cfg.ms) require_nonempty(region->ms[0], "MS");
    if (cfg.dsm) require_nonempty(region->dsm, "DSM");
  }

  if (cfg.spectral) {
    if (cfg.rgb) {
      std::vector<BandSamples> rgb;
      for (std::size_t b = 0; b < 3; ++b)
        rgb.push_back({std::string(kRgbBandNames[b]), compute ? &region->rgb[b] : nullptr});
      spectral_block(em, Imagery::rgb, "rgb", rgb, StatsVariant::standard, true);

      std::array<std::vector<double>, 3> top;
      if (compute) {
        bool passthrough = false;
        const auto keep = brightness_filter_top50(region->rgb, &passthrough);
        em.degenerate = em.degenerate || passthrough;
        for (std::size_t b = 0; b < 3; ++b) top[b] = pick(region->rgb[b], keep);
      }
      std::vector<BandSamples> top_bands;
      for (std::size_t b = 0; b < 3; ++b)
        top_bands.push_back({std::string(kRgbBandNames[b]), compute ? &top[b] : nullptr});
      spectral_block(em, Imagery::rgb, "top", top_bands, StatsVariant::standard, true);

      std::vector<DerivedBand> ind;
      if (compute) {
        ind = vegetation_indices({region->rgb[0], region->rgb[1], region->rgb[2], {}, {}}, ImageryKind::rgb);
      } else {
        for (const auto& d : indices_for(ImageryKind::rgb)) ind.push_back({std::string(d.name), {}});
      }
      std::vector<BandSamples> ind_bands;
      for (const auto& b : ind) ind_bands.push_back({b.name, compute ? &b.values : nullptr});
      spectral_block(em, Imagery::rgb, "ind", ind_bands, StatsVariant::standard, true);

      std::array<std::vector<double>, 3> hsv;
      if (compute) {
        const std::size_t n = region->rgb[0].size();
        for (auto& h : hsv) h.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
          const Hsv px = rgb_to_hsv(region->rgb[0][i], region->rgb[1][i], region->rgb[2][i]);
          hsv[0][i] = px.h;
          hsv[1][i] = px.s;
          hsv[2][i] = px.v;
        }
      }
      std::vector<BandSamples> hsv_bands;
      for (std::size_t b = 0; b < 3; ++b)
        hsv_bands.push_back({std::string(kHsvBandNames[b]), compute ? &hsv[b] : nullptr});
      spectral_block(em, Imagery::rgb, "hsv", hsv_bands, StatsVariant::standard, false);
    }
    if (cfg.ms) {
      std::vector<BandSamples> ms;
      for (std::size_t b = 0; b < 4; ++b)
        ms.push_back({std::string(kMsBandNames[b]), compute ? &region->ms[b] : nullptr});
      spectral_block(em, Imagery::ms, "ms", ms, StatsVariant::standard, true);

      std::vector<DerivedBand> ind;
      if (compute) {
        ind = vegetation_indices({region->ms[1], region->ms[0], {}, region->ms[2], region->ms[3]}, ImageryKind::ms);
      } else {
        for (const auto& d : indices_for(ImageryKind::ms)) ind.push_back({std::string(d.name), {}});
      }
      std::vector<BandSamples> ind_bands;
      for (const auto& b : ind) ind_bands.push_back({b.name, compute ? &b.values : nullptr});
      spectral_block(em, Imagery::ms, "ind", ind_bands, StatsVariant::standard, true);
    }
    if (cfg.dsm) {
      spectral_block(em, Imagery::dsm, "dsm", {{"height", compute ? &region->dsm : nullptr}}, StatsVariant::dsm, false);
    }
  }

  if (cfg.textural) {
    if (cfg.rgb)
      texture_block(em, Imagery::rgb, "grey", "grey", compute ? &region->grey : nullptr,
                    compute ? &region->grey_mask : nullptr, false);
    if (cfg.ms)
      for (std::size_t b = 0; b < 4; ++b)
        texture_block(em, Imagery::ms, "ms", std::string(kMsBandNames[b]), compute ? &region->ms_crops[b] : nullptr,
                      compute ? &region->ms_mask : nullptr, false);
    if (cfg.dsm)
      texture_block(em, Imagery::dsm, "dsm", "height", compute ? &region->dsm_crop : nullptr,
                    compute ? &region->dsm_mask : nullptr, true);
  }
}

struct Crop {
  std::size_t x0 = 0, y0 = 0, w = 0, h = 0;
};

Crop bbox_of(std::span<const std::uint32_t> pixels, std::size_t width) {
  std::size_t x0 = SIZE_MAX, y0 = SIZE_MAX, x1 = 0, y1 = 0;
  for (std::uint32_t p : pixels) {
    const std::size_t x = p % width, y = p / width;
    x0 = std::min(x0, x);
    y0 = std::min(y0, y);
    x1 = std::max(x1, x);
    y1 = std::max(y1, y);
  }
  if (pixels.empty()) return {};
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

// Maps RGB pixel centres to the cells of another grid, deduplicated and sorted.
std::vector<std::uint32_t> map_cells(std::span<const std::uint32_t> rgb_pixels, std::size_t rgb_width,
                                     const GeoTransform& rgb_geo, const Raster& target, const GeoTransform& target_geo) {
  std::vector<std::uint32_t> cells;
  cells.reserve(rgb_pixels.size());
  for (std::uint32_t p : rgb_pixels) {
    const double x = rgb_geo.center_x(static_cast<double>(p % rgb_width));
    const double y = rgb_geo.center_y(static_cast<double>(p / rgb_width));
    const double c = std::floor(target_geo.col_of(x));
    const double r = std::floor(target_geo.row_of(y));
    if (c < 0 || r < 0 || c >= static_cast<double>(target.width()) || r >= static_cast<double>(target.height()))
      continue;
    cells.push_back(static_cast<std::uint32_t>(static_cast<std::size_t>(r) * target.width() + static_cast<std::size_t>(c)));
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

void crop_bands(const Raster& raster, std::span<const std::uint32_t> cells, std::span<const std::size_t> bands,
                std::span<Image> crops, Mask& mask, std::span<std::vector<double>> samples) {
  std::vector<std::uint32_t> valid;
  valid.reserve(cells.size());
  for (std::uint32_t c : cells)
    if (!raster.pixel_is_nodata(c)) valid.push_back(c);
  const Crop box = bbox_of(valid, raster.width());
  mask.assign(box.w * box.h, 0);
  for (std::size_t k = 0; k < bands.size(); ++k) {
    crops[k] = Image(box.w, box.h);
    const auto band = raster.band(bands[k]);
    for (std::size_t y = 0; y < box.h; ++y)
      for (std::size_t x = 0; x < box.w; ++x)
        crops[k].at(x, y) = band[(box.y0 + y) * raster.width() + box.x0 + x];
    samples[k].clear();
    samples[k].reserve(valid.size());
    for (std::uint32_t c : valid) samples[k].push_back(band[c]);
  }
  for (std::uint32_t c : valid) mask[(c / raster.width() - box.y0) * box.w + (c % raster.width() - box.x0)] = 1;
}

}  // namespace

std::string_view to_string(Imagery s) {
  switch (s) {
    case Imagery::rgb: return "rgb";
    case Imagery::ms: return "ms";
    case Imagery::dsm: return "dsm";
  }
  return "rgb";
}

std::string_view to_string(FeatureFamily f) { return f == FeatureFamily::spectral ? "spectral" : "textural"; }

Imagery imagery_from_string(std::string_view s) {
  if (s == "rgb") return Imagery::rgb;
  if (s == "ms") return Imagery::ms;
  if (s == "dsm") return Imagery::dsm;
  throw ValidationError("unknown imagery source '" + std::string(s) + "'");
}

FeatureFamily family_from_string(std::string_view s) {
  if (s == "spectral") return FeatureFamily::spectral;
  if (s == "textural") return FeatureFamily::textural;
  throw ValidationError("unknown feature family '" + std::string(s) + "'");
}

void FeatureConfig::validate() const {
  if (!rgb && !ms && !dsm) throw ValidationError("feature config needs at least one imagery source");
  if (!spectral && !textural) throw ValidationError("feature config needs at least one feature family");
}

std::string FeatureConfig::label() const {
  std::string out;
  auto add = [&](bool on, const char* name, std::string& s) {
    if (!on) return;
    if (!s.empty() && s.back() != '/') s += '+';
    s += name;
  };
  add(rgb, "rgb", out);
  add(ms, "ms", out);
  add(dsm, "dsm", out);
  out += '/';
  add(spectral, "spectral", out);
  add(textural, "textural", out);
  return out;
}

std::string ManifestEntry::name() const {
  // GRVI, mGRVI and NegExR exist for both RGB and MS indices
  std::string n = source == "ind" ? std::string(to_string(imagery)) + "_ind_" : source + "_";
  if (method != "stats" && method != "ratio") n += method + "_";
  n += band + "_" + statistic;
  if (method == "lbp")
    n += "_r" + std::to_string(offset);
  else if (offset > 0)
    n += "_d" + std::to_string(offset);
  return n;
}

std::vector<std::string> FeatureManifest::names() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.name());
  return out;
}

std::string FeatureManifest::hash() const {
  std::uint64_t h = kFnvOffset;
  for (const auto& e : entries) {
    h = fnv1a64(e.name(), h);
    h = fnv1a64("\n", h);
  }
  return hex64(h);
}

std::vector<std::size_t> FeatureManifest::select(const FeatureConfig& cfg) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (cfg.uses(entries[i].imagery) && cfg.uses(entries[i].family)) out.push_back(i);
  return out;
}

FeatureManifest FeatureManifest::subset(std::span<const std::size_t> columns) const {
  FeatureManifest out;
  for (std::size_t c : columns) out.entries.push_back(entries.at(c));
  return out;
}

std::vector<std::pair<std::string, std::size_t>> FeatureManifest::tally() const {
  std::vector<std::pair<std::string, std::size_t>> out;
  for (const auto& e : entries) {
    const std::string key = std::string(to_string(e.imagery)) + ":" + e.source + ":" + e.method;
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& b) { return b.first == key; });
    if (it == out.end())
      out.emplace_back(key, 1);
    else
      ++it->second;
  }
  return out;
}

FeatureManifest build_manifest(const FeatureConfig& cfg) {
  FeatureManifest m;
  Emitter em(&m.entries, nullptr);
  visit_features(nullptr, cfg, em);
  return m;
}

std::vector<std::size_t> brightness_filter_top50(const std::array<std::vector<double>, 3>& rgb, bool* passthrough) {
  const std::size_t n = rgb[0].size();
  std::vector<std::size_t> keep;
  if (n < 2) {
    if (passthrough) *passthrough = true;
    for (std::size_t i = 0; i < n; ++i) keep.push_back(i);
    return keep;
  }
  if (passthrough) *passthrough = false;
  std::vector<double> lightness(n);
  for (std::size_t i = 0; i < n; ++i) lightness[i] = rgb_to_lightness(rgb[0][i], rgb[1][i], rgb[2][i]);
  std::vector<double> sorted = lightness;
  std::sort(sorted.begin(), sorted.end());
  const double median = quantile_sorted(sorted, 0.5);
  for (std::size_t i = 0; i < n; ++i)
    if (lightness[i] >= median) keep.push_back(i);
  return keep;
}

FeatureVector assemble_feature_vector(const RegionImagery& region, const FeatureConfig& cfg) {
  FeatureVector fv;
  Emitter em(nullptr, &fv.values);
  visit_features(&region, cfg, em);
  fv.degenerate = em.degenerate;
  return fv;
}

RegionImagery gather_region(const SceneImagery& scene, std::span<const std::uint32_t> rgb_pixels, std::size_t rgb_width) {
  RegionImagery out;
  if (scene.rgb) {
    const Raster& rgb = *scene.rgb;
    const std::size_t ids[3] = {rgb.band_index(BandRole::red), rgb.band_index(BandRole::green),
                                rgb.band_index(BandRole::blue)};
    std::vector<std::uint32_t> valid;
    for (std::uint32_t p : rgb_pixels)
      if (!rgb.pixel_is_nodata(p)) valid.push_back(p);
    for (std::size_t b = 0; b < 3; ++b) {
      out.rgb[b].reserve(valid.size());
      for (std::uint32_t p : valid) out.rgb[b].push_back(rgb.band(ids[b])[p]);
    }
    const Crop box = bbox_of(valid, rgb.width());
    out.grey = Image(box.w, box.h);
    out.grey_mask.assign(box.w * box.h, 0);
    for (std::size_t y = 0; y < box.h; ++y)
      for (std::size_t x = 0; x < box.w; ++x) {
        const std::size_t p = (box.y0 + y) * rgb.width() + box.x0 + x;
        out.grey.at(x, y) = rgb_to_grey(rgb.band(ids[0])[p], rgb.band(ids[1])[p], rgb.band(ids[2])[p]);
      }
    for (std::uint32_t p : valid) out.grey_mask[(p / rgb.width() - box.y0) * box.w + (p % rgb.width() - box.x0)] = 1;
  }
  if (scene.ms) {
    const Raster& ms = *scene.ms;
    const auto cells = map_cells(rgb_pixels, rgb_width, scene.rgb_geo, ms, scene.ms_geo);
    const std::array<std::size_t, 4> bands{ms.band_index(BandRole::ms_green), ms.band_index(BandRole::ms_red),
                                           ms.band_index(BandRole::ms_rededge), ms.band_index(BandRole::ms_nir)};
    crop_bands(ms, cells, bands, out.ms_crops, out.ms_mask, out.ms);
  }
  if (scene.dsm) {
    const Raster& dsm = *scene.dsm;
    const auto cells = map_cells(rgb_pixels, rgb_width, scene.rgb_geo, dsm, scene.dsm_geo);
    const std::array<std::size_t, 1> bands{dsm.band_index(BandRole::dsm_height_m)};
    std::array<Image, 1> crop;
    std::array<std::vector<double>, 1> samples;
    crop_bands(dsm, cells, bands, crop, out.dsm_mask, samples);
    out.dsm_crop = std::move(crop[0]);
    out.dsm = std::move(samples[0]);
  }
  return out;
}

FeatureTable FeatureTable::select(const FeatureConfig& cfg) const {
  const auto cols = manifest.select(cfg);
  FeatureTable out;
  out.manifest = manifest.subset(cols);
  out.region_ids = region_ids;
  out.degenerate = degenerate;
  out.values = values.select_cols(cols);
  return out;
}

FeatureTable FeatureTable::select_rows(std::span<const std::size_t> rows) const {
  FeatureTable out;
  out.manifest = manifest;
  for (std::size_t r : rows) {
    out.region_ids.push_back(region_ids.at(r));
    out.degenerate.push_back(degenerate.at(r));
  }
  out.values = values.select_rows(rows);
  return out;
}

std::optional<std::size_t> FeatureTable::row_of(std::uint32_t region_id) const {
  const auto it = std::lower_bound(region_ids.begin(), region_ids.end(), region_id);
  if (it != region_ids.end() && *it == region_id) return static_cast<std::size_t>(it - region_ids.begin());
  for (std::size_t i = 0; i < region_ids.size(); ++i)
    if (region_ids[i] == region_id) return i;
  return std::nullopt;
}

FeatureTable extract_features(const SceneImagery& scene, const SuperpixelPartition& partition, const FeatureConfig& cfg) {
  cfg.validate();
  if (!scene.rgb) throw ValidationError("feature extraction needs the RGB raster (partition grid)");
  if (scene.rgb->width() != partition.width || scene.rgb->height() != partition.height)
    throw ValidationError("partition and RGB raster dimensions differ");
  if (cfg.ms && !scene.ms) throw ValidationError("feature config uses MS imagery but none was supplied");
  if (cfg.dsm && !scene.dsm) throw ValidationError("feature config uses DSM imagery but none was supplied");
  SceneImagery used = scene;
  if (!cfg.ms) used.ms = nullptr;
  if (!cfg.dsm) used.dsm = nullptr;

  FeatureTable table;
  table.manifest = build_manifest(cfg);
  const std::size_t regions = partition.region_count();
  const auto pixels = partition.region_pixels();
  std::vector<FeatureVector> rows(regions);
  parallel_for(regions, [&](std::size_t r) {
    const auto region = gather_region(used, pixels[r], partition.width);
    rows[r] = assemble_feature_vector(region, cfg);
  });
  table.values = Matrix(regions, table.manifest.size());
  for (std::size_t r = 0; r < regions; ++r) {
    table.region_ids.push_back(static_cast<std::uint32_t>(r));
    table.degenerate.push_back(rows[r].degenerate ? 1 : 0);
    std::copy(rows[r].values.begin(), rows[r].values.end(), table.values.row(r).begin());
  }
  return table;
}

void write_feature_table(const FeatureTable& table, const std::string& csv_path, const std::string& manifest_path) {
  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw Error("cannot create '" + csv_path + "'");
  csv << "region_id,degenerate";
  for (const auto& n : table.manifest.names()) csv << ',' << n;
  csv << '\n';
  char buf[32];
  for (std::size_t r = 0; r < table.values.rows(); ++r) {
    csv << table.region_ids[r] << ',' << static_cast<int>(table.degenerate[r]);
    for (double v : table.values.row(r)) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      csv << ',' << buf;
    }
    csv << '\n';
  }

  nlohmann::ordered_json j;
  j["format"] = "canopy-feature-manifest";
  j["version"] = 1;
  j["hash"] = table.manifest.hash();
  j["total"] = table.manifest.size();
  auto& blocks = j["tally"] = nlohmann::ordered_json::array();
  for (const auto& [key, count] : table.manifest.tally()) blocks.push_back({{"block", key}, {"count", count}});
  auto& entries = j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : table.manifest.entries)
    entries.push_back({{"name", e.name()},
                       {"imagery", to_string(e.imagery)},
                       {"family", to_string(e.family)},
                       {"source", e.source},
                       {"method", e.method},
                       {"band", e.band},
                       {"statistic", e.statistic},
                       {"offset", e.offset}});
  std::ofstream mf(manifest_path, std::ios::trunc);
  if (!mf) throw Error("cannot create '" + manifest_path + "'");
  mf << j.dump(1) << '\n';
}

FeatureTable read_feature_table(const std::string& csv_path, const std::string& manifest_path) {
  std::ifstream mf(manifest_path);
  if (!mf) throw ValidationError("cannot open '" + manifest_path + "'");
  FeatureTable table;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(mf);
    for (const auto& e : j.at("entries"))
      table.manifest.entries.push_back({imagery_from_string(e.at("imagery").get<std::string>()),
                                        family_from_string(e.at("family").get<std::string>()),
                                        e.at("source").get<std::string>(), e.at("method").get<std::string>(),
                                        e.at("band").get<std::string>(), e.at("statistic").get<std::string>(),
                                        e.at("offset").get<int>()});
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("feature manifest: ") + e.what());
  }
  if (table.manifest.hash() != j.value("hash", std::string{}))
    throw FormatError("feature manifest hash does not match its entries");

  std::ifstream csv(csv_path);
  if (!csv) throw ValidationError("cannot open '" + csv_path + "'");
  std::string line;
  std::getline(csv, line);
  {
    std::stringstream header(line);
    std::string cell;
    std::vector<std::string> cols;
    while (std::getline(header, cell, ',')) cols.push_back(cell);
    const auto names = table.manifest.names();
    if (cols.size() != names.size() + 2 || cols[0] != "region_id" || cols[1] != "degenerate" ||
        !std::equal(names.begin(), names.end(), cols.begin() + 2))
      throw ManifestMismatch("feature CSV header does not match manifest '" + manifest_path + "'");
  }
  const std::size_t ncol = table.manifest.size();
  std::vector<double> row(ncol);
  std::size_t line_no = 1;
  while (std::getline(csv, line)) {
    ++line_no;
    if (line.empty()) continue;
    const char* p = line.c_str();
    char* end = nullptr;
    const unsigned long id = std::strtoul(p, &end, 10);
    if (*end != ',') throw FormatError("feature CSV line " + std::to_string(line_no) + ": bad region id");
    p = end + 1;
    const long degen = std::strtol(p, &end, 10);
    for (std::size_t c = 0; c < ncol; ++c) {
      if (*end != ',') throw FormatError("feature CSV line " + std::to_string(line_no) + ": too few columns");
      p = end + 1;
      row[c] = std::strtod(p, &end);
      if (end == p) throw FormatError("feature CSV line " + std::to_string(line_no) + ": bad number");
    }
    if (*end != '\0') throw FormatError("feature CSV line " + std::to_string(line_no) + ": too many columns");
    table.region_ids.push_back(static_cast<std::uint32_t>(id));
    table.degenerate.push_back(degen ? 1 : 0);
    table.values.append_row(row);
  }
  if (table.values.rows() == 0) table.values = Matrix(0, ncol);
  return table;
}

}  // namespace canopy
