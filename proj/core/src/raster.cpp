#include "canopy/raster.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "canopy/error.hpp"

namespace canopy {

namespace {

constexpr std::array<std::pair<BandRole, std::string_view>, 14> kRoleNames{{
    {BandRole::red, "red"},
    {BandRole::green, "green"},
    {BandRole::blue, "blue"},
    {BandRole::ms_green, "ms_green"},
    {BandRole::ms_red, "ms_red"},
    {BandRole::ms_rededge, "ms_rededge"},
    {BandRole::ms_nir, "ms_nir"},
    {BandRole::dsm_height_m, "dsm_height_m"},
    {BandRole::greyscale, "greyscale"},
    {BandRole::hue, "hue"},
    {BandRole::saturation, "saturation"},
    {BandRole::value, "value"},
    {BandRole::lightness, "lightness"},
    {BandRole::derived, "derived"},
}};

struct RgbBands {
  std::span<const float> r, g, b;
};

RgbBands rgb_bands(const Raster& rgb) {
  return {rgb.band(rgb.band_index(BandRole::red)), rgb.band(rgb.band_index(BandRole::green)),
          rgb.band(rgb.band_index(BandRole::blue))};
}

double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

}  // namespace

std::string_view to_string(BandRole role) {
  for (const auto& [r, name] : kRoleNames)
    if (r == role) return name;
  return "derived";
}

BandRole band_role_from_string(std::string_view tag) {
  for (const auto& [r, name] : kRoleNames)
    if (name == tag) return r;
  throw ValidationError("unknown band role tag '" + std::string(tag) + "'");
}

void GeoTransform::validate() const {
  if (!(pixel_width > 0.0) || !(pixel_height > 0.0) || !std::isfinite(pixel_width) ||
      !std::isfinite(pixel_height))
    throw ValidationError("geotransform pixel size must be positive");
  if (!std::isfinite(origin_x) || !std::isfinite(origin_y))
    throw ValidationError("geotransform origin must be finite");
}

Raster::Raster(std::size_t width, std::size_t height, std::vector<BandRole> roles,
               std::optional<float> nodata)
    : width_(width),
      height_(height),
      roles_(std::move(roles)),
      data_(width * height * roles_.size(), 0.0f),
      nodata_(nodata) {
  for (std::size_t i = 0; i < roles_.size(); ++i)
    for (std::size_t j = i + 1; j < roles_.size(); ++j)
      if (roles_[i] == roles_[j])
        throw ValidationError("duplicate band role '" + std::string(to_string(roles_[i])) + "'");
}

Raster::Raster(std::size_t width, std::size_t height, std::vector<BandRole> roles,
               std::vector<float> data, std::optional<float> nodata)
    : Raster(width, height, std::move(roles), nodata) {
  if (data.size() != data_.size())
    throw ValidationError("raster data length " + std::to_string(data.size()) + " != " +
                          std::to_string(data_.size()));
  data_ = std::move(data);
}

std::span<const float> Raster::band(std::size_t b) const {
  return std::span<const float>(data_).subspan(b * pixel_count(), pixel_count());
}

std::span<float> Raster::band(std::size_t b) {
  return std::span<float>(data_).subspan(b * pixel_count(), pixel_count());
}

std::optional<std::size_t> Raster::find_role(BandRole role) const {
  for (std::size_t i = 0; i < roles_.size(); ++i)
    if (roles_[i] == role) return i;
  return std::nullopt;
}

std::size_t Raster::band_index(BandRole role) const {
  if (auto i = find_role(role)) return *i;
  throw ValidationError("raster lacks band role '" + std::string(to_string(role)) + "'");
}

bool Raster::has_roles(std::initializer_list<BandRole> roles) const {
  return std::all_of(roles.begin(), roles.end(), [&](BandRole r) { return find_role(r).has_value(); });
}

bool Raster::pixel_is_nodata(std::size_t pixel) const {
  if (!nodata_) return false;
  for (std::size_t b = 0; b < band_count(); ++b)
    if (data_[b * pixel_count() + pixel] == *nodata_) return true;
  return false;
}

void Raster::validate() const {
  if (data_.size() != width_ * height_ * roles_.size())
    throw ValidationError("raster data length does not match width x height x bands");
  for (BandRole r : {BandRole::red, BandRole::green, BandRole::blue}) {
    const auto idx = find_role(r);
    if (!idx) continue;
    for (float v : band(*idx)) {
      if (is_nodata(v)) continue;
      if (!(v >= 0.0f && v <= 1.0f))
        throw ValidationError("RGB sample outside [0,1] in band '" + std::string(to_string(r)) + "'");
    }
  }
}

RegionPixels extract_region_pixels(const Raster& raster, std::span<const std::uint32_t> pixels) {
  RegionPixels out;
  out.bands.resize(raster.band_count());
  for (auto& b : out.bands) b.reserve(pixels.size());
  out.kept.reserve(pixels.size());
  const std::size_t n = raster.pixel_count();
  for (std::uint32_t p : pixels) {
    if (p >= n)
      throw ValidationError("pixel index " + std::to_string(p) + " outside raster of " +
                            std::to_string(n) + " pixels");
    if (raster.pixel_is_nodata(p)) {
      ++out.excluded;
      continue;
    }
    out.kept.push_back(p);
    for (std::size_t b = 0; b < raster.band_count(); ++b)
      out.bands[b].push_back(static_cast<double>(raster.band(b)[p]));
  }
  return out;
}

Hsv rgb_to_hsv(double r, double g, double b) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;
  Hsv out{0.0, 0.0, mx};
  if (mx > 0.0) out.s = delta / mx;
  if (delta <= 0.0) return out;
  double h;
  if (mx == r)
    h = (g - b) / delta;
  else if (mx == g)
    h = 2.0 + (b - r) / delta;
  else
    h = 4.0 + (r - g) / delta;
  h /= 6.0;
  if (h < 0.0) h += 1.0;
  if (h >= 1.0) h -= 1.0;
  out.h = h;
  return out;
}

Lab rgb_to_lab(double r, double g, double b) {
  const double rl = srgb_to_linear(r);
  const double gl = srgb_to_linear(g);
  const double bl = srgb_to_linear(b);
  // D65 reference white; Y row sums to exactly 1.
  const double x = (0.4124 * rl + 0.3576 * gl + 0.1805 * bl) / 0.95047;
  const double y = 0.2126 * rl + 0.7152 * gl + 0.0722 * bl;
  const double z = (0.0193 * rl + 0.1192 * gl + 0.9505 * bl) / 1.08883;
  const double fx = lab_f(x);
  const double fy = lab_f(y);
  const double fz = lab_f(z);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

double rgb_to_lightness(double r, double g, double b) {
  const double y = 0.2126 * srgb_to_linear(r) + 0.7152 * srgb_to_linear(g) + 0.0722 * srgb_to_linear(b);
  return 116.0 * lab_f(y) - 16.0;
}

double rgb_to_grey(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

Raster rgb_to_hsv(const Raster& rgb) {
  const auto [r, g, b] = rgb_bands(rgb);
  Raster out(rgb.width(), rgb.height(), {BandRole::hue, BandRole::saturation, BandRole::value});
  auto h = out.band(0);
  auto s = out.band(1);
  auto v = out.band(2);
  for (std::size_t i = 0; i < rgb.pixel_count(); ++i) {
    const Hsv px = rgb_to_hsv(r[i], g[i], b[i]);
    h[i] = static_cast<float>(px.h);
    s[i] = static_cast<float>(px.s);
    v[i] = static_cast<float>(px.v);
  }
  return out;
}

Raster rgb_to_cielab_lightness(const Raster& rgb) {
  const auto [r, g, b] = rgb_bands(rgb);
  Raster out(rgb.width(), rgb.height(), {BandRole::lightness});
  auto l = out.band(0);
  for (std::size_t i = 0; i < rgb.pixel_count(); ++i)
    l[i] = static_cast<float>(rgb_to_lightness(r[i], g[i], b[i]));
  return out;
}

Raster rgb_to_grey(const Raster& rgb) {
  const auto [r, g, b] = rgb_bands(rgb);
  Raster out(rgb.width(), rgb.height(), {BandRole::greyscale});
  auto grey = out.band(0);
  for (std::size_t i = 0; i < rgb.pixel_count(); ++i)
    grey[i] = static_cast<float>(rgb_to_grey(r[i], g[i], b[i]));
  return out;
}

}  // namespace canopy
