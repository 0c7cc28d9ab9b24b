#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace canopy {

/// What a band holds. Tags are unique within a raster.
enum class BandRole : std::uint8_t {
  red,
  green,
  blue,
  ms_green,
  ms_red,
  ms_rededge,
  ms_nir,
  dsm_height_m,
  greyscale,
  hue,
  saturation,
  value,
  lightness,
  derived,
};

std::string_view to_string(BandRole role);
/// Throws ValidationError for an unknown tag.
BandRole band_role_from_string(std::string_view tag);

/// North-up affine transform; origin is the top-left corner of pixel (0, 0).
struct GeoTransform {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double pixel_width = 1.0;
  double pixel_height = 1.0;  // stored positive; rows advance southwards

  double pixel_area_m2() const { return pixel_width * pixel_height; }
  double center_x(double col) const { return origin_x + (col + 0.5) * pixel_width; }
  double center_y(double row) const { return origin_y - (row + 0.5) * pixel_height; }
  /// Fractional column/row of a map coordinate.
  double col_of(double x) const { return (x - origin_x) / pixel_width; }
  double row_of(double y) const { return (origin_y - y) / pixel_height; }

  void validate() const;
  bool operator==(const GeoTransform&) const = default;
};

/// Multi-band float32 grid, band-major, row-major within a band.
class Raster {
 public:
  Raster() = default;
  Raster(std::size_t width, std::size_t height, std::vector<BandRole> roles,
         std::optional<float> nodata = std::nullopt);
  Raster(std::size_t width, std::size_t height, std::vector<BandRole> roles, std::vector<float> data,
         std::optional<float> nodata = std::nullopt);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t pixel_count() const { return width_ * height_; }
  std::size_t band_count() const { return roles_.size(); }
  const std::vector<BandRole>& roles() const { return roles_; }
  const std::optional<float>& nodata() const { return nodata_; }
  void set_nodata(std::optional<float> v) { nodata_ = v; }

  std::span<const float> band(std::size_t b) const;
  std::span<float> band(std::size_t b);
  std::span<const float> data() const { return data_; }

  float at(std::size_t b, std::size_t x, std::size_t y) const {
    return data_[(b * height_ + y) * width_ + x];
  }
  float& at(std::size_t b, std::size_t x, std::size_t y) {
    return data_[(b * height_ + y) * width_ + x];
  }

  std::optional<std::size_t> find_role(BandRole role) const;
  /// Throws ValidationError naming the missing role.
  std::size_t band_index(BandRole role) const;
  bool has_roles(std::initializer_list<BandRole> roles) const;

  bool is_nodata(float v) const { return nodata_ && v == *nodata_; }
  bool pixel_is_nodata(std::size_t pixel) const;

  /// Checks sizes, role uniqueness and the [0,1] range of RGB samples.
  void validate() const;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<BandRole> roles_;
  std::vector<float> data_;
  std::optional<float> nodata_;
};

/// Per-band sample lists for a set of pixels, nodata pixels dropped.
struct RegionPixels {
  std::vector<std::vector<double>> bands;
  std::vector<std::uint32_t> kept;  // pixel indices that survived, in input order
  std::size_t excluded = 0;
  bool degenerate() const { return kept.empty(); }
};

/// A pixel is excluded when any band holds the nodata sentinel.
RegionPixels extract_region_pixels(const Raster& raster, std::span<const std::uint32_t> pixels);

// Color transforms. Inputs need red/green/blue roles with samples in [0,1].

struct Hsv {
  double h, s, v;
};
struct Lab {
  double l, a, b;
};

Hsv rgb_to_hsv(double r, double g, double b);
Lab rgb_to_lab(double r, double g, double b);
double rgb_to_lightness(double r, double g, double b);
double rgb_to_grey(double r, double g, double b);

/// Three bands (hue, saturation, value); hexcone model, hue in [0,1), hue 0 on the grey axis.
Raster rgb_to_hsv(const Raster& rgb);
/// One band, CIELAB L* in [0,100] (sRGB, D65).
Raster rgb_to_cielab_lightness(const Raster& rgb);
/// One band, BT.601 luma weights.
Raster rgb_to_grey(const Raster& rgb);

}  // namespace canopy
