#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "canopy/raster.hpp"

namespace canopy {

struct SlicConfig {
  double target_area_m2 = 0.5;
  double compactness = 10.0;
  double smoothing_sigma = 1.0;  // pixels; 0 disables pre-smoothing
  int max_iterations = 10;
  double convergence_epsilon = 0.25;  // mean center displacement, pixels

  void validate() const;
};

struct Region {
  std::uint32_t id = 0;
  std::size_t pixel_count = 0;
  double centroid_x = 0.0;  // mean column
  double centroid_y = 0.0;  // mean row
  std::size_t min_x = 0, min_y = 0, max_x = 0, max_y = 0;  // inclusive bounding box
};

/// Complete labelling of a raster into contiguous ids 0..R-1.
struct SuperpixelPartition {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint32_t> labels;  // row-major
  std::vector<Region> regions;        // regions[i].id == i

  std::size_t region_count() const { return regions.size(); }
  /// Pixel indices of every region, each list in ascending scan order.
  std::vector<std::vector<std::uint32_t>> region_pixels() const;
};

struct PixelPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Grid spacing S in pixels for a target physical superpixel area.
std::size_t grid_spacing(const GeoTransform& geo, double target_area_m2);

/// ceil(w/S) x ceil(h/S) centers at the midpoints of an even subdivision of
/// the image. Throws ValidationError if S exceeds both dimensions.
std::vector<PixelPoint> seed_grid(std::size_t width, std::size_t height, std::size_t spacing);

/// Moves each seed to the lowest-gradient pixel of its 3x3 neighbourhood.
/// `lab` holds three planes (L, a, b) of width*height values each.
void perturb_seeds(std::vector<PixelPoint>& seeds, std::span<const double> lab, std::size_t width,
                   std::size_t height);

/// Splits labels into 4-connected components, merges components smaller than
/// `min_size` into their largest neighbour and relabels 0..R-1 in scan order.
std::vector<std::uint32_t> enforce_connectivity(std::span<const std::uint32_t> labels, std::size_t width,
                                                std::size_t height, std::size_t min_size);

/// Builds the region table for a label raster whose ids are already contiguous.
SuperpixelPartition make_partition(std::vector<std::uint32_t> labels, std::size_t width, std::size_t height);

SuperpixelPartition slic_segment(const Raster& rgb, const GeoTransform& geo, const SlicConfig& cfg);

/// Region-id raster as single-band FBR plus region table CSV
/// (id, pixel_count, centroid_x, centroid_y).
void write_partition(const SuperpixelPartition& partition, const GeoTransform& geo,
                     const std::string& fbr_path, const std::string& csv_path);
struct GeoPartition {
  SuperpixelPartition partition;
  GeoTransform geo;
};
GeoPartition read_partition(const std::string& fbr_path);

}  // namespace canopy
