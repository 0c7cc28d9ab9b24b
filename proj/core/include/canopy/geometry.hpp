#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "canopy/raster.hpp"

namespace canopy {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// A labelled polygon in map units. `ring` is closed (first == last).
struct Polygon {
  std::string id;
  std::vector<Point> ring;
  std::string label;
  std::string source;

  double signed_area() const;
  double area() const;
  /// Even-odd point-in-polygon.
  bool contains(Point p) const;
  void bounds(double& min_x, double& min_y, double& max_x, double& max_y) const;
};

/// Rejects open, degenerate (< 3 distinct vertices or zero area) and
/// self-intersecting rings.
void validate_polygon(const Polygon& poly);

/// GeoJSON FeatureCollection of Polygon features with properties
/// {id, label, source}. Interior rings are ignored with a warning.
std::vector<Polygon> parse_polygons(const std::string& geojson, const std::string& origin = "<memory>");
std::vector<Polygon> read_polygons(const std::string& path);
void write_polygons(const std::vector<Polygon>& polys, const std::string& path);

/// Index raster (row-major, -1 = outside every polygon). A pixel belongs to a
/// polygon when its centre lies inside; later polygons win overlaps.
std::vector<std::int32_t> rasterize_polygons(const std::vector<Polygon>& polys, const GeoTransform& geo,
                                             std::size_t width, std::size_t height, std::size_t* overlap_pixels = nullptr);

/// Smallest distance between two polygons (0 when they touch or overlap).
double polygon_distance(const Polygon& a, const Polygon& b);

}  // namespace canopy
