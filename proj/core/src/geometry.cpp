#include "canopy/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "canopy/error.hpp"
#include "canopy/log.hpp"

namespace canopy {

namespace {

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

bool on_segment(Point p, Point q, Point r) {
  return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) && std::min(p.y, r.y) <= q.y && q.y <= std::max(p.y, r.y);
}

int orientation(Point a, Point b, Point c) {
  const double v = cross(a, b, c);
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
  const int o1 = orientation(p1, p2, q1), o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1), o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, q1, p2)) return true;
  if (o2 == 0 && on_segment(p1, q2, p2)) return true;
  if (o3 == 0 && on_segment(q1, p1, q2)) return true;
  if (o4 == 0 && on_segment(q1, p2, q2)) return true;
  return false;
}

double point_segment_distance(Point p, Point a, Point b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

std::string json_scalar(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_null()) return {};
  return v.dump();
}

}  // namespace

double Polygon::signed_area() const {
  double a = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) a += ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
  return 0.5 * a;
}

double Polygon::area() const { return std::abs(signed_area()); }

bool Polygon::contains(Point p) const {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const Point a = ring[i], b = ring[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) inside = !inside;
  }
  return inside;
}

void Polygon::bounds(double& min_x, double& min_y, double& max_x, double& max_y) const {
  min_x = min_y = std::numeric_limits<double>::infinity();
  max_x = max_y = -std::numeric_limits<double>::infinity();
  for (const Point& p : ring) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
}

void validate_polygon(const Polygon& poly) {
  const std::string who = "polygon '" + poly.id + "'";
  if (poly.ring.size() < 4) throw ValidationError(who + " needs at least 3 distinct vertices");
  for (const Point& p : poly.ring)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ValidationError(who + " has non-finite coordinates");
  if (poly.ring.front().x != poly.ring.back().x || poly.ring.front().y != poly.ring.back().y)
    throw ValidationError(who + " ring is not closed");
  if (!(poly.area() > 0.0)) throw ValidationError(who + " has zero area");
  const std::size_t n = poly.ring.size() - 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(poly.ring[i], poly.ring[i + 1], poly.ring[j], poly.ring[j + 1]))
        throw ValidationError(who + " ring self-intersects");
    }
}

std::vector<Polygon> parse_polygons(const std::string& geojson, const std::string& origin) {
  std::vector<Polygon> out;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(geojson);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(origin + ": " + e.what(), e.byte);
  }
  try {
    if (j.at("type") != "FeatureCollection") throw ValidationError(origin + ": expected a FeatureCollection");
    std::size_t index = 0;
    for (const auto& f : j.at("features")) {
      const std::string where = origin + ": features[" + std::to_string(index) + "]";
      const auto& g = f.at("geometry");
      if (g.at("type") != "Polygon") throw ValidationError(where + ": geometry type must be Polygon");
      const auto& rings = g.at("coordinates");
      if (rings.empty()) throw ValidationError(where + ": polygon has no rings");
      if (rings.size() > 1) log::warn(where + ": interior rings ignored");
      Polygon p;
      for (const auto& c : rings[0]) {
        if (c.size() < 2) throw ValidationError(where + ": coordinate needs x and y");
        p.ring.push_back({c[0].get<double>(), c[1].get<double>()});
      }
      const auto props = f.value("properties", nlohmann::json::object());
      p.id = props.contains("id") ? json_scalar(props["id"]) : std::to_string(index);
      p.label = props.contains("label") ? json_scalar(props["label"]) : std::string{};
      p.source = props.contains("source") ? json_scalar(props["source"]) : std::string{};
      try {
        validate_polygon(p);
      } catch (const ValidationError& e) {
        throw ValidationError(where + ": " + e.what());
      }
      out.push_back(std::move(p));
      ++index;
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(origin + ": " + e.what());
  }
  return out;
}

std::vector<Polygon> read_polygons(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_polygons(ss.str(), path);
}

void write_polygons(const std::vector<Polygon>& polys, const std::string& path) {
  nlohmann::ordered_json j;
  j["type"] = "FeatureCollection";
  auto& features = j["features"] = nlohmann::ordered_json::array();
  for (const auto& p : polys) {
    nlohmann::ordered_json ring = nlohmann::ordered_json::array();
    for (const Point& pt : p.ring) ring.push_back({pt.x, pt.y});
    features.push_back({{"type", "Feature"},
                        {"properties", {{"id", p.id}, {"label", p.label}, {"source", p.source}}},
                        {"geometry", {{"type", "Polygon"}, {"coordinates", nlohmann::ordered_json::array({ring})}}}});
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot create '" + path + "'");
  out << j.dump(1) << '\n';
}

std::vector<std::int32_t> rasterize_polygons(const std::vector<Polygon>& polys, const GeoTransform& geo,
                                             std::size_t width, std::size_t height, std::size_t* overlap_pixels) {
  std::vector<std::int32_t> out(width * height, -1);
  std::size_t overlaps = 0;
  for (std::size_t k = 0; k < polys.size(); ++k) {
    double x0, y0, x1, y1;
    polys[k].bounds(x0, y0, x1, y1);
    // Column/row ranges whose centres may fall inside the bounds.
    const double ca = geo.col_of(x0) - 0.5, cb = geo.col_of(x1) - 0.5;
    const double ra = geo.row_of(y0) - 0.5, rb = geo.row_of(y1) - 0.5;
    const long c0 = std::max(0L, static_cast<long>(std::floor(std::min(ca, cb))));
    const long c1 = std::min(static_cast<long>(width) - 1, static_cast<long>(std::ceil(std::max(ca, cb))));
    const long r0 = std::max(0L, static_cast<long>(std::floor(std::min(ra, rb))));
    const long r1 = std::min(static_cast<long>(height) - 1, static_cast<long>(std::ceil(std::max(ra, rb))));
    std::size_t covered = 0;
    for (long r = r0; r <= r1; ++r)
      for (long c = c0; c <= c1; ++c) {
        const Point p{geo.center_x(static_cast<double>(c)), geo.center_y(static_cast<double>(r))};
        if (!polys[k].contains(p)) continue;
        auto& cell = out[static_cast<std::size_t>(r) * width + static_cast<std::size_t>(c)];
        if (cell >= 0) ++overlaps;
        cell = static_cast<std::int32_t>(k);
        ++covered;
      }
    if (covered == 0) log::warn("polygon '" + polys[k].id + "' covers no pixel centre of the raster");
  }
  if (overlaps > 0)
    log::warn(std::to_string(overlaps) + " pixels lie in overlapping polygons; the later polygon was kept");
  if (overlap_pixels) *overlap_pixels = overlaps;
  return out;
}

double polygon_distance(const Polygon& a, const Polygon& b) {
  for (std::size_t i = 0; i + 1 < a.ring.size(); ++i)
    for (std::size_t j = 0; j + 1 < b.ring.size(); ++j)
      if (segments_intersect(a.ring[i], a.ring[i + 1], b.ring[j], b.ring[j + 1])) return 0.0;
  if (a.contains(b.ring[0]) || b.contains(a.ring[0])) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < a.ring.size(); ++i)
    for (std::size_t j = 0; j + 1 < b.ring.size(); ++j) {
      best = std::min(best, point_segment_distance(a.ring[i], b.ring[j], b.ring[j + 1]));
      best = std::min(best, point_segment_distance(b.ring[j], a.ring[i], a.ring[i + 1]));
    }
  return best;
}

}  // namespace canopy
