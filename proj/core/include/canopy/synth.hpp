#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "canopy/geometry.hpp"
#include "canopy/raster.hpp"

namespace canopy {

enum class TextureKind : std::uint8_t { smooth, spotted, striped, jagged };

std::string_view to_string(TextureKind t);
TextureKind texture_from_string(std::string_view s);

struct SynthClass {
  std::string name;
  std::array<double, 3> rgb{};  // base colour in [0,1]
  std::array<double, 4> ms{};   // green, red, rededge, nir reflectance
  TextureKind texture = TextureKind::smooth;
  double amplitude = 0.0;       // +/- brightness modulation of the texture
  std::array<double, 2> height{0.0, 0.0};  // crown cap height range (m)
};

struct SceneSpec {
  std::size_t width = 1500;
  std::size_t height = 1500;
  double pixel_size = 0.04;  // m
  double ms_factor = 2.8;    // MS pixel size / RGB pixel size
  double dsm_factor = 2.0;   // DSM pixel size / RGB pixel size
  double origin_x = 300000.0;
  double origin_y = 9770000.0;
  std::vector<SynthClass> classes;
  std::string background;    // class filling everything outside crowns
  std::size_t crowns_per_class = 10;
  std::array<double, 2> radius{1.5, 2.3};  // m
  double noise_sigma = 0.02;
  double ground_slope = 0.02;  // m per m, west to east
  std::uint64_t seed = 1;

  /// Three equally coloured textured species, background vegetation and bare ground.
  static SceneSpec defaults();
  void validate() const;
  std::size_t class_index(const std::string& name) const;
};

std::string scene_spec_json(const SceneSpec& spec);
SceneSpec parse_scene_spec(const std::string& json, const std::string& origin = "<memory>");
SceneSpec read_scene_spec(const std::string& path);

struct Scene {
  SceneSpec spec;
  Raster rgb;
  GeoTransform rgb_geo;
  Raster ms;
  GeoTransform ms_geo;
  Raster dsm;
  GeoTransform dsm_geo;
  std::vector<Polygon> crowns;  // label = class name
  std::vector<int> truth;       // class index per RGB pixel
  std::vector<double> cover;    // fraction of RGB pixels per class
};

/// Places crowns by rejection sampling (no overlaps) and renders all layers.
/// Deterministic in spec.seed.
Scene generate_scene(const SceneSpec& spec);

/// Texture modulation in {-1, 0, +1} at a pixel for a crown-local pattern.
double texture_value(TextureKind kind, double x, double y, double angle, std::uint64_t seed);

/// rgb.fbr, ms.fbr, dsm.fbr, crowns.geojson, truth.fbr, truth_legend.json, scene.json.
void write_scene(const Scene& scene, const std::string& dir);

}  // namespace canopy
