#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "canopy/matrix.hpp"
#include "canopy/raster.hpp"
#include "canopy/slic.hpp"
#include "canopy/texture.hpp"

namespace canopy {

enum class Imagery : std::uint8_t { rgb, ms, dsm };
enum class FeatureFamily : std::uint8_t { spectral, textural };

std::string_view to_string(Imagery s);
std::string_view to_string(FeatureFamily f);
Imagery imagery_from_string(std::string_view s);
FeatureFamily family_from_string(std::string_view s);

/// Which imagery sources and feature families enter the feature vector.
struct FeatureConfig {
  bool rgb = true, ms = true, dsm = true;
  bool spectral = true, textural = true;

  bool uses(Imagery s) const { return s == Imagery::rgb ? rgb : s == Imagery::ms ? ms : dsm; }
  bool uses(FeatureFamily f) const { return f == FeatureFamily::spectral ? spectral : textural; }
  void validate() const;  // both subsets non-empty
  std::string label() const;  // e.g. "rgb+ms/spectral"
  bool operator==(const FeatureConfig&) const = default;
};

/// One column of the feature vector.
struct ManifestEntry {
  Imagery imagery;       // imagery the value is derived from
  FeatureFamily family;  // spectral or textural
  std::string source;    // rgb, top, ind, hsv, ms, dsm, grey (texture on RGB greyscale)
  std::string method;    // stats, ratio, glcm, lbp, laws, acor
  std::string band;      // band, index or kernel name
  std::string statistic;
  int offset = 0;        // GLCM/autocorrelation offset or LBP radius, 0 if n/a

  std::string name() const;
};

struct FeatureManifest {
  std::vector<ManifestEntry> entries;

  std::size_t size() const { return entries.size(); }
  std::vector<std::string> names() const;
  /// FNV-1a over the ordered names; identifies a column layout.
  std::string hash() const;
  /// Column indices whose imagery/family are enabled in `cfg`.
  std::vector<std::size_t> select(const FeatureConfig& cfg) const;
  FeatureManifest subset(std::span<const std::size_t> columns) const;
  /// Count per (source, method) block, in first-appearance order.
  std::vector<std::pair<std::string, std::size_t>> tally() const;
};

FeatureManifest build_manifest(const FeatureConfig& cfg);

/// A single region's imagery, cropped to its bounding box in each grid.
struct RegionImagery {
  // RGB pixel samples (red, green, blue) and the greyscale crop with region mask.
  std::array<std::vector<double>, 3> rgb;
  Image grey;
  Mask grey_mask;
  // MS samples (green, red, rededge, nir) and per-band crops sharing one mask.
  std::array<std::vector<double>, 4> ms;
  std::array<Image, 4> ms_crops;
  Mask ms_mask;
  // DSM heights and float crop.
  std::vector<double> dsm;
  Image dsm_crop;
  Mask dsm_mask;
};

struct FeatureVector {
  std::vector<double> values;
  bool degenerate = false;
};

/// Pixels with L* at or above the region's median L*.
std::vector<std::size_t> brightness_filter_top50(const std::array<std::vector<double>, 3>& rgb, bool* passthrough = nullptr);

/// Concatenates every enabled block in manifest order. Throws ValidationError
/// when a required source has no pixels.
FeatureVector assemble_feature_vector(const RegionImagery& region, const FeatureConfig& cfg);

/// Co-registered imagery for a scene. MS and DSM may be absent when the
/// feature config does not use them.
struct SceneImagery {
  const Raster* rgb = nullptr;
  GeoTransform rgb_geo;
  const Raster* ms = nullptr;
  GeoTransform ms_geo;
  const Raster* dsm = nullptr;
  GeoTransform dsm_geo;
};

/// Gathers one region's imagery. MS and DSM pixel sets are the deduplicated
/// nearest-neighbour cells under each RGB pixel centre.
RegionImagery gather_region(const SceneImagery& scene, std::span<const std::uint32_t> rgb_pixels, std::size_t rgb_width);

/// Feature rows for every region of a partition, ordered by region id.
struct FeatureTable {
  FeatureManifest manifest;
  std::vector<std::uint32_t> region_ids;
  std::vector<std::uint8_t> degenerate;
  Matrix values;

  FeatureTable select(const FeatureConfig& cfg) const;
  FeatureTable select_rows(std::span<const std::size_t> rows) const;
  /// Row index for a region id, if present.
  std::optional<std::size_t> row_of(std::uint32_t region_id) const;
};

FeatureTable extract_features(const SceneImagery& scene, const SuperpixelPartition& partition, const FeatureConfig& cfg);

/// CSV (region_id, degenerate, <manifest names>) plus a JSON manifest sidecar.
void write_feature_table(const FeatureTable& table, const std::string& csv_path, const std::string& manifest_path);
FeatureTable read_feature_table(const std::string& csv_path, const std::string& manifest_path);

}  // namespace canopy
