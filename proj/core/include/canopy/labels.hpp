#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "canopy/geometry.hpp"
#include "canopy/slic.hpp"

namespace canopy {

/// The seven base labels of the crown survey vocabulary.
const std::vector<std::string>& base_labels();

/// Ordered class vocabulary plus a map from source labels to classes.
struct LabelScheme {
  std::string name;
  std::vector<std::string> classes;
  std::map<std::string, std::string> merge;

  /// "all", "merge_endospermum" or "lower_concern".
  static LabelScheme builtin(std::string_view name);
  /// One class per distinct label, in first-appearance order.
  static LabelScheme identity(const std::vector<std::string>& labels, std::string name = "identity");
  static std::vector<std::string> builtin_names();

  /// Class index of a source label; throws ValidationError for unknown labels.
  int class_of(const std::string& label) const;
  /// Class index of every base class under this scheme (for merging confusion matrices).
  std::vector<int> mapping_from(const LabelScheme& finer) const;
  void validate() const;
};

/// A region's best crown and the fraction of its pixels inside it.
struct RegionLabel {
  std::uint32_t region = 0;
  std::int32_t crown = -1;  // polygon index, -1 if unlabelled
  double overlap = 0.0;
};

/// Labels a region with the crown holding at least half of its pixels
/// (inclusive); otherwise leaves it unlabelled but records the best overlap.
std::vector<RegionLabel> assign_superpixel_labels(const SuperpixelPartition& partition,
                                                  std::span<const std::int32_t> crown_raster);

/// CSV: region_id, crown_index, crown_id, label, overlap (unlabelled rows
/// have crown_index -1 and empty id/label).
void write_region_labels(const std::vector<RegionLabel>& labels, const std::vector<Polygon>& crowns,
                         const std::string& path);
std::vector<RegionLabel> read_region_labels(const std::string& path);

}  // namespace canopy
