#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "canopy/features.hpp"
#include "canopy/folds.hpp"
#include "canopy/geometry.hpp"
#include "canopy/labels.hpp"
#include "canopy/model.hpp"
#include "canopy/slic.hpp"

namespace canopy {

/// Feature-table rows that carry a class, with the crown each came from.
struct LabelledSet {
  std::vector<std::size_t> rows;  // feature table rows
  std::vector<int> y;
  std::vector<int> crown;        // crown index per row
  std::vector<int> crown_class;  // per crown; -1 when the crown has no rows or was excluded
  std::vector<std::string> classes;

  std::size_t size() const { return rows.size(); }
};

/// `excluded` (optional, one flag per crown) drops crowns from the set.
LabelledSet build_labelled_set(const FeatureTable& table, const std::vector<RegionLabel>& labels,
                               const std::vector<Polygon>& crowns, const LabelScheme& scheme,
                               std::span<const std::uint8_t> excluded = {});

/// Flags crowns lying within `radius` map units of any mask polygon.
std::vector<std::uint8_t> crowns_near_masks(const std::vector<Polygon>& crowns, const std::vector<Polygon>& masks,
                                            double radius);

/// counts[predicted][actual].
using ConfusionMatrix = std::vector<std::vector<std::size_t>>;

ConfusionMatrix make_confusion(std::size_t n_classes);
/// Sums rows and columns of `m` into coarser classes via `map` (fine -> coarse).
ConfusionMatrix merge_confusion(const ConfusionMatrix& m, std::span<const int> map, std::size_t n_coarse);

struct ConfusionMetrics {
  std::vector<double> precision;  // per predicted row
  std::vector<double> recall;     // per actual column
  std::vector<std::uint8_t> precision_undefined;
  std::vector<std::uint8_t> recall_undefined;
  double overall = 0.0;
};

ConfusionMetrics confusion_metrics(const ConfusionMatrix& m);

/// Outcome of fitting on one crown split and scoring the held-out crowns.
struct SplitResult {
  std::size_t train_rows = 0, test_rows = 0, train_crowns = 0, test_crowns = 0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;        // per superpixel
  double test_crown_accuracy = 0.0;  // per crown, majority vote of its superpixels
  ConfusionMatrix confusion;
  ConfusionMatrix crown_confusion;
  std::size_t leakage = 0;  // crowns present on both sides
  std::vector<std::string> missing_classes;  // absent from the test side
};

/// Fits on rows whose crown is not flagged in `crown_is_test` and scores the rest.
SplitResult evaluate_split(const FeatureTable& table, const LabelledSet& set, std::span<const std::uint8_t> crown_is_test,
                           const ModelOptions& opt);

/// Number of crown ids common to both lists.
std::size_t count_leakage(std::span<const int> train_crowns, std::span<const int> test_crowns);

struct CvReport {
  std::string model;
  std::string scheme;
  std::string features;
  std::vector<std::string> classes;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<SplitResult> folds;
  double mean_train = 0.0, sd_train = 0.0;
  double mean_test = 0.0, sd_test = 0.0;
  double mean_crown = 0.0, sd_crown = 0.0;
  ConfusionMatrix confusion;        // pooled over folds
  ConfusionMatrix crown_confusion;  // pooled over folds
  std::size_t leakage_violations = 0;
};

CvReport cross_validate(const FeatureTable& table, const LabelledSet& set, const FoldAssignment& folds,
                        const ModelOptions& opt);

std::string cv_report_json(const CvReport& report);
void write_cv_report(const CvReport& report, const std::string& json_path, const std::string& confusion_csv);
void write_confusion_csv(const ConfusionMatrix& m, const std::vector<std::string>& classes, const std::string& path);

inline constexpr int kMaskedCode = -1;

/// Per-pixel class codes; kMaskedCode marks masked regions.
struct ClassMap {
  std::size_t width = 0;
  std::size_t height = 0;
  GeoTransform geo;
  std::vector<std::string> classes;
  std::vector<int> codes;
};

/// Regions with at least half of their pixels inside a mask polygon.
std::vector<std::uint8_t> masked_regions(const SuperpixelPartition& partition, const GeoTransform& geo,
                                         const std::vector<Polygon>& masks);

ClassMap landscape_predict(const Model& model, const SuperpixelPartition& partition, const GeoTransform& geo,
                           const FeatureTable& table, const std::vector<Polygon>& masks);

/// Codes as float32 in a single-band FBR plus a JSON legend.
void write_class_map(const ClassMap& map, const std::string& fbr_path, const std::string& legend_path);
ClassMap read_class_map(const std::string& fbr_path, const std::string& legend_path);

struct CoverSummary {
  std::vector<std::string> classes;
  std::vector<std::size_t> pixels;
  std::vector<double> percent;
  std::vector<double> hectares;
  std::size_t total_pixels = 0;
  double total_hectares = 0.0;
};

/// Cover of classified pixels whose centres lie inside `boundary` (whole
/// raster when empty). Masked pixels are not classified.
CoverSummary cover_summary(const ClassMap& map, const std::vector<Polygon>& boundary = {});
/// Hectares from published percentages of a known total.
CoverSummary cover_from_percentages(const std::vector<std::string>& classes, std::span<const double> percent,
                                    double total_hectares);
void write_cover_csv(const CoverSummary& cover, const std::string& path);

struct DominanceCell {
  std::size_t cell_x = 0;
  std::size_t cell_y = 0;
  double x0 = 0.0;  // west edge
  double y0 = 0.0;  // north edge
  std::size_t classified = 0;
  double valid_fraction = 0.0;  // classified area / cell area
  std::vector<double> percent;
  bool empty = true;
};

struct DominanceGrid {
  double cell_size = 0.0;
  std::size_t nx = 0, ny = 0;
  std::vector<std::string> classes;
  std::vector<DominanceCell> cells;  // row-major over (cell_y, cell_x)
};

/// Square cells of the given area anchored at the raster origin; pixels are
/// binned by centre.
DominanceGrid dominance_grid(const ClassMap& map, double cell_area_m2 = 2500.0);
void write_dominance_csv(const DominanceGrid& grid, const std::string& path);

/// The 7 non-empty imagery subsets crossed with the 3 non-empty family subsets.
std::vector<FeatureConfig> multiplex_configs();

struct MultiplexRow {
  FeatureConfig config;
  std::size_t features = 0;
  SplitResult result;
};

struct MultiplexReport {
  std::vector<std::string> classes;
  std::string split_hash;
  std::size_t train_crowns = 0;
  std::size_t test_crowns = 0;
  std::vector<MultiplexRow> rows;
};

/// Hash of the train and test crown index sets of a split.
std::string split_hash(std::span<const std::uint8_t> crown_is_test, std::span<const int> crown_class);

/// Fits every config on one stratified crown split (test_fraction held out).
MultiplexReport imagery_multiplex(const FeatureTable& full, const LabelledSet& set, const ModelOptions& opt,
                                  double test_fraction, std::uint64_t seed,
                                  const std::vector<FeatureConfig>& configs = multiplex_configs());
void write_multiplex_report(const MultiplexReport& report, const std::string& json_path, const std::string& csv_path);

}  // namespace canopy
