#pragma once

#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "canopy/error.hpp"
#include "canopy/features.hpp"
#include "canopy/model.hpp"
#include "canopy/slic.hpp"

namespace canopy::cli {

/// Config error carrying the offending field path (e.g. "inputs.crowns").
class ConfigError : public ValidationError {
 public:
  ConfigError(const std::string& field, const std::string& what) : ValidationError(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

inline constexpr int kRunConfigSchemaVersion = 1;

struct RunConfig {
  std::optional<std::uint64_t> seed;
  std::string output_dir = "canopy_out";
  std::map<std::string, std::string> inputs;
  SlicConfig slic;
  FeatureConfig features;
  ModelOptions model;
  std::string scheme = "auto";
  std::size_t folds = 10;
  double mask_radius_m = 50.0;
  double grid_cell_ha = 0.25;
  double test_fraction = 0.25;
  std::size_t workers = 0;  // 0 keeps CANOPY_THREADS or the hardware default

  nlohmann::ordered_json to_json() const;
  /// Path of a named input, or ConfigError("inputs.<name>") when unset or missing on disk.
  std::string input(const std::string& name) const;
  std::optional<std::string> optional_input(const std::string& name) const;
  std::uint64_t require_seed() const;
};

/// Known input names.
const std::vector<std::string>& input_names();

/// Parses and validates a config document; unknown keys are errors.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig read_run_config(const std::string& path);
/// Cross-field checks after flags are applied.
void validate_run_config(const RunConfig& cfg);

}  // namespace canopy::cli
