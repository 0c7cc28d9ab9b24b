#include "canopy/run_config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "canopy/labels.hpp"

namespace canopy::cli {

namespace {

// Typed access to one JSON object with field-path error messages.
class Fields {
 public:
  Fields(const nlohmann::json& j, std::string path, std::set<std::string> allowed) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    for (const auto& [key, value] : j.items())
      if (!allowed.count(key)) throw ConfigError(field(key), "unknown field");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }
  const nlohmann::json& raw(const std::string& key) const { return j_.at(key); }

  void number(const std::string& key, double& out, double lo, double hi) const {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    const double d = v.get<double>();
    if (!(d >= lo && d <= hi)) throw ConfigError(field(key), "value out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    out = d;
  }
  template <class T>
  void integer(const std::string& key, T& out, long long lo, long long hi) const {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
    const long long d = v.get<long long>();
    if (d < lo || d > hi) throw ConfigError(field(key), "value out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    out = static_cast<T>(d);
  }
  void boolean(const std::string& key, bool& out) const {
    if (!has(key)) return;
    if (!j_.at(key).is_boolean()) throw ConfigError(field(key), "expected a boolean");
    out = j_.at(key).get<bool>();
  }
  void string(const std::string& key, std::string& out) const {
    if (!has(key)) return;
    if (!j_.at(key).is_string()) throw ConfigError(field(key), "expected a string");
    out = j_.at(key).get<std::string>();
  }
  void number_list(const std::string& key, std::vector<double>& out) const {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_array() || v.empty()) throw ConfigError(field(key), "expected a non-empty array of numbers");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !(v[i].get<double>() > 0.0))
        throw ConfigError(field(key) + "[" + std::to_string(i) + "]", "expected a positive number");
      out.push_back(v[i].get<double>());
    }
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
};

}  // namespace

const std::vector<std::string>& input_names() {
  static const std::vector<std::string> names{"rgb",    "ms",    "dsm",       "crowns", "masks",    "boundary",
                                              "partition", "features", "manifest", "labels", "model",
                                              "class_map", "legend", "scene_spec"};
  return names;
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = kRunConfigSchemaVersion;
  if (seed) j["seed"] = *seed;
  j["output_dir"] = output_dir;
  j["inputs"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : inputs) j["inputs"][k] = v;
  j["slic"] = {{"target_area_m2", slic.target_area_m2},
               {"compactness", slic.compactness},
               {"smoothing_sigma", slic.smoothing_sigma},
               {"max_iterations", slic.max_iterations},
               {"convergence_epsilon", slic.convergence_epsilon}};
  j["features"] = {{"rgb", features.rgb}, {"ms", features.ms}, {"dsm", features.dsm},
                   {"spectral", features.spectral}, {"textural", features.textural}};
  j["model"] = {{"kind", to_string(model.kind)},
                {"c_grid", model.svm.c_grid},
                {"gamma_grid", model.svm.gamma_grid},
                {"tune_folds", model.svm.tune_folds},
                {"tolerance", model.svm.tolerance},
                {"n_trees", model.forest.n_trees},
                {"mtry", model.forest.mtry},
                {"max_groups", model.lasso.max_groups},
                {"path_length", model.lasso.path_length},
                {"lambda_min_ratio", model.lasso.lambda_min_ratio}};
  j["scheme"] = scheme;
  j["folds"] = folds;
  j["mask_radius_m"] = mask_radius_m;
  j["grid_cell_ha"] = grid_cell_ha;
  j["test_fraction"] = test_fraction;
  j["workers"] = workers;
  return j;
}

std::optional<std::string> RunConfig::optional_input(const std::string& name) const {
  const auto it = inputs.find(name);
  if (it == inputs.end() || it->second.empty()) return std::nullopt;
  if (!std::filesystem::exists(it->second)) throw ConfigError("inputs." + name, "file '" + it->second + "' does not exist");
  return it->second;
}

std::string RunConfig::input(const std::string& name) const {
  const auto v = optional_input(name);
  if (!v) throw ConfigError("inputs." + name, "required input is not set");
  return *v;
}

std::uint64_t RunConfig::require_seed() const {
  if (!seed) throw ConfigError("seed", "a master seed is required");
  return *seed;
}

RunConfig parse_run_config(const nlohmann::json& j) {
  RunConfig c;
  const Fields root(j, "",
                    {"schema_version", "seed", "output_dir", "inputs", "slic", "features", "model", "scheme", "folds",
                     "mask_radius_m", "grid_cell_ha", "test_fraction", "workers"});
  if (root.has("schema_version")) {
    int v = 0;
    root.integer("schema_version", v, 0, 1000);
    if (v != kRunConfigSchemaVersion) throw ConfigError("schema_version", "unsupported version " + std::to_string(v));
  }
  if (root.has("seed")) {
    std::uint64_t s = 0;
    if (!root.raw("seed").is_number_unsigned() && !(root.raw("seed").is_number_integer() && root.raw("seed").get<long long>() >= 0))
      throw ConfigError("seed", "expected a non-negative integer");
    s = root.raw("seed").get<std::uint64_t>();
    c.seed = s;
  }
  root.string("output_dir", c.output_dir);
  if (root.has("inputs")) {
    std::set<std::string> names(input_names().begin(), input_names().end());
    const Fields in(root.raw("inputs"), "inputs", names);
    for (const auto& n : input_names()) {
      std::string v;
      in.string(n, v);
      if (in.has(n)) c.inputs[n] = v;
    }
  }
  if (root.has("slic")) {
    const Fields s(root.raw("slic"), "slic",
                   {"target_area_m2", "compactness", "smoothing_sigma", "max_iterations", "convergence_epsilon"});
    s.number("target_area_m2", c.slic.target_area_m2, 1e-9, 1e12);
    s.number("compactness", c.slic.compactness, 1e-9, 1e9);
    s.number("smoothing_sigma", c.slic.smoothing_sigma, 0.0, 100.0);
    s.integer("max_iterations", c.slic.max_iterations, 1, 1000);
    s.number("convergence_epsilon", c.slic.convergence_epsilon, 0.0, 1e6);
  }
  if (root.has("features")) {
    const Fields f(root.raw("features"), "features", {"rgb", "ms", "dsm", "spectral", "textural"});
    f.boolean("rgb", c.features.rgb);
    f.boolean("ms", c.features.ms);
    f.boolean("dsm", c.features.dsm);
    f.boolean("spectral", c.features.spectral);
    f.boolean("textural", c.features.textural);
  }
  if (root.has("model")) {
    const Fields m(root.raw("model"), "model",
                   {"kind", "c_grid", "gamma_grid", "tune_folds", "tolerance", "n_trees", "mtry", "max_groups",
                    "path_length", "lambda_min_ratio"});
    std::string kind = std::string(to_string(c.model.kind));
    m.string("kind", kind);
    try {
      c.model.kind = model_kind_from_string(kind);
    } catch (const ValidationError& e) {
      throw ConfigError("model.kind", e.what());
    }
    m.number_list("c_grid", c.model.svm.c_grid);
    m.number_list("gamma_grid", c.model.svm.gamma_grid);
    m.integer("tune_folds", c.model.svm.tune_folds, 2, 100);
    m.number("tolerance", c.model.svm.tolerance, 1e-15, 1.0);
    m.integer("n_trees", c.model.forest.n_trees, 1, 100000);
    m.integer("mtry", c.model.forest.mtry, 0, 1000000);
    m.integer("max_groups", c.model.lasso.max_groups, 1, 1000000);
    m.integer("path_length", c.model.lasso.path_length, 2, 10000);
    m.number("lambda_min_ratio", c.model.lasso.lambda_min_ratio, 1e-12, 0.999999);
  }
  root.string("scheme", c.scheme);
  root.integer("folds", c.folds, 2, 1000);
  root.number("mask_radius_m", c.mask_radius_m, 0.0, 1e9);
  root.number("grid_cell_ha", c.grid_cell_ha, 1e-9, 1e9);
  root.number("test_fraction", c.test_fraction, 1e-9, 0.999999999);
  root.integer("workers", c.workers, 0, 4096);
  return c;
}

RunConfig read_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
  }
  return parse_run_config(j);
}

void validate_run_config(const RunConfig& cfg) {
  try {
    cfg.slic.validate();
  } catch (const ValidationError& e) {
    throw ConfigError("slic", e.what());
  }
  try {
    cfg.features.validate();
  } catch (const ValidationError& e) {
    throw ConfigError("features", e.what());
  }
  try {
    cfg.model.validate();
  } catch (const ValidationError& e) {
    throw ConfigError("model", e.what());
  }
  if (cfg.output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
  if (cfg.scheme != "auto" && cfg.scheme != "identity") {
    const auto names = LabelScheme::builtin_names();
    if (std::find(names.begin(), names.end(), cfg.scheme) == names.end())
      throw ConfigError("scheme", "unknown scheme '" + cfg.scheme + "'");
  }
}

}  // namespace canopy::cli
