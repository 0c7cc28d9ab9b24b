#include "canopy/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "canopy/error.hpp"
#include "canopy/features.hpp"
#include "canopy/folds.hpp"
#include "canopy/geometry.hpp"
#include "canopy/hash.hpp"
#include "canopy/labels.hpp"
#include "canopy/log.hpp"
#include "canopy/model.hpp"
#include "canopy/parallel.hpp"
#include "canopy/pipeline.hpp"
#include "canopy/raster_io.hpp"
#include "canopy/run_config.hpp"
#include "canopy/slic.hpp"
#include "canopy/synth.hpp"
#include "canopy/version.hpp"

namespace canopy::cli {

namespace fs = std::filesystem;

namespace {

struct CommandInfo {
  std::string name;
  std::string help;
  std::vector<std::string> required;
  std::vector<std::string> optional;
};

const std::vector<CommandInfo>& commands() {
  static const std::vector<CommandInfo> list{
      {"segment", "SLIC superpixel partition of the RGB orthomosaic", {"rgb"}, {}},
      {"extract", "per-superpixel feature table", {"partition"}, {"rgb", "ms", "dsm"}},
      {"label", "transfer crown labels onto superpixels", {"partition", "crowns"}, {}},
      {"cv", "crown-stratified k-fold cross-validation", {"features", "manifest", "labels", "crowns"}, {"masks"}},
      {"train", "fit a classifier on all labelled superpixels", {"features", "manifest", "labels", "crowns"}, {"masks"}},
      {"predict", "classify every superpixel of the landscape", {"model", "features", "manifest", "partition"}, {"masks"}},
      {"grid", "dominance grid over a class map", {"class_map", "legend"}, {}},
      {"summary", "per-class cover of a class map", {"class_map", "legend"}, {"boundary"}},
      {"multiplex", "accuracy over all imagery and feature-family subsets", {"features", "manifest", "labels", "crowns"}, {"masks"}},
      {"synth", "generate a synthetic scene with ground truth", {}, {"scene_spec"}},
  };
  return list;
}

const CommandInfo& command_info(const std::string& name) {
  for (const auto& c : commands())
    if (c.name == name) return c;
  throw ValidationError("unknown command '" + name + "'");
}

// File names used inside the output directory; also the fallback for unset inputs.
const std::map<std::string, std::string>& default_files() {
  static const std::map<std::string, std::string> m{
      {"rgb", "rgb.fbr"},           {"ms", "ms.fbr"},
      {"dsm", "dsm.fbr"},           {"crowns", "crowns.geojson"},
      {"partition", "partition.fbr"}, {"features", "features.csv"},
      {"manifest", "features.manifest.json"}, {"labels", "labels.csv"},
      {"model", "model.json"},      {"class_map", "class_map.fbr"},
      {"legend", "class_map.legend.json"},
  };
  return m;
}

std::string usage_text() {
  std::ostringstream s;
  s << "usage: canopy <command> [--config FILE] [options]\n\ncommands:\n";
  for (const auto& c : commands()) {
    s << "  " << c.name;
    for (std::size_t i = c.name.size(); i < 11; ++i) s << ' ';
    s << c.help << '\n';
  }
  s << "\nrun 'canopy <command> --help' for the options of a command\n";
  return s.str();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s + ",") {
    if (ch == ',' || ch == '+') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur += ch;
    }
  }
  return out;
}

// Flag values that override the config file when given.
struct Overrides {
  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::map<std::string, std::string> inputs;
  std::vector<std::string> input_pairs;
  std::string model_kind;
  std::size_t folds = 0;
  std::string scheme;
  std::string imagery;
  std::string families;
  double target_area = 0.0;
  double compactness = 0.0;
  double cell_ha = 0.0;
  double test_fraction = 0.0;
  double mask_radius = 0.0;
  std::size_t n_trees = 0;
  std::string log_level = "info";
  std::set<std::string> given;
};

void add_options(CLI::App& app, Overrides& o) {
  auto mark = [&o](const std::string& key) { return [&o, key](auto&&...) { o.given.insert(key); }; };
  app.add_option("--config", o.config_path, "JSON run config; flags take precedence");
  app.add_option("--out", o.out, "output directory")->each(mark("out"));
  app.add_option("--seed", o.seed, "master seed")->each(mark("seed"));
  app.add_option("--threads", o.threads, "worker threads (0 = default)")->each(mark("threads"));
  for (const auto& name : input_names()) {
    std::string flag = "--" + name;
    std::replace(flag.begin(), flag.end(), '_', '-');
    app.add_option(flag, o.inputs[name], "input path: " + name)->each(mark("inputs." + name));
  }
  app.add_option("--input", o.input_pairs, "input as name=path (repeatable)");
  app.add_option("--model-kind", o.model_kind, "lasso | svm | forest")->each(mark("model_kind"));
  app.add_option("--folds", o.folds, "cross-validation folds")->each(mark("folds"));
  app.add_option("--scheme", o.scheme, "label scheme: auto, identity or a builtin name")->each(mark("scheme"));
  app.add_option("--imagery", o.imagery, "comma list of rgb, ms, dsm")->each(mark("imagery"));
  app.add_option("--families", o.families, "comma list of spectral, textural")->each(mark("families"));
  app.add_option("--target-area", o.target_area, "superpixel target area (m^2)")->each(mark("target_area"));
  app.add_option("--compactness", o.compactness, "SLIC compactness")->each(mark("compactness"));
  app.add_option("--cell-ha", o.cell_ha, "dominance grid cell area (ha)")->each(mark("cell_ha"));
  app.add_option("--test-fraction", o.test_fraction, "multiplex holdout fraction")->each(mark("test_fraction"));
  app.add_option("--mask-radius", o.mask_radius, "crown exclusion radius around masks (m)")->each(mark("mask_radius"));
  app.add_option("--trees", o.n_trees, "random forest size")->each(mark("n_trees"));
  app.add_option("--log-level", o.log_level, "debug | info | warn | error")
      ->check(CLI::IsMember({"debug", "info", "warn", "error"}));
}

RunConfig effective_config(const Overrides& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : read_run_config(o.config_path);
  const auto has = [&](const std::string& k) { return o.given.count(k) > 0; };
  if (has("out")) c.output_dir = o.out;
  if (has("seed")) c.seed = o.seed;
  if (has("threads")) c.workers = o.threads;
  for (const auto& [name, path] : o.inputs)
    if (has("inputs." + name)) c.inputs[name] = path;
  for (const auto& pair : o.input_pairs) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos) throw ConfigError("--input", "expected name=path, got '" + pair + "'");
    const std::string name = pair.substr(0, eq);
    const auto& names = input_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
      throw ConfigError("inputs." + name, "unknown input name");
    c.inputs[name] = pair.substr(eq + 1);
  }
  if (has("model_kind")) {
    try {
      c.model.kind = model_kind_from_string(o.model_kind);
    } catch (const ValidationError& e) {
      throw ConfigError("model.kind", e.what());
    }
  }
  if (has("folds")) c.folds = o.folds;
  if (has("scheme")) c.scheme = o.scheme;
  if (has("imagery")) {
    c.features.rgb = c.features.ms = c.features.dsm = false;
    for (const auto& s : split_list(o.imagery)) {
      Imagery im;
      try {
        im = imagery_from_string(s);
      } catch (const ValidationError& e) {
        throw ConfigError("features", e.what());
      }
      (im == Imagery::rgb ? c.features.rgb : im == Imagery::ms ? c.features.ms : c.features.dsm) = true;
    }
  }
  if (has("families")) {
    c.features.spectral = c.features.textural = false;
    for (const auto& s : split_list(o.families)) {
      FeatureFamily f;
      try {
        f = family_from_string(s);
      } catch (const ValidationError& e) {
        throw ConfigError("features", e.what());
      }
      (f == FeatureFamily::spectral ? c.features.spectral : c.features.textural) = true;
    }
  }
  if (has("target_area")) c.slic.target_area_m2 = o.target_area;
  if (has("compactness")) c.slic.compactness = o.compactness;
  if (has("cell_ha")) c.grid_cell_ha = o.cell_ha;
  if (has("test_fraction")) c.test_fraction = o.test_fraction;
  if (has("mask_radius")) c.mask_radius_m = o.mask_radius;
  if (has("n_trees")) c.model.forest.n_trees = o.n_trees;
  if (c.folds < 2) throw ConfigError("folds", "need at least 2 folds");
  if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0)) throw ConfigError("test_fraction", "must lie in (0, 1)");
  if (!(c.grid_cell_ha > 0.0)) throw ConfigError("grid_cell_ha", "must be positive");
  if (!(c.mask_radius_m >= 0.0)) throw ConfigError("mask_radius_m", "must be non-negative");
  return c;
}

// Fills unset inputs with the conventional file in the output directory when it exists.
void resolve_defaults(RunConfig& c, const CommandInfo& info) {
  std::vector<std::string> names = info.required;
  names.insert(names.end(), info.optional.begin(), info.optional.end());
  for (const auto& n : names) {
    if (c.inputs.count(n) && !c.inputs[n].empty()) continue;
    const auto it = default_files().find(n);
    if (it == default_files().end()) continue;
    const fs::path p = fs::path(c.output_dir) / it->second;
    if (fs::exists(p)) c.inputs[n] = p.string();
  }
}

class RunRecord {
 public:
  RunRecord(std::string command, const RunConfig& cfg) : command_(std::move(command)), cfg_(cfg) {}

  std::string in(const std::string& name) {
    const std::string p = cfg_.input(name);
    note_input(name, p);
    return p;
  }
  std::optional<std::string> maybe(const std::string& name) {
    const auto p = cfg_.optional_input(name);
    if (p) note_input(name, *p);
    return p;
  }
  std::string out(const std::string& file) {
    const std::string p = (fs::path(cfg_.output_dir) / file).string();
    outputs_.push_back(p);
    return p;
  }
  void add_output_path(const std::string& p) { outputs_.push_back(p); }
  void add_summary(const std::string& key, nlohmann::ordered_json v) { summary_[key] = std::move(v); }

  void write() const {
    nlohmann::ordered_json j;
    j["format"] = "canopy-run-manifest";
    j["schema_version"] = kRunConfigSchemaVersion;
    j["command"] = command_;
    j["version"] = kVersion;
    j["seed"] = cfg_.seed ? nlohmann::ordered_json(*cfg_.seed) : nlohmann::ordered_json(nullptr);
    const auto cfg_json = cfg_.to_json();
    j["config_hash"] = hex64(fnv1a64(cfg_json.dump()));
    j["config"] = cfg_json;
    auto& ins = j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& [name, path, hash] : inputs_) ins.push_back({{"name", name}, {"path", path}, {"hash", hash}});
    auto& outs = j["outputs"] = nlohmann::ordered_json::array();
    for (const auto& p : outputs_) outs.push_back({{"path", p}, {"hash", hash_file(p)}});
    if (!summary_.empty()) j["summary"] = summary_;
    const fs::path path = fs::path(cfg_.output_dir) / (command_ + "_run.json");
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw Error("cannot write '" + path.string() + "'");
    f << j.dump(2) << '\n';
    if (!f) throw Error("write failed for '" + path.string() + "'");
  }

 private:
  void note_input(const std::string& name, const std::string& p) {
    inputs_.push_back({name, p, hash_file(p)});
    if (name == "model" && fs::exists(p + ".bin")) inputs_.push_back({"model_payload", p + ".bin", hash_file(p + ".bin")});
  }

  std::string command_;
  const RunConfig& cfg_;
  std::vector<std::tuple<std::string, std::string, std::string>> inputs_;
  std::vector<std::string> outputs_;
  nlohmann::ordered_json summary_ = nlohmann::ordered_json::object();
};

LabelScheme resolve_scheme(const std::string& name, const std::vector<Polygon>& crowns) {
  if (name == "auto" || name == "identity") {
    std::vector<std::string> seen;
    for (const auto& c : crowns)
      if (std::find(seen.begin(), seen.end(), c.label) == seen.end()) seen.push_back(c.label);
    const auto& base = base_labels();
    const bool all_base = std::all_of(seen.begin(), seen.end(), [&](const std::string& l) {
      return std::find(base.begin(), base.end(), l) != base.end();
    });
    if (name == "auto" && all_base) return LabelScheme::builtin("all");
    std::sort(seen.begin(), seen.end());
    return LabelScheme::identity(seen);
  }
  return LabelScheme::builtin(name);
}

struct TrainingData {
  FeatureTable full;
  FeatureTable table;
  std::vector<Polygon> crowns;
  LabelScheme scheme;
  LabelledSet set;
  std::size_t excluded = 0;
};

TrainingData load_training(RunRecord& rec, const RunConfig& cfg) {
  TrainingData d;
  d.full = read_feature_table(rec.in("features"), rec.in("manifest"));
  d.table = d.full.select(cfg.features);
  d.crowns = read_polygons(rec.in("crowns"));
  const auto labels = read_region_labels(rec.in("labels"));
  d.scheme = resolve_scheme(cfg.scheme, d.crowns);
  std::vector<std::uint8_t> excluded;
  if (const auto masks_path = rec.maybe("masks")) {
    excluded = crowns_near_masks(d.crowns, read_polygons(*masks_path), cfg.mask_radius_m);
    d.excluded = static_cast<std::size_t>(std::count(excluded.begin(), excluded.end(), 1));
    log::info("excluded " + std::to_string(d.excluded) + " crowns within " + std::to_string(cfg.mask_radius_m) +
              " m of masks");
  }
  d.set = build_labelled_set(d.table, labels, d.crowns, d.scheme, excluded);
  log::info("labelled superpixels: " + std::to_string(d.set.size()) + ", classes: " +
            std::to_string(d.set.classes.size()) + ", scheme: " + d.scheme.name);
  return d;
}

ModelOptions model_options(const RunConfig& cfg) {
  ModelOptions opt = cfg.model;
  opt.seed = cfg.require_seed();
  return opt;
}

// Column subset of a table matching a model's feature list.
FeatureTable align_to_model(const FeatureTable& table, const Model& model) {
  if (table.manifest.hash() == model.manifest_hash) return table;
  std::map<std::string, std::size_t> index;
  const auto names = table.manifest.names();
  for (std::size_t i = 0; i < names.size(); ++i) index.emplace(names[i], i);
  std::vector<std::size_t> cols;
  for (const auto& n : model.feature_names) {
    const auto it = index.find(n);
    if (it == index.end()) throw ManifestMismatch("feature '" + n + "' required by the model is absent from the table");
    cols.push_back(it->second);
  }
  FeatureTable out;
  out.manifest = table.manifest.subset(cols);
  out.region_ids = table.region_ids;
  out.degenerate = table.degenerate;
  out.values = table.values.select_cols(cols);
  model.check_manifest(out.manifest);
  return out;
}

void cmd_segment(RunRecord& rec, const RunConfig& cfg) {
  const auto rgb = read_fbr(rec.in("rgb"));
  const auto part = slic_segment(rgb.raster, rgb.geo, cfg.slic);
  log::info("superpixels: " + std::to_string(part.region_count()));
  write_partition(part, rgb.geo, rec.out("partition.fbr"), rec.out("regions.csv"));
  rec.add_summary("regions", part.region_count());
}

void cmd_extract(RunRecord& rec, const RunConfig& cfg) {
  const auto part = read_partition(rec.in("partition"));
  std::optional<GeoRaster> rgb, ms, dsm;
  SceneImagery scene;
  if (cfg.features.rgb) {
    rgb = read_fbr(rec.in("rgb"));
    scene.rgb = &rgb->raster;
    scene.rgb_geo = rgb->geo;
  }
  if (cfg.features.ms) {
    ms = read_fbr(rec.in("ms"));
    scene.ms = &ms->raster;
    scene.ms_geo = ms->geo;
  }
  if (cfg.features.dsm) {
    dsm = read_fbr(rec.in("dsm"));
    scene.dsm = &dsm->raster;
    scene.dsm_geo = dsm->geo;
  }
  if (!rgb) scene.rgb_geo = part.geo;
  const auto table = extract_features(scene, part.partition, cfg.features);
  const auto degenerate = std::count(table.degenerate.begin(), table.degenerate.end(), 1);
  log::info("features: " + std::to_string(table.manifest.size()) + " x " + std::to_string(table.values.rows()) +
            " regions (" + std::to_string(degenerate) + " with degenerate statistics)");
  write_feature_table(table, rec.out("features.csv"), rec.out("features.manifest.json"));
  rec.add_summary("features", table.manifest.size());
  rec.add_summary("manifest_hash", table.manifest.hash());
}

void cmd_label(RunRecord& rec, const RunConfig&) {
  const auto part = read_partition(rec.in("partition"));
  const auto crowns = read_polygons(rec.in("crowns"));
  const auto raster = rasterize_polygons(crowns, part.geo, part.partition.width, part.partition.height);
  const auto labels = assign_superpixel_labels(part.partition, raster);
  const auto labelled = std::count_if(labels.begin(), labels.end(), [](const RegionLabel& l) { return l.crown >= 0; });
  log::info("labelled " + std::to_string(labelled) + " of " + std::to_string(labels.size()) + " superpixels");
  write_region_labels(labels, crowns, rec.out("labels.csv"));
  rec.add_summary("labelled_regions", labelled);
}

void cmd_cv(RunRecord& rec, const RunConfig& cfg) {
  const auto d = load_training(rec, cfg);
  const auto opt = model_options(cfg);
  const auto folds = make_folds(d.set.crown_class, cfg.folds, opt.seed);
  auto report = cross_validate(d.table, d.set, folds, opt);
  report.scheme = d.scheme.name;
  report.features = cfg.features.label();
  write_cv_report(report, rec.out("cv_report.json"), rec.out("cv_confusion.csv"));
  write_confusion_csv(report.crown_confusion, report.classes, rec.out("cv_crown_confusion.csv"));
  log::info("cv test accuracy " + std::to_string(report.mean_test) + " +/- " + std::to_string(report.sd_test) +
            ", leakage violations " + std::to_string(report.leakage_violations));
  rec.add_summary("mean_test", report.mean_test);
  rec.add_summary("leakage_violations", report.leakage_violations);
}

void cmd_train(RunRecord& rec, const RunConfig& cfg) {
  const auto d = load_training(rec, cfg);
  const auto opt = model_options(cfg);
  if (d.set.size() == 0) throw ValidationError("no labelled superpixels to train on");
  const auto rows = d.table.select_rows(d.set.rows);
  const auto model = train_model(rows, d.set.y, d.set.classes, opt, d.set.crown);
  const auto pred = model.predict(rows);
  const double acc = accuracy(d.set.y, pred.labels);
  log::info("training accuracy " + std::to_string(acc));
  const auto path = rec.out("model.json");
  save_model(model, path);
  rec.add_output_path(path + ".bin");
  rec.add_summary("train_accuracy", acc);
}

void cmd_predict(RunRecord& rec, const RunConfig& cfg) {
  const auto model = load_model(rec.in("model"));
  const auto table = align_to_model(read_feature_table(rec.in("features"), rec.in("manifest")), model);
  const auto part = read_partition(rec.in("partition"));
  std::vector<Polygon> masks;
  if (const auto m = rec.maybe("masks")) masks = read_polygons(*m);
  const auto map = landscape_predict(model, part.partition, part.geo, table, masks);
  write_class_map(map, rec.out("class_map.fbr"), rec.out("class_map.legend.json"));
  const auto cover = cover_summary(map);
  write_cover_csv(cover, rec.out("cover.csv"));
  (void)cfg;
}

void cmd_grid(RunRecord& rec, const RunConfig& cfg) {
  const auto map = read_class_map(rec.in("class_map"), rec.in("legend"));
  const auto grid = dominance_grid(map, cfg.grid_cell_ha * 10000.0);
  write_dominance_csv(grid, rec.out("dominance.csv"));
  rec.add_summary("cells", grid.cells.size());
}

void cmd_summary(RunRecord& rec, const RunConfig&) {
  const auto map = read_class_map(rec.in("class_map"), rec.in("legend"));
  std::vector<Polygon> boundary;
  if (const auto b = rec.maybe("boundary")) boundary = read_polygons(*b);
  const auto cover = cover_summary(map, boundary);
  write_cover_csv(cover, rec.out("cover_summary.csv"));
  rec.add_summary("total_hectares", cover.total_hectares);
}

void cmd_multiplex(RunRecord& rec, const RunConfig& cfg) {
  auto full_cfg = cfg;
  full_cfg.features = FeatureConfig{};
  const auto d = load_training(rec, full_cfg);
  const auto opt = model_options(cfg);
  const auto report = imagery_multiplex(d.full, d.set, opt, cfg.test_fraction, opt.seed);
  write_multiplex_report(report, rec.out("multiplex.json"), rec.out("multiplex.csv"));
  rec.add_summary("split_hash", report.split_hash);
  rec.add_summary("configurations", report.rows.size());
}

void cmd_synth(RunRecord& rec, const RunConfig& cfg) {
  SceneSpec spec = SceneSpec::defaults();
  if (const auto p = rec.maybe("scene_spec")) spec = read_scene_spec(*p);
  spec.seed = cfg.require_seed();
  spec.validate();
  const auto scene = generate_scene(spec);
  write_scene(scene, cfg.output_dir);
  for (const char* f : {"rgb.fbr", "ms.fbr", "dsm.fbr", "crowns.geojson", "truth.fbr", "truth_legend.json", "scene.json"})
    rec.out(f);
  rec.add_summary("crowns", scene.crowns.size());
}

using Handler = std::function<void(RunRecord&, const RunConfig&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> m{
      {"segment", cmd_segment}, {"extract", cmd_extract}, {"label", cmd_label},   {"cv", cmd_cv},
      {"train", cmd_train},     {"predict", cmd_predict}, {"grid", cmd_grid},     {"summary", cmd_summary},
      {"multiplex", cmd_multiplex}, {"synth", cmd_synth},
  };
  return m;
}

log::Level level_from(const std::string& s) {
  if (s == "debug") return log::Level::debug;
  if (s == "warn") return log::Level::warn;
  if (s == "error") return log::Level::error;
  return log::Level::info;
}

int execute(const std::string& command, const Overrides& o) {
  log::set_min_level(level_from(o.log_level));
  RunConfig cfg = effective_config(o);
  const auto& info = command_info(command);
  resolve_defaults(cfg, info);
  validate_run_config(cfg);
  cfg.require_seed();
  for (const auto& n : info.required) cfg.input(n);
  if (cfg.workers > 0) set_worker_count(cfg.workers);
  fs::create_directories(cfg.output_dir);
  RunRecord rec(command, cfg);
  handlers().at(command)(rec, cfg);
  rec.write();
  log::info("command " + command + " finished");
  return kExitOk;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& c : commands()) v.push_back(c.name);
    return v;
  }();
  return names;
}

int run_cli(const std::vector<std::string>& args) {
  if (args.size() < 2) {
    std::cerr << usage_text();
    return kExitUsage;
  }
  const std::string& first = args[1];
  if (first == "--help" || first == "-h") {
    std::cout << usage_text();
    return kExitOk;
  }
  if (first == "--version") {
    std::cout << "canopy " << kVersion << '\n';
    return kExitOk;
  }
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), first) == names.end()) {
    std::cerr << "unknown command '" << first << "'\n" << usage_text();
    return kExitUsage;
  }

  const auto& info = command_info(first);
  CLI::App app{info.help, "canopy " + first};
  Overrides o;
  add_options(app, o);
  std::vector<std::string> rest(args.begin() + 2, args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    log::error(std::string("config: ") + e.what());
    return kExitValidation;
  }

  try {
    return execute(first, o);
  } catch (const ConfigError& e) {
    log::error(std::string("config error at ") + e.what());
    return kExitValidation;
  } catch (const ValidationError& e) {
    log::error(e.what());
    return kExitValidation;
  } catch (const FormatError& e) {
    log::error(e.what());
    return kExitValidation;
  } catch (const ManifestMismatch& e) {
    log::error(e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    log::error(e.what());
    return kExitRuntime;
  }
}

}  // namespace canopy::cli
