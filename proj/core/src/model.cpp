#include "canopy/model.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "canopy/error.hpp"
#include "canopy/hash.hpp"

namespace canopy {

namespace {

constexpr int kArtifactVersion = 1;

class Payload {
 public:
  void add(const std::string& name, std::vector<std::size_t> shape, std::span<const double> values) {
    std::size_t count = 1;
    for (std::size_t s : shape) count *= s;
    if (count != values.size()) throw Error("payload array '" + name + "' shape mismatch");
    index_.push_back({{"name", name}, {"shape", shape}, {"offset", floats_.size()}});
    for (double v : values) floats_.push_back(static_cast<float>(v));
  }
  template <class T>
  void add_ints(const std::string& name, std::span<const T> values) {
    std::vector<double> d(values.begin(), values.end());
    add(name, {values.size()}, d);
  }

  nlohmann::json index() const { return index_; }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot create '" + path + "'");
    for (float f : floats_) {
      std::uint32_t u = std::bit_cast<std::uint32_t>(f);
      const unsigned char b[4] = {static_cast<unsigned char>(u), static_cast<unsigned char>(u >> 8),
                                  static_cast<unsigned char>(u >> 16), static_cast<unsigned char>(u >> 24)};
      out.write(reinterpret_cast<const char*>(b), 4);
    }
    if (!out) throw Error("failed writing '" + path + "'");
  }

 private:
  nlohmann::json index_ = nlohmann::json::array();
  std::vector<float> floats_;
};

class PayloadReader {
 public:
  PayloadReader(const std::string& path, const nlohmann::json& index) : index_(index) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open model payload '" + path + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() % 4 != 0) throw FormatError("model payload length is not a multiple of 4", bytes.size());
    floats_.resize(bytes.size() / 4);
    for (std::size_t i = 0; i < floats_.size(); ++i) {
      const std::uint32_t u = bytes[4 * i] | (bytes[4 * i + 1] << 8) | (bytes[4 * i + 2] << 16) |
                              (static_cast<std::uint32_t>(bytes[4 * i + 3]) << 24);
      floats_[i] = std::bit_cast<float>(u);
    }
  }

  std::vector<double> get(const std::string& name, std::vector<std::size_t>* shape = nullptr) const {
    for (const auto& e : index_) {
      if (e.at("name") != name) continue;
      const auto sh = e.at("shape").get<std::vector<std::size_t>>();
      std::size_t count = 1;
      for (std::size_t s : sh) count *= s;
      const std::size_t off = e.at("offset").get<std::size_t>();
      if (off + count > floats_.size()) throw FormatError("model payload array '" + name + "' out of range", off * 4);
      if (shape) *shape = sh;
      return {floats_.begin() + static_cast<std::ptrdiff_t>(off), floats_.begin() + static_cast<std::ptrdiff_t>(off + count)};
    }
    throw FormatError("model payload array '" + name + "' missing");
  }

  Matrix matrix(const std::string& name) const {
    std::vector<std::size_t> sh;
    const auto v = get(name, &sh);
    if (sh.size() != 2) throw FormatError("model payload array '" + name + "' is not 2-D");
    Matrix m(sh[0], sh[1]);
    std::copy(v.begin(), v.end(), m.data().begin());
    return m;
  }

 private:
  const nlohmann::json& index_;
  std::vector<float> floats_;
};

template <class T>
std::vector<T> as_ints(const std::vector<double>& v) {
  std::vector<T> out;
  out.reserve(v.size());
  for (double d : v) out.push_back(static_cast<T>(d));
  return out;
}

}  // namespace

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::lasso: return "lasso";
    case ModelKind::svm: return "svm";
    case ModelKind::forest: return "forest";
  }
  return "svm";
}

ModelKind model_kind_from_string(std::string_view s) {
  if (s == "lasso") return ModelKind::lasso;
  if (s == "svm") return ModelKind::svm;
  if (s == "forest" || s == "rf") return ModelKind::forest;
  throw ValidationError("unknown model kind '" + std::string(s) + "' (expected lasso, svm or forest)");
}

void ModelOptions::validate() const {
  switch (kind) {
    case ModelKind::lasso: lasso.validate(); break;
    case ModelKind::svm: svm.validate(); break;
    case ModelKind::forest: forest.validate(); break;
  }
}

void Model::check_manifest(const FeatureManifest& manifest) const {
  if (manifest.hash() != manifest_hash || manifest.names() != feature_names)
    throw ManifestMismatch("feature layout " + manifest.hash() + " does not match the model's layout " + manifest_hash);
}

Prediction Model::predict_standardized(const Matrix& z) const {
  return std::visit([&](const auto& m) { return m.predict(z); }, impl);
}

Prediction Model::predict(const FeatureTable& table) const {
  check_manifest(table.manifest);
  return predict_standardized(standardizer.apply(table.values));
}

Model train_model(const FeatureTable& table, std::span<const int> y, const std::vector<std::string>& classes,
                  const ModelOptions& opt, std::span<const int> groups) {
  opt.validate();
  check_training_inputs(table.values, y, {});
  Model m;
  m.kind = opt.kind;
  m.manifest_hash = table.manifest.hash();
  m.feature_names = table.manifest.names();
  m.classes = classes;
  m.seed = opt.seed;
  m.standardizer = Standardizer::fit(table.values);
  const Matrix z = m.standardizer.apply(table.values);
  m.class_weight = class_weights(y, classes.size());
  const auto w = sample_weights(y, m.class_weight);
  switch (opt.kind) {
    case ModelKind::lasso: m.impl = fit_group_lasso(z, y, w, classes.size(), opt.lasso); break;
    case ModelKind::svm: {
      SvmConfig cfg = opt.svm;
      cfg.seed = opt.seed;
      m.impl = fit_svm_rbf(z, y, w, classes.size(), cfg, groups);
      break;
    }
    case ModelKind::forest: {
      RandomForestConfig cfg = opt.forest;
      cfg.seed = opt.seed;
      m.impl = fit_random_forest(z, y, w, classes.size(), cfg);
      break;
    }
  }
  return m;
}

void save_model(const Model& model, const std::string& path) {
  nlohmann::ordered_json j;
  j["format"] = "canopy-model";
  j["version"] = kArtifactVersion;
  j["kind"] = to_string(model.kind);
  j["manifest_hash"] = model.manifest_hash;
  j["features"] = model.feature_names;
  j["classes"] = model.classes;
  j["class_weight"] = model.class_weight;
  j["seed"] = model.seed;
  j["standardizer"] = {{"mean", model.standardizer.mean},
                       {"scale", model.standardizer.scale},
                       {"constant", model.standardizer.constant}};
  Payload payload;
  nlohmann::ordered_json hyper;
  if (const auto* m = std::get_if<GroupLassoModel>(&model.impl)) {
    hyper["lambda"] = m->lambda;
    hyper["active"] = m->active;
    hyper["selected"] = m->selected;
    auto& path_json = hyper["path"] = nlohmann::ordered_json::array();
    for (const auto& p : m->path)
      path_json.push_back({{"lambda", p.lambda}, {"active_groups", p.active_groups},
                           {"weighted_accuracy", p.weighted_accuracy}, {"objective", p.objective}});
    payload.add("coef", {m->coef.rows(), m->coef.cols()}, m->coef.data());
    payload.add("intercept", {m->intercept.size()}, m->intercept);
  } else if (const auto* m = std::get_if<SvmModel>(&model.impl)) {
    hyper["c"] = m->c;
    hyper["gamma"] = m->gamma;
    auto& grid = hyper["grid"] = nlohmann::ordered_json::array();
    for (const auto& g : m->grid)
      grid.push_back({{"c", g.c}, {"gamma", g.gamma}, {"accuracy", g.accuracy}, {"folds_used", g.folds_used}});
    auto& pairs = hyper["pairs"] = nlohmann::ordered_json::array();
    for (const auto& p : m->pairs) pairs.push_back({{"a", p.class_a}, {"b", p.class_b}, {"bias", p.bias}});
    payload.add("support_vectors", {m->support_vectors.rows(), m->support_vectors.cols()}, m->support_vectors.data());
    for (std::size_t p = 0; p < m->pairs.size(); ++p) {
      payload.add_ints<std::uint32_t>("pair" + std::to_string(p) + ".support", m->pairs[p].support);
      payload.add("pair" + std::to_string(p) + ".coef", {m->pairs[p].coef.size()}, m->pairs[p].coef);
    }
  } else if (const auto* m = std::get_if<RandomForestModel>(&model.impl)) {
    hyper["n_trees"] = m->trees.size();
    hyper["mtry"] = m->mtry;
    hyper["oob_accuracy"] = m->oob_accuracy;
    std::vector<std::int32_t> sizes, feature, left, right, label;
    std::vector<double> threshold;
    for (const auto& t : m->trees) {
      sizes.push_back(static_cast<std::int32_t>(t.nodes.size()));
      for (const auto& n : t.nodes) {
        feature.push_back(n.feature);
        threshold.push_back(n.threshold);
        left.push_back(n.left);
        right.push_back(n.right);
        label.push_back(n.label);
      }
    }
    payload.add_ints<std::int32_t>("tree_sizes", sizes);
    payload.add_ints<std::int32_t>("feature", feature);
    payload.add("threshold", {threshold.size()}, threshold);
    payload.add_ints<std::int32_t>("left", left);
    payload.add_ints<std::int32_t>("right", right);
    payload.add_ints<std::int32_t>("label", label);
  }
  j["hyperparameters"] = hyper;
  const std::string bin_path = path + ".bin";
  payload.write(bin_path);
  j["payload"] = {{"file", std::filesystem::path(bin_path).filename().string()},
                  {"encoding", "float32-le"},
                  {"hash", hash_file(bin_path)},
                  {"arrays", payload.index()}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot create '" + path + "'");
  out << j.dump(1) << '\n';
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model '" + path + "'");
  Model m;
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.at("format") != "canopy-model") throw FormatError("'" + path + "' is not a model artifact");
    if (j.at("version").get<int>() != kArtifactVersion)
      throw FormatError("unsupported model artifact version " + std::to_string(j.at("version").get<int>()));
    m.kind = model_kind_from_string(j.at("kind").get<std::string>());
    m.manifest_hash = j.at("manifest_hash").get<std::string>();
    m.feature_names = j.at("features").get<std::vector<std::string>>();
    m.classes = j.at("classes").get<std::vector<std::string>>();
    m.class_weight = j.at("class_weight").get<std::vector<double>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    const auto& st = j.at("standardizer");
    m.standardizer.mean = st.at("mean").get<std::vector<double>>();
    m.standardizer.scale = st.at("scale").get<std::vector<double>>();
    m.standardizer.constant = st.at("constant").get<std::vector<std::uint8_t>>();

    const auto& pl = j.at("payload");
    const std::string bin_path =
        (std::filesystem::path(path).parent_path() / pl.at("file").get<std::string>()).string();
    if (hash_file(bin_path) != pl.at("hash").get<std::string>())
      throw FormatError("model payload '" + bin_path + "' hash mismatch");
    const PayloadReader payload(bin_path, pl.at("arrays"));
    const auto& hyper = j.at("hyperparameters");
    const std::size_t k = m.classes.size();
    switch (m.kind) {
      case ModelKind::lasso: {
        GroupLassoModel g;
        g.n_classes = k;
        g.coef = payload.matrix("coef");
        g.intercept = payload.get("intercept");
        g.lambda = hyper.at("lambda").get<double>();
        g.active = hyper.at("active").get<std::vector<std::size_t>>();
        g.selected = hyper.at("selected").get<std::size_t>();
        for (const auto& p : hyper.at("path"))
          g.path.push_back({p.at("lambda").get<double>(), p.at("active_groups").get<std::size_t>(),
                            p.at("weighted_accuracy").get<double>(), p.at("objective").get<double>()});
        m.impl = std::move(g);
        break;
      }
      case ModelKind::svm: {
        SvmModel s;
        s.n_classes = k;
        s.c = hyper.at("c").get<double>();
        s.gamma = hyper.at("gamma").get<double>();
        for (const auto& g : hyper.at("grid"))
          s.grid.push_back({g.at("c").get<double>(), g.at("gamma").get<double>(), g.at("accuracy").get<double>(),
                            g.at("folds_used").get<std::size_t>()});
        s.support_vectors = payload.matrix("support_vectors");
        std::size_t p = 0;
        for (const auto& pj : hyper.at("pairs")) {
          SvmPair pair;
          pair.class_a = pj.at("a").get<int>();
          pair.class_b = pj.at("b").get<int>();
          pair.bias = pj.at("bias").get<double>();
          pair.support = as_ints<std::uint32_t>(payload.get("pair" + std::to_string(p) + ".support"));
          pair.coef = payload.get("pair" + std::to_string(p) + ".coef");
          for (auto idx : pair.support)
            if (idx >= s.support_vectors.rows()) throw FormatError("SVM support index out of range");
          s.pairs.push_back(std::move(pair));
          ++p;
        }
        m.impl = std::move(s);
        break;
      }
      case ModelKind::forest: {
        RandomForestModel r;
        r.n_classes = k;
        r.mtry = hyper.at("mtry").get<std::size_t>();
        r.oob_accuracy = hyper.at("oob_accuracy").get<double>();
        r.seed = m.seed;
        const auto sizes = as_ints<std::int32_t>(payload.get("tree_sizes"));
        const auto feature = as_ints<std::int32_t>(payload.get("feature"));
        const auto threshold = payload.get("threshold");
        const auto left = as_ints<std::int32_t>(payload.get("left"));
        const auto right = as_ints<std::int32_t>(payload.get("right"));
        const auto label = as_ints<std::int32_t>(payload.get("label"));
        std::size_t off = 0;
        for (std::int32_t sz : sizes) {
          DecisionTree t;
          for (std::int32_t i = 0; i < sz; ++i, ++off) {
            if (off >= feature.size()) throw FormatError("forest payload truncated");
            t.nodes.push_back({feature[off], static_cast<float>(threshold[off]), left[off], right[off], label[off]});
            if (feature[off] >= 0 && (left[off] <= i || right[off] <= i || left[off] >= sz || right[off] >= sz))
              throw FormatError("forest node links out of range");
          }
          r.trees.push_back(std::move(t));
        }
        m.impl = std::move(r);
        break;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("model artifact '" + path + "': " + e.what());
  }
  return m;
}

}  // namespace canopy
