#include "canopy/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

#include "canopy/error.hpp"
#include "canopy/hash.hpp"
#include "canopy/log.hpp"
#include "canopy/parallel.hpp"
#include "canopy/raster_io.hpp"

namespace canopy {

namespace {

double mean_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

nlohmann::ordered_json confusion_json(const ConfusionMatrix& m) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& row : m) j.push_back(row);
  return j;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void open_out(std::ofstream& out, const std::string& path) {
  out.open(path, std::ios::trunc);
  if (!out) throw Error("cannot create '" + path + "'");
}

}  // namespace

LabelledSet build_labelled_set(const FeatureTable& table, const std::vector<RegionLabel>& labels,
                               const std::vector<Polygon>& crowns, const LabelScheme& scheme,
                               std::span<const std::uint8_t> excluded) {
  scheme.validate();
  if (!excluded.empty() && excluded.size() != crowns.size())
    throw ValidationError("crown exclusion flags do not match the crown count");
  LabelledSet set;
  set.classes = scheme.classes;
  std::vector<int> cls(crowns.size());
  for (std::size_t c = 0; c < crowns.size(); ++c) cls[c] = scheme.class_of(crowns[c].label);
  set.crown_class.assign(crowns.size(), -1);
  for (const auto& l : labels) {
    if (l.crown < 0) continue;
    const auto c = static_cast<std::size_t>(l.crown);
    if (c >= crowns.size()) throw ValidationError("region label refers to an unknown crown");
    if (!excluded.empty() && excluded[c]) continue;
    const auto row = table.row_of(l.region);
    if (!row) throw ValidationError("labelled region " + std::to_string(l.region) + " has no feature row");
    set.rows.push_back(*row);
    set.y.push_back(cls[c]);
    set.crown.push_back(l.crown);
    set.crown_class[c] = cls[c];
  }
  return set;
}

std::vector<std::uint8_t> crowns_near_masks(const std::vector<Polygon>& crowns, const std::vector<Polygon>& masks,
                                            double radius) {
  std::vector<std::uint8_t> out(crowns.size(), 0);
  for (std::size_t c = 0; c < crowns.size(); ++c)
    for (const auto& m : masks)
      if (polygon_distance(crowns[c], m) <= radius) {
        out[c] = 1;
        break;
      }
  return out;
}

ConfusionMatrix make_confusion(std::size_t n_classes) {
  return ConfusionMatrix(n_classes, std::vector<std::size_t>(n_classes, 0));
}

ConfusionMatrix merge_confusion(const ConfusionMatrix& m, std::span<const int> map, std::size_t n_coarse) {
  if (map.size() != m.size()) throw ValidationError("class map size does not match confusion matrix");
  auto out = make_confusion(n_coarse);
  for (std::size_t p = 0; p < m.size(); ++p)
    for (std::size_t a = 0; a < m.size(); ++a)
      out[static_cast<std::size_t>(map[p])][static_cast<std::size_t>(map[a])] += m[p][a];
  return out;
}

ConfusionMetrics confusion_metrics(const ConfusionMatrix& m) {
  const std::size_t k = m.size();
  for (const auto& row : m)
    if (row.size() != k) throw ValidationError("confusion matrix must be square");
  ConfusionMetrics out;
  out.precision.assign(k, 0.0);
  out.recall.assign(k, 0.0);
  out.precision_undefined.assign(k, 0);
  out.recall_undefined.assign(k, 0);
  std::size_t diag = 0, total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t row = 0, col = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row += m[i][j];
      col += m[j][i];
      total += m[i][j];
    }
    diag += m[i][i];
    if (row > 0)
      out.precision[i] = static_cast<double>(m[i][i]) / static_cast<double>(row);
    else
      out.precision_undefined[i] = 1;
    if (col > 0)
      out.recall[i] = static_cast<double>(m[i][i]) / static_cast<double>(col);
    else
      out.recall_undefined[i] = 1;
  }
  out.overall = total > 0 ? static_cast<double>(diag) / static_cast<double>(total) : 0.0;
  return out;
}

std::size_t count_leakage(std::span<const int> train_crowns, std::span<const int> test_crowns) {
  std::vector<int> a(train_crowns.begin(), train_crowns.end()), b(test_crowns.begin(), test_crowns.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  std::vector<int> both;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
  return both.size();
}

SplitResult evaluate_split(const FeatureTable& table, const LabelledSet& set, std::span<const std::uint8_t> crown_is_test,
                           const ModelOptions& opt) {
  const std::size_t k = set.classes.size();
  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < set.size(); ++i)
    (crown_is_test[static_cast<std::size_t>(set.crown[i])] ? test_idx : train_idx).push_back(i);

  auto gather = [&](const std::vector<std::size_t>& idx, std::vector<std::size_t>& rows, std::vector<int>& y,
                    std::vector<int>& crowns) {
    for (std::size_t i : idx) {
      rows.push_back(set.rows[i]);
      y.push_back(set.y[i]);
      crowns.push_back(set.crown[i]);
    }
  };
  std::vector<std::size_t> train_rows, test_rows;
  std::vector<int> y_train, y_test, c_train, c_test;
  gather(train_idx, train_rows, y_train, c_train);
  gather(test_idx, test_rows, y_test, c_test);

  SplitResult r;
  r.train_rows = train_rows.size();
  r.test_rows = test_rows.size();
  r.leakage = count_leakage(c_train, c_test);
  r.confusion = make_confusion(k);
  r.crown_confusion = make_confusion(k);
  if (train_rows.empty() || test_rows.empty()) throw ValidationError("crown split leaves an empty train or test side");

  for (std::size_t c = 0; c < k; ++c)
    if (std::find(y_test.begin(), y_test.end(), static_cast<int>(c)) == y_test.end()) r.missing_classes.push_back(set.classes[c]);

  const FeatureTable train = table.select_rows(train_rows);
  const FeatureTable test = table.select_rows(test_rows);
  const Model model = train_model(train, y_train, set.classes, opt, c_train);
  const auto pred_train = model.predict(train);
  const auto pred_test = model.predict(test);
  r.train_accuracy = accuracy(y_train, pred_train.labels);
  r.test_accuracy = accuracy(y_test, pred_test.labels);
  for (std::size_t i = 0; i < y_test.size(); ++i)
    ++r.confusion[static_cast<std::size_t>(pred_test.labels[i])][static_cast<std::size_t>(y_test[i])];

  // Crown-level majority vote, lowest class on ties.
  std::vector<int> crowns = c_test;
  std::sort(crowns.begin(), crowns.end());
  crowns.erase(std::unique(crowns.begin(), crowns.end()), crowns.end());
  std::vector<int> trains = c_train;
  std::sort(trains.begin(), trains.end());
  r.train_crowns = static_cast<std::size_t>(std::unique(trains.begin(), trains.end()) - trains.begin());
  r.test_crowns = crowns.size();
  std::size_t crown_hits = 0;
  for (int crown : crowns) {
    std::vector<double> votes(k, 0.0);
    for (std::size_t i = 0; i < c_test.size(); ++i)
      if (c_test[i] == crown) votes[static_cast<std::size_t>(pred_test.labels[i])] += 1.0;
    const std::size_t p = argmax(votes);
    const auto actual = static_cast<std::size_t>(set.crown_class[static_cast<std::size_t>(crown)]);
    ++r.crown_confusion[p][actual];
    crown_hits += p == actual;
  }
  r.test_crown_accuracy = crowns.empty() ? 0.0 : static_cast<double>(crown_hits) / static_cast<double>(crowns.size());
  return r;
}

CvReport cross_validate(const FeatureTable& table, const LabelledSet& set, const FoldAssignment& folds,
                        const ModelOptions& opt) {
  opt.validate();
  if (set.size() == 0) throw ValidationError("no labelled superpixels to cross-validate");
  if (folds.crown_fold.size() != set.crown_class.size()) throw ValidationError("fold assignment does not match crowns");
  CvReport rep;
  rep.model = std::string(to_string(opt.kind));
  rep.classes = set.classes;
  rep.k = folds.k;
  rep.seed = opt.seed;
  rep.folds.resize(folds.k);
  parallel_for(folds.k, [&](std::size_t f) {
    std::vector<std::uint8_t> is_test(folds.crown_fold.size());
    for (std::size_t c = 0; c < is_test.size(); ++c) is_test[c] = folds.crown_fold[c] == static_cast<int>(f);
    ModelOptions fold_opt = opt;
    fold_opt.seed = mix_seed(opt.seed, f);
    rep.folds[f] = evaluate_split(table, set, is_test, fold_opt);
  });
  const std::size_t k = set.classes.size();
  rep.confusion = make_confusion(k);
  rep.crown_confusion = make_confusion(k);
  std::vector<double> tr, te, cr;
  for (std::size_t f = 0; f < folds.k; ++f) {
    const auto& r = rep.folds[f];
    for (const auto& c : r.missing_classes)
      log::warn("fold " + std::to_string(f) + " has no test rows of class '" + c + "'");
    tr.push_back(r.train_accuracy);
    te.push_back(r.test_accuracy);
    cr.push_back(r.test_crown_accuracy);
    rep.leakage_violations += r.leakage;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        rep.confusion[i][j] += r.confusion[i][j];
        rep.crown_confusion[i][j] += r.crown_confusion[i][j];
      }
  }
  rep.mean_train = mean_of(tr);
  rep.sd_train = sd_of(tr);
  rep.mean_test = mean_of(te);
  rep.sd_test = sd_of(te);
  rep.mean_crown = mean_of(cr);
  rep.sd_crown = sd_of(cr);
  return rep;
}

std::string cv_report_json(const CvReport& rep) {
  nlohmann::ordered_json j;
  j["format"] = "canopy-cv-report";
  j["version"] = 1;
  j["model"] = rep.model;
  j["scheme"] = rep.scheme;
  j["features"] = rep.features;
  j["classes"] = rep.classes;
  j["k"] = rep.k;
  j["seed"] = rep.seed;
  j["sd_definition"] = "sample standard deviation across folds";
  j["summary"] = {{"train_accuracy", {{"mean", rep.mean_train}, {"sd", rep.sd_train}}},
                  {"test_accuracy", {{"mean", rep.mean_test}, {"sd", rep.sd_test}}},
                  {"test_crown_accuracy", {{"mean", rep.mean_crown}, {"sd", rep.sd_crown}}}};
  j["leakage_violations"] = rep.leakage_violations;
  auto& folds = j["folds"] = nlohmann::ordered_json::array();
  for (std::size_t f = 0; f < rep.folds.size(); ++f) {
    const auto& r = rep.folds[f];
    folds.push_back({{"fold", f},
                     {"train_rows", r.train_rows},
                     {"test_rows", r.test_rows},
                     {"train_crowns", r.train_crowns},
                     {"test_crowns", r.test_crowns},
                     {"train_accuracy", r.train_accuracy},
                     {"test_accuracy", r.test_accuracy},
                     {"test_crown_accuracy", r.test_crown_accuracy},
                     {"missing_test_classes", r.missing_classes}});
  }
  const auto metrics = confusion_metrics(rep.confusion);
  j["confusion"] = {{"orientation", "rows = predicted, columns = actual"},
                    {"superpixel", confusion_json(rep.confusion)},
                    {"crown", confusion_json(rep.crown_confusion)},
                    {"precision", metrics.precision},
                    {"recall", metrics.recall},
                    {"overall", metrics.overall}};
  return j.dump(1) + "\n";
}

void write_confusion_csv(const ConfusionMatrix& m, const std::vector<std::string>& classes, const std::string& path) {
  std::ofstream out;
  open_out(out, path);
  out << "predicted\\actual";
  for (const auto& c : classes) out << ',' << c;
  out << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << classes[i];
    for (std::size_t v : m[i]) out << ',' << v;
    out << '\n';
  }
}

void write_cv_report(const CvReport& report, const std::string& json_path, const std::string& confusion_csv) {
  std::ofstream out;
  open_out(out, json_path);
  out << cv_report_json(report);
  write_confusion_csv(report.confusion, report.classes, confusion_csv);
}

std::vector<std::uint8_t> masked_regions(const SuperpixelPartition& partition, const GeoTransform& geo,
                                         const std::vector<Polygon>& masks) {
  std::vector<std::uint8_t> out(partition.region_count(), 0);
  if (masks.empty()) return out;
  const auto mask = rasterize_polygons(masks, geo, partition.width, partition.height);
  std::vector<std::size_t> inside(partition.region_count(), 0);
  for (std::size_t p = 0; p < mask.size(); ++p)
    if (mask[p] >= 0) ++inside[partition.labels[p]];
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = 2 * inside[r] >= partition.regions[r].pixel_count;
  return out;
}

ClassMap landscape_predict(const Model& model, const SuperpixelPartition& partition, const GeoTransform& geo,
                           const FeatureTable& table, const std::vector<Polygon>& masks) {
  model.check_manifest(table.manifest);
  const auto masked = masked_regions(partition, geo, masks);
  std::vector<std::size_t> rows;
  std::vector<std::size_t> region_of;
  for (std::size_t r = 0; r < partition.region_count(); ++r) {
    if (masked[r]) continue;
    const auto row = table.row_of(static_cast<std::uint32_t>(r));
    if (!row) throw ValidationError("region " + std::to_string(r) + " has no feature row");
    rows.push_back(*row);
    region_of.push_back(r);
  }
  std::vector<int> region_class(partition.region_count(), kMaskedCode);
  if (!rows.empty()) {
    const auto pred = model.predict(table.select_rows(rows));
    for (std::size_t i = 0; i < rows.size(); ++i) region_class[region_of[i]] = pred.labels[i];
  }
  ClassMap map;
  map.width = partition.width;
  map.height = partition.height;
  map.geo = geo;
  map.classes = model.classes;
  map.codes.resize(partition.labels.size());
  for (std::size_t p = 0; p < map.codes.size(); ++p) map.codes[p] = region_class[partition.labels[p]];
  return map;
}

void write_class_map(const ClassMap& map, const std::string& fbr_path, const std::string& legend_path) {
  std::vector<float> data(map.codes.begin(), map.codes.end());
  const Raster r(map.width, map.height, {BandRole::derived}, std::move(data));
  write_fbr(r, map.geo, fbr_path);
  nlohmann::ordered_json j;
  j["format"] = "canopy-class-legend";
  j["masked_code"] = kMaskedCode;
  auto& classes = j["classes"] = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < map.classes.size(); ++c) classes.push_back({{"code", c}, {"name", map.classes[c]}});
  std::ofstream out;
  open_out(out, legend_path);
  out << j.dump(1) << '\n';
}

ClassMap read_class_map(const std::string& fbr_path, const std::string& legend_path) {
  const auto gr = read_fbr(fbr_path);
  ClassMap map;
  map.width = gr.raster.width();
  map.height = gr.raster.height();
  map.geo = gr.geo;
  std::ifstream in(legend_path);
  if (!in) throw ValidationError("cannot open '" + legend_path + "'");
  try {
    const auto j = nlohmann::json::parse(in);
    for (const auto& c : j.at("classes")) {
      if (c.at("code").get<std::size_t>() != map.classes.size()) throw FormatError("legend codes must be 0..K-1 in order");
      map.classes.push_back(c.at("name").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(legend_path + ": " + e.what());
  }
  const auto band = gr.raster.band(0);
  map.codes.resize(band.size());
  for (std::size_t p = 0; p < band.size(); ++p) {
    const int code = static_cast<int>(band[p]);
    if (static_cast<float>(code) != band[p] || code < kMaskedCode || code >= static_cast<int>(map.classes.size()))
      throw FormatError("class raster holds an invalid code at pixel " + std::to_string(p));
    map.codes[p] = code;
  }
  return map;
}

CoverSummary cover_summary(const ClassMap& map, const std::vector<Polygon>& boundary) {
  CoverSummary c;
  c.classes = map.classes;
  c.pixels.assign(map.classes.size(), 0);
  std::vector<std::int32_t> inside;
  if (!boundary.empty()) inside = rasterize_polygons(boundary, map.geo, map.width, map.height);
  for (std::size_t p = 0; p < map.codes.size(); ++p) {
    if (map.codes[p] < 0) continue;
    if (!boundary.empty() && inside[p] < 0) continue;
    ++c.pixels[static_cast<std::size_t>(map.codes[p])];
    ++c.total_pixels;
  }
  if (c.total_pixels == 0) throw ValidationError("no classified pixels inside the boundary");
  c.total_hectares = static_cast<double>(c.total_pixels) * map.geo.pixel_area_m2() / 10000.0;
  for (std::size_t k = 0; k < c.classes.size(); ++k) {
    const double frac = static_cast<double>(c.pixels[k]) / static_cast<double>(c.total_pixels);
    c.percent.push_back(100.0 * frac);
    c.hectares.push_back(frac * c.total_hectares);
  }
  return c;
}

CoverSummary cover_from_percentages(const std::vector<std::string>& classes, std::span<const double> percent,
                                    double total_hectares) {
  if (classes.size() != percent.size()) throw ValidationError("class and percentage counts differ");
  CoverSummary c;
  c.classes = classes;
  c.pixels.assign(classes.size(), 0);
  c.total_hectares = total_hectares;
  for (double p : percent) {
    c.percent.push_back(p);
    c.hectares.push_back(p / 100.0 * total_hectares);
  }
  return c;
}

void write_cover_csv(const CoverSummary& cover, const std::string& path) {
  std::ofstream out;
  open_out(out, path);
  out << "class,pixels,percent,hectares\n";
  for (std::size_t k = 0; k < cover.classes.size(); ++k)
    out << cover.classes[k] << ',' << cover.pixels[k] << ',' << fmt(cover.percent[k]) << ',' << fmt(cover.hectares[k]) << '\n';
  out << "TOTAL," << cover.total_pixels << ",100," << fmt(cover.total_hectares) << '\n';
}

DominanceGrid dominance_grid(const ClassMap& map, double cell_area_m2) {
  if (!(cell_area_m2 > 0.0)) throw ValidationError("cell area must be positive");
  DominanceGrid g;
  g.cell_size = std::sqrt(cell_area_m2);
  g.classes = map.classes;
  const double extent_x = static_cast<double>(map.width) * map.geo.pixel_width;
  const double extent_y = static_cast<double>(map.height) * map.geo.pixel_height;
  g.nx = static_cast<std::size_t>(std::ceil(extent_x / g.cell_size - 1e-9));
  g.ny = static_cast<std::size_t>(std::ceil(extent_y / g.cell_size - 1e-9));
  const std::size_t k = map.classes.size();
  std::vector<std::vector<std::size_t>> counts(g.nx * g.ny, std::vector<std::size_t>(k, 0));
  for (std::size_t y = 0; y < map.height; ++y) {
    const double dy = (static_cast<double>(y) + 0.5) * map.geo.pixel_height;
    const std::size_t cy = std::min(g.ny - 1, static_cast<std::size_t>(dy / g.cell_size));
    for (std::size_t x = 0; x < map.width; ++x) {
      const int code = map.codes[y * map.width + x];
      if (code < 0) continue;
      const double dx = (static_cast<double>(x) + 0.5) * map.geo.pixel_width;
      const std::size_t cx = std::min(g.nx - 1, static_cast<std::size_t>(dx / g.cell_size));
      ++counts[cy * g.nx + cx][static_cast<std::size_t>(code)];
    }
  }
  const double pixel_area = map.geo.pixel_area_m2();
  for (std::size_t cy = 0; cy < g.ny; ++cy)
    for (std::size_t cx = 0; cx < g.nx; ++cx) {
      DominanceCell cell;
      cell.cell_x = cx;
      cell.cell_y = cy;
      cell.x0 = map.geo.origin_x + static_cast<double>(cx) * g.cell_size;
      cell.y0 = map.geo.origin_y - static_cast<double>(cy) * g.cell_size;
      const auto& cnt = counts[cy * g.nx + cx];
      for (std::size_t v : cnt) cell.classified += v;
      cell.valid_fraction = static_cast<double>(cell.classified) * pixel_area / cell_area_m2;
      cell.percent.assign(k, 0.0);
      cell.empty = cell.classified == 0;
      if (!cell.empty)
        for (std::size_t c = 0; c < k; ++c)
          cell.percent[c] = 100.0 * static_cast<double>(cnt[c]) / static_cast<double>(cell.classified);
      g.cells.push_back(std::move(cell));
    }
  return g;
}

void write_dominance_csv(const DominanceGrid& grid, const std::string& path) {
  std::ofstream out;
  open_out(out, path);
  out << "cell_x,cell_y,x0,y0,classified_pixels,valid_fraction,empty";
  for (const auto& c : grid.classes) out << ',' << c << "_pct";
  out << '\n';
  for (const auto& cell : grid.cells) {
    out << cell.cell_x << ',' << cell.cell_y << ',' << fmt(cell.x0) << ',' << fmt(cell.y0) << ',' << cell.classified << ','
        << fmt(cell.valid_fraction) << ',' << (cell.empty ? 1 : 0);
    for (double p : cell.percent) out << ',' << fmt(p);
    out << '\n';
  }
}

std::vector<FeatureConfig> multiplex_configs() {
  std::vector<FeatureConfig> out;
  for (int fam = 1; fam <= 3; ++fam)
    for (int img = 1; img <= 7; ++img) {
      FeatureConfig c;
      c.rgb = img & 1;
      c.ms = img & 2;
      c.dsm = img & 4;
      c.spectral = fam & 1;
      c.textural = fam & 2;
      out.push_back(c);
    }
  return out;
}

std::string split_hash(std::span<const std::uint8_t> crown_is_test, std::span<const int> crown_class) {
  std::string train = "train:", test = "test:";
  for (std::size_t c = 0; c < crown_is_test.size(); ++c) {
    if (crown_class[c] < 0) continue;
    (crown_is_test[c] ? test : train) += std::to_string(c) + ",";
  }
  return hex64(fnv1a64(train + "|" + test));
}

MultiplexReport imagery_multiplex(const FeatureTable& full, const LabelledSet& set, const ModelOptions& opt,
                                  double test_fraction, std::uint64_t seed, const std::vector<FeatureConfig>& configs) {
  opt.validate();
  MultiplexReport rep;
  rep.classes = set.classes;
  const auto is_test = stratified_holdout(set.crown_class, test_fraction, seed);
  rep.split_hash = split_hash(is_test, set.crown_class);
  for (std::size_t c = 0; c < is_test.size(); ++c) {
    if (set.crown_class[c] < 0) continue;
    (is_test[c] ? rep.test_crowns : rep.train_crowns) += 1;
  }
  std::vector<FeatureTable> tables;
  for (const auto& cfg : configs) {
    cfg.validate();
    FeatureTable t = full.select(cfg);
    if (t.manifest.size() == 0)
      throw ValidationError("feature subset '" + cfg.label() + "' selects no columns from the feature table");
    for (Imagery im : {Imagery::rgb, Imagery::ms, Imagery::dsm})
      if (cfg.uses(im) && std::none_of(t.manifest.entries.begin(), t.manifest.entries.end(),
                                       [im](const ManifestEntry& e) { return e.imagery == im; }))
        throw ValidationError("feature subset '" + cfg.label() + "' needs " + std::string(to_string(im)) +
                              " columns that the feature table lacks");
    tables.push_back(std::move(t));
  }
  rep.rows.resize(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    rep.rows[i].config = configs[i];
    rep.rows[i].features = tables[i].manifest.size();
    rep.rows[i].result = evaluate_split(tables[i], set, is_test, opt);
    log::info("multiplex " + configs[i].label() + " test_accuracy=" + fmt(rep.rows[i].result.test_accuracy));
  }
  return rep;
}

void write_multiplex_report(const MultiplexReport& rep, const std::string& json_path, const std::string& csv_path) {
  nlohmann::ordered_json j;
  j["format"] = "canopy-multiplex-report";
  j["version"] = 1;
  j["classes"] = rep.classes;
  j["split_hash"] = rep.split_hash;
  j["train_crowns"] = rep.train_crowns;
  j["test_crowns"] = rep.test_crowns;
  auto& rows = j["runs"] = nlohmann::ordered_json::array();
  std::ofstream csv;
  open_out(csv, csv_path);
  csv << "imagery,families,features,train_accuracy,test_accuracy,test_crown_accuracy\n";
  for (const auto& r : rep.rows) {
    const std::string label = r.config.label();
    const auto slash = label.find('/');
    rows.push_back({{"imagery", label.substr(0, slash)},
                    {"families", label.substr(slash + 1)},
                    {"features", r.features},
                    {"train_accuracy", r.result.train_accuracy},
                    {"test_accuracy", r.result.test_accuracy},
                    {"test_crown_accuracy", r.result.test_crown_accuracy},
                    {"leakage", r.result.leakage}});
    csv << label.substr(0, slash) << ',' << label.substr(slash + 1) << ',' << r.features << ','
        << fmt(r.result.train_accuracy) << ',' << fmt(r.result.test_accuracy) << ','
        << fmt(r.result.test_crown_accuracy) << '\n';
  }
  std::ofstream out;
  open_out(out, json_path);
  out << j.dump(1) << '\n';
}

}  // namespace canopy
