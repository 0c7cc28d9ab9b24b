#include "canopy/labels.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "canopy/error.hpp"

namespace canopy {

const std::vector<std::string>& base_labels() {
  static const std::vector<std::string> labels{"alstonia_scholaris", "bellucia_pentamera", "endospermum_malaccense",
                                               "macaranga_gigantea", "oil_palm",           "non_vegetation",
                                               "other_vegetation"};
  return labels;
}

std::vector<std::string> LabelScheme::builtin_names() { return {"all", "merge_endospermum", "lower_concern"}; }

LabelScheme LabelScheme::builtin(std::string_view name) {
  LabelScheme s;
  s.name = std::string(name);
  const auto& base = base_labels();
  if (name == "all") {
    s.classes = base;
    for (const auto& l : base) s.merge[l] = l;
  } else if (name == "merge_endospermum") {
    for (const auto& l : base)
      if (l != "endospermum_malaccense") s.classes.push_back(l);
    for (const auto& l : base) s.merge[l] = l == "endospermum_malaccense" ? "other_vegetation" : l;
  } else if (name == "lower_concern") {
    s.classes = {"bellucia_pentamera", "macaranga_gigantea", "oil_palm", "non_vegetation", "lower_concern"};
    for (const auto& l : base)
      s.merge[l] = (l == "alstonia_scholaris" || l == "endospermum_malaccense" || l == "other_vegetation") ? "lower_concern" : l;
  } else {
    throw ValidationError("unknown label scheme '" + std::string(name) + "'");
  }
  return s;
}

LabelScheme LabelScheme::identity(const std::vector<std::string>& labels, std::string name) {
  LabelScheme s;
  s.name = std::move(name);
  for (const auto& l : labels) {
    if (std::find(s.classes.begin(), s.classes.end(), l) == s.classes.end()) s.classes.push_back(l);
    s.merge[l] = l;
  }
  return s;
}

int LabelScheme::class_of(const std::string& label) const {
  const auto it = merge.find(label);
  if (it == merge.end()) throw ValidationError("label '" + label + "' is not covered by scheme '" + name + "'");
  const auto c = std::find(classes.begin(), classes.end(), it->second);
  return static_cast<int>(c - classes.begin());
}

std::vector<int> LabelScheme::mapping_from(const LabelScheme& finer) const {
  std::vector<int> out;
  for (const auto& c : finer.classes) {
    // A finer class maps through any source label that produces it.
    std::string source;
    for (const auto& [from, to] : finer.merge)
      if (to == c) {
        source = from;
        break;
      }
    if (source.empty()) throw ValidationError("class '" + c + "' has no source label in scheme '" + finer.name + "'");
    out.push_back(class_of(source));
  }
  return out;
}

void LabelScheme::validate() const {
  if (classes.size() < 2) throw ValidationError("label scheme '" + name + "' needs at least 2 classes");
  for (const auto& [from, to] : merge)
    if (std::find(classes.begin(), classes.end(), to) == classes.end())
      throw ValidationError("label scheme '" + name + "' maps '" + from + "' to unknown class '" + to + "'");
}

std::vector<RegionLabel> assign_superpixel_labels(const SuperpixelPartition& partition,
                                                  std::span<const std::int32_t> crown_raster) {
  if (crown_raster.size() != partition.labels.size())
    throw ValidationError("crown raster and partition dimensions differ");
  const auto pixels = partition.region_pixels();
  std::vector<RegionLabel> out(partition.region_count());
  std::vector<std::pair<std::int32_t, std::size_t>> tally;
  for (std::size_t r = 0; r < pixels.size(); ++r) {
    tally.clear();
    for (std::uint32_t p : pixels[r]) {
      const std::int32_t c = crown_raster[p];
      if (c < 0) continue;
      auto it = std::find_if(tally.begin(), tally.end(), [c](const auto& t) { return t.first == c; });
      if (it == tally.end())
        tally.emplace_back(c, 1);
      else
        ++it->second;
    }
    RegionLabel& l = out[r];
    l.region = static_cast<std::uint32_t>(r);
    std::int32_t best = -1;
    std::size_t best_count = 0;
    for (const auto& [c, n] : tally)
      if (n > best_count || (n == best_count && c < best)) {
        best = c;
        best_count = n;
      }
    const std::size_t total = pixels[r].size();
    l.overlap = total > 0 ? static_cast<double>(best_count) / static_cast<double>(total) : 0.0;
    if (best >= 0 && 2 * best_count >= total) l.crown = best;
  }
  return out;
}

void write_region_labels(const std::vector<RegionLabel>& labels, const std::vector<Polygon>& crowns,
                         const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot create '" + path + "'");
  out << "region_id,crown_index,crown_id,label,overlap\n";
  char buf[32];
  for (const auto& l : labels) {
    std::snprintf(buf, sizeof buf, "%.17g", l.overlap);
    out << l.region << ',' << l.crown << ',';
    if (l.crown >= 0) {
      const auto& c = crowns.at(static_cast<std::size_t>(l.crown));
      out << c.id << ',' << c.label;
    } else {
      out << ',';
    }
    out << ',' << buf << '\n';
  }
}

std::vector<RegionLabel> read_region_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line.rfind("region_id,crown_index", 0) != 0)
    throw FormatError(path + ": missing region label header");
  std::vector<RegionLabel> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 5) throw FormatError(path + ": line " + std::to_string(line_no) + " needs 5 columns");
    try {
      RegionLabel l;
      l.region = static_cast<std::uint32_t>(std::stoul(cells[0]));
      l.crown = static_cast<std::int32_t>(std::stol(cells[1]));
      l.overlap = std::stod(cells[4]);
      out.push_back(l);
    } catch (const std::exception&) {
      throw FormatError(path + ": line " + std::to_string(line_no) + " has a malformed number");
    }
  }
  return out;
}

}  // namespace canopy
