#include "canopy/slic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "canopy/error.hpp"
#include "canopy/log.hpp"
#include "canopy/parallel.hpp"
#include "canopy/raster_io.hpp"

namespace canopy {

namespace {

constexpr std::uint32_t kUnassigned = std::numeric_limits<std::uint32_t>::max();

// Separable Gaussian, truncated at 3 sigma, replicate edges.
void gaussian_smooth(std::vector<double>& plane, std::size_t w, std::size_t h, double sigma) {
  if (sigma <= 0.0) return;
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
    const double v = std::exp(-0.5 * static_cast<double>(k * k) / (sigma * sigma));
    kernel[static_cast<std::size_t>(k + radius)] = v;
    sum += v;
  }
  for (double& v : kernel) v /= sum;

  const auto sw = static_cast<std::ptrdiff_t>(w);
  const auto sh = static_cast<std::ptrdiff_t>(h);
  std::vector<double> tmp(plane.size());
  for (std::ptrdiff_t y = 0; y < sh; ++y)
    for (std::ptrdiff_t x = 0; x < sw; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
        const std::ptrdiff_t xx = std::clamp<std::ptrdiff_t>(x + k, 0, sw - 1);
        acc += kernel[static_cast<std::size_t>(k + radius)] * plane[static_cast<std::size_t>(y * sw + xx)];
      }
      tmp[static_cast<std::size_t>(y * sw + x)] = acc;
    }
  for (std::ptrdiff_t y = 0; y < sh; ++y)
    for (std::ptrdiff_t x = 0; x < sw; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
        const std::ptrdiff_t yy = std::clamp<std::ptrdiff_t>(y + k, 0, sh - 1);
        acc += kernel[static_cast<std::size_t>(k + radius)] * tmp[static_cast<std::size_t>(yy * sw + x)];
      }
      plane[static_cast<std::size_t>(y * sw + x)] = acc;
    }
}

struct Center {
  double l, a, b, x, y;
};

// Buckets centers by an S-sized grid so each pixel only scans the 3x3 block
// of buckets that can contain a center within its 2S x 2S window.
class CenterIndex {
 public:
  CenterIndex(const std::vector<Center>& centers, std::size_t w, std::size_t h, double spacing)
      : spacing_(spacing),
        cols_(static_cast<std::size_t>(std::ceil(static_cast<double>(w) / spacing)) + 1),
        rows_(static_cast<std::size_t>(std::ceil(static_cast<double>(h) / spacing)) + 1),
        buckets_(cols_ * rows_) {
    for (std::size_t i = 0; i < centers.size(); ++i) {
      buckets_[bucket_of(centers[i].x, centers[i].y)].push_back(static_cast<std::uint32_t>(i));
    }
  }

  template <typename Fn>
  void for_candidates(double x, double y, Fn&& fn) const {
    const auto bx = static_cast<std::ptrdiff_t>(cell(x, cols_));
    const auto by = static_cast<std::ptrdiff_t>(cell(y, rows_));
    for (std::ptrdiff_t dy = -1; dy <= 1; ++dy)
      for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
        const std::ptrdiff_t cx = bx + dx;
        const std::ptrdiff_t cy = by + dy;
        if (cx < 0 || cy < 0 || cx >= static_cast<std::ptrdiff_t>(cols_) ||
            cy >= static_cast<std::ptrdiff_t>(rows_))
          continue;
        for (std::uint32_t c : buckets_[static_cast<std::size_t>(cy) * cols_ + static_cast<std::size_t>(cx)])
          fn(c);
      }
  }

 private:
  std::size_t cell(double v, std::size_t n) const {
    const double c = std::floor(v / spacing_);
    if (c < 0.0) return 0;
    return std::min(n - 1, static_cast<std::size_t>(c));
  }
  std::size_t bucket_of(double x, double y) const { return cell(y, rows_) * cols_ + cell(x, cols_); }

  double spacing_;
  std::size_t cols_, rows_;
  std::vector<std::vector<std::uint32_t>> buckets_;
};

}  // namespace

void SlicConfig::validate() const {
  if (!(target_area_m2 > 0.0)) throw ValidationError("slic.target_area_m2 must be > 0");
  if (!(compactness > 0.0)) throw ValidationError("slic.compactness must be > 0");
  if (!(smoothing_sigma >= 0.0)) throw ValidationError("slic.smoothing_sigma must be >= 0");
  if (max_iterations < 1) throw ValidationError("slic.max_iterations must be >= 1");
  if (!(convergence_epsilon >= 0.0)) throw ValidationError("slic.convergence_epsilon must be >= 0");
}

std::vector<std::vector<std::uint32_t>> SuperpixelPartition::region_pixels() const {
  std::vector<std::vector<std::uint32_t>> out(regions.size());
  for (std::size_t r = 0; r < regions.size(); ++r) out[r].reserve(regions[r].pixel_count);
  for (std::size_t i = 0; i < labels.size(); ++i) out[labels[i]].push_back(static_cast<std::uint32_t>(i));
  return out;
}

std::size_t grid_spacing(const GeoTransform& geo, double target_area_m2) {
  geo.validate();
  const double s = std::round(std::sqrt(target_area_m2 / geo.pixel_area_m2()));
  return std::max<std::size_t>(1, static_cast<std::size_t>(s));
}

std::vector<PixelPoint> seed_grid(std::size_t width, std::size_t height, std::size_t spacing) {
  if (spacing < 1) throw ValidationError("grid spacing must be >= 1");
  if (width == 0 || height == 0) throw ValidationError("cannot seed an empty image");
  if (spacing > width && spacing > height)
    throw ValidationError("grid spacing " + std::to_string(spacing) + " exceeds image " +
                          std::to_string(width) + "x" + std::to_string(height));
  const std::size_t nx = (width + spacing - 1) / spacing;
  const std::size_t ny = (height + spacing - 1) / spacing;
  const double cw = static_cast<double>(width) / static_cast<double>(nx);
  const double ch = static_cast<double>(height) / static_cast<double>(ny);
  std::vector<PixelPoint> seeds;
  seeds.reserve(nx * ny);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i)
      seeds.push_back({std::floor((static_cast<double>(i) + 0.5) * cw),
                       std::floor((static_cast<double>(j) + 0.5) * ch)});
  return seeds;
}

void perturb_seeds(std::vector<PixelPoint>& seeds, std::span<const double> lab, std::size_t width,
                   std::size_t height) {
  const std::size_t n = width * height;
  auto value = [&](std::size_t plane, std::ptrdiff_t x, std::ptrdiff_t y) {
    x = std::clamp<std::ptrdiff_t>(x, 0, static_cast<std::ptrdiff_t>(width) - 1);
    y = std::clamp<std::ptrdiff_t>(y, 0, static_cast<std::ptrdiff_t>(height) - 1);
    return lab[plane * n + static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x)];
  };
  auto gradient = [&](std::ptrdiff_t x, std::ptrdiff_t y) {
    double g = 0.0;
    for (std::size_t p = 0; p < 3; ++p) {
      const double gx = value(p, x + 1, y) - value(p, x - 1, y);
      const double gy = value(p, x, y + 1) - value(p, x, y - 1);
      g += gx * gx + gy * gy;
    }
    return g;
  };
  for (auto& s : seeds) {
    const auto sx = static_cast<std::ptrdiff_t>(s.x);
    const auto sy = static_cast<std::ptrdiff_t>(s.y);
    double best = std::numeric_limits<double>::infinity();
    PixelPoint best_pt = s;
    for (std::ptrdiff_t dy = -1; dy <= 1; ++dy)
      for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
        const std::ptrdiff_t x = sx + dx;
        const std::ptrdiff_t y = sy + dy;
        if (x < 0 || y < 0 || x >= static_cast<std::ptrdiff_t>(width) || y >= static_cast<std::ptrdiff_t>(height))
          continue;
        const double g = gradient(x, y);
        if (g < best) {
          best = g;
          best_pt = {static_cast<double>(x), static_cast<double>(y)};
        }
      }
    s = best_pt;
  }
}

std::vector<std::uint32_t> enforce_connectivity(std::span<const std::uint32_t> labels, std::size_t width,
                                                std::size_t height, std::size_t min_size) {
  const std::size_t n = width * height;
  if (labels.size() != n) throw ValidationError("label raster size mismatch");
  if (n == 0) return {};

  // 1. 4-connected components in scan order.
  std::vector<std::uint32_t> comp(n, kUnassigned);
  std::vector<std::size_t> size;
  std::vector<std::uint32_t> stack;
  for (std::size_t start = 0; start < n; ++start) {
    if (comp[start] != kUnassigned) continue;
    const auto id = static_cast<std::uint32_t>(size.size());
    const std::uint32_t lab = labels[start];
    std::size_t count = 0;
    comp[start] = id;
    stack.push_back(static_cast<std::uint32_t>(start));
    while (!stack.empty()) {
      const std::uint32_t p = stack.back();
      stack.pop_back();
      ++count;
      const std::size_t x = p % width;
      const std::size_t y = p / width;
      auto visit = [&](std::size_t q) {
        if (comp[q] == kUnassigned && labels[q] == lab) {
          comp[q] = id;
          stack.push_back(static_cast<std::uint32_t>(q));
        }
      };
      if (x > 0) visit(p - 1);
      if (x + 1 < width) visit(p + 1);
      if (y > 0) visit(p - width);
      if (y + 1 < height) visit(p + width);
    }
    size.push_back(count);
  }
  const std::size_t ncomp = size.size();

  // 2. Component adjacency.
  std::vector<std::vector<std::uint32_t>> adj(ncomp);
  for (std::size_t y = 0; y < height; ++y)
    for (std::size_t x = 0; x < width; ++x) {
      const std::size_t p = y * width + x;
      auto link = [&](std::size_t q) {
        if (comp[p] != comp[q]) {
          adj[comp[p]].push_back(comp[q]);
          adj[comp[q]].push_back(comp[p]);
        }
      };
      if (x + 1 < width) link(p + 1);
      if (y + 1 < height) link(p + width);
    }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }

  // 3. Merge undersized components into their largest neighbour, smallest first.
  std::vector<std::uint32_t> parent(ncomp);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t c) {
    while (parent[c] != c) {
      parent[c] = parent[parent[c]];
      c = parent[c];
    }
    return c;
  };
  using Entry = std::pair<std::size_t, std::uint32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (std::uint32_t c = 0; c < ncomp; ++c)
    if (size[c] < min_size) heap.emplace(size[c], c);
  std::size_t roots = ncomp;
  while (!heap.empty() && roots > 1) {
    const auto [sz, c] = heap.top();
    heap.pop();
    if (find(c) != c || size[c] != sz || size[c] >= min_size) continue;
    // Resolve and dedupe neighbour roots.
    auto& nb = adj[c];
    for (auto& v : nb) v = find(v);
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    nb.erase(std::remove(nb.begin(), nb.end(), c), nb.end());
    if (nb.empty()) continue;
    std::uint32_t target = nb.front();
    for (std::uint32_t v : nb)
      if (size[v] > size[target]) target = v;  // ties keep the earliest component
    parent[c] = target;
    size[target] += size[c];
    --roots;
    auto& tadj = adj[target];
    if (tadj.size() < nb.size()) std::swap(tadj, nb);
    tadj.insert(tadj.end(), nb.begin(), nb.end());
    std::vector<std::uint32_t>().swap(nb);
    if (size[target] < min_size) heap.emplace(size[target], target);
  }

  // 4. Contiguous relabel by first appearance.
  std::vector<std::uint32_t> remap(ncomp, kUnassigned);
  std::vector<std::uint32_t> out(n);
  std::uint32_t next = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const std::uint32_t r = find(comp[p]);
    if (remap[r] == kUnassigned) remap[r] = next++;
    out[p] = remap[r];
  }
  return out;
}

SuperpixelPartition make_partition(std::vector<std::uint32_t> labels, std::size_t width, std::size_t height) {
  if (labels.size() != width * height) throw ValidationError("label raster size mismatch");
  SuperpixelPartition part;
  part.width = width;
  part.height = height;
  std::uint32_t max_id = 0;
  for (auto l : labels) max_id = std::max(max_id, l);
  const std::size_t count = labels.empty() ? 0 : std::size_t{max_id} + 1;
  part.regions.resize(count);
  std::vector<double> sx(count, 0.0), sy(count, 0.0);
  for (std::size_t r = 0; r < count; ++r) {
    part.regions[r].id = static_cast<std::uint32_t>(r);
    part.regions[r].min_x = width;
    part.regions[r].min_y = height;
  }
  for (std::size_t y = 0; y < height; ++y)
    for (std::size_t x = 0; x < width; ++x) {
      auto& reg = part.regions[labels[y * width + x]];
      ++reg.pixel_count;
      sx[reg.id] += static_cast<double>(x);
      sy[reg.id] += static_cast<double>(y);
      reg.min_x = std::min(reg.min_x, x);
      reg.min_y = std::min(reg.min_y, y);
      reg.max_x = std::max(reg.max_x, x);
      reg.max_y = std::max(reg.max_y, y);
    }
  for (std::size_t r = 0; r < count; ++r) {
    auto& reg = part.regions[r];
    if (reg.pixel_count == 0) throw ValidationError("region ids are not contiguous: id " + std::to_string(r) + " is empty");
    reg.centroid_x = sx[r] / static_cast<double>(reg.pixel_count);
    reg.centroid_y = sy[r] / static_cast<double>(reg.pixel_count);
  }
  part.labels = std::move(labels);
  return part;
}

SuperpixelPartition slic_segment(const Raster& rgb, const GeoTransform& geo, const SlicConfig& cfg) {
  cfg.validate();
  const std::size_t w = rgb.width();
  const std::size_t h = rgb.height();
  const std::size_t n = w * h;
  const auto ri = rgb.band_index(BandRole::red);
  const auto gi = rgb.band_index(BandRole::green);
  const auto bi = rgb.band_index(BandRole::blue);
  const std::size_t spacing = grid_spacing(geo, cfg.target_area_m2);
  if (n < spacing * spacing && spacing > 1)
    throw ValidationError("raster smaller than one superpixel grid cell");

  // Smooth RGB, then convert to CIELAB.
  std::vector<double> planes[3];
  const std::size_t band_ids[3] = {ri, gi, bi};
  for (std::size_t c = 0; c < 3; ++c) {
    const auto src = rgb.band(band_ids[c]);
    planes[c].assign(src.begin(), src.end());
    gaussian_smooth(planes[c], w, h, cfg.smoothing_sigma);
  }
  std::vector<double> lab(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Lab px = rgb_to_lab(planes[0][i], planes[1][i], planes[2][i]);
    lab[i] = px.l;
    lab[n + i] = px.a;
    lab[2 * n + i] = px.b;
  }

  auto seeds = seed_grid(w, h, spacing);
  perturb_seeds(seeds, lab, w, h);
  std::vector<Center> centers;
  centers.reserve(seeds.size());
  for (const auto& s : seeds) {
    const std::size_t p = static_cast<std::size_t>(s.y) * w + static_cast<std::size_t>(s.x);
    centers.push_back({lab[p], lab[n + p], lab[2 * n + p], s.x, s.y});
  }

  const double S = static_cast<double>(spacing);
  const double spatial_weight = (cfg.compactness / S) * (cfg.compactness / S);
  std::vector<std::uint32_t> labels(n, kUnassigned);

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    const CenterIndex index(centers, w, h, S);
    // Per-pixel nearest center within the 2S x 2S window; ties go to the lower
    // center index, so the result does not depend on how rows are scheduled.
    parallel_for(h, [&](std::size_t y) {
      for (std::size_t x = 0; x < w; ++x) {
        const std::size_t p = y * w + x;
        const double px = static_cast<double>(x);
        const double py = static_cast<double>(y);
        double best = std::numeric_limits<double>::infinity();
        std::uint32_t best_c = kUnassigned;
        index.for_candidates(px, py, [&](std::uint32_t c) {
          const Center& k = centers[c];
          const double dx = k.x - px;
          const double dy = k.y - py;
          if (std::abs(dx) > S || std::abs(dy) > S) return;
          const double dl = k.l - lab[p];
          const double da = k.a - lab[n + p];
          const double db = k.b - lab[2 * n + p];
          const double d = dl * dl + da * da + db * db + spatial_weight * (dx * dx + dy * dy);
          if (d < best || (d == best && c < best_c)) {
            best = d;
            best_c = c;
          }
        });
        if (best_c != kUnassigned) labels[p] = best_c;
      }
    });

    std::vector<Center> sums(centers.size(), Center{0, 0, 0, 0, 0});
    std::vector<std::size_t> counts(centers.size(), 0);
    for (std::size_t p = 0; p < n; ++p) {
      const std::uint32_t c = labels[p];
      if (c == kUnassigned) continue;
      auto& s = sums[c];
      s.l += lab[p];
      s.a += lab[n + p];
      s.b += lab[2 * n + p];
      s.x += static_cast<double>(p % w);
      s.y += static_cast<double>(p / w);
      ++counts[c];
    }
    double moved = 0.0;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      if (counts[c] == 0) continue;
      const double inv = 1.0 / static_cast<double>(counts[c]);
      const Center next{sums[c].l * inv, sums[c].a * inv, sums[c].b * inv, sums[c].x * inv, sums[c].y * inv};
      moved += std::hypot(next.x - centers[c].x, next.y - centers[c].y);
      centers[c] = next;
    }
    moved /= static_cast<double>(centers.size());
    if (moved < cfg.convergence_epsilon) break;
  }

  // Pixels never reached by any window join the spatially nearest center.
  for (std::size_t p = 0; p < n; ++p) {
    if (labels[p] != kUnassigned) continue;
    const double px = static_cast<double>(p % w);
    const double py = static_cast<double>(p / w);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const double d = (centers[c].x - px) * (centers[c].x - px) + (centers[c].y - py) * (centers[c].y - py);
      if (d < best) {
        best = d;
        labels[p] = static_cast<std::uint32_t>(c);
      }
    }
  }

  const std::size_t min_size = std::max<std::size_t>(1, spacing * spacing / 4);
  auto connected = enforce_connectivity(labels, w, h, min_size);
  return make_partition(std::move(connected), w, h);
}

void write_partition(const SuperpixelPartition& partition, const GeoTransform& geo,
                     const std::string& fbr_path, const std::string& csv_path) {
  Raster ids(partition.width, partition.height, {BandRole::derived});
  auto band = ids.band(0);
  for (std::size_t i = 0; i < partition.labels.size(); ++i) band[i] = static_cast<float>(partition.labels[i]);
  write_fbr(ids, geo, fbr_path);

  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw Error("cannot create '" + csv_path + "'");
  csv << "id,pixel_count,centroid_x,centroid_y\n";
  csv.precision(17);
  for (const auto& r : partition.regions)
    csv << r.id << ',' << r.pixel_count << ',' << r.centroid_x << ',' << r.centroid_y << '\n';
}

GeoPartition read_partition(const std::string& fbr_path) {
  auto [raster, geo] = read_fbr(fbr_path);
  if (raster.band_count() != 1) throw ValidationError("partition raster must have one band");
  std::vector<std::uint32_t> labels(raster.pixel_count());
  const auto band = raster.band(0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const float v = band[i];
    if (!(v >= 0.0f) || v != std::floor(v)) throw ValidationError("partition raster holds a non-integer id");
    labels[i] = static_cast<std::uint32_t>(v);
  }
  return {make_partition(std::move(labels), raster.width(), raster.height()), geo};
}

}  // namespace canopy
