#include "canopy/texture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "canopy/error.hpp"
#include "canopy/stats.hpp"

namespace canopy {

namespace {

constexpr std::array<std::string_view, kHaralickCount> kHaralickNames{
    "asm", "con", "cor", "var", "idm", "sumav", "sumvar", "sument", "ent", "difvar", "difent", "infcor1", "infcor2"};

constexpr std::array<std::string_view, kLawsCount> kLawsNames{
    "L5E5", "L5S5", "L5R5", "L5W5", "E5E5", "E5S5", "E5R5", "E5W5", "S5S5", "S5R5", "S5W5", "R5R5", "R5W5", "W5W5"};

using Vec5 = std::array<double, 5>;
constexpr Vec5 kL5{1, 4, 6, 4, 1};
constexpr Vec5 kE5{-1, -2, 0, 2, 1};
constexpr Vec5 kS5{-1, 0, 2, 0, -1};
constexpr Vec5 kR5{1, -4, 6, -4, 1};
constexpr Vec5 kW5{-1, 2, 0, -2, 1};

constexpr std::array<std::pair<const Vec5*, const Vec5*>, kLawsCount> kLawsPairs{{
    {&kL5, &kE5}, {&kL5, &kS5}, {&kL5, &kR5}, {&kL5, &kW5}, {&kE5, &kE5}, {&kE5, &kS5}, {&kE5, &kR5},
    {&kE5, &kW5}, {&kS5, &kS5}, {&kS5, &kR5}, {&kS5, &kW5}, {&kR5, &kR5}, {&kR5, &kW5}, {&kW5, &kW5},
}};

double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

struct Offset {
  double dx, dy;
};

// Circular neighbour offsets for radius r with P = 8r points. The first
// quadrant is computed and the rest obtained by exact 90 degree rotation,
// so the sampling pattern is closed under image rotation.
const std::vector<Offset>& lbp_offsets(int radius) {
  static const std::array<std::vector<Offset>, 4> cache = [] {
    std::array<std::vector<Offset>, 4> all;
    for (int r = 1; r <= 3; ++r) {
      const int p = 8 * r;
      const int quarter = p / 4;
      std::vector<Offset> offs(static_cast<std::size_t>(p));
      for (int k = 0; k < quarter; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / p;
        double dx = r * std::cos(theta);
        double dy = -r * std::sin(theta);
        dx = std::round(dx * 1e9) / 1e9;
        dy = std::round(dy * 1e9) / 1e9;
        offs[static_cast<std::size_t>(k)] = {dx, dy};
      }
      for (int k = quarter; k < p; ++k) {
        const Offset prev = offs[static_cast<std::size_t>(k - quarter)];
        offs[static_cast<std::size_t>(k)] = {prev.dy, -prev.dx};
      }
      all[static_cast<std::size_t>(r)] = std::move(offs);
    }
    return all;
  }();
  if (radius < 1 || radius > 3) throw ValidationError("LBP radius must be 1, 2 or 3");
  return cache[static_cast<std::size_t>(radius)];
}

double bilinear(const Image& img, double x, double y) {
  const double fx0 = std::floor(x);
  const double fy0 = std::floor(y);
  const double fx = x - fx0;
  const double fy = y - fy0;
  const auto x0 = static_cast<std::size_t>(fx0);
  const auto y0 = static_cast<std::size_t>(fy0);
  const std::size_t x1 = fx > 0.0 ? x0 + 1 : x0;
  const std::size_t y1 = fy > 0.0 ? y0 + 1 : y0;
  // Lerp form is exact on flat neighbourhoods.
  const double top = img.at(x0, y0) + fx * (img.at(x1, y0) - img.at(x0, y0));
  const double bottom = img.at(x0, y1) + fx * (img.at(x1, y1) - img.at(x0, y1));
  return top + fy * (bottom - top);
}

}  // namespace

// ---------------------------------------------------------------------------

QuantizeRange quantize_range(std::span<const double> values) {
  if (values.empty()) return {};
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return {quantile_sorted(sorted, 0.05), quantile_sorted(sorted, 0.95)};
}

int quantize_value(double v, const QuantizeRange& range, int levels) {
  const double span = range.high - range.low;
  if (!(span > 1e-12 * std::max(1.0, std::abs(range.high)))) return 1;
  const double q = std::round(1.0 + (levels - 1) * (v - range.low) / span);
  return static_cast<int>(std::clamp(q, 1.0, static_cast<double>(levels)));
}

std::vector<int> quantize_levels(std::span<const double> values, int levels) {
  const auto range = quantize_range(values);
  std::vector<int> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = quantize_value(values[i], range, levels);
  return out;
}

// ---------------------------------------------------------------------------

std::span<const std::string_view> haralick_names() { return kHaralickNames; }

std::array<std::array<int, 2>, 4> glcm_steps(int offset) {
  return {{{offset, 0}, {offset, -offset}, {0, -offset}, {-offset, -offset}}};
}

std::vector<double> glcm_matrix(const LevelImage& img, const Mask& mask, int dx, int dy, std::size_t* pairs) {
  constexpr std::size_t ng = kGlcmLevels;
  std::vector<double> p(ng * ng, 0.0);
  std::size_t count = 0;
  const auto w = static_cast<std::ptrdiff_t>(img.width);
  const auto h = static_cast<std::ptrdiff_t>(img.height);
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    const std::ptrdiff_t y2 = y + dy;
    if (y2 < 0 || y2 >= h) continue;
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      const std::ptrdiff_t x2 = x + dx;
      if (x2 < 0 || x2 >= w) continue;
      const auto a = static_cast<std::size_t>(y * w + x);
      const auto b = static_cast<std::size_t>(y2 * w + x2);
      if (!mask_allows(mask, a) || !mask_allows(mask, b)) continue;
      const auto i = static_cast<std::size_t>(img.levels[a] - 1);
      const auto j = static_cast<std::size_t>(img.levels[b] - 1);
      p[i * ng + j] += 1.0;
      p[j * ng + i] += 1.0;
      ++count;
    }
  }
  if (count > 0) {
    const double total = 2.0 * static_cast<double>(count);
    for (double& v : p) v /= total;
  }
  if (pairs) *pairs = count;
  return p;
}

std::array<double, kHaralickCount> haralick_stats(std::span<const double> p, bool* degenerate) {
  constexpr std::size_t ng = kGlcmLevels;
  std::array<double, ng> px{}, py{};
  std::array<double, 2 * ng + 1> psum{};  // index k = i + j over levels 1..ng
  std::array<double, ng> pdiff{};
  double asm_ = 0.0, idm = 0.0, ent = 0.0, sum_ij = 0.0;
  for (std::size_t i = 0; i < ng; ++i)
    for (std::size_t j = 0; j < ng; ++j) {
      const double v = p[i * ng + j];
      if (v == 0.0) continue;
      const double li = static_cast<double>(i + 1);
      const double lj = static_cast<double>(j + 1);
      px[i] += v;
      py[j] += v;
      psum[i + j + 2] += v;
      pdiff[i > j ? i - j : j - i] += v;
      asm_ += v * v;
      idm += v / (1.0 + (li - lj) * (li - lj));
      ent -= plogp(v);
      sum_ij += li * lj * v;
    }
  double mux = 0.0, muy = 0.0;
  for (std::size_t i = 0; i < ng; ++i) {
    mux += static_cast<double>(i + 1) * px[i];
    muy += static_cast<double>(i + 1) * py[i];
  }
  double varx = 0.0, vary = 0.0, hx = 0.0, hy = 0.0;
  for (std::size_t i = 0; i < ng; ++i) {
    const double l = static_cast<double>(i + 1);
    varx += (l - mux) * (l - mux) * px[i];
    vary += (l - muy) * (l - muy) * py[i];
    hx -= plogp(px[i]);
    hy -= plogp(py[i]);
  }
  double variance = 0.0, hxy1 = 0.0, hxy2 = 0.0;
  for (std::size_t i = 0; i < ng; ++i)
    for (std::size_t j = 0; j < ng; ++j) {
      const double v = p[i * ng + j];
      const double l = static_cast<double>(i + 1);
      variance += (l - mux) * (l - mux) * v;
      const double pp = px[i] * py[j];
      if (pp > 0.0) {
        hxy1 -= v * std::log2(pp);
        hxy2 -= pp * std::log2(pp);
      }
    }
  double contrast = 0.0, dmean = 0.0, dent = 0.0;
  for (std::size_t k = 0; k < ng; ++k) {
    const double kk = static_cast<double>(k);
    contrast += kk * kk * pdiff[k];
    dmean += kk * pdiff[k];
    dent -= plogp(pdiff[k]);
  }
  double dvar = 0.0;
  for (std::size_t k = 0; k < ng; ++k) dvar += (static_cast<double>(k) - dmean) * (static_cast<double>(k) - dmean) * pdiff[k];
  double savg = 0.0, sent = 0.0;
  for (std::size_t k = 2; k <= 2 * ng; ++k) {
    savg += static_cast<double>(k) * psum[k];
    sent -= plogp(psum[k]);
  }
  double svar = 0.0;
  for (std::size_t k = 2; k <= 2 * ng; ++k) svar += (static_cast<double>(k) - savg) * (static_cast<double>(k) - savg) * psum[k];

  bool degen = false;
  double correlation = 0.0;
  const double sxy = std::sqrt(varx * vary);
  if (sxy > 1e-12)
    correlation = (sum_ij - mux * muy) / sxy;
  else
    degen = true;
  double imc1 = 0.0;
  const double hmax = std::max(hx, hy);
  if (hmax > 1e-12)
    imc1 = (ent - hxy1) / hmax;
  else
    degen = true;
  const double imc2 = std::sqrt(std::max(0.0, 1.0 - std::exp(-2.0 * (hxy2 - ent))));

  if (degenerate) *degenerate = degen;
  return {asm_, contrast, correlation, variance, idm, savg, svar, sent, ent, dvar, dent, imc1, imc2};
}

GlcmFeatures glcm_features(const LevelImage& img, const Mask& mask, int offset) {
  GlcmFeatures out;
  const auto need = static_cast<std::size_t>(offset + 1);
  if (img.width < need || img.height < need) {
    out.degenerate = true;
    return out;
  }
  const auto steps = glcm_steps(offset);
  for (std::size_t d = 0; d < 4; ++d) {
    std::size_t pairs = 0;
    const auto p = glcm_matrix(img, mask, steps[d][0], steps[d][1], &pairs);
    if (pairs == 0) {
      out.degenerate = true;
      continue;
    }
    bool degen = false;
    out.per_direction[d] = haralick_stats(p, &degen);
    out.degenerate = out.degenerate || degen;
  }
  for (std::size_t s = 0; s < kHaralickCount; ++s) {
    double sum = 0.0, lo = out.per_direction[0][s], hi = lo;
    for (std::size_t d = 0; d < 4; ++d) {
      const double v = out.per_direction[d][s];
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    out.mean[s] = sum / 4.0;
    out.range[s] = hi - lo;
  }
  return out;
}

// ---------------------------------------------------------------------------

std::size_t lbp_code(const Image& img, std::size_t x, std::size_t y, int radius) {
  const auto& offs = lbp_offsets(radius);
  const double center = img.at(x, y);
  const std::size_t p = offs.size();
  std::size_t ones = 0, transitions = 0;
  bool first = false, prev = false;
  for (std::size_t k = 0; k < p; ++k) {
    const double v = bilinear(img, static_cast<double>(x) + offs[k].dx, static_cast<double>(y) + offs[k].dy);
    const bool bit = v >= center;
    if (k == 0)
      first = bit;
    else if (bit != prev)
      ++transitions;
    if (bit) ++ones;
    prev = bit;
  }
  if (prev != first) ++transitions;
  return transitions <= 2 ? ones : p + 1;
}

LbpHistogram lbp_histogram(const Image& img, const Mask& mask, int radius) {
  LbpHistogram out;
  out.bins.assign(lbp_bin_count(radius), 0.0);
  const auto r = static_cast<std::size_t>(radius);
  if (img.width < 2 * r + 1 || img.height < 2 * r + 1) {
    out.degenerate = true;
    return out;
  }
  std::size_t count = 0;
  for (std::size_t y = r; y + r < img.height; ++y)
    for (std::size_t x = r; x + r < img.width; ++x) {
      if (!mask_allows(mask, y * img.width + x)) continue;
      out.bins[lbp_code(img, x, y, radius)] += 1.0;
      ++count;
    }
  if (count == 0) {
    out.degenerate = true;
    return out;
  }
  for (double& b : out.bins) b /= static_cast<double>(count);
  return out;
}

// ---------------------------------------------------------------------------

std::span<const std::string_view> laws_names() { return kLawsNames; }

std::array<double, 25> laws_kernel(std::size_t index) {
  const auto& [a, b] = kLawsPairs.at(index);
  std::array<double, 25> k{};
  for (std::size_t v = 0; v < 5; ++v)
    for (std::size_t u = 0; u < 5; ++u) k[v * 5 + u] = 0.5 * ((*a)[v] * (*b)[u] + (*b)[v] * (*a)[u]);
  return k;
}

Image remove_local_mean(const Image& img, std::size_t window) {
  Image out(img.width, img.height);
  const auto half = static_cast<std::ptrdiff_t>(window / 2);
  const auto w = static_cast<std::ptrdiff_t>(img.width);
  const auto h = static_cast<std::ptrdiff_t>(img.height);
  const double norm = 1.0 / static_cast<double>(window * window);
  for (std::ptrdiff_t y = 0; y < h; ++y)
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      const double c = img.values[static_cast<std::size_t>(y * w + x)];
      // Accumulating differences keeps flat regions exactly zero.
      double acc = 0.0;
      for (std::ptrdiff_t dy = -half; dy <= half; ++dy) {
        const std::ptrdiff_t yy = std::clamp<std::ptrdiff_t>(y + dy, 0, h - 1);
        for (std::ptrdiff_t dx = -half; dx <= half; ++dx) {
          const std::ptrdiff_t xx = std::clamp<std::ptrdiff_t>(x + dx, 0, w - 1);
          acc += c - img.values[static_cast<std::size_t>(yy * w + xx)];
        }
      }
      out.values[static_cast<std::size_t>(y * w + x)] = acc * norm;
    }
  return out;
}

Image convolve5(const Image& img, const std::array<double, 25>& kernel) {
  Image out(img.width, img.height);
  const auto w = static_cast<std::ptrdiff_t>(img.width);
  const auto h = static_cast<std::ptrdiff_t>(img.height);
  for (std::ptrdiff_t y = 0; y < h; ++y)
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t v = 0; v < 5; ++v) {
        const std::ptrdiff_t yy = std::clamp<std::ptrdiff_t>(y - (v - 2), 0, h - 1);
        for (std::ptrdiff_t u = 0; u < 5; ++u) {
          const std::ptrdiff_t xx = std::clamp<std::ptrdiff_t>(x - (u - 2), 0, w - 1);
          acc += kernel[static_cast<std::size_t>(v * 5 + u)] * img.values[static_cast<std::size_t>(yy * w + xx)];
        }
      }
      out.values[static_cast<std::size_t>(y * w + x)] = acc;
    }
  return out;
}

LawsFeatures laws_features(const Image& img, const Mask& mask) {
  LawsFeatures out;
  if (img.width < kLawsWindow || img.height < kLawsWindow) {
    out.degenerate = true;
    return out;
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < img.values.size(); ++i) count += mask_allows(mask, i) ? 1 : 0;
  if (count == 0) {
    out.degenerate = true;
    return out;
  }
  const Image residual = remove_local_mean(img);
  for (std::size_t k = 0; k < kLawsCount; ++k) {
    const Image resp = convolve5(residual, laws_kernel(k));
    double mean = 0.0;
    for (std::size_t i = 0; i < resp.values.size(); ++i)
      if (mask_allows(mask, i)) mean += resp.values[i];
    mean /= static_cast<double>(count);
    double var = 0.0;
    for (std::size_t i = 0; i < resp.values.size(); ++i)
      if (mask_allows(mask, i)) var += (resp.values[i] - mean) * (resp.values[i] - mean);
    out.mean[k] = mean;
    out.std[k] = std::sqrt(var / static_cast<double>(count));
  }
  return out;
}

// ---------------------------------------------------------------------------

double directional_autocorrelation(const Image& img, const Mask& mask, int dx, int dy, bool* degenerate) {
  const auto w = static_cast<std::ptrdiff_t>(img.width);
  const auto h = static_cast<std::ptrdiff_t>(img.height);
  std::vector<std::pair<double, double>> pairs;
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    const std::ptrdiff_t y2 = y + dy;
    if (y2 < 0 || y2 >= h) continue;
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      const std::ptrdiff_t x2 = x + dx;
      if (x2 < 0 || x2 >= w) continue;
      const auto a = static_cast<std::size_t>(y * w + x);
      const auto b = static_cast<std::size_t>(y2 * w + x2);
      if (!mask_allows(mask, a) || !mask_allows(mask, b)) continue;
      pairs.emplace_back(img.values[a], img.values[b]);
    }
  }
  if (degenerate) *degenerate = false;
  if (pairs.size() < 2) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  const auto n = static_cast<double>(pairs.size());
  double ma = 0.0, mb = 0.0;
  for (const auto& [a, b] : pairs) {
    ma += a;
    mb += b;
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (const auto& [a, b] : pairs) {
    sab += (a - ma) * (b - mb);
    saa += (a - ma) * (a - ma);
    sbb += (b - mb) * (b - mb);
  }
  const double floor_a = 1e-20 * n * std::max(1.0, ma * ma);
  const double floor_b = 1e-20 * n * std::max(1.0, mb * mb);
  if (saa <= floor_a || sbb <= floor_b) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

AutocorrFeatures autocorrelation_features(const Image& img, const Mask& mask, int offset) {
  AutocorrFeatures out;
  const auto steps = glcm_steps(offset);
  for (std::size_t d = 0; d < 4; ++d) {
    bool degen = false;
    out.per_direction[d] = directional_autocorrelation(img, mask, steps[d][0], steps[d][1], &degen);
    out.degenerate = out.degenerate || degen;
  }
  double lo = out.per_direction[0], hi = lo, sum = 0.0;
  for (double v : out.per_direction) {
    sum += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  out.mean = sum / 4.0;
  out.range = hi - lo;
  return out;
}

}  // namespace canopy
