#include "canopy/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "canopy/error.hpp"

namespace canopy {

namespace {

std::vector<std::string> make_names(StatsVariant variant) {
  std::vector<std::string> names;
  if (variant == StatsVariant::standard) {
    names = {"max", "min", "mean", "std", "median", "cov", "skew", "kurt", "rng", "rngsig", "rngmean"};
    for (int d = 10; d <= 90; d += 10) names.push_back("decile" + std::to_string(d));
    names.insert(names.end(), {"quartile1", "quartile3", "iqr", "iqrsig", "iqrmean"});
  } else {
    names = {"std", "skew", "kurt", "rng", "rngsig", "rngmean", "iqr", "iqrsig", "mad", "maxmed", "minmed"};
    for (int d = 10; d <= 90; d += 10) names.push_back("decilemed" + std::to_string(d));
    names.insert(names.end(), {"quartilemed1", "quartilemed3"});
  }
  return names;
}

// Ratios whose denominator vanishes resolve to 0 and mark the result.
struct SafeRatio {
  bool degenerate = false;
  double operator()(double num, double den, double scale) {
    if (std::abs(den) <= 1e-12 * std::max(1.0, scale)) {
      degenerate = true;
      return 0.0;
    }
    return num / den;
  }
};

}  // namespace

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ValidationError("quantile of empty data");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

const std::vector<std::string>& spectral_stat_names(StatsVariant variant) {
  static const std::vector<std::string> standard = make_names(StatsVariant::standard);
  static const std::vector<std::string> dsm = make_names(StatsVariant::dsm);
  return variant == StatsVariant::standard ? standard : dsm;
}

double SpectralStats::get(std::string_view name, StatsVariant variant) const {
  const auto& names = spectral_stat_names(variant);
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return values.at(i);
  throw std::out_of_range("unknown statistic " + std::string(name));
}

SpectralStats spectral_stats(std::span<const double> pixels, StatsVariant variant) {
  if (pixels.empty()) throw ValidationError("spectral statistics need at least one pixel");
  std::vector<double> sorted(pixels.begin(), pixels.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());

  double mean = 0.0;
  for (double v : sorted) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : sorted) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  const double sd = std::sqrt(m2);
  const double scale = std::max(std::abs(sorted.front()), std::abs(sorted.back()));

  SafeRatio ratio;
  double skew = 0.0, kurt = 0.0;
  if (sd > 1e-12 * std::max(1.0, scale)) {
    skew = m3 / (m2 * sd);
    kurt = m4 / (m2 * m2) - 3.0;
  } else {
    ratio.degenerate = true;
  }
  const double mx = sorted.back();
  const double mn = sorted.front();
  const double rng = mx - mn;
  const double median = quantile_sorted(sorted, 0.5);
  const double q1 = quantile_sorted(sorted, 0.25);
  const double q3 = quantile_sorted(sorted, 0.75);
  const double iqr = q3 - q1;

  SpectralStats out;
  auto& v = out.values;
  if (variant == StatsVariant::standard) {
    v = {mx, mn, mean, sd, median, ratio(mean, sd, scale), skew, kurt, rng, ratio(rng, sd, scale),
         ratio(rng, mean, scale)};
    for (int d = 1; d <= 9; ++d) v.push_back(quantile_sorted(sorted, d / 10.0));
    v.insert(v.end(), {q1, q3, iqr, ratio(iqr, sd, scale), ratio(iqr, mean, scale)});
  } else {
    std::vector<double> dev(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) dev[i] = std::abs(sorted[i] - median);
    std::sort(dev.begin(), dev.end());
    v = {sd, skew, kurt, rng, ratio(rng, sd, scale), ratio(rng, mean, scale), iqr, ratio(iqr, sd, scale),
         quantile_sorted(dev, 0.5), mx - median, mn - median};
    for (int d = 1; d <= 9; ++d) v.push_back(quantile_sorted(sorted, d / 10.0) - median);
    v.insert(v.end(), {q1 - median, q3 - median});
  }
  out.degenerate = ratio.degenerate;
  return out;
}

}  // namespace canopy
