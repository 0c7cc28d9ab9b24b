#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace canopy {

/// Linear-interpolation (type 7) quantile of already sorted data, q in [0,1].
double quantile_sorted(std::span<const double> sorted, double q);

enum class StatsVariant { standard, dsm };

/// Ordered statistic names for a variant; spectral_stats returns values in this order.
const std::vector<std::string>& spectral_stat_names(StatsVariant variant);

struct SpectralStats {
  std::vector<double> values;
  bool degenerate = false;  // some ratio hit a zero denominator and was set to 0

  /// Lookup by name; throws std::out_of_range for unknown names.
  double get(std::string_view name, StatsVariant variant) const;
};

/// Summary statistics of a pixel multiset. Moments are population moments;
/// kurtosis is excess kurtosis. Throws ValidationError on empty input.
SpectralStats spectral_stats(std::span<const double> pixels, StatsVariant variant);

}  // namespace canopy
