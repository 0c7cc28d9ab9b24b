#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace canopy {

/// Float image, row-major. Texture kernels work in double precision.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;

  Image() = default;
  Image(std::size_t w, std::size_t h, double fill = 0.0) : width(w), height(h), values(w * h, fill) {}
  double at(std::size_t x, std::size_t y) const { return values[y * width + x]; }
  double& at(std::size_t x, std::size_t y) { return values[y * width + x]; }
};

/// Pixel validity mask aligned with an Image; empty means every pixel is valid.
using Mask = std::vector<std::uint8_t>;

inline bool mask_allows(const Mask& mask, std::size_t i) { return mask.empty() || mask[i] != 0; }

// ---------------------------------------------------------------------------
// Quantization

inline constexpr int kGlcmLevels = 32;

struct QuantizeRange {
  double low = 0.0;   // 5th percentile
  double high = 0.0;  // 95th percentile
};

QuantizeRange quantize_range(std::span<const double> values);
int quantize_value(double v, const QuantizeRange& range, int levels = kGlcmLevels);
/// Linear map of [p5, p95] onto [1, levels] with rounding; values outside are
/// clamped; a constant input maps entirely to 1.
std::vector<int> quantize_levels(std::span<const double> values, int levels = kGlcmLevels);

// ---------------------------------------------------------------------------
// Grey-level co-occurrence

inline constexpr std::size_t kHaralickCount = 13;
std::span<const std::string_view> haralick_names();  // asm, con, cor, var, idm, sumav, sumvar, sument, ent, difvar, difent, infcor1, infcor2

/// Pixel step for each of the four directions 0, 45, 90 and 135 degrees.
std::array<std::array<int, 2>, 4> glcm_steps(int offset);

/// Levels image with values in [1, kGlcmLevels].
struct LevelImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<int> levels;
};

/// Symmetric, normalised co-occurrence matrix (kGlcmLevels x kGlcmLevels,
/// row-major, index level-1). Returns all zeros if no valid pair exists.
std::vector<double> glcm_matrix(const LevelImage& img, const Mask& mask, int dx, int dy, std::size_t* pairs = nullptr);

/// Haralick statistics of a normalised matrix. `degenerate` is set when a
/// statistic had a vanishing denominator and was resolved to 0.
std::array<double, kHaralickCount> haralick_stats(std::span<const double> p, bool* degenerate = nullptr);

struct GlcmFeatures {
  std::array<std::array<double, kHaralickCount>, 4> per_direction{};
  std::array<double, kHaralickCount> mean{};
  std::array<double, kHaralickCount> range{};
  bool degenerate = false;
};

GlcmFeatures glcm_features(const LevelImage& img, const Mask& mask, int offset);

// ---------------------------------------------------------------------------
// Local binary patterns (rotation-invariant uniform coding)

inline constexpr std::size_t lbp_bin_count(int radius) { return static_cast<std::size_t>(8 * radius + 2); }

struct LbpHistogram {
  std::vector<double> bins;  // P+1 uniform popcount bins, then one non-uniform bin
  bool degenerate = false;
};

/// Code of the pixel at (x, y): popcount for uniform patterns, P+1 otherwise.
/// The pixel must be at least `radius` pixels from every edge.
std::size_t lbp_code(const Image& img, std::size_t x, std::size_t y, int radius);

LbpHistogram lbp_histogram(const Image& img, const Mask& mask, int radius);

// ---------------------------------------------------------------------------
// Laws texture energy

inline constexpr std::size_t kLawsCount = 14;
inline constexpr std::size_t kLawsWindow = 15;
std::span<const std::string_view> laws_names();  // L5E5 ... W5W5

/// 5x5 kernel k (row-major) for Laws combination `index`.
std::array<double, 25> laws_kernel(std::size_t index);

/// Subtracts the mean of the edge-clamped window x window neighbourhood.
Image remove_local_mean(const Image& img, std::size_t window = kLawsWindow);

/// 2-D convolution with a 5x5 kernel, edge-clamped.
Image convolve5(const Image& img, const std::array<double, 25>& kernel);

struct LawsFeatures {
  std::array<double, kLawsCount> mean{};
  std::array<double, kLawsCount> std{};
  bool degenerate = false;
};

/// Mean removal, then the 14 kernel responses; mean and population std of each
/// response over masked-in pixels. Images below 15x15 are degenerate (zeros).
LawsFeatures laws_features(const Image& img, const Mask& mask);

// ---------------------------------------------------------------------------
// Spatial autocorrelation

struct AutocorrFeatures {
  std::array<double, 4> per_direction{};
  double mean = 0.0;
  double range = 0.0;
  bool degenerate = false;
};

/// Pearson correlation between the image and itself shifted by `offset`
/// along each GLCM direction, over valid overlapping pairs.
double directional_autocorrelation(const Image& img, const Mask& mask, int dx, int dy, bool* degenerate = nullptr);
AutocorrFeatures autocorrelation_features(const Image& img, const Mask& mask, int offset);

}  // namespace canopy
