#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace canopy {

enum class ImageryKind { rgb, ms };

enum class IndexId {
  CIG, CVI, ExR, ExG, ExB, ExGveg, ExRveg, ExBveg, GLIr, GLIg, GLIb,
  GRVI, mGRVI, IKAW, NegExR, NDVI, NDVIg, NDVIre, RGBVI, TGI, VARI,
};

struct IndexDef {
  IndexId id;
  std::string_view name;
  bool on_rgb;
  bool on_ms;
};

/// All 21 pixel-wise vegetation and spectral indices.
std::span<const IndexDef> index_table();

/// Indices computed for one imagery kind, in table order (16 for RGB, 8 for MS).
std::vector<IndexDef> indices_for(ImageryKind kind);

/// Band samples for a single pixel. Unused bands may be left at 0.
struct SpectralPixel {
  double red = 0.0, green = 0.0, blue = 0.0, rededge = 0.0, nir = 0.0;
};

/// One index on one pixel. Zero denominators yield 0.
double index_value(IndexId id, const SpectralPixel& px);

/// Per-pixel band lists; the bands an imagery kind needs must all be present
/// with equal length (RGB: red/green/blue; MS: green/red/rededge/nir).
struct IndexInputs {
  std::span<const double> red, green, blue, rededge, nir;
};

struct DerivedBand {
  std::string name;
  std::vector<double> values;
};

std::vector<DerivedBand> vegetation_indices(const IndexInputs& in, ImageryKind kind);

}  // namespace canopy
