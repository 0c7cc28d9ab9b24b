#include "canopy/indices.hpp"

#include <cmath>

#include "canopy/error.hpp"

namespace canopy {

namespace {

constexpr std::array<IndexDef, 21> kIndices{{
    {IndexId::CIG, "CIG", false, true},
    {IndexId::CVI, "CVI", false, true},
    {IndexId::ExR, "ExR", true, false},
    {IndexId::ExG, "ExG", true, false},
    {IndexId::ExB, "ExB", true, false},
    {IndexId::ExGveg, "ExGveg", true, false},
    {IndexId::ExRveg, "ExRveg", true, false},
    {IndexId::ExBveg, "ExBveg", true, false},
    {IndexId::GLIr, "GLIr", true, false},
    {IndexId::GLIg, "GLIg", true, false},
    {IndexId::GLIb, "GLIb", true, false},
    {IndexId::GRVI, "GRVI", true, true},
    {IndexId::mGRVI, "mGRVI", true, true},
    {IndexId::IKAW, "IKAW", true, false},
    {IndexId::NegExR, "NegExR", true, true},
    {IndexId::NDVI, "NDVI", false, true},
    {IndexId::NDVIg, "NDVIg", false, true},
    {IndexId::NDVIre, "NDVIre", false, true},
    {IndexId::RGBVI, "RGBVI", true, false},
    {IndexId::TGI, "TGI", true, false},
    {IndexId::VARI, "VARI", true, false},
}};

double div0(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

void require(std::span<const double> band, std::size_t n, const char* role) {
  if (band.size() != n)
    throw ValidationError(std::string("vegetation indices need band '") + role + "' with " + std::to_string(n) +
                          " samples");
}

}  // namespace

std::span<const IndexDef> index_table() { return kIndices; }

std::vector<IndexDef> indices_for(ImageryKind kind) {
  std::vector<IndexDef> out;
  for (const auto& d : kIndices)
    if (kind == ImageryKind::rgb ? d.on_rgb : d.on_ms) out.push_back(d);
  return out;
}

double index_value(IndexId id, const SpectralPixel& px) {
  const double r = px.red, g = px.green, b = px.blue, re = px.rededge, nir = px.nir;
  switch (id) {
    case IndexId::CIG: return div0(nir, g) - (g == 0.0 ? 0.0 : 1.0);
    case IndexId::CVI: return div0(nir * r * r, g);
    case IndexId::ExR: return 2 * r - g - b;
    case IndexId::ExG: return 2 * g - r - b;
    case IndexId::ExB: return 2 * b - r - g;
    case IndexId::ExGveg: return 2 * g - r - b + 50;
    case IndexId::ExRveg: return div0(1.4 * r - g, r + g + b);
    case IndexId::ExBveg: return div0(1.4 * b - g, r + g + b);
    case IndexId::GLIr: return div0(2 * r - g - b, 2 * r + g + b);
    case IndexId::GLIg: return div0(2 * g - r - b, 2 * g + r + b);
    case IndexId::GLIb: return div0(2 * b - r - g, 2 * b + r + g);
    case IndexId::GRVI: return div0(g - r, g + r);
    case IndexId::mGRVI: return div0(g * g - r * r, g * g + r * r);
    case IndexId::IKAW: return div0(r - b, r + b);
    case IndexId::NegExR: return g - 1.4 * r;
    case IndexId::NDVI: return div0(nir - r, nir + r);
    case IndexId::NDVIg: return div0(nir - g, nir + g);
    case IndexId::NDVIre: return div0(nir - re, nir + re);
    case IndexId::RGBVI: return div0(g * g - r * b, g * g + r * b);
    case IndexId::TGI: return g - 0.39 * r - 0.61 * b;
    case IndexId::VARI: return div0(g - r, g + r - b);
  }
  return 0.0;
}

std::vector<DerivedBand> vegetation_indices(const IndexInputs& in, ImageryKind kind) {
  const std::size_t n = in.green.size();
  require(in.red, n, "red");
  if (kind == ImageryKind::rgb) {
    require(in.blue, n, "blue");
  } else {
    require(in.rededge, n, "rededge");
    require(in.nir, n, "nir");
  }
  const auto defs = indices_for(kind);
  std::vector<DerivedBand> out;
  out.reserve(defs.size());
  for (const auto& d : defs) {
    DerivedBand band{std::string(d.name), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      SpectralPixel px;
      px.red = in.red[i];
      px.green = in.green[i];
      if (kind == ImageryKind::rgb) {
        px.blue = in.blue[i];
      } else {
        px.rededge = in.rededge[i];
        px.nir = in.nir[i];
      }
      band.values[i] = index_value(d.id, px);
    }
    out.push_back(std::move(band));
  }
  return out;
}

}  // namespace canopy
