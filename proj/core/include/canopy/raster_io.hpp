#pragma once

#include <iosfwd>
#include <string>

#include "canopy/raster.hpp"

namespace canopy {

/// Binary P6 PPM with maxval 255; samples scaled into [0,1].
Raster read_ppm(const std::string& path);
Raster read_ppm(std::istream& in);

struct GeoRaster {
  Raster raster;
  GeoTransform geo;
};

// FBR layout (little-endian throughout):
//   "FBR1" | u32 width | u32 height | u32 band_count
//   | band_count x (u8 length + ASCII role tag)
//   | f64 origin_x, origin_y, pixel_width, pixel_height
//   | u8 has_nodata | f32 nodata
//   | band-major f32 samples, row-major within band
GeoRaster read_fbr(const std::string& path);
GeoRaster read_fbr(std::istream& in);
void write_fbr(const Raster& raster, const GeoTransform& geo, const std::string& path);
void write_fbr(const Raster& raster, const GeoTransform& geo, std::ostream& out);

}  // namespace canopy
