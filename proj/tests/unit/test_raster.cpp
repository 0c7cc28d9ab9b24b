#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "canopy/error.hpp"
#include "canopy/raster.hpp"
#include "canopy/raster_io.hpp"
#include "support.hpp"

using namespace canopy;

namespace {

Raster small_rgb() {
  Raster r(3, 2, {BandRole::red, BandRole::green, BandRole::blue});
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (std::size_t b = 0; b < 3; ++b)
    for (auto& v : r.band(b)) v = u(rng);
  return r;
}

std::string fbr_bytes(const Raster& r, const GeoTransform& g) {
  std::ostringstream out(std::ios::binary);
  write_fbr(r, g, out);
  return out.str();
}

// sRGB (IEC 61966-2-1 luminance row) -> CIE L*, from the textbook definitions.
double oracle_lightness(double r, double g, double b) {
  auto lin = [](double c) { return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4); };
  const double y = 0.2126 * lin(r) + 0.7152 * lin(g) + 0.0722 * lin(b);
  const double eps = 216.0 / 24389.0, kappa = 24389.0 / 27.0;
  return y > eps ? 116.0 * std::cbrt(y) - 16.0 : kappa * y;
}

}  // namespace

TEST(GeoTransform, CentresAndInverse) {
  GeoTransform g{100.0, 200.0, 0.5, 0.25};
  EXPECT_DOUBLE_EQ(g.center_x(0), 100.25);
  EXPECT_DOUBLE_EQ(g.center_y(0), 199.875);
  EXPECT_DOUBLE_EQ(g.col_of(g.center_x(7)), 7.5);
  EXPECT_DOUBLE_EQ(g.row_of(g.center_y(3)), 3.5);
  EXPECT_DOUBLE_EQ(g.pixel_area_m2(), 0.125);
  EXPECT_THROW((GeoTransform{0, 0, 0.0, 1.0}.validate()), ValidationError);
  EXPECT_THROW((GeoTransform{0, 0, 1.0, -1.0}.validate()), ValidationError);
}

TEST(Raster, RolesAreUniqueAndQueryable) {
  EXPECT_THROW(Raster(2, 2, {BandRole::red, BandRole::red}), ValidationError);
  Raster r(2, 2, {BandRole::ms_nir, BandRole::dsm_height_m});
  EXPECT_EQ(r.band_index(BandRole::dsm_height_m), 1u);
  EXPECT_FALSE(r.find_role(BandRole::red).has_value());
  EXPECT_THROW(r.band_index(BandRole::red), ValidationError);
  EXPECT_THROW(Raster(2, 2, {BandRole::red}, std::vector<float>(3)), ValidationError);
}

TEST(Raster, RgbRangeValidated) {
  Raster r = small_rgb();
  EXPECT_NO_THROW(r.validate());
  r.at(1, 0, 0) = 1.5f;
  EXPECT_THROW(r.validate(), ValidationError);
}

TEST(Raster, RoleTagsRoundTrip) {
  for (auto role : {BandRole::red, BandRole::ms_rededge, BandRole::dsm_height_m, BandRole::hue, BandRole::derived})
    EXPECT_EQ(band_role_from_string(to_string(role)), role);
  EXPECT_THROW(band_role_from_string("infrared"), ValidationError);
}

TEST(Raster, RegionPixelsDropNodata) {
  Raster r(2, 2, {BandRole::ms_green, BandRole::ms_red}, std::vector<float>{1, 2, 3, 4, 5, -9999, 7, 8}, -9999.0f);
  const std::vector<std::uint32_t> px{0, 1, 2, 3};
  const auto reg = extract_region_pixels(r, px);
  EXPECT_EQ(reg.excluded, 1u);
  ASSERT_EQ(reg.kept.size(), 3u);
  EXPECT_EQ(reg.kept[1], 2u);
  EXPECT_EQ(reg.bands[1][2], 8.0);
  const auto none = extract_region_pixels(r, std::span<const std::uint32_t>{});
  EXPECT_TRUE(none.degenerate());
}

TEST(FbrIo, RoundTripIsBitExact) {
  Raster r = small_rgb();
  r.set_nodata(-1.0f);
  const GeoTransform g{300000.0, 9770000.0, 0.04, 0.04};
  std::istringstream in(fbr_bytes(r, g), std::ios::binary);
  const auto back = read_fbr(in);
  EXPECT_EQ(back.geo, g);
  EXPECT_EQ(back.raster.roles(), r.roles());
  ASSERT_TRUE(back.raster.nodata().has_value());
  EXPECT_EQ(*back.raster.nodata(), -1.0f);
  ASSERT_EQ(back.raster.data().size(), r.data().size());
  for (std::size_t i = 0; i < r.data().size(); ++i) EXPECT_EQ(back.raster.data()[i], r.data()[i]);
}

TEST(FbrIo, FileRoundTrip) {
  test::TempDir dir("fbr");
  Raster r(4, 3, {BandRole::dsm_height_m});
  for (std::size_t i = 0; i < r.pixel_count(); ++i) r.band(0)[i] = static_cast<float>(i) * 0.5f;
  write_fbr(r, {1, 2, 3, 4}, dir.file("a.fbr"));
  const auto back = read_fbr(dir.file("a.fbr"));
  EXPECT_EQ(back.raster.width(), 4u);
  EXPECT_EQ(back.raster.at(0, 3, 2), 5.5f);
  EXPECT_FALSE(back.raster.nodata().has_value());
}

TEST(FbrIo, BadMagicReportsOffsetZero) {
  std::string bytes = fbr_bytes(small_rgb(), {});
  bytes[0] = 'X';
  std::istringstream in(bytes, std::ios::binary);
  try {
    read_fbr(in);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 0u);
  }
}

TEST(FbrIo, TruncatedAndTrailingPayloadRejected) {
  const std::string bytes = fbr_bytes(small_rgb(), {});
  for (std::size_t cut : {std::size_t{3}, std::size_t{10}, bytes.size() - 1}) {
    std::istringstream in(bytes.substr(0, cut), std::ios::binary);
    EXPECT_THROW(read_fbr(in), FormatError) << "cut at " << cut;
  }
  std::istringstream extra(bytes + "abcd", std::ios::binary);
  EXPECT_THROW(read_fbr(extra), FormatError);
}

TEST(FbrIo, UnknownRoleTagRejected) {
  std::string bytes = fbr_bytes(small_rgb(), {});
  const auto pos = bytes.find("red");
  ASSERT_NE(pos, std::string::npos);
  bytes[pos] = 'q';
  std::istringstream in(bytes, std::ios::binary);
  EXPECT_THROW(read_fbr(in), FormatError);
}

TEST(PpmIo, ReadsBinaryP6) {
  std::string ppm = "P6\n# comment\n2 1\n255\n";
  ppm += std::string{'\xff', '\x00', '\x80', '\x00', '\xff', '\x00'};
  std::istringstream in(ppm, std::ios::binary);
  const auto r = read_ppm(in);
  ASSERT_EQ(r.width(), 2u);
  EXPECT_FLOAT_EQ(r.at(0, 0, 0), 1.0f);
  EXPECT_FLOAT_EQ(r.at(2, 0, 0), 128.0f / 255.0f);
  EXPECT_FLOAT_EQ(r.at(1, 1, 0), 1.0f);
  std::istringstream bad("P5\n1 1\n255\n\x01", std::ios::binary);
  EXPECT_THROW(read_ppm(bad), FormatError);
}

TEST(Colour, HsvKnownPoints) {
  const auto red = rgb_to_hsv(1.0, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(red.h, 0.0);
  EXPECT_DOUBLE_EQ(red.s, 1.0);
  EXPECT_DOUBLE_EQ(red.v, 1.0);
  EXPECT_NEAR(rgb_to_hsv(0.0, 1.0, 0.0).h, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(rgb_to_hsv(0.0, 0.0, 1.0).h, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(rgb_to_hsv(1.0, 0.0, 1.0).h, 5.0 / 6.0, 1e-15);
  const auto grey = rgb_to_hsv(0.4, 0.4, 0.4);
  EXPECT_EQ(grey.h, 0.0);
  EXPECT_EQ(grey.s, 0.0);
  EXPECT_DOUBLE_EQ(grey.v, 0.4);
}

TEST(Colour, HueStaysInUnitInterval) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const auto hsv = rgb_to_hsv(u(rng), u(rng), u(rng));
    EXPECT_GE(hsv.h, 0.0);
    EXPECT_LT(hsv.h, 1.0);
  }
}

TEST(Colour, LightnessMatchesTextbookFormula) {
  EXPECT_NEAR(rgb_to_lightness(1, 1, 1), 100.0, 1e-3);
  EXPECT_NEAR(rgb_to_lightness(0, 0, 0), 0.0, 1e-12);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double r = u(rng), g = u(rng), b = u(rng);
    EXPECT_NEAR(rgb_to_lightness(r, g, b), oracle_lightness(r, g, b), 1e-3);
    EXPECT_NEAR(rgb_to_lab(r, g, b).l, rgb_to_lightness(r, g, b), 1e-12);
  }
}

TEST(Colour, GreyUsesLumaWeights) {
  EXPECT_NEAR(rgb_to_grey(1, 0, 0), 0.299, 1e-12);
  EXPECT_NEAR(rgb_to_grey(0, 1, 0), 0.587, 1e-12);
  EXPECT_NEAR(rgb_to_grey(0, 0, 1), 0.114, 1e-12);
}

TEST(Colour, RasterTransformsKeepShapeAndRoles) {
  const Raster rgb = small_rgb();
  const auto hsv = rgb_to_hsv(rgb);
  EXPECT_EQ(hsv.band_count(), 3u);
  EXPECT_EQ(hsv.roles()[0], BandRole::hue);
  const auto l = rgb_to_cielab_lightness(rgb);
  EXPECT_EQ(l.roles()[0], BandRole::lightness);
  const auto grey = rgb_to_grey(rgb);
  EXPECT_NEAR(grey.at(0, 2, 1), rgb_to_grey(rgb.at(0, 2, 1), rgb.at(1, 2, 1), rgb.at(2, 2, 1)), 1e-6);
  Raster ms(2, 2, {BandRole::ms_nir});
  EXPECT_THROW(rgb_to_hsv(ms), ValidationError);
}
