#include <gtest/gtest.h>

#include <set>

#include "canopy/error.hpp"
#include "canopy/folds.hpp"
#include "canopy/geometry.hpp"
#include "canopy/labels.hpp"
#include "canopy/slic.hpp"
#include "support.hpp"

using namespace canopy;

namespace {

Polygon square(double x0, double y0, double side, std::string label = "oil_palm", std::string id = "c") {
  return {std::move(id), {{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}, {x0, y0}}, std::move(label), "field"};
}

// 10 x 10 raster of 1 m pixels, north edge at y = 10.
const GeoTransform kGeo{0.0, 10.0, 1.0, 1.0};

}  // namespace

TEST(Polygon, AreaAndContainment) {
  const auto sq = square(1, 1, 2);
  EXPECT_DOUBLE_EQ(sq.area(), 4.0);
  EXPECT_GT(sq.signed_area(), 0.0);
  EXPECT_TRUE(sq.contains({2, 2}));
  EXPECT_FALSE(sq.contains({3.5, 2}));
  Polygon l{"l", {{0, 0}, {4, 0}, {4, 1}, {1, 1}, {1, 4}, {0, 4}, {0, 0}}, "x", ""};
  EXPECT_DOUBLE_EQ(l.area(), 7.0);
  EXPECT_TRUE(l.contains({0.5, 3}));
  EXPECT_FALSE(l.contains({2, 2}));
}

TEST(Polygon, InvalidRingsRejected) {
  EXPECT_NO_THROW(validate_polygon(square(0, 0, 1)));
  Polygon open{"o", {{0, 0}, {1, 0}, {1, 1}, {0, 1}}, "x", ""};
  EXPECT_THROW(validate_polygon(open), ValidationError);
  Polygon flat{"f", {{0, 0}, {1, 0}, {2, 0}, {0, 0}}, "x", ""};
  EXPECT_THROW(validate_polygon(flat), ValidationError);
  Polygon bow{"b", {{0, 0}, {2, 2}, {2, 0}, {0, 2}, {0, 0}}, "x", ""};
  EXPECT_THROW(validate_polygon(bow), ValidationError);
}

TEST(Polygon, Distance) {
  EXPECT_DOUBLE_EQ(polygon_distance(square(0, 0, 1), square(3, 0, 1)), 2.0);
  EXPECT_DOUBLE_EQ(polygon_distance(square(0, 0, 2), square(1, 1, 2)), 0.0);
  EXPECT_NEAR(polygon_distance(square(0, 0, 1), square(4, 5, 1)), 5.0, 1e-12);
}

TEST(GeoJson, ParseWriteRoundTrip) {
  test::TempDir dir("geojson");
  std::vector<Polygon> polys{square(1, 1, 2, "oil_palm", "a"), square(5, 5, 1, "bellucia_pentamera", "b")};
  write_polygons(polys, dir.file("p.geojson"));
  const auto back = read_polygons(dir.file("p.geojson"));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].id, "b");
  EXPECT_EQ(back[1].label, "bellucia_pentamera");
  EXPECT_EQ(back[0].source, "field");
  EXPECT_EQ(back[0].ring.size(), 5u);
  EXPECT_DOUBLE_EQ(back[0].ring[2].x, 3.0);
}

TEST(GeoJson, MalformedInputRejected) {
  EXPECT_THROW(parse_polygons("{"), FormatError);
  EXPECT_THROW(parse_polygons(R"({"type": "Feature"})"), ValidationError);
  const char* point = R"({"type": "FeatureCollection", "features": [
    {"type": "Feature", "properties": {"id": "p", "label": "x"}, "geometry": {"type": "Point", "coordinates": [0, 0]}}]})";
  EXPECT_THROW(parse_polygons(point), ValidationError);
  const char* zero = R"({"type": "FeatureCollection", "features": [
    {"type": "Feature", "properties": {"id": "z", "label": "x"},
     "geometry": {"type": "Polygon", "coordinates": [[[0, 0], [1, 1], [2, 2], [0, 0]]]}}]})";
  EXPECT_THROW(parse_polygons(zero), ValidationError);
}

TEST(Rasterize, PixelCentreRule) {
  // covers the centres (1.5, 8.5), (2.5, 8.5), (1.5, 7.5), (2.5, 7.5)
  const auto ids = rasterize_polygons({square(1, 7, 2)}, kGeo, 10, 10);
  std::size_t n = 0;
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids[i] == 0) {
      ++n;
      EXPECT_TRUE(i == 11 || i == 12 || i == 21 || i == 22) << i;
    }
  EXPECT_EQ(n, 4u);
  const auto outside = rasterize_polygons({square(50, 50, 3)}, kGeo, 10, 10);
  for (auto v : outside) EXPECT_EQ(v, -1);
}

TEST(Rasterize, LaterPolygonWinsOverlap) {
  std::size_t overlap = 0;
  const auto ids = rasterize_polygons({square(0, 6, 3), square(2, 6, 3)}, kGeo, 10, 10, &overlap);
  EXPECT_EQ(overlap, 3u);
  EXPECT_EQ(ids[1 * 10 + 2], 1);
  EXPECT_EQ(ids[1 * 10 + 1], 0);
}

TEST(LabelTransfer, HalfOverlapIsInclusive) {
  // five vertical stripes of 2 x 10 pixels
  std::vector<std::uint32_t> labels(100);
  for (std::size_t y = 0; y < 10; ++y)
    for (std::size_t x = 0; x < 10; ++x) labels[y * 10 + x] = static_cast<std::uint32_t>(x / 2);
  const auto part = make_partition(labels, 10, 10);
  std::vector<std::int32_t> crowns(100, -1);
  for (std::size_t y = 0; y < 10; ++y) {
    crowns[y * 10 + 0] = crowns[y * 10 + 1] = 0;  // region 0 fully inside
    if (y < 5) crowns[y * 10 + 2] = crowns[y * 10 + 3] = 1;  // region 1 exactly half
    if (y < 4) crowns[y * 10 + 4] = 2;  // region 2: 4 of 20 pixels
    if (y >= 4) crowns[y * 10 + 4] = crowns[y * 10 + 5] = 3;  // and 12 of 20 in crown 3
  }
  for (std::size_t y = 0; y < 9; ++y) crowns[y * 10 + 6] = 4;  // region 3: 9 of 20 pixels
  const auto rl = assign_superpixel_labels(part, crowns);
  ASSERT_EQ(rl.size(), 5u);
  EXPECT_EQ(rl[0].crown, 0);
  EXPECT_DOUBLE_EQ(rl[0].overlap, 1.0);
  EXPECT_EQ(rl[1].crown, 1);
  EXPECT_DOUBLE_EQ(rl[1].overlap, 0.5);
  EXPECT_EQ(rl[2].crown, 3);
  EXPECT_DOUBLE_EQ(rl[2].overlap, 0.6);
  EXPECT_EQ(rl[3].crown, -1);
  EXPECT_LT(rl[3].overlap, 0.5);
  EXPECT_EQ(rl[4].crown, -1);
  EXPECT_EQ(rl[4].overlap, 0.0);
}

TEST(LabelTransfer, CsvRoundTrip) {
  test::TempDir dir("labels");
  const std::vector<Polygon> crowns{square(0, 0, 1, "oil_palm", "k1"), square(2, 2, 1, "non_vegetation", "k2")};
  const std::vector<RegionLabel> rl{{0, 1, 0.75}, {1, -1, 0.2}, {2, 0, 1.0}};
  write_region_labels(rl, crowns, dir.file("l.csv"));
  const auto back = read_region_labels(dir.file("l.csv"));
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[0].crown, 1);
  EXPECT_DOUBLE_EQ(back[0].overlap, 0.75);
  EXPECT_EQ(back[1].crown, -1);
  EXPECT_EQ(back[2].region, 2u);
}

TEST(LabelScheme, BuiltinsCoverTheBaseVocabulary) {
  for (const auto& name : LabelScheme::builtin_names()) {
    const auto s = LabelScheme::builtin(name);
    EXPECT_NO_THROW(s.validate());
    for (const auto& l : base_labels()) {
      const int c = s.class_of(l);
      EXPECT_GE(c, 0);
      EXPECT_LT(c, static_cast<int>(s.classes.size()));
    }
  }
  const auto all = LabelScheme::builtin("all");
  EXPECT_EQ(all.classes.size(), 7u);
  const auto merged = LabelScheme::builtin("merge_endospermum");
  EXPECT_EQ(merged.classes.size(), 6u);
  EXPECT_EQ(merged.class_of("endospermum_malaccense"), merged.class_of("other_vegetation"));
  const auto lower = LabelScheme::builtin("lower_concern");
  EXPECT_EQ(lower.class_of("alstonia_scholaris"), lower.class_of("other_vegetation"));
  EXPECT_NE(lower.class_of("bellucia_pentamera"), lower.class_of("macaranga_gigantea"));
  EXPECT_THROW(LabelScheme::builtin("genus"), ValidationError);
  EXPECT_THROW(all.class_of("durian"), ValidationError);

  const auto map = merged.mapping_from(all);
  ASSERT_EQ(map.size(), 7u);
  for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(map[i], merged.class_of(all.classes[i]));
}

TEST(LabelScheme, IdentityKeepsFirstAppearanceOrder) {
  const auto s = LabelScheme::identity({"fig", "palm", "fig", "bare"});
  EXPECT_EQ(s.classes, (std::vector<std::string>{"fig", "palm", "bare"}));
  EXPECT_EQ(s.class_of("bare"), 2);
  EXPECT_THROW(LabelScheme::identity({"fig"}).validate(), ValidationError);
}

TEST(Folds, StratifiedCompleteCovering) {
  std::vector<int> crown_class(30, 0);
  const auto f = make_folds(crown_class, 10, 3);
  std::vector<int> per_fold(10, 0);
  for (int v : f.crown_fold) ++per_fold[static_cast<std::size_t>(v)];
  for (int n : per_fold) EXPECT_EQ(n, 3);

  std::vector<int> mixed;
  for (int c = 0; c < 4; ++c)
    for (int i = 0; i < 12 + 5 * c; ++i) mixed.push_back(c);
  const auto g = make_folds(mixed, 10, 9);
  EXPECT_EQ(g.crown_fold, make_folds(mixed, 10, 9).crown_fold);
  EXPECT_NE(g.crown_fold, make_folds(mixed, 10, 10).crown_fold);
  for (int c = 0; c < 4; ++c) {
    std::vector<int> count(10, 0);
    for (std::size_t i = 0; i < mixed.size(); ++i)
      if (mixed[i] == c) ++count[static_cast<std::size_t>(g.crown_fold[i])];
    EXPECT_LE(*std::max_element(count.begin(), count.end()) - *std::min_element(count.begin(), count.end()), 1);
  }
  // rows inherit their crown's fold
  const std::vector<int> row_crown{17, 17, 3, 17, 40};
  const auto rows = g.row_folds(row_crown);
  EXPECT_EQ(rows[0], g.crown_fold[17]);
  EXPECT_EQ(rows[1], g.crown_fold[17]);
  EXPECT_EQ(rows[3], g.crown_fold[17]);
  EXPECT_EQ(rows[2], g.crown_fold[3]);
  EXPECT_THROW(make_folds(mixed, 1, 0), ValidationError);
}

TEST(Folds, HoldoutTakesAFractionOfEveryClass) {
  std::vector<int> crown_class;
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 8 * (c + 1); ++i) crown_class.push_back(c);
  crown_class.push_back(-1);
  const auto test = stratified_holdout(crown_class, 0.25, 5);
  std::vector<int> held(3, 0);
  for (std::size_t i = 0; i < crown_class.size(); ++i)
    if (crown_class[i] >= 0 && test[i]) ++held[static_cast<std::size_t>(crown_class[i])];
  EXPECT_EQ(held, (std::vector<int>{2, 4, 6}));
  EXPECT_EQ(test.back(), 0);
}
