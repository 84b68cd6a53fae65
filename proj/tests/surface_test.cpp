#include "fixtures.hpp"
#include "test_support.hpp"
#include "tricover/surface.hpp"

#include <gtest/gtest.h>

namespace tricover {
namespace {

using testing::center;
using testing::random_rational;

SurfacePresentation plane(std::vector<BlowupCenter> cs = {}) { return {MinimalModel::plane(), std::move(cs)}; }
SurfacePresentation sigma(int n, std::vector<BlowupCenter> cs = {}) {
  return {MinimalModel::hirzebruch(n), std::move(cs)};
}

std::string error_of(const SurfacePresentation& sp) {
  try {
    validate_presentation(sp);
  } catch (const PresentationError& e) {
    return e.what();
  }
  return {};
}

TEST(ValidatePresentation, Examples) {
  EXPECT_TRUE(validate_presentation(plane()).empty());
  EXPECT_NE(error_of(plane({center(1, "Pz", 1, 1), center(2, "Pz", 1, 1)})).find("duplicate center"),
            std::string::npos);
  // The same surface point seen from another chart is still a duplicate.
  EXPECT_NE(error_of(plane({center(1, "Pz", 1, 2), center(2, "Px", 2, 1)})).find("duplicate center"),
            std::string::npos);
  EXPECT_EQ(error_of(sigma(2, {center(1, "H00", 0, 0), center(2, "E1a", 0, 3)})), "");
}

TEST(ValidatePresentation, Errors) {
  EXPECT_EQ(error_of(sigma(-1)), "n must be ≥ 0");
  EXPECT_NE(error_of(plane({center(2, "Pz", 0, 0)})).find("levels"), std::string::npos);
  EXPECT_NE(error_of(plane({center(1, "Qz", 0, 0)})).find("dangling"), std::string::npos);
  EXPECT_NE(error_of(plane({center(1, "E1a", 0, 0)})).find("dangling"), std::string::npos);
  EXPECT_NE(error_of(plane({center(1, "Pz", 0, 0), center(2, "E2a", 0, 0)})).find("dangling"),
            std::string::npos);
  EXPECT_EQ(validate_presentation(sigma(1)).size(), 1u);
}

/// Round trips between every ordered pair of charts of one level, at
/// points of X_level (removed points are skipped).
void expect_round_trips(const StandardAtlas& atlas, int level, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (const auto* a : atlas.charts_at(level))
    for (const auto* b : atlas.charts_at(level)) {
      int done = 0;
      for (int s = 0; s < 4 * samples && done < samples; ++s) {
        Point2 p{random_rational(rng), random_rational(rng)};
        if (a->removed_at(p, level)) continue;
        auto q = atlas.locate(a->id.name, p, b->id.name, level);
        if (!q) continue;
        auto back = atlas.locate(b->id.name, *q, a->id.name, level);
        ASSERT_TRUE(back) << a->id.name << " -> " << b->id.name;
        EXPECT_EQ(*back, p) << a->id.name << " -> " << b->id.name;
        ++done;
      }
      EXPECT_EQ(done, samples) << a->id.name << " -> " << b->id.name;
    }
}

TEST(StandardAtlas, PlaneHasThreeChartsWithConsistentTransitions) {
  StandardAtlas atlas(plane());
  auto cs = atlas.charts_at(0);
  ASSERT_EQ(cs.size(), 3u);
  int pairs = 0;
  for (const auto* a : cs)
    for (const auto* b : cs) pairs += a != b;
  EXPECT_EQ(pairs, 6);
  expect_round_trips(atlas, 0, 10, 1);
  // [1 : 2 : 3] in all three charts.
  EXPECT_EQ(atlas.locate("Pz", {Rational(1, 3), Rational(2, 3)}, "Px", 0), (Point2{2, 3}));
  EXPECT_EQ(atlas.locate("Pz", {Rational(1, 3), Rational(2, 3)}, "Py", 0), (Point2{Rational(1, 2), Rational(3, 2)}));
}

TEST(StandardAtlas, HirzebruchCocycles) {
  for (int n : {0, 2, 3}) {
    StandardAtlas atlas(sigma(n));
    ASSERT_EQ(atlas.charts_at(0).size(), 4u);
    expect_round_trips(atlas, 0, 8, 3);
    // The cycle H00 -> H10 -> H11 -> H01 -> H00 is the identity.
    const auto& reg = *atlas.registry();
    std::vector<std::string> cycle{"H00", "H10", "H11", "H01", "H00"};
    RationalMap2 f = RationalMap2::identity(atlas.chart("H00").id);
    for (std::size_t i = 0; i + 1 < cycle.size(); ++i)
      f = ratmap_compose(reg.transition(atlas.chart(cycle[i]).id, atlas.chart(cycle[i + 1]).id), f);
    EXPECT_EQ(f.components, RationalMap2::identity(f.source).components) << n;
  }
}

TEST(StandardAtlas, ProductCaseHasTrivialCocycle) {
  StandardAtlas atlas(sigma(0));
  const auto& reg = *atlas.registry();
  // Fiber coordinate unchanged between H00 and H10.
  auto f = reg.transition(atlas.chart("H00").id, atlas.chart("H10").id);
  EXPECT_EQ(f.components[1], RatFun::variable(1));
}

TEST(StandardAtlas, SectionPicksUpCocycleOnSigma2) {
  StandardAtlas atlas(sigma(2));
  const auto& reg = *atlas.registry();
  auto f = reg.transition(atlas.chart("H00").id, atlas.chart("H10").id);
  for (int z : {1, -2, 5})
    for (int c : {0, 3, -7}) {
      auto img = f.eval({z, c});
      ASSERT_TRUE(img);
      EXPECT_EQ((*img)[0], 1 / Rational(z));
      EXPECT_EQ((*img)[1], Rational(c * z * z));
    }
}

TEST(StandardAtlas, BlowupChartsAndRemovedPoints) {
  StandardAtlas atlas(plane({center(1, "Pz", 1, 2), center(2, "Pz", -1, 1)}));
  EXPECT_EQ(atlas.charts_at(0).size(), 3u);
  EXPECT_EQ(atlas.charts_at(1).size(), 5u);
  EXPECT_EQ(atlas.charts_at(2).size(), 7u);
  EXPECT_TRUE(atlas.chart("Pz").removed_at({1, 2}, 1));
  EXPECT_FALSE(atlas.chart("Pz").removed_at({1, 2}, 0));
  // Center 2 lies in E1a (u = -2, v = 1/2) and is inherited there.
  EXPECT_TRUE(atlas.chart("E1a").removed_at({-2, Rational(1, 2)}, 2));
  EXPECT_FALSE(atlas.chart("E1a").removed_at({-2, Rational(1, 2)}, 1));
  expect_round_trips(atlas, 2, 3, 5);
  std::mt19937_64 rng(9);
  for (int s = 0; s < 200; ++s) {
    auto [w, p] = atlas.random_point(rng, 2);
    EXPECT_FALSE(w->removed_at(p, 2));
  }
}

TEST(PushforwardPoint, Examples) {
  StandardAtlas atlas(plane({center(1, "Pz", 0, 0)}));
  auto e = atlas.pushforward_point("E1a", {0, 5}, 0);
  EXPECT_EQ(e.chart.name, "Pz");
  EXPECT_EQ(e.point, (Point2{0, 0}));
  EXPECT_TRUE(e.on_exceptional());
  auto off = atlas.pushforward_point("E1a", {2, 3}, 0);
  EXPECT_EQ(off.point, (Point2{2, 6}));
  EXPECT_FALSE(off.on_exceptional());
  EXPECT_EQ(atlas.pushforward_point("E1b", {7, 0}, 0).point, atlas.pushforward_point("E1a", {0, -1}, 0).point);
}

TEST(FutureCenters, Examples) {
  {
    StandardAtlas atlas(plane({center(1, "Pz", 0, 0)}));
    auto f = atlas.future_center_sets(1);
    EXPECT_TRUE(f.outside.empty());
    EXPECT_TRUE(f.on_exceptional.empty());
  }
  {
    StandardAtlas atlas(plane({center(1, "Pz", 0, 0), center(2, "Pz", 1, 2)}));
    auto f = atlas.future_center_sets(1);
    ASSERT_EQ(f.outside.components.size(), 1u);
    EXPECT_EQ(*f.outside.components[0].point, (Point2{1, 2}));
    EXPECT_TRUE(f.on_exceptional.empty());
  }
  {
    StandardAtlas atlas(plane({center(1, "Pz", 0, 0), center(2, "E1a", 0, 3)}));
    auto f = atlas.future_center_sets(1);
    EXPECT_TRUE(f.outside.empty());
    ASSERT_EQ(f.on_exceptional.size(), 1u);
    EXPECT_EQ(f.on_exceptional[0], Direction::of(1, 3));
    EXPECT_TRUE(f.routed_to_exceptional.at(2));
  }
  EXPECT_THROW(StandardAtlas(plane()).future_center_sets(1), PresentationError);
}

TEST(Fixtures, MatrixShape) {
  auto fs = testing::fixture_matrix();
  EXPECT_EQ(fs.size(), 20u);
  int near = 0;
  for (const auto& f : fs) {
    EXPECT_NO_THROW(validate_presentation(f.sp)) << f.name;
    near += f.infinitely_near;
  }
  EXPECT_GE(near, 2);
}

}  // namespace
}  // namespace tricover
