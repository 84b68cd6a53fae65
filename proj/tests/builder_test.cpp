#include "fixtures.hpp"
#include "remark4.hpp"
#include "test_support.hpp"
#include "tricover/verifier.hpp"

#include <gtest/gtest.h>

namespace tricover {
namespace {

using testing::center;
using testing::P;
using testing::random_poly;
using testing::random_rational;
using testing::same_up_to_scalar;

std::shared_ptr<const StandardAtlas> atlas_of(SurfacePresentation sp) {
  return std::make_shared<const StandardAtlas>(std::move(sp));
}

TriCover base_cover(const std::shared_ptr<const StandardAtlas>& atlas, const ZeroDimSet& avoid,
                    const ChoiceConfig& cfg = {}) {
  TriCover c = atlas->model().is_plane() ? base_cover_p2(*atlas, avoid, cfg)
                                         : base_cover_hirzebruch(*atlas, avoid, cfg);
  c.atlas = atlas;
  return c;
}

bool contains_predicate(const AuditEntry& e, const std::string& name) {
  return std::find(e.predicates.begin(), e.predicates.end(), name) != e.predicates.end();
}

TEST(ChooseGeneric, AvoidsADirection) {
  for (std::uint64_t seed : {0, 1, 2}) {
    ChoiceConfig cfg{seed};
    std::vector<AuditEntry> audit;
    CandidateStream s(cfg, "test");
    Direction vertical = Direction::of(0, 1);
    Direction d = choose_generic<Direction>(
        "line", [&] { return s.next_direction(); },
        {{"not vertical", [&](const Direction& x) { return !(x == vertical); }}}, cfg, audit, 0);
    EXPECT_FALSE(d == vertical);
    ASSERT_EQ(audit.size(), 1u);
    EXPECT_TRUE(audit[0].replay());
  }
}

TEST(ChooseGeneric, PointsAndTangentRecheck) {
  const Point2 o{0, 0};
  std::vector<Point2> pts{{1, 0}, {0, 1}, {1, 1}};
  Direction tangent = Direction::of(1, 2);
  std::vector<Predicate<Direction>> preds{
      detail::misses_points(pts, o, "misses points"),
      detail::avoids_directions({tangent}, "not the tangent")};
  for (std::uint64_t seed : {0, 3, 9}) {
    ChoiceConfig cfg{seed};
    std::vector<AuditEntry> audit;
    CandidateStream s(cfg, "points");
    Direction d = choose_generic<Direction>("line", [&] { return s.next_direction(); }, preds, cfg, audit, 0);
    for (const auto& q : pts) EXPECT_NE(q[0] * d.dy, q[1] * d.dx);
    EXPECT_FALSE(d == tangent);
    EXPECT_TRUE(audit[0].replay());
    EXPECT_GT(audit[0].attempts, 1);
  }
}

TEST(ChooseGeneric, EmptyPredicatesTakeFirstCandidate) {
  ChoiceConfig cfg{5};
  std::vector<AuditEntry> audit;
  CandidateStream a(cfg, "x"), b(cfg, "x");
  Rational first = a.next_scalar();
  EXPECT_EQ(choose_generic<Rational>("c", [&] { return b.next_scalar(); }, {}, cfg, audit, 0), first);
  EXPECT_EQ(audit[0].attempts, 1);
}

TEST(ChooseGeneric, ExhaustionReportsRejections) {
  ChoiceConfig cfg{0, 5};
  std::vector<AuditEntry> audit;
  CandidateStream s(cfg, "x");
  try {
    choose_generic<Rational>("c", [&] { return s.next_scalar(); },
                             {{"never", [](const Rational&) { return false; }}}, cfg, audit, 2);
    FAIL();
  } catch (const ChoiceError& e) {
    EXPECT_NE(std::string(e.what()).find("never x5"), std::string::npos) << e.what();
  }
  ChoiceConfig zero{0, 0};
  EXPECT_THROW(choose_generic<Rational>("c", [&] { return s.next_scalar(); }, {}, zero, audit, 0), ChoiceError);
}

TEST(CandidateStream, SameSeedSameStream) {
  ChoiceConfig cfg{42};
  CandidateStream a(cfg, "salt"), b(cfg, "salt"), c(ChoiceConfig{43}, "salt");
  bool differs = false;
  for (int i = 0; i < 20; ++i) {
    auto fa = a.next_form(), fb = b.next_form(), fc = c.next_form();
    EXPECT_EQ(fa, fb);
    differs = differs || fa != fc;
  }
  EXPECT_TRUE(differs);
}

TEST(RestrictToLine, MatchesSubstitution) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 40; ++i) {
    Poly f = random_poly(rng, 5, 8) * random_rational(rng);
    Point2 p{random_rational(rng), random_rational(rng)};
    Direction d = Direction::of(random_rational(rng), random_rational(rng));
    mpz_class c;
    mpz_lcm(c.get_mpz_t(), d.dx.get_den_mpz_t(), d.dy.get_den_mpz_t());
    Poly tau = P("x");
    std::vector<Poly> line{Poly::constant(p[0]) + tau * (d.dx * c), Poly::constant(p[1]) + tau * (d.dy * c)};
    Poly oracle = f.compose(line);
    Poly r = detail::restrict_to_line(f, p, d);
    EXPECT_TRUE(same_up_to_scalar(r, oracle)) << f.to_string() << " at " << to_string(p) << " along " << d.to_string();
    EXPECT_EQ(r.degree_in(1), r.is_zero() ? -1 : 0);
  }
}

TEST(BaseCoverP2, CoordinateLinesWhenNothingToAvoid) {
  auto atlas = atlas_of({});
  TriCover c = base_cover(atlas, {});
  ASSERT_EQ(c.audit.size(), 3u);
  EXPECT_EQ(c.audit[0].value, "0*x + 0*y + 1*z");
  EXPECT_EQ(c.audit[1].value, "1*x + 0*y + 0*z");
  EXPECT_EQ(c.audit[2].value, "0*x + 1*y + 0*z");
  EXPECT_EQ(c.charts[0].complement.at("Pz"), P("1"));
  EXPECT_EQ(c.charts[1].complement.at("Pz"), P("x"));
  EXPECT_EQ(c.charts[2].complement.at("Pz"), P("y"));
  EXPECT_TRUE(certify(c, 200).passed());
}

TEST(BaseCoverP2, AvoidsGivenPoints) {
  auto atlas = atlas_of({});
  auto cs = atlas->chart("Pz").id;
  // The origin, then three collinear points.
  std::vector<std::vector<Point2>> sets{{{0, 0}}, {{0, 0}, {1, 1}, {2, 2}}};
  for (const auto& pts : sets)
    for (std::uint64_t seed : {0, 1}) {
      ZeroDimSet avoid;
      for (const auto& p : pts) avoid.add(PointComponent::at(cs, p));
      TriCover c = base_cover(atlas, avoid, {seed});
      EXPECT_TRUE(c.replay_audit());
      for (const auto& p : pts)
        for (int j = 0; j < 3; ++j) EXPECT_TRUE(c.from_standard.at("Pz")[j].eval(p)) << to_string(p);
      EXPECT_TRUE(certify(c, 200).passed());
    }
}

TEST(BaseCoverHirzebruch, ProductCaseCertifies) {
  auto atlas = atlas_of({MinimalModel::hirzebruch(0), {}});
  TriCover c = base_cover(atlas, {});
  auto cert = certify(c, 300, {0, 1});
  EXPECT_TRUE(cert.passed());
  EXPECT_EQ(cert.charts.size(), 4u);
}

TEST(BaseCoverHirzebruch, AuditRecordsAllSelectionConditions) {
  auto atlas = atlas_of({MinimalModel::hirzebruch(2), {}});
  ZeroDimSet avoid;
  avoid.add(PointComponent::at(atlas->chart("H00").id, {1, 1}));
  TriCover c = base_cover(atlas, avoid);
  ASSERT_EQ(c.audit.size(), 6u);
  EXPECT_TRUE(c.replay_audit());
  std::map<std::string, const AuditEntry*> by;
  for (const auto& e : c.audit) by[e.what] = &e;
  EXPECT_TRUE(contains_predicate(*by["P0"], "P0 not in p(pi(E))"));
  EXPECT_TRUE(contains_predicate(*by["Q0"], "L0 misses q0(pi(E))"));
  EXPECT_TRUE(contains_predicate(*by["P1"], "P1 not in p(pi(E)) u {P0}"));
  EXPECT_TRUE(contains_predicate(*by["Q1"], "L1 differs from q1(C2)"));
  EXPECT_TRUE(contains_predicate(*by["P2"], "P2 not in p(A)"));
  EXPECT_TRUE(contains_predicate(*by["Q2"], "L2 misses q2(A)"));
  // P0 = 1 is the avoided fiber, so it was skipped.
  EXPECT_NE(by["P0"]->value, "1");
  for (int j = 0; j < 3; ++j) EXPECT_TRUE(c.from_standard.at("H00")[j].eval({1, 1}));
  EXPECT_TRUE(certify(c, 300).passed());
}

TEST(BlowupChart, Examples) {
  ChartId a{0, "A"};
  Chart amb;
  amb.id = a;
  amb.reference = a;
  amb.to_reference = amb.from_reference = RationalMap2::identity(a);

  Chart c = blowup_chart({0, 0}, AffLine{a, P("x")}, amb, {1, "B"});
  EXPECT_EQ(c.blowdown->components[0], RatFun(P("x")));
  EXPECT_EQ(c.blowdown->components[1], RatFun(P("x*y")));
  EXPECT_EQ(c.exceptional_var, 0);
  EXPECT_EQ(ratmap_compose(*c.blowdown, *c.lift).components, RationalMap2::identity(a).components);

  Chart d = blowup_chart({1, 2}, AffLine{a, P("x - 1")}, amb, {1, "B"});
  EXPECT_EQ(d.blowdown->components[0], RatFun(P("x + 1")));
  EXPECT_EQ(d.blowdown->components[1], RatFun(P("x*y + 2")));

  EXPECT_THROW(blowup_chart({1, 0}, AffLine{a, P("x")}, amb, {1, "B"}), GeometryError);
  EXPECT_THROW(blowup_chart({0, 0}, AffLine{a, P("x^2")}, amb, {1, "B"}), GeometryError);
}

TEST(BlowupChart, TwoLinesCoverTheExceptionalCurve) {
  auto r = testing::check_remark4({0, 0}, Direction::of(0, 1), Direction::of(1, 0));
  EXPECT_TRUE(r.jointly_cover);
  EXPECT_TRUE(r.one_missing_point);
  EXPECT_TRUE(r.pullback_factors);
}

TEST(BlowupChart, RandomCentersAndLines) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 20; ++i) {
    Point2 p{random_rational(rng), random_rational(rng)};
    Direction d1 = Direction::of(random_rational(rng), random_rational(rng));
    Direction d2 = Direction::of(random_rational(rng), random_rational(rng));
    if (d1 == d2) continue;
    EXPECT_TRUE(testing::check_remark4(p, d1, d2).ok()) << to_string(p) << d1.to_string() << d2.to_string();
  }
}

TEST(BlowupChart, SameLineTwiceLeavesAPointUncovered) {
  Direction d = Direction::of(2, 3);
  auto r = testing::check_remark4({1, -1}, d, d);
  EXPECT_TRUE(r.one_missing_point);
  EXPECT_FALSE(r.jointly_cover);
}

TEST(InductiveStep, OnePointOfThePlane) {
  SurfacePresentation sp{MinimalModel::plane(), {center(1, "Pz", 1, 1)}};
  TriCover c = construct_cover(sp);
  EXPECT_EQ(c.level, 1);
  EXPECT_TRUE(c.replay_audit());
  auto cert = certify(c, 500, {0, 1});
  EXPECT_TRUE(cert.passed());
  EXPECT_EQ(cert.charts.size(), 5u);
  // Without a later center, l0 takes the first candidate direction.
  const AuditEntry* l0 = nullptr;
  for (const auto& e : c.audit)
    if (e.level == 1 && e.what == "l0 direction") l0 = &e;
  ASSERT_TRUE(l0);
  EXPECT_EQ(l0->value, "[0:1]");
}

TEST(InductiveStep, LaterCenterOnTheExceptionalCurveShiftsL0) {
  // Center 2 is the vertical direction at (1, 1): the first candidate for l0.
  SurfacePresentation sp{MinimalModel::plane(), {center(1, "Pz", 1, 1), center(2, "E1b", 0, 0)}};
  StandardAtlas atlas(sp);
  ASSERT_EQ(atlas.future_center_sets(1).on_exceptional, std::vector<Direction>{Direction::of(0, 1)});
  TriCover c = construct_cover(sp);
  const AuditEntry* l0 = nullptr;
  for (const auto& e : c.audit)
    if (e.level == 1 && e.what == "l0 direction") l0 = &e;
  ASSERT_TRUE(l0);
  EXPECT_NE(l0->value, "[0:1]");
  EXPECT_GT(l0->attempts, 1);
  EXPECT_TRUE(contains_predicate(*l0, "direction of l0 not in A2"));
  EXPECT_TRUE(certify(c, 500).passed());
}

TEST(InductiveStep, CenterInA1IsRejected) {
  auto atlas = atlas_of({MinimalModel::plane(), {center(1, "Pz", 1, 1)}});
  TriCover base = base_cover(atlas, atlas->exceptional_image());
  FutureCenters bad;
  bad.outside.add(PointComponent::at(atlas->chart("Pz").id, {1, 1}));
  try {
    inductive_step(*atlas, base, 1, bad, {});
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_NE(std::string(e.what()).find("A1"), std::string::npos);
  }
  EXPECT_THROW(inductive_step(*atlas, base, 2, {}, {}), GeometryError);
}

TEST(ConstructCover, EmptyTowerIsTheBaseCover) {
  TriCover c = construct_cover({});
  EXPECT_EQ(c.level, 0);
  EXPECT_EQ(c.audit.size(), 3u);
  EXPECT_TRUE(certify(c, 100).passed());
}

TEST(ConstructCover, TwoDistinctCentersOfThePlane) {
  SurfacePresentation sp{MinimalModel::plane(), {center(1, "Pz", 0, 0), center(2, "Pz", 1, 2)}};
  TriCover c = construct_cover(sp);
  EXPECT_EQ(c.level, 2);
  EXPECT_TRUE(certify(c, 500, {0, 1}).passed());
  EXPECT_TRUE(verify_transitions(c, 20, 0).passed());
}

TEST(ConstructCover, InfinitelyNearCenterOnSigma2) {
  SurfacePresentation sp{MinimalModel::hirzebruch(2), {center(1, "H00", 1, 1), center(2, "E1a", 0, 3)}};
  EXPECT_FALSE(StandardAtlas(sp).future_center_sets(1).on_exceptional.empty());
  TriCover c = construct_cover(sp);
  EXPECT_TRUE(c.replay_audit());
  auto cert = certify(c, 500, {0, 1});
  EXPECT_TRUE(cert.passed());
  EXPECT_EQ(cert.charts.size(), 8u);
}

TEST(ConstructCover, BuilderTracesAgreeWithPolarLoci) {
  for (const auto& f : testing::fixture_matrix()) {
    if (f.sp.blowups() > 2) continue;
    TriCover c = construct_cover(f.sp);
    auto table = complement_traces(c, *c.atlas);
    EXPECT_TRUE(table.mismatches.empty()) << f.name;
  }
}

}  // namespace
}  // namespace tricover
