#include "fixtures.hpp"
#include "test_support.hpp"
#include "tricover/report.hpp"

#include <gtest/gtest.h>

namespace tricover {
namespace {

using testing::center;
using testing::P;

/// Pz, Px, Py traces of the coordinate cover, in chart variables x, y.
TEST(ComplementTraces, PlaneCoordinateCover) {
  TriCover c = construct_cover({});
  auto t = complement_traces(c, *c.atlas);
  EXPECT_TRUE(t.mismatches.empty());
  EXPECT_EQ(t.traces.at("Pz"), (std::vector<Poly>{P("1"), P("x"), P("y")}));
  EXPECT_EQ(t.traces.at("Px"), (std::vector<Poly>{P("y"), P("1"), P("x")}));
  EXPECT_EQ(t.traces.at("Py"), (std::vector<Poly>{P("y"), P("x"), P("1")}));
  EXPECT_TRUE(t.factors.at("Pz")[0].empty());
}

TEST(ComplementTraces, ExceptionalCoordinateIsDividedOut) {
  SurfacePresentation sp{MinimalModel::plane(), {center(1, "Pz", 1, 1)}};
  TriCover c = construct_cover(sp);
  const StandardAtlas& atlas = *c.atlas;
  auto t = complement_traces(c, atlas);
  EXPECT_TRUE(t.mismatches.empty());
  for (const char* e : {"E1a", "E1b"}) {
    const StandardChart& w = atlas.chart(e);
    Poly ex = Poly::variable(w.exceptional_var);
    for (int j = 0; j < 3; ++j) {
      const Poly& tr = t.traces.at(e)[j];
      // Oracle: pull the Pz trace back and divide by the exceptional
      // coordinate as often as the curve passes through the center.
      Poly base = t.traces.at("Pz")[j];
      Poly oracle = base.is_constant() ? base : detail::canonical_trace(proper_transform(base, w.blowup, {1, 1}));
      EXPECT_TRUE(testing::same_up_to_scalar(tr, oracle)) << e << " U" << j;
      EXPECT_FALSE(!tr.is_constant() && tr.divide_exact(ex)) << e << " U" << j;
    }
  }
}

TEST(ComplementTraces, TamperedTraceIsCaught) {
  SurfacePresentation sp{MinimalModel::plane(), {center(1, "Pz", 0, 0)}};
  TriCover c = construct_cover(sp);
  ASSERT_TRUE(certify(c, 100).passed());
  Poly& tr = c.charts[1].complement.at("Pz");
  tr = tr * P("x + y + 7");
  auto cert = certify(c, 100);
  EXPECT_FALSE(cert.passed());
  EXPECT_EQ(cert.trace_mismatches, std::vector<std::string>{"Pz/U1"});
}

TEST(VerifyEmptiness, PlaneCoordinateCoverIsTrivialEverywhere) {
  TriCover c = construct_cover({});
  auto table = complement_traces(c, *c.atlas);
  auto recs = verify_emptiness(table, *c.atlas);
  ASSERT_EQ(recs.size(), 3u);
  for (const auto& r : recs) {
    EXPECT_TRUE(r.passed) << r.chart;
    for (const auto& b : r.blocks) EXPECT_EQ(b.status, "trivial");
  }
}

TEST(VerifyEmptiness, TwoChartControlFailsAtCoordinatePoint) {
  TriCover c = construct_cover({});
  // Keep {z != 0} and {y != 0}; their complements meet at [1 : 0 : 0].
  auto table = complement_traces(c, *c.atlas).without(1);
  auto recs = verify_emptiness(table, *c.atlas);
  int failing = 0;
  for (const auto& r : recs) {
    if (r.passed) continue;
    ++failing;
    EXPECT_EQ(r.chart, "Px");
    const EmptinessBlock* b = r.failing_block();
    ASSERT_TRUE(b);
    EXPECT_EQ(b->status, "finite, not removed");
    ASSERT_TRUE(b->witness);
    // (y/x, z/x) = (0, 0) is [1 : 0 : 0].
    EXPECT_EQ(*b->witness, (Point2{0, 0}));
  }
  EXPECT_EQ(failing, 1);
}

TEST(VerifyEmptiness, BlowupOfPlaneCertifiesInAllFiveCharts) {
  SurfacePresentation sp{MinimalModel::plane(), {center(1, "Pz", 2, -1)}};
  TriCover c = construct_cover(sp);
  auto cert = certify(c, 1000, {0, 1, 2});
  ASSERT_EQ(cert.charts.size(), 5u);
  for (const auto& r : cert.charts) EXPECT_TRUE(r.passed) << r.chart;
  EXPECT_TRUE(cert.passed());
}

TEST(VerifyEmptiness, DroppingAnyChartFails) {
  for (const auto& f : testing::fixture_matrix()) {
    if (f.sp.blowups() > 2) continue;
    TriCover c = construct_cover(f.sp);
    auto table = complement_traces(c, *c.atlas);
    for (int d = 0; d < 3; ++d) {
      auto recs = verify_emptiness(table.without(d), *c.atlas);
      EXPECT_TRUE(std::any_of(recs.begin(), recs.end(), [](const auto& r) { return !r.passed; }))
          << f.name << " without U" << d;
    }
  }
}

TEST(CertifyBlock, RemovedPointsAndPositiveDimension) {
  // The origin only, and it is removed.
  auto b = certify_block({P("x"), P("y")}, {{0, 0}});
  EXPECT_TRUE(b.passed);
  EXPECT_EQ(b.status, "removed points only");
  // Two points, one of them removed.
  auto c = certify_block({P("x^2 - x"), P("y")}, {{0, 0}});
  EXPECT_FALSE(c.passed);
  EXPECT_EQ(c.status, "finite, not removed");
  // Irrational points: no rational witness, still a failure.
  auto d = certify_block({P("x^2 - 2"), P("y")}, {});
  EXPECT_FALSE(d.passed);
  EXPECT_FALSE(d.witness);
  auto e = certify_block({P("x*y")}, {});
  EXPECT_EQ(e.status, "positive dimensional");
  EXPECT_FALSE(e.passed);
}

TEST(PairwiseFinite, PlaneCoverAndDegenerateCopy) {
  TriCover c = construct_cover({});
  auto pairs = verify_pairwise_finite(complement_traces(c, *c.atlas));
  EXPECT_EQ(pairs.size(), 9u);
  for (const auto& p : pairs) EXPECT_TRUE(p.finite());

  TriCover bad = c;
  bad.charts[1] = bad.charts[0];
  auto bp = verify_pairwise_finite(complement_traces(bad, *bad.atlas));
  int shared = 0;
  for (const auto& p : bp) shared += !p.finite();
  EXPECT_GT(shared, 0);
}

TEST(PairwiseFinite, HirzebruchCover) {
  SurfacePresentation sp{MinimalModel::hirzebruch(3), {center(1, "H00", 1, 2)}};
  TriCover c = construct_cover(sp);
  for (const auto& p : verify_pairwise_finite(complement_traces(c, *c.atlas)))
    EXPECT_TRUE(p.finite()) << p.chart << " " << p.i << p.j << " " << p.gcd.to_string();
}

TEST(VerifyTransitions, PlaneCoverAndCorruption) {
  TriCover c = construct_cover({});
  auto rep = verify_transitions(c, 100, 0);
  EXPECT_TRUE(rep.passed());
  EXPECT_GT(rep.checked, 9 * 90);

  TriCover bad = c;
  std::swap(bad.transitions[0][1].components[0], bad.transitions[0][1].components[1]);
  auto r = verify_transitions(bad, 20, 0);
  EXPECT_FALSE(r.passed());
  ASSERT_FALSE(r.failures.empty());
  EXPECT_TRUE((r.failures[0].i == 0 && r.failures[0].j == 1) || (r.failures[0].i == 1 && r.failures[0].j == 0));
}

TEST(VerifyTransitions, CorruptionAfterBlowupsIsCaught) {
  SurfacePresentation sp{MinimalModel::hirzebruch(2), {center(1, "H00", 1, 1), center(2, "H00", -1, 2)}};
  TriCover c = construct_cover(sp);
  EXPECT_TRUE(verify_transitions(c, 20, 3).passed());
  std::swap(c.transitions[2][0].components[0], c.transitions[2][0].components[1]);
  EXPECT_FALSE(verify_transitions(c, 20, 3).passed());
}

TEST(SampleCoverage, Examples) {
  TriCover c = construct_cover({});
  auto table = complement_traces(c, *c.atlas);
  auto none = sample_coverage(table, *c.atlas, 0, 1);
  EXPECT_EQ(none.count, 0);
  EXPECT_TRUE(none.uncovered.empty());
  auto full = sample_coverage(table, *c.atlas, 1000, 2);
  EXPECT_EQ(full.count, 1000);
  EXPECT_TRUE(full.uncovered.empty());

  auto two = table.without(1);
  auto forced = sample_coverage(two, *c.atlas, 10, 3, {{"Px", {0, 0}}, {"Px", {Rational(1, 1000), 0}}});
  ASSERT_FALSE(forced.uncovered.empty());
  EXPECT_EQ(forced.uncovered[0].first, "Px");
  EXPECT_EQ(forced.uncovered[0].second, (Point2{0, 0}));
}

TEST(Certificate, ChartRecordsReplay) {
  SurfacePresentation sp{MinimalModel::hirzebruch(2), {center(1, "H00", 0, 0), center(2, "E1b", 1, 0)}};
  TriCover c = construct_cover(sp);
  auto cert = certify(c, 200);
  ASSERT_TRUE(cert.passed());
  for (const auto& r : cert.charts) EXPECT_TRUE(replay_chart(r)) << r.chart;
  ChartCertificate forged = cert.charts[0];
  forged.blocks[0].basis = {P("x")};
  EXPECT_FALSE(replay_chart(forged));
  ChartCertificate wrong = cert.charts[0];
  wrong.factors[1].push_back(P("x - 123"));
  EXPECT_FALSE(replay_chart(wrong));
}

TEST(Report, ParsePresentationExamples) {
  auto p = parse_presentation(R"({"base":"P2","centers":[]})");
  EXPECT_TRUE(p.base.is_plane());
  EXPECT_EQ(p.blowups(), 0);
  auto s = parse_presentation(R"({"base":{"hirzebruch":2},"centers":[{"level":1,"chart":"H00","coords":["1","1"]}]})");
  EXPECT_EQ(s.base.n, 2);
  ASSERT_EQ(s.blowups(), 1);
  EXPECT_EQ(s.centers[0].coords, (Point2{1, 1}));
  auto f = parse_presentation(R"({"base":"P2","centers":[{"level":1,"chart":"Pz","coords":["3/7","-2"]}]})");
  EXPECT_EQ(f.centers[0].coords[0], Rational(3, 7));
}

TEST(Report, ParseErrors) {
  auto message = [](const std::string& text) -> std::string {
    try {
      parse_presentation(text);
    } catch (const InputError& e) {
      return e.what();
    }
    return {};
  };
  EXPECT_EQ(message(R"({"base":{"hirzebruch":-1}})"), "n must be ≥ 0");
  EXPECT_NE(message(R"({"base":"P2","centers":[{"level":1,"chart":"Pz","coords":["1","1"]},)"
                    R"({"level":2,"chart":"Pz","coords":["1","1"]}]})")
                .find("duplicate center"),
            std::string::npos);
  EXPECT_NE(message(R"({"base":"P2","centers":[{"level":1,"chart":"Pz","coords":["1.5","1"]}]})").find("coords[0]"),
            std::string::npos);
  EXPECT_NE(message(R"({"base":"P3"})").find("base must be"), std::string::npos);
  try {
    parse_presentation("{\"base\": \"P2\",\n  \"centers\": [,]}");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.line, 2);
    EXPECT_EQ(e.column, 15);
  }
}

TEST(Report, DeterministicAndReplayable) {
  SurfacePresentation sp{MinimalModel::plane(), {center(1, "Pz", 0, 0), center(2, "E1a", 0, 1)}};
  auto run = [&](std::uint64_t seed) {
    TriCover c = construct_cover(sp, {seed});
    auto cert = certify(c, 200, {seed});
    auto tr = verify_transitions(c, 10, seed);
    return report_json(c, cert, tr, seed);
  };
  Json a = run(0), b = run(0), other = run(1);
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_NE(a["audit"].dump(), other["audit"].dump());
  EXPECT_EQ(a["certificate"]["passed"], other["certificate"]["passed"]);
  EXPECT_FALSE(a.contains("timings"));

  auto ok = replay_certificate(Json::parse(a.dump()));
  EXPECT_TRUE(ok.ok());
  Json tampered = a;
  tampered["certificate"]["pairs"][0]["gcd"] = "x";
  EXPECT_FALSE(replay_certificate(tampered).ok());
  EXPECT_NE(report_text(a).find("certificate: PASS"), std::string::npos);
}

}  // namespace
}  // namespace tricover
