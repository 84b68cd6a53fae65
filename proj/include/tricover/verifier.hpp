#pragma once

// Independent certification of a tri-cover over the standard atlas:
// complement traces from polar loci, emptiness of the triple intersection,
// pairwise finiteness, transition round trips and sampled coverage.

#include "tricover/builder.hpp"

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace tricover {

/// Complement traces of a family of charts, per standard chart of one level.
struct TraceTable {
  int level = 0;
  /// Standard chart name -> one trace per constructed chart; the constant 1
  /// when the complement does not meet that standard chart.
  std::map<std::string, std::vector<Poly>> traces;
  /// The same traces split into factors whose product has the same zero
  /// set; no factors means the trace is 1.
  std::map<std::string, std::vector<std::vector<Poly>>> factors;
  /// Standard charts where the builder's bookkeeping disagrees with the
  /// polar-locus trace, as "W/Ui".
  std::vector<std::string> mismatches;

  /// The same table with constructed chart `drop` removed.
  TraceTable without(int drop) const {
    TraceTable t{level, {}, {}, {}};
    for (const auto& [name, ts] : traces) {
      auto& out = t.traces[name];
      auto& fs = t.factors[name];
      for (int i = 0; i < int(ts.size()); ++i)
        if (i != drop) {
          out.push_back(ts[i]);
          fs.push_back(factors.at(name)[i]);
        }
    }
    return t;
  }
};

namespace detail {

inline bool same_curve(const Poly& a, const Poly& b) { return a.monic() == b.monic(); }

/// Do the factors cut out exactly the curve t = 0 (t square-free)?
inline bool factors_match(const Poly& t, const std::vector<Poly>& fs) {
  if (t.is_constant()) return fs.empty();
  Poly product = Poly::constant(1);
  for (const auto& f : fs) {
    if (f.is_constant() || !t.divide_exact(f)) return false;
    product = product * f;
  }
  return product.divide_exact(t).has_value();
}

inline std::vector<Poly> single_factor(const Poly& t) {
  if (t.is_constant()) return {};
  return {t};
}

}  // namespace detail

/// (X - U_i) n W for every standard chart W of the cover's level, as the
/// polar locus of the map W -> U_i composed through the base chart. The
/// builder's own traces are compared against it.
inline TraceTable complement_traces(const TriCover& cover, const StandardAtlas& atlas) {
  const auto& reg = *atlas.registry();
  TraceTable table;
  table.level = cover.level;
  for (const auto* w : atlas.charts_at(cover.level)) {
    const RationalMap2& to_base = reg.get(w->id).to_base;
    auto& row = table.traces[w->id.name];
    auto& frow = table.factors[w->id.name];
    for (int i = 0; i < 3; ++i) {
      const Chart& c = cover.charts[i];
      if (!(c.reference == to_base.target))
        throw GeometryError("chart " + c.id.key() + " is not referenced to the base chart");
      RationalMap2 m = ratmap_compose(c.from_reference, to_base);
      Poly t = detail::canonical_trace(m.polar_locus());
      auto it = c.complement.find(w->id.name);
      auto ft = c.complement_factors.find(w->id.name);
      if (it == c.complement.end() || !detail::same_curve(it->second, t) ||
          ft == c.complement_factors.end() || !detail::factors_match(t, ft->second)) {
        table.mismatches.push_back(w->id.name + "/" + c.id.name);
        frow.push_back(detail::single_factor(t));
      } else {
        frow.push_back(ft->second);
      }
      row.push_back(std::move(t));
    }
  }
  return table;
}

/// One Groebner computation: a choice of one factor per trace.
struct EmptinessBlock {
  std::vector<Poly> generators;
  /// Reduced Groebner basis ({1} when trivial).
  std::vector<Poly> basis;
  /// "trivial", "removed points only", "positive dimensional" or
  /// "finite, not removed".
  std::string status;
  bool passed = false;
  /// A common zero outside the removed points, when it is rational and
  /// easy to read off.
  std::optional<Point2> witness;
};

/// Emptiness record of one standard chart. The common zeros of the traces
/// are the union of the common zeros of the blocks.
struct ChartCertificate {
  std::string chart;
  std::vector<Poly> traces;
  std::vector<std::vector<Poly>> factors;
  /// Points of the chart's plane blown up by the cover's level; the
  /// variety may only meet these.
  std::vector<Point2> removed;
  std::vector<EmptinessBlock> blocks;
  bool passed = false;
  /// For a blowup chart, the coordinate cutting out its exceptional curve.
  /// Off that curve the chart is a copy of part of its parent chart, so
  /// only the curve is checked here.
  std::optional<int> exceptional_var;

  const EmptinessBlock* failing_block() const {
    for (const auto& b : blocks)
      if (!b.passed) return &b;
    return nullptr;
  }
};

namespace detail {

/// Is the variety of the zero-dimensional ideal with basis gb contained in
/// the finite set pts? With f, g the products of (x - p_x), (y - p_y) and h
/// the product of (l - l(p)) for a linear form l injective on the grid of
/// coordinates, V(gb) lies in pts iff f, g, h all vanish on it.
inline bool variety_within(const std::vector<Poly>& gb, const std::vector<Point2>& pts) {
  Poly x = Poly::variable(0), y = Poly::variable(1);
  if (pts.empty()) return false;
  std::vector<Rational> xs, ys;
  for (const auto& p : pts) {
    if (std::find(xs.begin(), xs.end(), p[0]) == xs.end()) xs.push_back(p[0]);
    if (std::find(ys.begin(), ys.end(), p[1]) == ys.end()) ys.push_back(p[1]);
  }
  Rational c = 0;
  for (;; c += 1) {
    std::vector<Rational> vals;
    for (const auto& a : xs)
      for (const auto& b : ys) vals.push_back(a + c * b);
    std::sort(vals.begin(), vals.end());
    if (std::adjacent_find(vals.begin(), vals.end()) == vals.end()) break;
  }
  Poly f = Poly::constant(1), g = Poly::constant(1), h = Poly::constant(1);
  for (const auto& a : xs) f = f * (x - Poly::constant(a));
  for (const auto& b : ys) g = g * (y - Poly::constant(b));
  for (const auto& p : pts) h = h * (x + y * c - Poly::constant(p[0] + c * p[1]));
  return vanishes_on_variety(f, gb) && vanishes_on_variety(g, gb) && vanishes_on_variety(h, gb);
}

inline std::optional<Point2> single_point(const std::vector<Poly>& gb) {
  auto dim = quotient_dimension(gb);
  if (!dim || *dim != 1) return std::nullopt;
  Poly a = normal_form(Poly::variable(0), gb), b = normal_form(Poly::variable(1), gb);
  if (!a.is_constant() || !b.is_constant()) return std::nullopt;
  return Point2{a.constant_term(), b.constant_term()};
}

}  // namespace detail

/// No common zero of `gens` in the plane minus `removed`.
inline EmptinessBlock certify_block(std::vector<Poly> gens, const std::vector<Point2>& removed) {
  EmptinessBlock b;
  b.generators = std::move(gens);
  b.basis = groebner_basis(b.generators);
  if (b.basis.size() == 1 && b.basis.front().is_constant() && !b.basis.front().is_zero()) {
    b.passed = true;
    b.status = "trivial";
    return b;
  }
  if (!quotient_dimension(b.basis)) {
    b.status = "positive dimensional";
    return b;
  }
  if (detail::variety_within(b.basis, removed)) {
    b.passed = true;
    b.status = "removed points only";
    return b;
  }
  b.status = "finite, not removed";
  auto p = detail::single_point(b.basis);
  if (p && std::find(removed.begin(), removed.end(), *p) == removed.end()) b.witness = p;
  return b;
}

/// No common zero of the traces on the curve {x_v = 0} outside `removed`.
/// The basis is {x_v, gcd of the restricted traces}.
inline EmptinessBlock certify_on_curve(const std::vector<Poly>& traces, int v,
                                       const std::vector<Point2>& removed) {
  EmptinessBlock b;
  b.generators = traces;
  Poly xv = Poly::variable(v);
  b.generators.push_back(xv);
  Poly g(2);
  for (const auto& t : traces) {
    Poly r(2);
    for (const auto& [m, c] : t.terms())
      if (m.e[v] == 0) r.add_term(m, c);
    g = poly_gcd(g, r);
    if (g.is_constant() && !g.is_zero()) break;
  }
  if (g.is_constant() && !g.is_zero()) {
    b.basis = {Poly::constant(1)};
    b.passed = true;
    b.status = "trivial";
    return b;
  }
  if (g.is_zero()) {
    b.basis = {xv};
    b.status = "positive dimensional";
    return b;
  }
  b.basis = {xv, g.monic()};
  GrlexLess less;
  std::sort(b.basis.begin(), b.basis.end(),
            [&](const Poly& x, const Poly& y) { return less(x.leading_monomial(), y.leading_monomial()); });
  if (detail::variety_within(b.basis, removed)) {
    b.passed = true;
    b.status = "removed points only";
    return b;
  }
  b.status = "finite, not removed";
  auto p = detail::single_point(b.basis);
  if (p && std::find(removed.begin(), removed.end(), *p) == removed.end()) b.witness = p;
  return b;
}

/// Decide one chart: the traces have no common zero in the chart minus its
/// removed points. A trace with no factors is the constant 1.
inline ChartCertificate certify_chart(const std::string& chart, std::vector<Poly> traces,
                                      std::vector<std::vector<Poly>> factors, std::vector<Point2> removed,
                                      std::optional<int> exceptional_var = std::nullopt) {
  ChartCertificate rec;
  rec.chart = chart;
  rec.traces = std::move(traces);
  rec.factors = std::move(factors);
  rec.removed = std::move(removed);
  rec.exceptional_var = exceptional_var;
  if (exceptional_var) {
    rec.blocks.push_back(certify_on_curve(rec.traces, *exceptional_var, rec.removed));
    rec.passed = rec.blocks.back().passed;
    return rec;
  }
  const std::size_t n = rec.factors.size();
  bool empty_product = n == 0;
  for (const auto& f : rec.factors) empty_product = empty_product || f.empty();
  if (empty_product) {
    rec.blocks.push_back({{Poly::constant(1)}, {Poly::constant(1)}, "trivial", true, std::nullopt});
    rec.passed = true;
    return rec;
  }
  std::vector<std::size_t> pick(n, 0);
  rec.passed = true;
  while (true) {
    std::vector<Poly> gens;
    for (std::size_t i = 0; i < n; ++i) gens.push_back(rec.factors[i][pick[i]]);
    rec.blocks.push_back(certify_block(std::move(gens), rec.removed));
    rec.passed = rec.passed && rec.blocks.back().passed;
    std::size_t i = 0;
    while (i < n && ++pick[i] == rec.factors[i].size()) pick[i++] = 0;
    if (i == n) break;
  }
  return rec;
}

/// Unsplit traces, one block.
inline ChartCertificate certify_chart(const std::string& chart, std::vector<Poly> traces,
                                      std::vector<Point2> removed) {
  std::vector<std::vector<Poly>> fs;
  for (const auto& t : traces) fs.push_back(detail::single_factor(t));
  return certify_chart(chart, std::move(traces), std::move(fs), std::move(removed));
}

struct PairRecord {
  std::string chart;
  int i = 0, j = 0;
  Poly gcd;
  bool finite() const { return gcd.is_constant(); }
};

struct SamplingRecord {
  std::uint64_t seed = 0;
  int count = 0;
  std::vector<std::pair<std::string, Point2>> uncovered;
};

struct CoverageCertificate {
  int level = 0;
  std::vector<ChartCertificate> charts;
  std::vector<PairRecord> pairs;
  std::vector<std::string> trace_mismatches;
  std::vector<SamplingRecord> sampling;

  bool emptiness_passed() const {
    return std::all_of(charts.begin(), charts.end(), [](const auto& c) { return c.passed; });
  }
  bool pairwise_finite() const {
    return std::all_of(pairs.begin(), pairs.end(), [](const auto& p) { return p.finite(); });
  }
  bool sampling_passed() const {
    return std::all_of(sampling.begin(), sampling.end(), [](const auto& s) { return s.uncovered.empty(); });
  }
  bool passed() const {
    return emptiness_passed() && pairwise_finite() && trace_mismatches.empty() && sampling_passed();
  }
  /// First failing chart, if any.
  const ChartCertificate* counterexample() const {
    for (const auto& c : charts)
      if (!c.passed) return &c;
    return nullptr;
  }
};

/// Emptiness of the common complement in every standard chart.
inline std::vector<ChartCertificate> verify_emptiness(const TraceTable& table, const StandardAtlas& atlas) {
  std::vector<ChartCertificate> out;
  for (const auto& [name, ts] : table.traces)
  {
    const StandardChart& w = atlas.chart(name);
    out.push_back(certify_chart(name, ts, table.factors.at(name), w.removed_points(table.level),
                                w.is_base() ? std::nullopt : std::optional<int>(w.exceptional_var)));
  }
  return out;
}

/// No two complements share a curve component in any standard chart.
inline std::vector<PairRecord> verify_pairwise_finite(const TraceTable& table) {
  std::vector<PairRecord> out;
  for (const auto& [name, ts] : table.traces)
    for (int i = 0; i < int(ts.size()); ++i)
      for (int j = i + 1; j < int(ts.size()); ++j) out.push_back({name, i, j, poly_gcd(ts[i], ts[j])});
  return out;
}

struct TransitionFailure {
  int i = 0, j = 0;
  Point2 point;
  std::string reason;
};

struct TransitionReport {
  int checked = 0;
  std::vector<TransitionFailure> failures;
  bool passed() const { return failures.empty(); }
};

namespace detail {

inline Point2 random_point2(std::mt19937_64& rng, int height = 9) {
  std::uniform_int_distribution<int> num(-height, height);
  return {Rational(num(rng)), Rational(num(rng))};
}

}  // namespace detail

namespace detail {

using ModPoint = std::array<std::uint64_t, 2>;

inline std::optional<ModPoint> eval_modp(const RationalMap2& f, const ModPoint& p) {
  ModPoint out;
  for (int i = 0; i < 2; ++i) {
    auto n = f.components[i].num().eval_modp(p);
    auto d = f.components[i].den().eval_modp(p);
    if (!n || !d || *d == 0) return std::nullopt;
    out[i] = modp::mul(*n, modp::pow(*d, modp::kPrime - 2));
  }
  return out;
}

}  // namespace detail

/// Round trips U_i -> U_j -> U_i at `samples` random points over F_p
/// (p = 2^61 - 1) per ordered pair, plus two exact rational round trips
/// that are also compared with the maps through the base chart.
inline TransitionReport verify_transitions(const TriCover& cover, int samples, std::uint64_t seed) {
  TransitionReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> residue(0, modp::kPrime - 1);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const auto& f = cover.transitions[i][j];
      const auto& g = cover.transitions[j][i];
      for (int s = 0; s < samples; ++s) {
        detail::ModPoint p{residue(rng), residue(rng)};
        auto q = detail::eval_modp(f, p);
        if (!q) continue;
        auto back = detail::eval_modp(g, *q);
        if (!back || *back != p) {
          rep.failures.push_back({i, j, {Rational(mpz_class(std::to_string(p[0]))), Rational(mpz_class(std::to_string(p[1])))},
                                  back ? "round trip mod 2^61-1 is not the identity" : "inverse undefined mod 2^61-1"});
          continue;
        }
        ++rep.checked;
      }
      for (int s = 0; s < std::min(samples, 2); ++s) {
        Point2 p = detail::random_point2(rng);
        auto q = f.eval(p);
        if (!q) continue;
        auto back = g.eval(*q);
        if (!back) {
          rep.failures.push_back({i, j, p, "inverse undefined at the image"});
          continue;
        }
        if (*back != p) {
          rep.failures.push_back({i, j, p, "round trip returned " + to_string(*back)});
          continue;
        }
        auto b = cover.charts[i].to_reference.eval(p);
        if (b) {
          auto q2 = cover.charts[j].from_reference.eval(*b);
          if (q2 && *q2 != *q) {
            rep.failures.push_back({i, j, p, "disagrees with the maps through the base chart"});
            continue;
          }
        }
        ++rep.checked;
      }
    }
  return rep;
}

/// Seeded random points of X_level, each tested for membership in some
/// chart (a trace not vanishing there); `forced` points are tested first.
inline SamplingRecord sample_coverage(const TraceTable& table, const StandardAtlas& atlas, int n,
                                      std::uint64_t seed,
                                      const std::vector<std::pair<std::string, Point2>>& forced = {}) {
  SamplingRecord rec;
  rec.seed = seed;
  auto test = [&](const std::string& chart, const Point2& p) {
    ++rec.count;
    for (const auto& t : table.traces.at(chart))
      if (t.eval(p) != 0) return;
    rec.uncovered.emplace_back(chart, p);
  };
  for (const auto& [chart, p] : forced) test(chart, p);
  std::mt19937_64 rng(seed);
  for (int s = 0; s < n; ++s) {
    auto [w, p] = atlas.random_point(rng, table.level);
    test(w->id.name, p);
  }
  return rec;
}

/// Traces, emptiness, pairwise finiteness and sampling in one certificate.
inline CoverageCertificate certify(const TriCover& cover, int samples = 1000,
                                   std::vector<std::uint64_t> seeds = {0}) {
  const StandardAtlas& atlas = *cover.atlas;
  TraceTable table = complement_traces(cover, atlas);
  CoverageCertificate cert;
  cert.level = cover.level;
  cert.charts = verify_emptiness(table, atlas);
  cert.pairs = verify_pairwise_finite(table);
  cert.trace_mismatches = table.mismatches;
  for (auto s : seeds) cert.sampling.push_back(sample_coverage(table, atlas, samples, s));
  return cert;
}

/// Re-derive a chart record from its traces and factors alone and compare.
inline bool replay_chart(const ChartCertificate& rec) {
  for (std::size_t i = 0; i < rec.traces.size(); ++i)
    if (i >= rec.factors.size() || !detail::factors_match(rec.traces[i], rec.factors[i])) return false;
  ChartCertificate again = certify_chart(rec.chart, rec.traces, rec.factors, rec.removed, rec.exceptional_var);
  if (again.passed != rec.passed || again.blocks.size() != rec.blocks.size()) return false;
  for (std::size_t i = 0; i < rec.blocks.size(); ++i)
    if (again.blocks[i].basis != rec.blocks[i].basis || again.blocks[i].status != rec.blocks[i].status)
      return false;
  return true;
}

}  // namespace tricover
