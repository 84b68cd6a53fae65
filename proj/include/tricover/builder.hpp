#pragma once

// Construction of three affine-plane charts covering a blown-up P^2 or
// Hirzebruch surface: base covers of the minimal model, blowup charts
// attached to lines through the center, and the inductive step.

#include "tricover/choice.hpp"
#include "tricover/surface.hpp"

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tricover {

/// A constructed chart: an affine plane with maps to and from the base chart
/// of the minimal model, and its complement traced in every standard chart.
struct Chart {
  ChartId id;
  std::vector<std::string> coords{"u", "v"};
  ChartId reference;
  RationalMap2 to_reference;
  RationalMap2 from_reference;
  /// Standard chart name -> equation of (X - U) there (1 when invisible).
  std::map<std::string, Poly> complement;
  /// The same curves as a list of square-free factors, one per line or
  /// base component they come from.
  std::map<std::string, std::vector<Poly>> complement_factors;

  // Set for charts obtained by blowing up an ambient chart along a line.
  std::optional<RationalMap2> blowdown;
  std::optional<RationalMap2> lift;
  std::optional<AffLine> line;
  int exceptional_var = 0;
};

struct TriCover {
  int level = 0;
  std::array<Chart, 3> charts;
  std::vector<AuditEntry> audit;
  /// transitions[i][j]: U_i -> U_j.
  std::array<std::array<RationalMap2, 3>, 3> transitions;
  /// Standard chart name -> maps W -> U_j.
  std::map<std::string, std::array<RationalMap2, 3>> from_standard;
  std::shared_ptr<ChartRegistry> registry;
  std::shared_ptr<const StandardAtlas> atlas;

  bool replay_audit() const {
    for (const auto& e : audit)
      if (!e.replay()) return false;
    return true;
  }
};

namespace detail {

inline Poly canonical_trace(const Poly& p) {
  if (p.is_zero()) throw GeometryError("complement trace vanished identically");
  if (p.is_constant()) return Poly::constant(1);
  return squarefree_part(p);
}

/// Records the complement of c in standard chart w from its factors.
inline void set_complement(Chart& c, const std::string& w, const std::vector<Poly>& factors) {
  std::vector<Poly> fs;
  Poly product = Poly::constant(1);
  for (const auto& f : factors) {
    Poly t = canonical_trace(f);
    if (t.is_constant() || std::find(fs.begin(), fs.end(), t) != fs.end()) continue;
    product = product * t;
    fs.push_back(std::move(t));
  }
  c.complement[w] = canonical_trace(product);
  c.complement_factors[w] = std::move(fs);
}

/// A nonzero multiple of f(p + c * tau * d) for some integer c > 0, as a
/// polynomial in tau (variable 0): the same roots along the line, up to
/// scaling. Integer Horner over both variables.
inline Poly restrict_to_line(const Poly& f, const Point2& p, const Direction& d) {
  using Dense = std::vector<mpz_class>;
  mpz_class c;
  mpz_lcm(c.get_mpz_t(), d.dx.get_den_mpz_t(), d.dy.get_den_mpz_t());
  const mpz_class n0 = p[0].get_num(), d0 = p[0].get_den(), n1 = p[1].get_num(), d1 = p[1].get_den();
  const mpz_class A = d.dx.get_num() * (c / d.dx.get_den()) * d0;
  const mpz_class B = d.dy.get_num() * (c / d.dy.get_den()) * d1;
  const int Dx = std::max(f.degree_in(0), 0), Dy = std::max(f.degree_in(1), 0);

  mpz_class lcm = 1;
  for (const auto& [m, q] : f.terms()) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), q.get_den_mpz_t());
  std::vector<std::map<int, mpz_class>> rows(Dx + 1);
  for (const auto& [m, q] : f.terms()) rows[m.e[0]][m.e[1]] = q.get_num() * (lcm / q.get_den());
  std::vector<mpz_class> p0(Dx + 1, 1), p1(Dy + 1, 1);
  for (int k = 1; k <= Dx; ++k) p0[k] = p0[k - 1] * d0;
  for (int k = 1; k <= Dy; ++k) p1[k] = p1[k - 1] * d1;

  // h *= (n + s * tau)
  auto mul_linear = [](Dense& h, const mpz_class& n, const mpz_class& s) {
    if (h.empty()) return;
    h.emplace_back(0);
    for (std::size_t k = h.size() - 1; k > 0; --k) h[k] = h[k] * n + h[k - 1] * s;
    h[0] *= n;
  };
  Dense g;
  for (int a = Dx; a >= 0; --a) {
    mul_linear(g, n0, A);
    const auto& row = rows[a];
    if (row.empty()) continue;
    Dense h;
    auto it = row.rbegin();
    for (int b = it->first; b >= 0; --b) {
      mul_linear(h, n1, B);
      if (it != row.rend() && it->first == b) {
        if (h.empty()) h.emplace_back(0);
        h[0] += it->second * p1[Dy - b];
        ++it;
      }
    }
    if (g.size() < h.size()) g.resize(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) g[k] += h[k] * p0[Dx - a];
  }
  Poly r(2);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g[k] != 0) r.add_term(Monomial{{std::uint16_t(k), 0, 0}}, Rational(g[k]));
  return r;
}

/// Does the line through p with direction d meet V(f, g) somewhere other
/// than p (or anywhere at all, when include_p)?
inline bool line_meets(const Poly& f, const Poly& g, const Point2& p, const Direction& d,
                       bool include_p) {
  Poly rf = restrict_to_line(f, p, d), rg = restrict_to_line(g, p, d);
  if (rf.is_zero() && rg.is_zero()) return true;
  Poly h = poly_gcd(rf, rg);
  if (!include_p) {
    Poly tau = Poly::variable(0);
    while (!h.is_constant()) {
      auto q = h.divide_exact(tau);
      if (!q) break;
      h = *q;
    }
  }
  return !h.is_constant();
}

inline std::array<std::array<Rational, 2>, 2> inverse2(const std::array<Rational, 2>& c0,
                                                       const std::array<Rational, 2>& c1) {
  // Columns c0, c1.
  Rational det = c0[0] * c1[1] - c1[0] * c0[1];
  if (det == 0) throw GeometryError("singular frame");
  return {{{c1[1] / det, -c1[0] / det}, {-c0[1] / det, c0[0] / det}}};
}

inline RationalMap2 compose_through_base(const ChartRegistry& reg, const ChartId& from,
                                         const ChartId& to) {
  return ratmap_compose(reg.get(to).from_base, reg.get(from).to_base);
}

}  // namespace detail

/// The chart U_l of Bl_P(ambient) attached to a line l through P: with
/// e = (1,0) unless it is parallel to l (then (0,1)) and d the direction of
/// l, the blowdown is (u, v) -> P + u*e + u*v*d. The exceptional curve is
/// u = 0 and the only point of it missing from U_l is the direction of l.
inline Chart blowup_chart(const Point2& p, const AffLine& l, const Chart& ambient, const ChartId& id) {
  l.validate();
  if (!l.contains(p)) throw GeometryError("line does not pass through the center " + to_string(p));
  auto d = l.direction();
  std::array<Rational, 2> e = d[1] != 0 ? std::array<Rational, 2>{1, 0} : std::array<Rational, 2>{0, 1};

  const Poly u = Poly::variable(0), v = Poly::variable(1);
  RationalMap2 down{id, ambient.id, {}};
  for (int i = 0; i < 2; ++i)
    down.components[i] = RatFun(Poly::constant(p[i]) + u * e[i] + u * v * d[i]);

  auto minv = detail::inverse2(e, d);
  Poly x = Poly::variable(0), y = Poly::variable(1);
  Poly phi1 = (x - Poly::constant(p[0])) * minv[0][0] + (y - Poly::constant(p[1])) * minv[0][1];
  Poly phi2 = (x - Poly::constant(p[0])) * minv[1][0] + (y - Poly::constant(p[1])) * minv[1][1];
  RationalMap2 up{ambient.id, id, {RatFun(phi1), RatFun(phi2, phi1)}};

  Chart c;
  c.id = id;
  c.coords = {"u", "v"};
  c.reference = ambient.reference;
  c.to_reference = ratmap_compose(ambient.to_reference, down);
  c.from_reference = ratmap_compose(up, ambient.from_reference);
  c.blowdown = down;
  c.lift = up;
  c.line = l;
  c.exceptional_var = 0;
  return c;
}

namespace detail {

inline void register_chart(ChartRegistry& reg, const Chart& c) {
  reg.add(ChartMaps{c.id, c.to_reference, c.from_reference, c.coords});
}

/// Fills transitions and standard-chart maps of a level-0 cover through the
/// base chart and registers everything.
inline void finish_base_cover(TriCover& cover, const StandardAtlas& atlas) {
  auto& reg = *cover.registry;
  for (const auto& c : cover.charts) register_chart(reg, c);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      cover.transitions[i][j] =
          i == j ? RationalMap2::identity(cover.charts[i].id)
                 : compose_through_base(reg, cover.charts[i].id, cover.charts[j].id);
      if (i != j) reg.add_transition(cover.transitions[i][j]);
    }
  for (const auto* w : atlas.charts_at(0)) {
    std::array<RationalMap2, 3> maps;
    for (int j = 0; j < 3; ++j) {
      maps[j] = compose_through_base(reg, w->id, cover.charts[j].id);
      reg.add_transition(maps[j]);
    }
    cover.from_standard[w->id.name] = std::move(maps);
  }
}

/// Homogeneous coordinates of a point of a standard P^2 chart.
inline std::array<Rational, 3> homogeneous(const std::string& chart, const Point2& p) {
  if (chart == "Pz") return {p[0], p[1], 1};
  if (chart == "Px") return {1, p[0], p[1]};
  if (chart == "Py") return {p[0], 1, p[1]};
  throw GeometryError("not a base chart of P^2: " + chart);
}

/// Equation of the line f = 0 in a standard P^2 chart.
inline Poly line_trace(const LinearForm& f, const std::string& chart) {
  Poly s = Poly::variable(0), t = Poly::variable(1), one = Poly::constant(1);
  std::array<Poly, 3> h;
  if (chart == "Pz") h = {s, t, one};
  else if (chart == "Px") h = {one, s, t};
  else if (chart == "Py") h = {s, one, t};
  else throw GeometryError("not a base chart of P^2: " + chart);
  return h[0] * f[0] + h[1] * f[1] + h[2] * f[2];
}

inline Rational det3(const LinearForm& a, const LinearForm& b, const LinearForm& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

}  // namespace detail

/// Three lines of P^2 avoiding `avoid` with no common point; the charts are
/// their complements.
inline TriCover base_cover_p2(const StandardAtlas& atlas, const ZeroDimSet& avoid,
                              const ChoiceConfig& cfg) {
  if (!atlas.model().is_plane()) throw GeometryError("base_cover_p2 needs a P^2 presentation");
  TriCover cover;
  cover.level = 0;
  cover.registry = atlas.registry();
  const ChartId base = cover.registry->base();

  std::vector<std::pair<std::string, std::array<Rational, 3>>> pts;
  for (const auto& c : avoid.components) {
    if (!c.point) throw GeometryError("P^2 avoid sets must consist of explicit points");
    pts.emplace_back(c.chart.name, detail::homogeneous(c.chart.name, *c.point));
  }
  auto misses_avoid = Predicate<LinearForm>{"misses pi(E)", [pts](const LinearForm& f) {
    for (const auto& [name, h] : pts)
      if (f[0] * h[0] + f[1] * h[1] + f[2] * h[2] == 0) return false;
    return true;
  }};

  std::array<LinearForm, 3> lines;
  for (int j = 0; j < 3; ++j) {
    std::vector<Predicate<LinearForm>> preds{misses_avoid};
    if (j >= 1) {
      LinearForm l0 = lines[0];
      preds.push_back({"differs from L0", [l0](const LinearForm& f) {
        return f[0] * l0[1] != f[1] * l0[0] || f[0] * l0[2] != f[2] * l0[0] ||
               f[1] * l0[2] != f[2] * l0[1];
      }});
    }
    if (j == 2) {
      LinearForm l0 = lines[0], l1 = lines[1];
      preds.push_back({"L0, L1, L2 have no common point",
                       [l0, l1](const LinearForm& f) { return detail::det3(l0, l1, f) != 0; }});
    }
    CandidateStream stream(cfg, "P2 line " + std::to_string(j));
    lines[j] = choose_generic<LinearForm>("L" + std::to_string(j), [&] { return stream.next_form(); },
                                          preds, cfg, cover.audit, 0);
  }

  for (int j = 0; j < 3; ++j) {
    const LinearForm& L = lines[j];
    // Complete L to a basis with two coordinate forms.
    static const int pairs[3][2] = {{0, 1}, {1, 2}, {0, 2}};
    LinearForm m1, m2;
    for (const auto& pr : pairs) {
      LinearForm a{0, 0, 0}, b{0, 0, 0};
      a[pr[0]] = 1;
      b[pr[1]] = 1;
      if (detail::det3(a, b, L) != 0) {
        m1 = a;
        m2 = b;
        break;
      }
    }
    Chart c;
    c.id = {0, "U" + std::to_string(j)};
    c.coords = {"u", "v"};
    c.reference = base;
    // from base (X, Y) ~ [X : Y : 1]: (m1/L, m2/L).
    auto form_on_base = [](const LinearForm& f) { return Poly::linear(f[0], f[1], f[2]); };
    Poly lb = form_on_base(L);
    c.from_reference = {base, c.id, {RatFun(form_on_base(m1), lb), RatFun(form_on_base(m2), lb)}};
    // to base: [x : y : z] = A^{-1} (u, v, 1) with rows m1, m2, L.
    std::array<LinearForm, 3> A{m1, m2, L};
    Rational det = detail::det3(A[0], A[1], A[2]);
    std::array<Poly, 3> hom;
    Poly u = Poly::variable(0), v = Poly::variable(1), one = Poly::constant(1);
    for (int r = 0; r < 3; ++r) {
      // Row r of the adjugate divided by det.
      auto cof = [&](int i, int k) -> Rational {
        int r0 = (i + 1) % 3, r1 = (i + 2) % 3, c0 = (k + 1) % 3, c1 = (k + 2) % 3;
        return A[r0][c0] * A[r1][c1] - A[r0][c1] * A[r1][c0];
      };
      hom[r] = u * (cof(0, r) / det) + v * (cof(1, r) / det) + one * (cof(2, r) / det);
    }
    c.to_reference = {c.id, base, {RatFun(hom[0], hom[2]), RatFun(hom[1], hom[2])}};
    for (const auto* w : atlas.charts_at(0))
      detail::set_complement(c, w->id.name, {detail::line_trace(L, w->id.name)});
    cover.charts[j] = std::move(c);
  }
  detail::finish_base_cover(cover, atlas);
  return cover;
}

namespace detail {

/// Value in P^1 of a rational function at a point (infinity at poles).
inline ProjPoint1 value_or_infinity(const RatFun& f, const Point2& p) {
  auto v = f.eval(p);
  return v ? ProjPoint1::finite(*v) : ProjPoint1::infinity();
}

/// Sigma_n data for one trivialization q_j: base point a (sent to infinity),
/// fiber coordinate omega = w (z - a)^n, removed section omega = Q.
struct HirzebruchChoice {
  Rational a, q;
};

inline RatFun base_z() { return RatFun::variable(0); }

inline RatFun omega_on_base(const Rational& a, int n) {
  Poly z = Poly::variable(0), w = Poly::variable(1);
  return RatFun(w * (z - Poly::constant(a)).pow(n));
}

}  // namespace detail

/// Three charts q_j^{-1}(A^1 x P^1 - L_j) of Sigma_n, each containing avoid.
inline TriCover base_cover_hirzebruch(const StandardAtlas& atlas, const ZeroDimSet& avoid,
                                      const ChoiceConfig& cfg) {
  if (atlas.model().is_plane()) throw GeometryError("base_cover_hirzebruch needs a Sigma_n presentation");
  const int n = atlas.model().n;
  TriCover cover;
  cover.level = 0;
  cover.registry = atlas.registry();
  auto reg = cover.registry;
  const ChartId base = reg->base();
  const Poly z = Poly::variable(0), w = Poly::variable(1), one = Poly::constant(1);

  // Rational function on a chart: pull back from the base chart.
  auto on_chart = [reg](const RatFun& f, const ChartId& chart) {
    const auto& tb = reg->get(chart).to_base;
    return ratfun_compose(f, std::span<const RatFun>(tb.components));
  };

  std::vector<std::pair<ChartId, Point2>> pts;
  for (const auto& c : avoid.components) {
    if (!c.point) throw GeometryError("minimal-model avoid sets must consist of explicit points");
    pts.emplace_back(c.chart, *c.point);
  }
  std::vector<ProjPoint1> base_values;
  for (const auto& [chart, p] : pts)
    base_values.push_back(detail::value_or_infinity(on_chart(detail::base_z(), chart), p));

  auto fresh_base_point = [&](std::vector<Rational> taken, std::string label) {
    return Predicate<Rational>{label, [base_values, taken](const Rational& a) {
      for (const auto& b : base_values)
        if (b == ProjPoint1::finite(a)) return false;
      for (const auto& t : taken)
        if (t == a) return false;
      return true;
    }};
  };
  // Q off the fiber coordinates omega_a(pi(E)).
  auto fiber_values = [&](const Rational& a) {
    std::vector<ProjPoint1> vals;
    RatFun om = detail::omega_on_base(a, n);
    for (const auto& [chart, p] : pts) vals.push_back(detail::value_or_infinity(on_chart(om, chart), p));
    return vals;
  };
  auto off_values = [](std::vector<ProjPoint1> vals, std::string label) {
    return Predicate<Rational>{label, [vals](const Rational& q) {
      for (const auto& v : vals)
        if (v == ProjPoint1::finite(q)) return false;
      return true;
    }};
  };

  std::array<detail::HirzebruchChoice, 3> ch;

  // U_0.
  {
    CandidateStream sp(cfg, "P0");
    ch[0].a = choose_generic<Rational>("P0", [&] { return sp.next_scalar(); },
                                       {fresh_base_point({}, "P0 not in p(pi(E))")}, cfg, cover.audit, 0);
    CandidateStream sq(cfg, "Q0");
    ch[0].q = choose_generic<Rational>("Q0", [&] { return sq.next_scalar(); },
                                       {off_values(fiber_values(ch[0].a), "L0 misses q0(pi(E))")}, cfg,
                                       cover.audit, 0);
  }
  // U_1: C2 = section omega_0 = Q0 seen in q1 coordinates as omega_1 = h(zeta).
  RatFun h;
  {
    CandidateStream sp(cfg, "P1");
    ch[1].a = choose_generic<Rational>("P1", [&] { return sp.next_scalar(); },
                                       {fresh_base_point({ch[0].a}, "P1 not in p(pi(E)) u {P0}")}, cfg,
                                       cover.audit, 0);
    // On C2: w = Q0 / (z - a0)^n, so omega_1 = Q0 (z - a1)^n / (z - a0)^n
    // with z = a1 + 1/zeta.
    Poly zeta = Poly::variable(0);
    RatFun zr = RatFun(Poly::constant(ch[1].a)) + RatFun(one, zeta);
    RatFun num = RatFun(Poly::constant(ch[0].q)) *
                 ratfun_compose(RatFun((z - Poly::constant(ch[1].a)).pow(n)),
                                std::vector<RatFun>{zr, RatFun::variable(1)});
    RatFun den = ratfun_compose(RatFun((z - Poly::constant(ch[0].a)).pow(n)),
                                std::vector<RatFun>{zr, RatFun::variable(1)});
    h = num / den;
    CandidateStream sq(cfg, "Q1");
    RatFun hc = h;
    ch[1].q = choose_generic<Rational>(
        "Q1", [&] { return sq.next_scalar(); },
        {off_values(fiber_values(ch[1].a), "L1 misses q1(pi(E))"),
         {"L1 differs from q1(C2)",
          [hc](const Rational& q) { return !(hc - RatFun::constant(q)).is_zero(); }}},
        cfg, cover.audit, 0);
  }

  // Auxiliary trivialization chart T1 with coordinates (zeta, omega).
  ChartId t1{0, "T1"};
  {
    Poly zeta = Poly::variable(0), om = Poly::variable(1);
    RationalMap2 to{t1, base, {RatFun(Poly::constant(ch[1].a)) + RatFun(one, zeta), RatFun(om * zeta.pow(n))}};
    RationalMap2 from{base, t1,
                      {RatFun(one, z - Poly::constant(ch[1].a)), detail::omega_on_base(ch[1].a, n)}};
    reg->add(ChartMaps{t1, to, from, {"zeta", "omega"}});
  }

  // A = M - (U0 u U1) = {R1} u (C1 n closure of L1) u q1^{-1}(L1 n q1(C2)).
  ZeroDimSet a_set;
  {
    Rational r1w = ch[0].q / pow_rational(ch[1].a - ch[0].a, n);
    a_set.add(PointComponent::at(base, {ch[1].a, r1w}, "R1"));
    Rational c1w = ch[1].q / pow_rational(ch[0].a - ch[1].a, n);
    a_set.add(PointComponent::at(base, {ch[0].a, c1w}, "C1 n L1"));
    Poly meet = (h - RatFun::constant(ch[1].q)).num();
    if (!meet.is_constant()) {
      Poly om = Poly::variable(1);
      a_set.add({t1, {om - Poly::constant(ch[1].q), meet}, std::nullopt, "L1 n q1(C2)"});
    }
  }

  // U_2.
  {
    CandidateStream sp(cfg, "P2");
    auto basic = fresh_base_point({ch[0].a, ch[1].a}, "P2 not in p(pi(E)) u {P0, P1}");
    ZeroDimSet a_copy = a_set;
    auto regc = reg;
    Predicate<Rational> off_pa{"P2 not in p(A)", [a_copy, regc](const Rational& a2) {
      for (const auto& comp : a_copy.components) {
        RatFun zc = ratfun_compose(detail::base_z(),
                                   std::span<const RatFun>(regc->get(comp.chart).to_base.components));
        if (comp.point) {
          if (detail::value_or_infinity(zc, *comp.point) == ProjPoint1::finite(a2)) return false;
          continue;
        }
        std::vector<Poly> gens = comp.generators;
        gens.push_back((zc - RatFun::constant(a2)).num());
        if (!ideal_is_trivial(gens)) return false;
      }
      return true;
    }};
    ch[2].a = choose_generic<Rational>("P2", [&] { return sp.next_scalar(); }, {basic, off_pa}, cfg,
                                       cover.audit, 0);
    CandidateStream sq(cfg, "Q2");
    Rational a2 = ch[2].a;
    Predicate<Rational> off_a{"L2 misses q2(A)", [a_copy, regc, a2, n](const Rational& q) {
      RatFun om = detail::omega_on_base(a2, n);
      for (const auto& comp : a_copy.components) {
        RatFun oc = ratfun_compose(om, std::span<const RatFun>(regc->get(comp.chart).to_base.components));
        if (comp.point) {
          if (detail::value_or_infinity(oc, *comp.point) == ProjPoint1::finite(q)) return false;
          continue;
        }
        std::vector<Poly> gens = comp.generators;
        gens.push_back((oc - RatFun::constant(q)).num());
        if (!ideal_is_trivial(gens)) return false;
      }
      return true;
    }};
    ch[2].q = choose_generic<Rational>("Q2", [&] { return sq.next_scalar(); },
                                       {off_values(fiber_values(ch[2].a), "L2 misses q2(pi(E))"), off_a},
                                       cfg, cover.audit, 0);
  }

  for (int j = 0; j < 3; ++j) {
    const Rational& a = ch[j].a;
    const Rational& q = ch[j].q;
    Chart c;
    c.id = {0, "U" + std::to_string(j)};
    c.reference = base;
    RatFun om = detail::omega_on_base(a, n);
    c.from_reference = {base, c.id, {RatFun(one, z - Poly::constant(a)), RatFun(one) / (om - RatFun::constant(q))}};
    // z = a + 1/alpha, w = (q + 1/beta) alpha^n.
    Poly al = Poly::variable(0), be = Poly::variable(1);
    c.to_reference = {c.id, base,
                      {RatFun(al * a + one, al), RatFun((be * q + one) * al.pow(n), be)}};
    for (const auto* wc : atlas.charts_at(0)) {
      Poly fiber = ratfun_compose(detail::base_z() - RatFun::constant(a),
                                  std::span<const RatFun>(reg->get(wc->id).to_base.components))
                       .num();
      Poly section = ratfun_compose(om - RatFun::constant(q),
                                    std::span<const RatFun>(reg->get(wc->id).to_base.components))
                         .num();
      detail::set_complement(c, wc->id.name, {fiber, section});
    }
    cover.charts[j] = std::move(c);
  }
  detail::finish_base_cover(cover, atlas);
  return cover;
}

namespace detail {

inline bool parallel(const Point2& a, const Point2& p, const Direction& d) {
  return (a[0] - p[0]) * d.dy == (a[1] - p[1]) * d.dx;
}

inline Predicate<Direction> misses_points(std::vector<Point2> pts, Point2 p, std::string label) {
  return {std::move(label), [pts = std::move(pts), p = std::move(p)](const Direction& d) {
            for (const auto& a : pts)
              if (parallel(a, p, d)) return false;
            return true;
          }};
}

inline Predicate<Direction> avoids_directions(std::vector<Direction> dirs, std::string label) {
  return {std::move(label), [dirs = std::move(dirs)](const Direction& d) {
            return std::find(dirs.begin(), dirs.end(), d) == dirs.end();
          }};
}

inline Predicate<Direction> avoids_set(Poly f, Poly g, Point2 p, bool include_p, std::string label) {
  return {std::move(label), [f = std::move(f), g = std::move(g), p = std::move(p),
                             include_p](const Direction& d) { return !line_meets(f, g, p, d, include_p); }};
}

}  // namespace detail

/// Step k of the tower: choose lines l_j through P in every U_j and replace
/// U_j by the blowup chart U_{l_j}.
inline TriCover inductive_step(const StandardAtlas& atlas, const TriCover& cover, int k,
                               const FutureCenters& future, const ChoiceConfig& cfg) {
  if (cover.level != k - 1) throw GeometryError("cover level does not match the step");
  const auto& bc = atlas.presentation().centers.at(k - 1);
  const StandardChart& wc = atlas.chart(bc.chart);
  const auto& to_cover = [&](const std::string& name) -> const std::array<RationalMap2, 3>& {
    auto it = cover.from_standard.find(name);
    if (it == cover.from_standard.end()) throw GeometryError("no transition from chart " + name);
    return it->second;
  };

  std::array<Point2, 3> p;
  for (int j = 0; j < 3; ++j) {
    auto img = to_cover(wc.id.name)[j].eval(bc.coords);
    if (!img)
      throw GeometryError("center " + std::to_string(k) + " lies outside chart U" + std::to_string(j));
    p[j] = *img;
  }

  std::array<std::vector<Point2>, 3> a1;
  for (const auto& comp : future.outside.components) {
    if (!comp.point) throw GeometryError("future centers must be explicit points");
    for (int j = 0; j < 3; ++j) {
      auto img = to_cover(comp.chart.name)[j].eval(*comp.point);
      if (!img)
        throw GeometryError(comp.label + " lies outside chart U" + std::to_string(j));
      if (*img == p[j]) throw GeometryError("center " + std::to_string(k) + " lies in A1");
      a1[j].push_back(*img);
    }
  }
  std::array<std::vector<Direction>, 3> a2;
  for (const auto& d : future.on_exceptional)
    for (int j = 0; j < 3; ++j) a2[j].push_back(push_direction(to_cover(wc.id.name)[j], bc.coords, d));

  // trace[j][a]: X - U_a seen in U_j.
  std::array<std::array<Poly, 3>, 3> trace;
  for (int j = 0; j < 3; ++j)
    for (int a = 0; a < 3; ++a)
      trace[j][a] = j == a ? Poly::constant(1) : cover.transitions[j][a].polar_locus();

  TriCover next;
  next.level = k;
  next.audit = cover.audit;
  next.registry = cover.registry;
  next.atlas = cover.atlas;
  const std::string lvl = std::to_string(k);

  std::array<Direction, 3> dir;
  std::array<AffLine, 3> lines;
  auto choose = [&](int j, std::vector<Predicate<Direction>> preds) {
    CandidateStream stream(cfg, "line " + std::to_string(j) + " step " + lvl);
    dir[j] = choose_generic<Direction>("l" + std::to_string(j) + " direction", [&] { return stream.next_direction(); },
                                       preds, cfg, next.audit, k);
    lines[j] = AffLine::through(cover.charts[j].id, p[j], dir[j].vec());
  };

  choose(0, {detail::avoids_set(trace[0][1], trace[0][2], p[0], true, "l0 avoids U0 - (U1 u U2)"),
             detail::misses_points(a1[0], p[0], "l0 misses A1"),
             detail::avoids_directions(a2[0], "direction of l0 not in A2")});

  Direction d0_in_1 = push_direction(cover.transitions[0][1], p[0], dir[0]);
  Poly l0_in_1 = pullback_curve(lines[0].equation, cover.transitions[1][0]);
  choose(1, {detail::avoids_set(trace[1][0], trace[1][2], p[1], true, "l1 avoids U1 - (U0 u U2)"),
             detail::avoids_directions({d0_in_1}, "l1 transversal to l0"),
             detail::avoids_set(l0_in_1, trace[1][2], p[1], true, "l1 misses l0 - U2"),
             detail::misses_points(a1[1], p[1], "l1 misses A1"),
             detail::avoids_directions(a2[1], "direction of l1 not in A2")});

  Poly l0_in_2 = pullback_curve(lines[0].equation, cover.transitions[2][0]);
  Poly l1_in_2 = pullback_curve(lines[1].equation, cover.transitions[2][1]);
  choose(2, {detail::avoids_set(trace[2][0], trace[2][1], p[2], true, "l2 avoids U2 - (U0 u U1)"),
             detail::avoids_set(l0_in_2 * trace[2][0], l1_in_2, p[2], false,
                                "l2 misses l1 n (l0 u (X - U0)) away from P"),
             detail::avoids_set(l0_in_2, trace[2][1], p[2], true, "l2 misses l0 - U1"),
             detail::misses_points(a1[2], p[2], "l2 misses A1"),
             detail::avoids_directions(a2[2], "direction of l2 not in A2")});

  for (int j = 0; j < 3; ++j)
    next.charts[j] = blowup_chart(p[j], lines[j], cover.charts[j], {k, "U" + std::to_string(j)});

  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      next.transitions[i][j] =
          i == j ? RationalMap2::identity(next.charts[i].id)
                 : ratmap_compose(*next.charts[j].lift,
                                  ratmap_compose(cover.transitions[i][j], *next.charts[i].blowdown));

  for (const auto* w : atlas.charts_at(k)) {
    const std::string& name = w->id.name;
    std::array<RationalMap2, 3> maps;
    for (int j = 0; j < 3; ++j) {
      Chart& c = next.charts[j];
      const Poly& l = lines[j].equation;
      if (w->birth() < k) {
        const RationalMap2& old = to_cover(name)[j];
        maps[j] = ratmap_compose(*c.lift, old);
        std::vector<Poly> fs = cover.charts[j].complement_factors.at(name);
        fs.push_back(pullback_curve(l, old));
        detail::set_complement(c, name, fs);
      } else {
        const RationalMap2& old = to_cover(wc.id.name)[j];
        maps[j] = ratmap_compose(*c.lift, ratmap_compose(old, w->blowup));
        std::vector<Poly> fs;
        for (const auto& f : cover.charts[j].complement_factors.at(wc.id.name))
          fs.push_back(proper_transform(f, w->blowup, bc.coords));
        fs.push_back(proper_transform(pullback_curve(l, old), w->blowup, bc.coords));
        detail::set_complement(c, name, fs);
      }
    }
    next.from_standard[name] = std::move(maps);
  }

  auto& reg = *next.registry;
  for (const auto& c : next.charts) detail::register_chart(reg, c);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) reg.add_transition(next.transitions[i][j]);
  for (const auto& [name, maps] : next.from_standard)
    for (const auto& m : maps) reg.add_transition(m);
  return next;
}

/// Every center of a later step must lie in all three charts.
inline void check_future_centers_covered(const TriCover& cover) {
  const auto& atlas = *cover.atlas;
  for (int m = cover.level + 1; m <= atlas.levels(); ++m) {
    auto q = atlas.center_image(m, cover.level);
    for (int j = 0; j < 3; ++j)
      if (!cover.from_standard.at(q.chart.name)[j].eval(q.point))
        throw GeometryError("invariant violated at level " + std::to_string(cover.level) + ": center " +
                            std::to_string(m) + " is not in U" + std::to_string(j));
  }
}

/// The full construction: base cover of the minimal model, then one
/// inductive step per center.
inline TriCover construct_cover(const SurfacePresentation& sp, const ChoiceConfig& cfg = {}) {
  auto atlas = std::make_shared<const StandardAtlas>(sp);
  ZeroDimSet avoid = atlas->exceptional_image();
  TriCover cover = atlas->model().is_plane() ? base_cover_p2(*atlas, avoid, cfg)
                                             : base_cover_hirzebruch(*atlas, avoid, cfg);
  cover.atlas = atlas;
  check_future_centers_covered(cover);
  for (int k = 1; k <= atlas->levels(); ++k) {
    cover = inductive_step(*atlas, cover, k, atlas->future_center_sets(k), cfg);
    check_future_centers_covered(cover);
  }
  return cover;
}

}  // namespace tricover
