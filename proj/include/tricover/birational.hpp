#pragma once

#include "tricover/ratfun.hpp"

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tricover {

class GeometryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Names a chart: the tower level it belongs to and a name unique there.
struct ChartId {
  int level = 0;
  std::string name;

  std::string key() const { return name + "@" + std::to_string(level); }
  friend bool operator==(const ChartId&, const ChartId&) = default;
  friend auto operator<=>(const ChartId&, const ChartId&) = default;
};

/// Pair of rational functions from one affine chart to another.
struct RationalMap2 {
  ChartId source;
  ChartId target;
  std::array<RatFun, 2> components{RatFun(2), RatFun(2)};

  static RationalMap2 identity(const ChartId& c) {
    return {c, c, {RatFun::variable(0), RatFun::variable(1)}};
  }

  /// Image point, or nullopt (the indeterminate marker) when a reduced
  /// denominator vanishes.
  std::optional<Point2> eval(const Point2& p) const {
    auto a = components[0].eval(p);
    if (!a) return std::nullopt;
    auto b = components[1].eval(p);
    if (!b) return std::nullopt;
    return Point2{*a, *b};
  }

  /// Product of the distinct denominator factors: the locus where the map is
  /// not regular.
  Poly polar_locus() const {
    return squarefree_part(poly_lcm(components[0].den(), components[1].den()));
  }

  bool regular_at(const Point2& p) const {
    return components[0].den().eval(p) != 0 && components[1].den().eval(p) != 0;
  }

  /// Jacobian matrix at a regular point, rows = components.
  std::array<std::array<Rational, 2>, 2> jacobian(const Point2& p) const {
    std::array<std::array<Rational, 2>, 2> j;
    for (int i = 0; i < 2; ++i) {
      const auto& f = components[i];
      Rational d = f.den().eval(p);
      if (d == 0) throw GeometryError("jacobian at an indeterminate point");
      Rational n = f.num().eval(p);
      for (int v = 0; v < 2; ++v)
        j[i][v] = (f.num().derivative(v).eval(p) * d - n * f.den().derivative(v).eval(p)) / (d * d);
    }
    return j;
  }
};

/// g o f.
inline RationalMap2 ratmap_compose(const RationalMap2& g, const RationalMap2& f) {
  if (!(f.target == g.source))
    throw GeometryError("cannot compose " + g.source.key() + " after " + f.target.key());
  RationalMap2 h{f.source, g.target, {}};
  std::span<const RatFun> subs(f.components);
  try {
    h.components[0] = ratfun_compose(g.components[0], subs);
    h.components[1] = ratfun_compose(g.components[1], subs);
  } catch (const AlgebraError& e) {
    throw GeometryError("composition is nowhere defined: " + std::string(e.what()));
  }
  return h;
}

/// Pullback of a curve equation along a map, numerator only: its zero set is
/// the closure of the preimage of the curve in the regular locus.
inline Poly pullback_curve(const Poly& curve, const RationalMap2& f) {
  std::span<const RatFun> subs(f.components);
  return pullback(curve, subs).num();
}

/// A line a*x + b*y + c = 0 in a chart.
struct AffLine {
  ChartId chart;
  Poly equation{2};

  static AffLine through(const ChartId& chart, const Point2& p, const std::array<Rational, 2>& dir) {
    if (dir[0] == 0 && dir[1] == 0) throw GeometryError("zero direction");
    // dir[1]*(x - px) - dir[0]*(y - py)
    Poly eq = Poly::linear(dir[1], -dir[0], dir[0] * p[1] - dir[1] * p[0]);
    return {chart, eq};
  }

  /// Direction vector (-b, a).
  std::array<Rational, 2> direction() const {
    const auto& t = equation.terms();
    auto coeff = [&](Monomial m) {
      auto it = t.find(m);
      return it == t.end() ? Rational(0) : it->second;
    };
    Rational a = coeff(Monomial{{1, 0, 0}}), b = coeff(Monomial{{0, 1, 0}});
    return {-b, a};
  }

  bool contains(const Point2& p) const { return equation.eval(p) == 0; }

  void validate() const {
    if (equation.total_degree() != 1) throw GeometryError("line equation must have degree exactly 1");
  }
};

/// Projective pair [a : b]; b == 0 is the point at infinity.
struct ProjPoint1 {
  Rational a = 0, b = 1;

  static ProjPoint1 finite(const Rational& z) { return {z, 1}; }
  static ProjPoint1 infinity() { return {1, 0}; }

  bool is_infinity() const { return b == 0; }
  Rational value() const { return a / b; }

  friend bool operator==(const ProjPoint1& p, const ProjPoint1& q) { return p.a * q.b == p.b * q.a; }

  std::string to_string() const { return is_infinity() ? "inf" : value().get_str(); }
};

/// z -> (a z + b) / (c z + d).
struct MobiusMap {
  Rational a = 1, b = 0, c = 0, d = 1;

  MobiusMap() = default;
  MobiusMap(Rational a_, Rational b_, Rational c_, Rational d_)
      : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {
    if (a * d - b * c == 0) throw GeometryError("degenerate Moebius map");
  }

  ProjPoint1 operator()(const ProjPoint1& p) const {
    Rational num = a * p.a + b * p.b, den = c * p.a + d * p.b;
    if (den == 0) return ProjPoint1::infinity();
    return ProjPoint1::finite(num / den);
  }

  MobiusMap inverse() const { return MobiusMap(d, -b, -c, a); }

  /// As a rational function of one variable (slot `var` of an n-variable ring).
  RatFun as_ratfun(int var, int nvars = 2) const {
    Poly z = Poly::variable(var, nvars);
    return RatFun(z * a + Poly::constant(b, nvars), z * c + Poly::constant(d, nvars));
  }
};

/// A Moebius map sending p to infinity: z -> 1 / (z - p) for finite p, the
/// identity for p = infinity.
inline MobiusMap mobius_to_infinity(const ProjPoint1& p) {
  if (p.a == 0 && p.b == 0) throw GeometryError("invalid homogeneous pair [0:0]");
  if (p.is_infinity()) return MobiusMap();
  return MobiusMap(0, 1, 1, -p.value());
}

/// Order of vanishing of `curve` at `p` (lowest total degree after
/// translating p to the origin).
inline int multiplicity_at(const Poly& curve, const Point2& p) {
  if (curve.is_zero()) throw GeometryError("multiplicity of the zero polynomial");
  std::vector<Poly> shift{Poly::linear(1, 0, p[0]), Poly::linear(0, 1, p[1])};
  Poly moved = curve.compose(shift);
  return moved.terms().begin()->first.degree();
}

/// Which coordinate of a blowup chart cuts out the exceptional curve over
/// `center`: the variable dividing both pulled-back centered coordinates.
inline int exceptional_variable(const RationalMap2& blowup, const Point2& center) {
  for (int v = 0; v < 2; ++v) {
    Poly w = Poly::variable(v);
    bool both = true;
    for (int i = 0; i < 2; ++i) {
      const auto& c = blowup.components[i];
      if (!c.is_polynomial()) throw GeometryError("blowup chart map must be polynomial");
      Poly centered = c.num() * (1 / c.den().constant_term()) - Poly::constant(center[i]);
      both = both && !centered.is_zero() && centered.divide_exact(w).has_value();
    }
    if (both) return v;
  }
  throw GeometryError("map is not a blowup chart over the given center");
}

/// Proper transform of `curve` (in the target chart of `blowup`) under the
/// blowup chart map: pull back and divide out the exceptional coordinate
/// exactly mult_center(curve) times.
inline Poly proper_transform(const Poly& curve, const RationalMap2& blowup, const Point2& center) {
  if (curve.is_zero()) throw GeometryError("proper transform of the zero curve");
  const int v = exceptional_variable(blowup, center);
  const int m = multiplicity_at(curve, center);
  Poly t = pullback_curve(curve, blowup);
  Poly w = Poly::variable(v);
  for (int k = 0; k < m; ++k) t = t.divided_by(w);
  return t;
}

/// Projective direction, normalized so the first nonzero entry is 1.
struct Direction {
  Rational dx = 1, dy = 0;

  static Direction of(const Rational& a, const Rational& b) {
    if (a == 0 && b == 0) throw GeometryError("zero direction vector");
    if (a != 0) return {1, b / a};
    return {0, 1};
  }

  std::array<Rational, 2> vec() const { return {dx, dy}; }
  friend bool operator==(const Direction&, const Direction&) = default;
  std::string to_string() const { return "[" + dx.get_str() + ":" + dy.get_str() + "]"; }
};

/// Image of a tangent direction under the differential of a map at p.
inline Direction push_direction(const RationalMap2& f, const Point2& p, const Direction& d) {
  auto j = f.jacobian(p);
  return Direction::of(j[0][0] * d.dx + j[0][1] * d.dy, j[1][0] * d.dx + j[1][1] * d.dy);
}

/// Tangent direction (-f_y, f_x) of a smooth curve point.
inline Direction tangent_direction(const Poly& curve, const Point2& p) {
  if (curve.eval(p) != 0) throw GeometryError("point is not on the curve");
  Rational fx = curve.derivative(0).eval(p), fy = curve.derivative(1).eval(p);
  if (fx == 0 && fy == 0) throw GeometryError("curve is singular at " + to_string(p));
  return Direction::of(-fy, fx);
}

/// Affine charts known by their maps to and from one base chart, plus
/// explicitly registered transitions that take precedence over composing
/// through the base.
struct ChartMaps {
  ChartId id;
  RationalMap2 to_base;
  RationalMap2 from_base;
  std::vector<std::string> coords{"u", "v"};
};

class ChartRegistry {
public:
  explicit ChartRegistry(ChartId base = {}) : base_(std::move(base)) {}

  const ChartId& base() const { return base_; }

  void add(ChartMaps maps) {
    std::lock_guard lock(mutex_);
    auto key = maps.id.key();
    charts_.insert_or_assign(key, std::make_shared<const ChartMaps>(std::move(maps)));
  }

  bool contains(const ChartId& id) const {
    std::lock_guard lock(mutex_);
    return charts_.count(id.key()) > 0;
  }

  const ChartMaps& get(const ChartId& id) const {
    std::lock_guard lock(mutex_);
    auto it = charts_.find(id.key());
    if (it == charts_.end()) throw GeometryError("unknown chart " + id.key());
    return *it->second;
  }

  void add_transition(RationalMap2 f) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(f.source.key(), f.target.key());
    cache_.insert_or_assign(key, std::make_shared<const RationalMap2>(std::move(f)));
  }

  /// from -> to, composed through the base chart unless registered.
  RationalMap2 transition(const ChartId& from, const ChartId& to) const {
    if (from == to) return RationalMap2::identity(from);
    auto key = std::make_pair(from.key(), to.key());
    {
      std::lock_guard lock(mutex_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return *it->second;
    }
    RationalMap2 f = ratmap_compose(get(to).from_base, get(from).to_base);
    std::lock_guard lock(mutex_);
    cache_.insert_or_assign(key, std::make_shared<const RationalMap2>(f));
    return f;
  }

private:
  ChartId base_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const ChartMaps>> charts_;
  mutable std::map<std::pair<std::string, std::string>, std::shared_ptr<const RationalMap2>> cache_;
};

/// One component of a finite point set: an ideal in a chart, optionally
/// with its single explicit rational point.
struct PointComponent {
  ChartId chart;
  std::vector<Poly> generators;
  std::optional<Point2> point;
  std::string label;

  static PointComponent at(const ChartId& chart, const Point2& p, std::string label = {}) {
    return {chart, {Poly::linear(1, 0, -p[0]), Poly::linear(0, 1, -p[1])}, p, std::move(label)};
  }
};

/// Finite algebraic point set, possibly with irrational points, kept as
/// ideals in the charts where its components were born.
struct ZeroDimSet {
  std::vector<PointComponent> components;

  bool empty() const { return components.empty(); }
  void add(PointComponent c) { components.push_back(std::move(c)); }
  void append(const ZeroDimSet& o) {
    components.insert(components.end(), o.components.begin(), o.components.end());
  }
};

/// Does some point of `set` lie on curve = 0 in `chart`? Points must lie in
/// the regular locus of the transition into `chart`; an explicit point that
/// does not is reported as an error.
inline bool zerodim_meets_curve(const ZeroDimSet& set, const Poly& curve, const ChartId& chart,
                                const ChartRegistry& registry) {
  for (const auto& comp : set.components) {
    RationalMap2 f = registry.transition(comp.chart, chart);
    if (comp.point) {
      auto img = f.eval(*comp.point);
      if (!img)
        throw GeometryError("point " + to_string(*comp.point) + " of " + comp.chart.key() +
                            " is not visible in " + chart.key());
      if (curve.eval(*img) == 0) return true;
      continue;
    }
    std::vector<Poly> gens = comp.generators;
    gens.push_back(pullback_curve(curve, f));
    if (!ideal_is_trivial(gens)) return true;
  }
  return false;
}

}  // namespace tricover
