#pragma once

// Input model: a minimal model (P^2 or a Hirzebruch surface) blown up at an
// ordered list of rational centers, and the standard atlas of every level.

#include "tricover/birational.hpp"
#include "tricover/parse.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace tricover {

class PresentationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct MinimalModel {
  enum class Kind { Plane, Hirzebruch };
  Kind kind = Kind::Plane;
  int n = 0;

  static MinimalModel plane() { return {}; }
  static MinimalModel hirzebruch(int n) { return {Kind::Hirzebruch, n}; }

  bool is_plane() const { return kind == Kind::Plane; }
  std::string to_string() const { return is_plane() ? "P2" : "Sigma_" + std::to_string(n); }
};

/// Center of the blowup X_level -> X_{level-1}, given in a standard chart of
/// X_{level-1}.
struct BlowupCenter {
  int level = 1;
  std::string chart;
  Point2 coords;
};

struct SurfacePresentation {
  MinimalModel base;
  std::vector<BlowupCenter> centers;

  int blowups() const { return static_cast<int>(centers.size()); }
};

/// Chart of the standard atlas. Base charts are born at level 0; the two
/// charts over center k are born at level k and map into `parent` by a
/// polynomial blowup map.
struct StandardChart {
  ChartId id;
  std::vector<std::string> coords;
  int center = 0;  // k for E{k}a / E{k}b, 0 for base charts
  ChartId parent;
  RationalMap2 blowup;
  int exceptional_var = 0;
  /// Points of this chart's affine plane that have been blown up, with the
  /// level at which that happened.
  std::vector<std::pair<int, Point2>> removed;

  int birth() const { return id.level; }
  bool is_base() const { return center == 0; }

  bool removed_at(const Point2& p, int level) const {
    for (const auto& [lvl, q] : removed)
      if (lvl <= level && q == p) return true;
    return false;
  }

  std::vector<Point2> removed_points(int level) const {
    std::vector<Point2> out;
    for (const auto& [lvl, q] : removed)
      if (lvl <= level) out.push_back(q);
    return out;
  }
};

/// A point of some level pushed down the tower.
struct PushedPoint {
  ChartId chart;
  Point2 point;
  /// Levels whose exceptional curve contained the point on the way down.
  std::vector<int> contracted_by;

  bool on_exceptional() const { return !contracted_by.empty(); }
};

/// Future centers seen from step i of the tower.
struct FutureCenters {
  /// Images on X_{i-1} of later centers, other than P_i.
  ZeroDimSet outside;
  /// Later centers on E_i, as tangent directions at P_i in the coordinates
  /// of the chart holding P_i.
  std::vector<Direction> on_exceptional;
  /// For each later center k: true when it lands on E_i.
  std::map<int, bool> routed_to_exceptional;
};

/// The standard atlas of every level of a validated presentation.
class StandardAtlas {
public:
  explicit StandardAtlas(const SurfacePresentation& sp);

  const SurfacePresentation& presentation() const { return sp_; }
  const MinimalModel& model() const { return sp_.base; }
  int levels() const { return sp_.blowups(); }
  const std::vector<std::string>& warnings() const { return warnings_; }

  std::shared_ptr<ChartRegistry> registry() const { return registry_; }

  const StandardChart& chart(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw PresentationError("dangling chart reference '" + name + "'");
    return charts_[it->second];
  }
  bool has_chart(const std::string& name) const { return index_.count(name) > 0; }

  /// Charts of X_level.
  std::vector<const StandardChart*> charts_at(int level) const {
    std::vector<const StandardChart*> out;
    for (const auto& c : charts_)
      if (c.birth() <= level) out.push_back(&c);
    return out;
  }

  /// Coordinates in `to` of a point of X_level given in chart `from`, or
  /// nullopt when the point is not in `to` at that level.
  std::optional<Point2> locate(const std::string& from, const Point2& p, const std::string& to,
                               int level) const {
    if (from == to) {
      if (chart(from).removed_at(p, level)) return std::nullopt;
      return p;
    }
    const auto& target = chart(to);
    auto img = registry_->transition(chart(from).id, target.id).eval(p);
    if (!img || target.removed_at(*img, level)) return std::nullopt;
    return img;
  }

  /// Push a point of X_from_level (in chart `name`) down to X_to_level.
  PushedPoint pushforward_point(const std::string& name, const Point2& p, int to_level) const {
    PushedPoint out{chart(name).id, p, {}};
    const StandardChart* c = &chart(name);
    while (c->birth() > to_level) {
      if (out.point[c->exceptional_var] == 0) out.contracted_by.push_back(c->center);
      out.point = *c->blowup.eval(out.point);
      c = &chart(c->parent.name);
      out.chart = c->id;
    }
    return out;
  }

  /// Center k pushed down to X_level (level < k).
  PushedPoint center_image(int k, int level) const {
    const auto& bc = sp_.centers.at(k - 1);
    return pushforward_point(bc.chart, bc.coords, level);
  }

  /// Images on the minimal model of all centers (deduplicated).
  ZeroDimSet exceptional_image() const {
    ZeroDimSet out;
    std::vector<std::pair<std::string, Point2>> seen;
    for (int k = 1; k <= levels(); ++k) {
      auto img = center_image(k, 0);
      std::pair<std::string, Point2> key{img.chart.name, img.point};
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
      seen.push_back(key);
      out.add(PointComponent::at(img.chart, img.point, "center " + std::to_string(k)));
    }
    return out;
  }

  /// The sets A1 (outside P_i) and A2 (on E_i) of later centers at step i.
  FutureCenters future_center_sets(int i) const {
    if (i < 1 || i > levels()) throw PresentationError("step out of range");
    FutureCenters out;
    std::vector<std::pair<std::string, Point2>> seen;
    const auto& ca = chart("E" + std::to_string(i) + "a");
    const auto& cb = chart("E" + std::to_string(i) + "b");
    for (int k = i + 1; k <= levels(); ++k) {
      auto q = center_image(k, i);
      const StandardChart& qc = chart(q.chart.name);
      if ((&qc == &ca || &qc == &cb) && q.point[qc.exceptional_var] == 0) {
        Direction d = (&qc == &ca) ? Direction::of(1, q.point[1]) : Direction::of(q.point[0], 1);
        if (std::find(out.on_exceptional.begin(), out.on_exceptional.end(), d) ==
            out.on_exceptional.end())
          out.on_exceptional.push_back(d);
        out.routed_to_exceptional[k] = true;
        continue;
      }
      out.routed_to_exceptional[k] = false;
      auto r = pushforward_point(q.chart.name, q.point, i - 1);
      std::pair<std::string, Point2> key{r.chart.name, r.point};
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
      seen.push_back(key);
      out.outside.add(PointComponent::at(r.chart, r.point, "center " + std::to_string(k)));
    }
    return out;
  }

  /// A uniformly drawn small-height rational point of X_level, in a random
  /// chart of that level.
  std::pair<const StandardChart*, Point2> random_point(std::mt19937_64& rng, int level,
                                                      int height = 12) const {
    auto cs = charts_at(level);
    std::uniform_int_distribution<std::size_t> pick(0, cs.size() - 1);
    std::uniform_int_distribution<int> num(-height, height), den(1, 4);
    while (true) {
      const StandardChart* c = cs[pick(rng)];
      Point2 p;
      for (auto& x : p) {
        x = Rational(num(rng), den(rng));
        x.canonicalize();
      }
      if (!c->removed_at(p, level)) return {c, p};
    }
  }

private:
  void add_base_charts();
  void add_blowup(int k, const BlowupCenter& c);
  void add_chart(StandardChart c, RationalMap2 to_base, RationalMap2 from_base) {
    registry_->add(ChartMaps{c.id, std::move(to_base), std::move(from_base), c.coords});
    index_[c.id.name] = charts_.size();
    charts_.push_back(std::move(c));
  }

  SurfacePresentation sp_;
  std::vector<StandardChart> charts_;
  std::map<std::string, std::size_t> index_;
  std::shared_ptr<ChartRegistry> registry_;
  std::vector<std::string> warnings_;
};

namespace detail {

inline RatFun rf(const std::string& num, const std::string& den = "1") {
  return RatFun(parse_poly(num, {"x", "y"}), parse_poly(den, {"x", "y"}));
}

inline RationalMap2 rmap(const ChartId& s, const ChartId& t, RatFun a, RatFun b) {
  return {s, t, {std::move(a), std::move(b)}};
}

}  // namespace detail

inline void StandardAtlas::add_base_charts() {
  using detail::rf;
  using detail::rmap;
  if (sp_.base.is_plane()) {
    // [x : y : z]; the base chart is z != 0 with coordinates (x/z, y/z).
    ChartId pz{0, "Pz"}, px{0, "Px"}, py{0, "Py"};
    registry_ = std::make_shared<ChartRegistry>(pz);
    add_chart({pz, {"x", "y"}}, RationalMap2::identity(pz), RationalMap2::identity(pz));
    // Px: (y/x, z/x).
    add_chart({px, {"s", "t"}}, rmap(px, pz, rf("1", "y"), rf("x", "y")),
              rmap(pz, px, rf("y", "x"), rf("1", "x")));
    // Py: (x/y, z/y).
    add_chart({py, {"s", "t"}}, rmap(py, pz, rf("x", "y"), rf("1", "y")),
              rmap(pz, py, rf("x", "y"), rf("1", "y")));
    return;
  }
  // Sigma_n: base coordinate z (s = 1/z), fiber coordinate w over z finite
  // and t = z^n w over s finite; primed fiber coordinates are reciprocals.
  const int n = sp_.base.n;
  const std::string N = std::to_string(n);
  ChartId h00{0, "H00"}, h01{0, "H01"}, h10{0, "H10"}, h11{0, "H11"};
  registry_ = std::make_shared<ChartRegistry>(h00);
  add_chart({h00, {"z", "w"}}, RationalMap2::identity(h00), RationalMap2::identity(h00));
  add_chart({h01, {"z", "w"}}, rmap(h01, h00, rf("x"), rf("1", "y")),
            rmap(h00, h01, rf("x"), rf("1", "y")));
  add_chart({h10, {"s", "t"}}, rmap(h10, h00, rf("1", "x"), rf("y*x^" + N)),
            rmap(h00, h10, rf("1", "x"), rf("y*x^" + N)));
  add_chart({h11, {"s", "t"}}, rmap(h11, h00, rf("1", "x"), rf("x^" + N, "y")),
            rmap(h00, h11, rf("1", "x"), rf("1", "y*x^" + N)));
}

inline void StandardAtlas::add_blowup(int k, const BlowupCenter& c) {
  const ChartId pid = chart(c.chart).id;
  const auto parent_removed = chart(c.chart).removed;
  const auto& [a, b] = c.coords;
  const Poly u = Poly::variable(0), v = Poly::variable(1);
  const Poly ca = Poly::constant(a), cb = Poly::constant(b);
  const auto& pmaps = registry_->get(pid);

  for (int side = 0; side < 2; ++side) {
    StandardChart e;
    e.id = {k, "E" + std::to_string(k) + (side == 0 ? "a" : "b")};
    e.coords = {"u", "v"};
    e.center = k;
    e.parent = pid;
    RationalMap2 inv{pid, e.id, {}};
    if (side == 0) {
      e.blowup = {e.id, pid, {RatFun(ca + u), RatFun(cb + u * v)}};
      e.exceptional_var = 0;
      inv.components = {RatFun(u - ca), RatFun(v - cb, u - ca)};
    } else {
      e.blowup = {e.id, pid, {RatFun(ca + u * v), RatFun(cb + v)}};
      e.exceptional_var = 1;
      inv.components = {RatFun(u - ca, v - cb), RatFun(v - cb)};
    }
    // Earlier centers off this one stay removed in the new plane.
    for (const auto& [lvl, q] : parent_removed) {
      if (q == c.coords) continue;
      if (auto img = inv.eval(q)) e.removed.emplace_back(lvl, *img);
    }
    RationalMap2 to_base = ratmap_compose(pmaps.to_base, e.blowup);
    RationalMap2 from_base = ratmap_compose(inv, pmaps.from_base);
    registry_->add_transition(e.blowup);
    registry_->add_transition(inv);
    add_chart(std::move(e), std::move(to_base), std::move(from_base));
  }
}

inline StandardAtlas::StandardAtlas(const SurfacePresentation& sp) : sp_(sp) {
  if (!sp.base.is_plane()) {
    if (sp.base.n < 0) throw PresentationError("n must be ≥ 0");
    if (sp.base.n == 1)
      warnings_.push_back("Sigma_1 is not a minimal model (it is P^2 blown up at a point); proceeding");
  }
  add_base_charts();
  for (int k = 1; k <= sp.blowups(); ++k) {
    const auto& c = sp.centers[k - 1];
    if (c.level != k)
      throw PresentationError("center levels must be 1..r in order; got level " +
                              std::to_string(c.level) + " at position " + std::to_string(k));
    if (!has_chart(c.chart)) throw PresentationError("dangling chart reference '" + c.chart + "'");
    if (chart(c.chart).birth() > k - 1)
      throw PresentationError("center " + std::to_string(k) + " refers to chart '" + c.chart +
                              "' which does not exist on X_" + std::to_string(k - 1));
    if (chart(c.chart).removed_at(c.coords, k - 1))
      throw PresentationError("duplicate center: center " + std::to_string(k) +
                              " coincides with an earlier center");
    // Record the center as a removed point of every chart that sees it.
    std::vector<std::pair<std::size_t, Point2>> hits;
    for (std::size_t i = 0; i < charts_.size(); ++i) {
      auto img = locate(c.chart, c.coords, charts_[i].id.name, k - 1);
      if (img) hits.emplace_back(i, *img);
    }
    for (auto& [i, p] : hits) charts_[i].removed.emplace_back(k, p);
    add_blowup(k, c);
  }
}

/// Checks a presentation; returns warnings or throws PresentationError.
inline std::vector<std::string> validate_presentation(const SurfacePresentation& sp) {
  return StandardAtlas(sp).warnings();
}

}  // namespace tricover
