#pragma once

#include "tricover/algebra.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tricover {

/// Reduced quotient of polynomials. The denominator is monic under grlex,
/// so equal rational functions have identical representations.
class RatFun {
public:
  RatFun() : RatFun(2) {}
  explicit RatFun(int nvars) : num_(nvars), den_(Poly::constant(1, nvars)) {}

  RatFun(Poly num) : num_(std::move(num)), den_(Poly::constant(1, num_.nvars())) {}  // NOLINT

  RatFun(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) { reduce(); }

  static RatFun constant(const Rational& c, int nvars = 2) { return RatFun(Poly::constant(c, nvars)); }
  static RatFun variable(int i, int nvars = 2) { return RatFun(Poly::variable(i, nvars)); }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  int nvars() const { return num_.nvars(); }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_constant(); }

  /// nullopt when the reduced denominator vanishes at the point.
  std::optional<Rational> eval(std::span<const Rational> p) const {
    Rational d = den_.eval(p);
    if (d == 0) return std::nullopt;
    return num_.eval(p) / d;
  }
  std::optional<Rational> eval(const Point2& p) const { return eval(std::span<const Rational>(p)); }

  friend RatFun operator+(const RatFun& a, const RatFun& b) {
    if (a.den_ == b.den_) return RatFun(a.num_ + b.num_, a.den_);
    return RatFun(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RatFun operator-(const RatFun& a, const RatFun& b) {
    if (a.den_ == b.den_) return RatFun(a.num_ - b.num_, a.den_);
    return RatFun(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RatFun operator*(const RatFun& a, const RatFun& b) {
    return RatFun(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RatFun operator/(const RatFun& a, const RatFun& b) {
    if (b.is_zero()) throw AlgebraError("division by the zero rational function");
    return RatFun(a.num_ * b.den_, a.den_ * b.num_);
  }
  RatFun operator-() const {
    RatFun r = *this;
    r.num_ = -r.num_;
    return r;
  }

  friend bool operator==(const RatFun& a, const RatFun& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  std::string to_string(const std::vector<std::string>& names = {"x", "y", "z"}) const {
    if (den_.is_constant()) return num_.to_string(names);
    return "(" + num_.to_string(names) + ")/(" + den_.to_string(names) + ")";
  }

private:
  void reduce() {
    if (den_.is_zero()) throw AlgebraError("rational function with zero denominator");
    if (num_.nvars() != den_.nvars()) throw AlgebraError("numerator and denominator in different rings");
    if (num_.is_zero()) {
      den_ = Poly::constant(1, num_.nvars());
      return;
    }
    if (!den_.is_constant()) {
      Poly g = poly_gcd(num_, den_);
      if (!g.is_constant()) {
        num_ = num_.divided_by(g);
        den_ = den_.divided_by(g);
      }
    }
    Rational s = 1 / den_.leading_coefficient();
    num_ *= s;
    den_ *= s;
  }

  Poly num_;
  Poly den_;
};

/// Substitute subs[i] for variable i of f and reduce. Throws when the
/// substituted denominator vanishes identically.
inline RatFun ratfun_compose(const RatFun& f, std::span<const RatFun> subs) {
  const int n = f.nvars();
  if (static_cast<int>(subs.size()) != n) throw AlgebraError("substitution arity mismatch");
  const int target = subs.empty() ? n : subs[0].nvars();

  std::array<int, kMaxVars> e{};
  for (int v = 0; v < n; ++v) e[v] = std::max(f.num().degree_in(v), f.den().degree_in(v));

  std::array<std::vector<Poly>, kMaxVars> bpow;
  for (int v = 0; v < n; ++v) {
    bpow[v].push_back(Poly::constant(1, target));
    for (int k = 1; k <= e[v]; ++k) bpow[v].push_back(bpow[v].back() * subs[v].den());
  }
  // P(a/b) * prod b^e, homogenized so the common factor cancels; Horner
  // in each variable.
  std::function<Poly(const Poly&, int)> lift = [&](const Poly& p, int v) -> Poly {
    if (v < 0) return Poly::constant(p.constant_term(), target);
    auto cs = p.coeffs_in(v);
    cs.resize(e[v] + 1, Poly(n));
    Poly acc = lift(cs[e[v]], v - 1);
    for (int k = e[v] - 1; k >= 0; --k) {
      acc = acc * subs[v].num();
      if (!cs[k].is_zero()) acc += lift(cs[k], v - 1) * bpow[v][e[v] - k];
    }
    return acc;
  };
  Poly den = lift(f.den(), n - 1);
  if (den.is_zero()) throw AlgebraError("composition has an identically vanishing denominator");
  return RatFun(lift(f.num(), n - 1), std::move(den));
}

inline RatFun ratfun_compose(const RatFun& f, std::initializer_list<RatFun> subs) {
  std::vector<RatFun> v(subs);
  return ratfun_compose(f, std::span<const RatFun>(v));
}

/// Pullback of a polynomial along rational substitutions.
inline RatFun pullback(const Poly& p, std::span<const RatFun> subs) {
  return ratfun_compose(RatFun(p), subs);
}

}  // namespace tricover
