#pragma once

#include "tricover/rational.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tricover {

inline constexpr int kMaxVars = 3;

/// Exponent vector. Unused slots stay zero.
struct Monomial {
  std::array<std::uint16_t, kMaxVars> e{};

  int degree() const { return int(e[0]) + e[1] + e[2]; }

  bool divides(const Monomial& o) const {
    for (int i = 0; i < kMaxVars; ++i)
      if (e[i] > o.e[i]) return false;
    return true;
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial m;
    for (int i = 0; i < kMaxVars; ++i) m.e[i] = std::uint16_t(a.e[i] + b.e[i]);
    return m;
  }

  /// Quotient; caller guarantees b divides a.
  friend Monomial operator/(const Monomial& a, const Monomial& b) {
    Monomial m;
    for (int i = 0; i < kMaxVars; ++i) m.e[i] = std::uint16_t(a.e[i] - b.e[i]);
    return m;
  }

  static Monomial lcm(const Monomial& a, const Monomial& b) {
    Monomial m;
    for (int i = 0; i < kMaxVars; ++i) m.e[i] = std::max(a.e[i], b.e[i]);
    return m;
  }

  static bool coprime(const Monomial& a, const Monomial& b) {
    for (int i = 0; i < kMaxVars; ++i)
      if (a.e[i] && b.e[i]) return false;
    return true;
  }

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Graded lexicographic order with x < y < z: compare total degree, then
/// the exponent of the highest-indexed variable first.
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    for (int i = kMaxVars - 1; i >= 0; --i)
      if (a.e[i] != b.e[i]) return a.e[i] < b.e[i];
    return false;
  }
};

/// Sparse multivariate polynomial over Q in at most three variables.
class Poly {
public:
  using Terms = std::map<Monomial, Rational, GrlexLess>;

  explicit Poly(int nvars = 2) : nvars_(nvars) {
    if (nvars < 1 || nvars > kMaxVars) throw AlgebraError("unsupported variable count");
  }

  static Poly constant(const Rational& c, int nvars = 2) {
    Poly p(nvars);
    if (c != 0) p.terms_[Monomial{}] = c;
    return p;
  }

  static Poly variable(int index, int nvars = 2) {
    if (index < 0 || index >= nvars) throw AlgebraError("variable index out of range");
    Poly p(nvars);
    Monomial m;
    m.e[index] = 1;
    p.terms_[m] = 1;
    return p;
  }

  static Poly term(const Rational& c, const Monomial& m, int nvars = 2) {
    Poly p(nvars);
    if (c != 0) p.terms_[m] = c;
    return p;
  }

  /// a*x + b*y + c in two variables.
  static Poly linear(const Rational& a, const Rational& b, const Rational& c) {
    Poly p(2);
    p.add_term(Monomial{{0, 0, 0}}, c);
    p.add_term(Monomial{{1, 0, 0}}, a);
    p.add_term(Monomial{{0, 1, 0}}, b);
    return p;
  }

  int nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.degree() == 0);
  }

  Rational constant_term() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? Rational(0) : it->second;
  }

  int total_degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first.degree(); }

  int degree_in(int v) const {
    int d = terms_.empty() ? -1 : 0;
    for (const auto& [m, c] : terms_) d = std::max(d, int(m.e[v]));
    return d;
  }

  bool involves(int v) const { return degree_in(v) > 0; }

  const Monomial& leading_monomial() const {
    if (terms_.empty()) throw AlgebraError("leading monomial of zero polynomial");
    return terms_.rbegin()->first;
  }

  const Rational& leading_coefficient() const {
    if (terms_.empty()) throw AlgebraError("leading coefficient of zero polynomial");
    return terms_.rbegin()->second;
  }

  void add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Poly& operator+=(const Poly& o) {
    check_compatible(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }

  Poly& operator-=(const Poly& o) {
    check_compatible(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }

  Poly& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, const Rational& s) { return a *= s; }
  friend Poly operator*(const Rational& s, Poly a) { return a *= s; }
  Poly operator-() const { return *this * Rational(-1); }

  friend Poly operator*(const Poly& a, const Poly& b) {
    a.check_compatible(b);
    Poly r(a.nvars_);
    if (a.is_zero() || b.is_zero()) return r;
    if (a.terms_.size() * b.terms_.size() < 64) {
      Rational t;
      for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) {
          mpq_mul(t.get_mpq_t(), ca.get_mpq_t(), cb.get_mpq_t());
          r.add_term(ma * mb, t);
        }
      return r;
    }
    // Integer products accumulated in a dense exponent box.
    std::array<std::size_t, kMaxVars> dim{}, stride{};
    std::size_t cells = 1;
    for (int v = 0; v < kMaxVars; ++v) {
      dim[v] = std::size_t(std::max(a.degree_in(v), 0) + std::max(b.degree_in(v), 0) + 1);
      stride[v] = cells;
      cells *= dim[v];
    }
    if (cells > (std::size_t{1} << 24)) {
      Rational t;
      for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) {
          mpq_mul(t.get_mpq_t(), ca.get_mpq_t(), cb.get_mpq_t());
          r.add_term(ma * mb, t);
        }
      return r;
    }
    auto integral = [](const Terms& t, mpz_class& den) {
      den = 1;
      for (const auto& [m, c] : t) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
      std::vector<std::pair<std::size_t, mpz_class>> out;
      out.reserve(t.size());
      return out;
    };
    mpz_class da, db;
    auto ia = integral(a.terms_, da), ib = integral(b.terms_, db);
    auto index = [&](const Monomial& m) {
      std::size_t i = 0;
      for (int v = 0; v < kMaxVars; ++v) i += m.e[v] * stride[v];
      return i;
    };
    for (const auto& [m, c] : a.terms_) ia.emplace_back(index(m), mpz_class(c.get_num() * (da / c.get_den())));
    for (const auto& [m, c] : b.terms_) ib.emplace_back(index(m), mpz_class(c.get_num() * (db / c.get_den())));
    std::vector<mpz_class> acc(cells);
    std::vector<char> used(cells, 0);
    for (const auto& [i, x] : ia)
      for (const auto& [j, y] : ib) {
        mpz_addmul(acc[i + j].get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
        used[i + j] = 1;
      }
    mpz_class den = da * db;
    for (std::size_t i = 0; i < cells; ++i) {
      if (!used[i] || acc[i] == 0) continue;
      Monomial m;
      std::size_t rest = i;
      for (int v = kMaxVars - 1; v >= 0; --v) {
        m.e[v] = std::uint16_t(rest / stride[v]);
        rest %= stride[v];
      }
      Rational c(acc[i], den);
      c.canonicalize();
      r.terms_.emplace(m, std::move(c));
    }
    return r;
  }

  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  /// Divide every term by m, which must divide all of them.
  Poly divided_by_monomial(const Monomial& m) const {
    Poly r(nvars_);
    for (const auto& [t, c] : terms_) {
      if (!m.divides(t)) throw AlgebraError("monomial does not divide polynomial");
      r.terms_.emplace_hint(r.terms_.end(), t / m, c);
    }
    return r;
  }

  /// Multiply by c * m.
  Poly times_term(const Rational& c, const Monomial& m) const {
    Poly r(nvars_);
    if (c == 0) return r;
    auto hint = r.terms_.end();
    for (const auto& [mm, cc] : terms_) hint = r.terms_.emplace_hint(hint, mm * m, cc * c);
    return r;
  }

  Poly pow(unsigned e) const {
    Poly result = constant(1, nvars_);
    Poly base = *this;
    while (e) {
      if (e & 1) result *= base;
      e >>= 1;
      if (e) base *= base;
    }
    return result;
  }

  friend bool operator==(const Poly& a, const Poly& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  Rational eval(std::span<const Rational> point) const {
    if (static_cast<int>(point.size()) != nvars_) throw AlgebraError("evaluation arity mismatch");
    if (terms_.empty()) return 0;
    // Over a common denominator: sum of c * prod num_v^e * den_v^(d_v - e).
    std::array<int, kMaxVars> deg{};
    std::array<std::vector<mpz_class>, kMaxVars> npw, dpw;
    for (int v = 0; v < nvars_; ++v) {
      deg[v] = degree_in(v);
      npw[v].assign(deg[v] + 1, 1);
      dpw[v].assign(deg[v] + 1, 1);
      for (int k = 1; k <= deg[v]; ++k) {
        npw[v][k] = npw[v][k - 1] * point[v].get_num();
        dpw[v][k] = dpw[v][k - 1] * point[v].get_den();
      }
    }
    mpz_class lcm = 1;
    for (const auto& [m, c] : terms_) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.get_den_mpz_t());
    mpz_class acc = 0, t;
    for (const auto& [m, c] : terms_) {
      mpz_divexact(t.get_mpz_t(), lcm.get_mpz_t(), c.get_den_mpz_t());
      t *= c.get_num();
      for (int v = 0; v < nvars_; ++v) {
        if (m.e[v]) t *= npw[v][m.e[v]];
        if (deg[v] > m.e[v]) t *= dpw[v][deg[v] - m.e[v]];
      }
      acc += t;
    }
    mpz_class den = lcm;
    for (int v = 0; v < nvars_; ++v) den *= dpw[v][deg[v]];
    Rational r(acc, den);
    r.canonicalize();
    return r;
  }

  Rational eval(std::initializer_list<Rational> point) const {
    std::vector<Rational> v(point);
    return eval(std::span<const Rational>(v));
  }

  Rational eval(const Point2& p) const { return eval(std::span<const Rational>(p)); }

  /// Residue of the value mod 2^61-1; nullopt when some denominator is not
  /// invertible there.
  std::optional<std::uint64_t> eval_modp(std::span<const std::uint64_t> point) const {
    std::uint64_t acc = 0;
    for (const auto& [m, c] : terms_) {
      std::uint64_t cm;
      if (!modp::reduce(c, cm)) return std::nullopt;
      for (int v = 0; v < nvars_; ++v)
        if (m.e[v]) cm = modp::mul(cm, modp::pow(point[v], m.e[v]));
      acc = modp::add(acc, cm);
    }
    return acc;
  }

  Poly derivative(int v) const {
    Poly r(nvars_);
    for (const auto& [m, c] : terms_) {
      if (!m.e[v]) continue;
      Monomial mm = m;
      --mm.e[v];
      r.add_term(mm, c * m.e[v]);
    }
    return r;
  }

  /// Coefficients with respect to variable v; entry k is the coefficient of
  /// v^k (a polynomial not involving v).
  std::vector<Poly> coeffs_in(int v) const {
    std::vector<Poly> out(std::max(degree_in(v), 0) + 1, Poly(nvars_));
    for (const auto& [m, c] : terms_) {
      Monomial mm = m;
      mm.e[v] = 0;
      out[m.e[v]].terms_.emplace(mm, c);
    }
    return out;
  }

  static Poly from_coeffs(const std::vector<Poly>& coeffs, int v, int nvars) {
    Poly r(nvars);
    for (std::size_t k = 0; k < coeffs.size(); ++k)
      for (const auto& [m, c] : coeffs[k].terms_) {
        Monomial mm = m;
        mm.e[v] = std::uint16_t(mm.e[v] + k);
        r.add_term(mm, c);
      }
    return r;
  }

  /// Replace variable v by the constant a.
  Poly substitute(int v, const Rational& a) const {
    auto cs = coeffs_in(v);
    Poly r(nvars_);
    for (std::size_t k = cs.size(); k-- > 0;) {
      r *= a;
      r += cs[k];
    }
    return r;
  }

  /// Generic substitution x_i -> images[i] (all in the same ring).
  Poly compose(std::span<const Poly> images) const {
    if (static_cast<int>(images.size()) != nvars_) throw AlgebraError("substitution arity mismatch");
    int target = images.empty() ? nvars_ : images[0].nvars();
    std::array<std::vector<Poly>, kMaxVars> pw;
    for (int v = 0; v < nvars_; ++v) {
      int d = degree_in(v);
      pw[v].push_back(constant(1, target));
      for (int k = 1; k <= d; ++k) pw[v].push_back(pw[v].back() * images[v]);
    }
    Poly r(target);
    for (const auto& [m, c] : terms_) {
      Poly t = constant(c, target);
      for (int v = 0; v < nvars_; ++v)
        if (m.e[v]) t *= pw[v][m.e[v]];
      r += t;
    }
    return r;
  }

  /// Same polynomial viewed in a ring with more (or equally many) variables.
  Poly extend(int nvars) const {
    if (nvars < nvars_) {
      for (const auto& [m, c] : terms_)
        for (int v = nvars; v < nvars_; ++v)
          if (m.e[v]) throw AlgebraError("cannot drop a variable in use");
    }
    Poly r(nvars);
    r.terms_ = terms_;
    return r;
  }

  /// Exact quotient, or nullopt when `d` does not divide *this.
  std::optional<Poly> divide_exact(const Poly& d) const {
    check_compatible(d);
    if (d.is_zero()) throw AlgebraError("division by zero polynomial");
    Poly rem = *this;
    Poly q(nvars_);
    const Monomial& lm = d.leading_monomial();
    Rational lc_inv = 1 / d.leading_coefficient();
    while (!rem.is_zero()) {
      const Monomial& rm = rem.leading_monomial();
      if (!lm.divides(rm)) return std::nullopt;
      Monomial qm = rm / lm;
      Rational qc = rem.leading_coefficient() * lc_inv;
      q.terms_.emplace(qm, qc);
      rem -= d.times_term(qc, qm);
    }
    return q;
  }

  Poly divided_by(const Poly& d) const {
    auto q = divide_exact(d);
    if (!q) throw AlgebraError("inexact polynomial division");
    return *q;
  }

  /// Scalar multiple with leading coefficient 1.
  Poly monic() const {
    if (is_zero()) return *this;
    return *this * (1 / leading_coefficient());
  }

  /// Scalar multiple with coprime integer coefficients and positive leading
  /// coefficient.
  Poly primitive_integer() const {
    if (is_zero()) return *this;
    mpz_class num_gcd = 0, den_lcm = 1;
    for (const auto& [m, c] : terms_) {
      mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), c.get_num_mpz_t());
      mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.get_den_mpz_t());
    }
    Rational s(den_lcm, num_gcd);
    s.canonicalize();
    if (leading_coefficient() < 0) s = -s;
    return *this * s;
  }

  std::string to_string(const std::vector<std::string>& names = {"x", "y", "z"}) const;

private:
  void check_compatible(const Poly& o) const {
    if (o.nvars_ != nvars_) throw AlgebraError("polynomials live in different rings");
  }

  int nvars_;
  Terms terms_;
};

inline std::string Poly::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    Rational a = abs(c);
    if (first) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    first = false;
    bool unit = (a == 1) && m.degree() > 0;
    if (!unit) out += a.get_str();
    bool need_star = !unit;
    for (int v = 0; v < nvars_; ++v) {
      if (!m.e[v]) continue;
      if (need_star) out += "*";
      out += names.at(v);
      if (m.e[v] > 1) out += "^" + std::to_string(m.e[v]);
      need_star = true;
    }
  }
  return out;
}

}  // namespace tricover
