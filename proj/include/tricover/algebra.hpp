#pragma once

// Polynomial gcd, square-free parts, resultants and Groebner bases over Q.

#include "tricover/poly.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tricover {

namespace detail {

inline int top_variable(const Poly& p, const Poly& q) {
  for (int v = p.nvars() - 1; v >= 0; --v)
    if (p.involves(v) || q.involves(v)) return v;
  return -1;
}

/// Pseudo-remainder of a by b with respect to v.
inline Poly pseudo_remainder(Poly a, const Poly& b, int v) {
  const int db = b.degree_in(v);
  const auto bc = b.coeffs_in(v);
  const Poly& lcb = bc.back();
  while (!a.is_zero() && a.degree_in(v) >= db) {
    const int da = a.degree_in(v);
    Poly lca = a.coeffs_in(v).back();
    Monomial shift;
    shift.e[v] = std::uint16_t(da - db);
    a = lcb * a - lca * b.times_term(1, shift);
    a = a.primitive_integer();
  }
  return a;
}

}  // namespace detail

Poly poly_gcd(const Poly& p, const Poly& q);

/// gcd of the coefficients of p with respect to v.
inline Poly content_in(const Poly& p, int v) {
  Poly g(p.nvars());
  for (const auto& c : p.coeffs_in(v)) {
    if (c.is_zero()) continue;
    g = poly_gcd(g, c);
    if (g.is_constant()) break;
  }
  return g;
}

inline Poly primitive_part_in(const Poly& p, int v) {
  if (p.is_zero()) return p;
  return p.divided_by(content_in(p, v)).primitive_integer();
}

namespace detail {

/// Primitive remainder sequence; p, q nonzero and nonconstant.
inline Poly gcd_prs(const Poly& p, const Poly& q) {
  const int v = detail::top_variable(p, q);
  if (!p.involves(v)) return poly_gcd(p, content_in(q, v));
  if (!q.involves(v)) return poly_gcd(content_in(p, v), q);

  Poly cp = content_in(p, v), cq = content_in(q, v);
  Poly c = poly_gcd(cp, cq);
  Poly a = p.divided_by(cp).primitive_integer();
  Poly b = q.divided_by(cq).primitive_integer();
  if (a.degree_in(v) < b.degree_in(v)) std::swap(a, b);

  // Primitive remainder sequence.
  Poly g(p.nvars());
  while (true) {
    Poly r = detail::pseudo_remainder(a, b, v);
    if (r.is_zero()) {
      g = b;
      break;
    }
    if (!r.involves(v)) {
      g = Poly::constant(1, p.nvars());
      break;
    }
    a = std::move(b);
    b = primitive_part_in(r, v);
  }
  return (c * g).primitive_integer();
}

inline mpz_class max_norm(const Poly& p) {
  mpz_class m = 0;
  for (const auto& [mono, c] : p.terms()) {
    mpz_class a = abs(c.get_num());
    if (a > m) m = a;
  }
  return m;
}

inline mpz_class integer_content(const Poly& p) {
  mpz_class g = 0;
  for (const auto& [m, c] : p.terms()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
  return g;
}

/// Integer polynomial with variable v set to xi.
inline Poly evaluate_integer(const Poly& p, int v, const mpz_class& xi) {
  std::map<Monomial, std::vector<std::pair<int, const Rational*>>, GrlexLess> groups;
  int deg = 0;
  for (const auto& [m, c] : p.terms()) {
    Monomial rest = m;
    rest.e[v] = 0;
    groups[rest].emplace_back(m.e[v], &c);
    deg = std::max(deg, int(m.e[v]));
  }
  std::vector<mpz_class> pw(deg + 1);
  pw[0] = 1;
  for (int k = 1; k <= deg; ++k) pw[k] = pw[k - 1] * xi;
  Poly out(p.nvars());
  for (const auto& [rest, cs] : groups) {
    mpz_class acc = 0;
    for (const auto& [k, c] : cs) mpz_addmul(acc.get_mpz_t(), c->get_num_mpz_t(), pw[k].get_mpz_t());
    if (acc != 0) out.add_term(rest, Rational(acc));
  }
  return out;
}

/// Inverse of evaluating v at xi: symmetric xi-adic digits of each
/// coefficient become the coefficients of powers of v.
inline Poly xi_adic_lift(const Poly& gamma, const mpz_class& xi, int v) {
  Poly out(gamma.nvars());
  const mpz_class half = xi / 2;
  mpz_class c, r;
  for (const auto& [m, q] : gamma.terms()) {
    c = q.get_num();
    for (std::uint16_t k = 0; c != 0; ++k) {
      mpz_fdiv_qr(c.get_mpz_t(), r.get_mpz_t(), c.get_mpz_t(), xi.get_mpz_t());
      if (r > half) {
        r -= xi;
        ++c;
      }
      if (r != 0) {
        Monomial mk = m;
        mk.e[v] = k;
        out.add_term(mk, Rational(r));
      }
    }
  }
  return out;
}

inline Monomial monomial_content(const Poly& p) {
  Monomial m;
  bool first = true;
  for (const auto& [t, c] : p.terms()) {
    if (first) {
      m = t;
      first = false;
      continue;
    }
    for (int v = 0; v < kMaxVars; ++v) m.e[v] = std::min(m.e[v], t.e[v]);
  }
  return m;
}

/// Univariate polynomial over Z/p, lowest degree first.
using ModPoly = std::vector<std::uint64_t>;

inline void trim(ModPoly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

inline ModPoly modp_gcd(ModPoly a, ModPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    const std::uint64_t inv = modp::pow(b.back(), modp::kPrime - 2);
    while (a.size() >= b.size()) {
      const std::uint64_t q = modp::mul(a.back(), inv);
      const std::size_t shift = a.size() - b.size();
      for (std::size_t i = 0; i < b.size(); ++i)
        a[shift + i] = modp::add(a[shift + i], modp::kPrime - modp::mul(q, b[i]));
      trim(a);
      if (a.empty()) break;
    }
    std::swap(a, b);
  }
  return a;
}

/// Integer polynomial as a univariate polynomial in v over Z/p, the other
/// variables set to `point`.
inline ModPoly modp_restrict(const Poly& f, int v, const std::array<std::uint64_t, kMaxVars>& point) {
  ModPoly out(std::size_t(std::max(f.degree_in(v), 0) + 1), 0);
  for (const auto& [m, c] : f.terms()) {
    std::uint64_t t = modp::reduce(c.get_num());
    for (int w = 0; w < f.nvars(); ++w)
      if (w != v && m.e[w]) t = modp::mul(t, modp::pow(point[w], m.e[w]));
    out[m.e[v]] = modp::add(out[m.e[v]], t);
  }
  return out;
}

/// One-sided coprimality proof for integer polynomials: for each variable,
/// a specialization mod p keeping the degree of `a` whose univariate gcd
/// is 1 bounds the degree of the true gcd in that variable by 0.
inline bool provably_coprime(const Poly& a, const Poly& b) {
  std::uint64_t state = 0x2545F4914F6CDD1Dull;
  auto next = [&] {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state % modp::kPrime;
  };
  for (int v = 0; v < a.nvars(); ++v) {
    if (!a.involves(v) || !b.involves(v)) continue;
    bool shown = false;
    for (int attempt = 0; attempt < 3 && !shown; ++attempt) {
      std::array<std::uint64_t, kMaxVars> point{};
      for (auto& x : point) x = next();
      ModPoly fa = modp_restrict(a, v, point), fb = modp_restrict(b, v, point);
      if (int(fa.size()) - 1 != a.degree_in(v) || fa.back() == 0) continue;
      ModPoly g = modp_gcd(fa, fb);
      shown = g.size() == 1;
    }
    if (!shown) return false;
  }
  return true;
}

/// Heuristic gcd of integer polynomials in variables 0..v (evaluate the top
/// variable at a large integer, recurse, lift, verify by division). The
/// result includes the integer content. nullopt when the heuristic gives up.
inline std::optional<Poly> gcd_heuristic(const Poly& a, const Poly& b, int v) {
  if (a.is_zero() || b.is_zero()) return std::nullopt;
  mpz_class ca = integer_content(a), cb = integer_content(b), g0;
  mpz_gcd(g0.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
  while (v >= 0 && !a.involves(v) && !b.involves(v)) --v;
  if (v < 0) return Poly::constant(Rational(g0), a.nvars());
  Poly A = a * Rational(mpz_class(1), ca);
  Poly B = b * Rational(mpz_class(1), cb);
  mpz_class na = max_norm(A), nb = max_norm(B);
  mpz_class xi = 2 * std::min(na, nb) + 29;
  const int deg = std::max(A.degree_in(v), B.degree_in(v));
  for (int attempt = 0; attempt < 6; ++attempt) {
    if (mpz_sizeinbase(xi.get_mpz_t(), 2) * std::size_t(deg + 1) > (std::size_t{1} << 26))
      return std::nullopt;
    auto gamma = gcd_heuristic(evaluate_integer(A, v, xi), evaluate_integer(B, v, xi), v - 1);
    if (!gamma) return std::nullopt;
    Poly G = xi_adic_lift(*gamma, xi, v);
    if (!G.is_zero()) {
      G = G.primitive_integer();
      if (G.is_constant()) return Poly::constant(Rational(g0), a.nvars());
      if (A.divide_exact(G) && B.divide_exact(G)) return G * Rational(g0);
    }
    xi = xi * 73794 / 27011;
  }
  return std::nullopt;
}

}  // namespace detail

/// Greatest common divisor normalized to coprime integer coefficients with
/// positive leading coefficient. gcd(0, 0) = 0.
inline Poly poly_gcd(const Poly& p, const Poly& q) {
  if (p.nvars() != q.nvars()) throw AlgebraError("gcd of polynomials in different rings");
  if (p.is_zero()) return q.primitive_integer();
  if (q.is_zero()) return p.primitive_integer();
  if (p.is_constant() || q.is_constant()) return Poly::constant(1, p.nvars());
  Poly a = p.primitive_integer(), b = q.primitive_integer();
  // Monomial factors first: exceptional curves are coordinate axes.
  Monomial ma = detail::monomial_content(a), mb = detail::monomial_content(b), mg;
  for (int v = 0; v < kMaxVars; ++v) mg.e[v] = std::min(ma.e[v], mb.e[v]);
  if (ma.degree() > 0) a = a.divided_by_monomial(ma);
  if (mb.degree() > 0) b = b.divided_by_monomial(mb);
  Poly mono = Poly::term(1, mg, p.nvars());
  if (a.is_constant() || b.is_constant()) return mono;
  if (detail::provably_coprime(a, b)) return mono;
  if (auto g = detail::gcd_heuristic(a, b, p.nvars() - 1)) return g->primitive_integer() * mono;
  return detail::gcd_prs(a, b) * mono;
}

/// Product of the distinct irreducible factors of p (up to a scalar).
inline Poly squarefree_part(const Poly& p) {
  if (p.is_zero()) throw AlgebraError("square-free part of the zero polynomial");
  if (p.is_constant()) return Poly::constant(1, p.nvars());
  Poly g = p;
  for (int v = 0; v < p.nvars(); ++v) {
    if (!p.involves(v)) continue;
    g = poly_gcd(g, p.derivative(v));
    if (g.is_constant()) break;
  }
  return p.divided_by(g).primitive_integer();
}

/// Least common multiple, normalized like poly_gcd.
inline Poly poly_lcm(const Poly& p, const Poly& q) {
  if (p.is_zero() || q.is_zero()) return Poly(p.nvars());
  return (p * q.divided_by(poly_gcd(p, q))).primitive_integer();
}

/// Determinant of a square matrix of polynomials by fraction-free
/// (Bareiss) elimination.
inline Poly poly_determinant(std::vector<std::vector<Poly>> m, int nvars) {
  const std::size_t n = m.size();
  if (n == 0) return Poly::constant(1, nvars);
  int sign = 1;
  Poly prev = Poly::constant(1, nvars);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k].is_zero()) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && m[swap_row][k].is_zero()) ++swap_row;
      if (swap_row == n) return Poly(nvars);
      std::swap(m[k], m[swap_row]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Poly t = m[k][k] * m[i][j] - m[i][k] * m[k][j];
        m[i][j] = t.divided_by(prev);
      }
      m[i][k] = Poly(nvars);
    }
    prev = m[k][k];
  }
  Poly d = m[n - 1][n - 1];
  return sign < 0 ? -d : d;
}

/// Sylvester resultant of p and q with respect to variable v.
inline Poly resultant(const Poly& p, const Poly& q, int v) {
  if (p.nvars() != q.nvars()) throw AlgebraError("resultant of polynomials in different rings");
  const int m = p.degree_in(v), n = q.degree_in(v);
  if (p.is_zero() || q.is_zero() || m <= 0 || n <= 0)
    throw AlgebraError("resultant needs positive degree in the eliminated variable");
  const auto pc = p.coeffs_in(v), qc = q.coeffs_in(v);
  const int size = m + n;
  std::vector<std::vector<Poly>> s(size, std::vector<Poly>(size, Poly(p.nvars())));
  for (int row = 0; row < n; ++row)
    for (int k = 0; k <= m; ++k) s[row][row + k] = pc[m - k];
  for (int row = 0; row < m; ++row)
    for (int k = 0; k <= n; ++k) s[n + row][row + k] = qc[n - k];
  return poly_determinant(std::move(s), p.nvars());
}

/// Generators of a polynomial ideal, tagged with the chart they live in.
struct Ideal {
  std::string chart;
  std::vector<Poly> generators;
};

/// Fully reduced normal form of p modulo `basis` (grlex).
inline Poly normal_form(Poly p, const std::vector<Poly>& basis) {
  Poly result(p.nvars());
  while (!p.is_zero()) {
    const Monomial lm = p.leading_monomial();
    const Rational lc = p.leading_coefficient();
    bool reduced = false;
    for (const auto& g : basis) {
      const Monomial& glm = g.leading_monomial();
      if (glm.divides(lm)) {
        p -= g.times_term(lc / g.leading_coefficient(), lm / glm);
        reduced = true;
        break;
      }
    }
    if (!reduced) {
      result.add_term(lm, lc);
      p.add_term(lm, -lc);
    }
  }
  return result;
}

struct GroebnerOptions {
  /// Return {1} as soon as a nonzero constant appears.
  bool stop_on_unit = true;
};

/// Reduced Groebner basis under grlex (Buchberger, product criterion,
/// normal selection strategy). Elements are monic and sorted by leading
/// monomial.
inline std::vector<Poly> groebner_basis(const std::vector<Poly>& generators,
                                        GroebnerOptions opts = {}) {
  int nvars = generators.empty() ? 2 : generators.front().nvars();
  std::vector<Poly> basis;
  for (const auto& g : generators) {
    if (g.nvars() != nvars) throw AlgebraError("generators live in different rings");
    Poly r = normal_form(g, basis);
    if (r.is_zero()) continue;
    if (r.is_constant()) return {Poly::constant(1, nvars)};
    basis.push_back(r.monic());
  }

  struct Pair {
    std::size_t i, j;
    Monomial lcm;
  };
  std::vector<Pair> pairs;
  auto add_pairs_for = [&](std::size_t j) {
    for (std::size_t i = 0; i < j; ++i) {
      const auto& a = basis[i].leading_monomial();
      const auto& b = basis[j].leading_monomial();
      if (Monomial::coprime(a, b)) continue;
      pairs.push_back({i, j, Monomial::lcm(a, b)});
    }
  };
  for (std::size_t j = 1; j < basis.size(); ++j) add_pairs_for(j);

  GrlexLess less;
  while (!pairs.empty()) {
    auto it = std::min_element(pairs.begin(), pairs.end(),
                               [&](const Pair& x, const Pair& y) { return less(x.lcm, y.lcm); });
    Pair pr = *it;
    pairs.erase(it);
    const Poly& f = basis[pr.i];
    const Poly& g = basis[pr.j];
    Poly s = f.times_term(1, pr.lcm / f.leading_monomial()) -
             g.times_term(1, pr.lcm / g.leading_monomial());
    Poly r = normal_form(std::move(s), basis);
    if (r.is_zero()) continue;
    if (r.is_constant() && opts.stop_on_unit) return {Poly::constant(1, nvars)};
    basis.push_back(r.monic());
    add_pairs_for(basis.size() - 1);
  }

  // Minimalize, then interreduce.
  std::vector<Poly> minimal;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    bool redundant = false;
    for (std::size_t j = 0; j < basis.size() && !redundant; ++j) {
      if (i == j) continue;
      const auto& mi = basis[i].leading_monomial();
      const auto& mj = basis[j].leading_monomial();
      if (mj.divides(mi) && (!(mi == mj) || j < i)) redundant = true;
    }
    if (!redundant) minimal.push_back(basis[i]);
  }
  std::vector<Poly> reduced;
  for (std::size_t i = 0; i < minimal.size(); ++i) {
    std::vector<Poly> others;
    for (std::size_t j = 0; j < minimal.size(); ++j)
      if (j != i) others.push_back(minimal[j]);
    reduced.push_back(normal_form(minimal[i], others).monic());
  }
  std::sort(reduced.begin(), reduced.end(), [&](const Poly& a, const Poly& b) {
    return less(a.leading_monomial(), b.leading_monomial());
  });
  return reduced;
}

inline Ideal groebner_basis(const Ideal& ideal) {
  return {ideal.chart, groebner_basis(ideal.generators, {.stop_on_unit = false})};
}

/// True iff the generators have no common zero over the algebraic closure.
inline bool ideal_is_trivial(const std::vector<Poly>& generators) {
  for (const auto& g : generators)
    if (g.is_constant() && !g.is_zero()) return true;
  auto gb = groebner_basis(generators);
  return gb.size() == 1 && gb.front().is_constant() && !gb.front().is_zero();
}

inline bool ideal_is_trivial(const Ideal& ideal) { return ideal_is_trivial(ideal.generators); }

/// Number of standard monomials of a zero-dimensional Groebner basis, or
/// nullopt when the variety is positive dimensional.
inline std::optional<std::size_t> quotient_dimension(const std::vector<Poly>& gb) {
  if (gb.empty()) return std::nullopt;
  const int n = gb.front().nvars();
  std::array<int, kMaxVars> bound{};
  for (int v = 0; v < n; ++v) {
    int best = -1;
    for (const auto& g : gb) {
      const auto& m = g.leading_monomial();
      bool pure = true;
      for (int w = 0; w < n; ++w)
        if (w != v && m.e[w]) pure = false;
      if (pure && (best < 0 || m.e[v] < best)) best = m.e[v];
    }
    if (best < 0) return std::nullopt;
    bound[v] = best;
  }
  std::size_t count = 0;
  Monomial m;
  auto standard = [&](const Monomial& x) {
    for (const auto& g : gb)
      if (g.leading_monomial().divides(x)) return false;
    return true;
  };
  for (int a = 0; a < bound[0]; ++a)
    for (int b = 0; b < (n > 1 ? bound[1] : 1); ++b)
      for (int c = 0; c < (n > 2 ? bound[2] : 1); ++c) {
        m.e = {std::uint16_t(a), std::uint16_t(b), std::uint16_t(c)};
        if (standard(m)) ++count;
      }
  return count;
}

/// For a zero-dimensional ideal with Groebner basis gb: does f vanish on
/// every point of its variety (i.e. is f nilpotent modulo the ideal)?
inline bool vanishes_on_variety(const Poly& f, const std::vector<Poly>& gb) {
  auto dim = quotient_dimension(gb);
  if (!dim) throw AlgebraError("variety is not zero-dimensional");
  Poly h = normal_form(f, gb);
  std::size_t power = 1;
  while (!h.is_zero() && power < *dim) {
    h = normal_form(h * h, gb);
    power *= 2;
  }
  return h.is_zero();
}

}  // namespace tricover
