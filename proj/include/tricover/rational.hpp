#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tricover {

/// Exact rational scalar. mpq_class keeps values canonical (lowest terms,
/// positive denominator) after every arithmetic operation we use.
using Rational = mpq_class;

/// Affine point in a chart's two coordinates.
using Point2 = std::array<Rational, 2>;

class AlgebraError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Parses "3", "-3/7", "+12/4". Decimal points and exponents are rejected.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw AlgebraError("empty rational literal");
  std::size_t start = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  bool seen_slash = false;
  bool digit_before = false, digit_after = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    char c = s[i];
    if (c == '/') {
      if (seen_slash) throw AlgebraError("malformed rational literal '" + s + "'");
      seen_slash = true;
    } else if (c >= '0' && c <= '9') {
      (seen_slash ? digit_after : digit_before) = true;
    } else {
      throw AlgebraError("malformed rational literal '" + s + "'");
    }
  }
  if (!digit_before || (seen_slash && !digit_after))
    throw AlgebraError("malformed rational literal '" + s + "'");
  if (s[0] == '+') s.erase(0, 1);
  Rational r;
  if (r.set_str(s, 10) != 0) throw AlgebraError("malformed rational literal '" + s + "'");
  if (r.get_den() == 0) throw AlgebraError("zero denominator in '" + s + "'");
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline Rational pow_rational(const Rational& a, int e) {
  Rational r = 1;
  for (int i = 0; i < e; ++i) r *= a;
  return r;
}

inline std::string to_string(const Point2& p) {
  return "(" + p[0].get_str() + ", " + p[1].get_str() + ")";
}

/// Arithmetic modulo the Mersenne prime 2^61 - 1. Used only for one-sided
/// fast checks: a nonzero residue proves a nonzero rational value.
namespace modp {

inline constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

inline std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 z = static_cast<unsigned __int128>(a) * b;
  std::uint64_t lo = static_cast<std::uint64_t>(z & kPrime);
  std::uint64_t hi = static_cast<std::uint64_t>(z >> 61);
  std::uint64_t s = lo + hi;
  return s >= kPrime ? s - kPrime : s;
}

inline std::uint64_t add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a + b;
  return s >= kPrime ? s - kPrime : s;
}

inline std::uint64_t pow(std::uint64_t a, std::uint64_t e) {
  std::uint64_t r = 1;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

inline std::uint64_t reduce(const mpz_class& z) {
  mpz_class r = z % mpz_class(static_cast<unsigned long>(kPrime));
  if (r < 0) r += static_cast<unsigned long>(kPrime);
  return r.get_ui();
}

/// False when the denominator vanishes mod p.
inline bool reduce(const Rational& q, std::uint64_t& out) {
  std::uint64_t d = reduce(q.get_den());
  if (d == 0) return false;
  out = mul(reduce(q.get_num()), pow(d, kPrime - 2));
  return true;
}

}  // namespace modp

}  // namespace tricover
