#pragma once

// Seeded generic-choice engine: draw candidates from a deterministic stream
// until one passes every exact predicate, and log the choice.

#include "tricover/birational.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace tricover {

class ChoiceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ChoiceConfig {
  std::uint64_t seed = 0;
  int max_retries = 64;
  /// Initial bound on random candidate entries; grows with the attempt count.
  int search_radius = 4;
};

template <class T>
struct Predicate {
  std::string name;
  std::function<bool(const T&)> test;
};

/// One logged generic choice. `replay` re-runs every predicate on the
/// chosen value.
struct AuditEntry {
  int level = 0;
  std::string what;
  std::string value;
  std::vector<std::string> predicates;
  int attempts = 0;
  std::function<bool()> replay;
};

/// Homogeneous linear form a*x + b*y + c*z on P^2.
using LinearForm = std::array<Rational, 3>;

inline std::string to_string(const LinearForm& f) {
  return f[0].get_str() + "*x + " + f[1].get_str() + "*y + " + f[2].get_str() + "*z";
}

inline std::string to_string(const Direction& d) { return d.to_string(); }

/// Deterministic candidate stream. Seed 0 walks an integer spiral; other
/// seeds draw uniformly from a box whose radius grows with the attempt.
class CandidateStream {
public:
  CandidateStream(const ChoiceConfig& cfg, std::string_view salt)
      : cfg_(cfg), rng_(cfg.seed * 0x9E3779B97F4A7C15ull ^ fnv1a(salt)) {}

  Rational next_scalar() {
    ++count_;
    if (cfg_.seed == 0) return spiral(count_ - 1);
    return Rational(uniform(radius()));
  }

  Direction next_direction() {
    ++count_;
    if (cfg_.seed == 0) {
      // Slope dx/dy along the spiral, the horizontal direction second.
      if (count_ == 1) return Direction::of(0, 1);
      if (count_ == 2) return Direction::of(1, 0);
      return Direction::of(spiral(count_ - 2), 1);
    }
    // Vertical first for every seed: mixed directions make transition
    // degrees double at each step.
    if (count_ == 1) return Direction::of(0, 1);
    if (count_ == 2) return Direction::of(1, 0);
    int r = radius();
    int a = uniform(r), b = uniform(r);
    if (a == 0 && b == 0) a = 1;
    return Direction::of(a, b);
  }

  LinearForm next_form() {
    ++count_;
    if (cfg_.seed == 0) {
      static const int fixed[3][3] = {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}};
      if (count_ <= 3) {
        const int* f = fixed[count_ - 1];
        return {Rational(f[0]), Rational(f[1]), Rational(f[2])};
      }
      // Forms of growing height after the coordinate lines.
      std::uint64_t k = count_ - 4;
      for (int h = 1;; ++h) {
        std::uint64_t side = 2 * h + 1, total = side * side * side;
        if (k < total) {
          int a = int(k % side) - h, b = int((k / side) % side) - h, c = int(k / side / side) - h;
          if (a == 0 && b == 0 && c == 0) c = 1;
          return {Rational(a), Rational(b), Rational(c)};
        }
        k -= total;
      }
    }
    int r = radius();
    LinearForm f{Rational(uniform(r)), Rational(uniform(r)), Rational(uniform(r))};
    if (f[0] == 0 && f[1] == 0 && f[2] == 0) f[2] = 1;
    return f;
  }

private:
  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    return h;
  }

  /// 0, 1, -1, 2, -2, ...
  static Rational spiral(std::uint64_t k) {
    long m = static_cast<long>((k + 1) / 2);
    return Rational(k % 2 == 1 ? m : -m);
  }

  int radius() const { return cfg_.search_radius + static_cast<int>(count_ / 4); }
  int uniform(int r) { return std::uniform_int_distribution<int>(-r, r)(rng_); }

  ChoiceConfig cfg_;
  std::mt19937_64 rng_;
  std::uint64_t count_ = 0;
};

/// First candidate from `next` passing every predicate; logged to `audit`.
template <class T, class Next>
T choose_generic(const std::string& what, Next&& next, const std::vector<Predicate<T>>& preds,
                 const ChoiceConfig& cfg, std::vector<AuditEntry>& audit, int level) {
  if (cfg.max_retries < 1) throw ChoiceError("max_retries must be at least 1");
  std::vector<int> rejected(preds.size(), 0);
  for (int attempt = 1; attempt <= cfg.max_retries; ++attempt) {
    T candidate = next();
    bool ok = true;
    for (std::size_t i = 0; i < preds.size(); ++i)
      if (!preds[i].test(candidate)) {
        ++rejected[i];
        ok = false;
        break;
      }
    if (!ok) continue;
    AuditEntry e;
    e.level = level;
    e.what = what;
    e.value = to_string(candidate);
    for (const auto& p : preds) e.predicates.push_back(p.name);
    e.attempts = attempt;
    e.replay = [preds, candidate] {
      for (const auto& p : preds)
        if (!p.test(candidate)) return false;
      return true;
    };
    audit.push_back(std::move(e));
    return candidate;
  }
  std::string why;
  for (std::size_t i = 0; i < preds.size(); ++i)
    if (rejected[i]) why += (why.empty() ? "" : ", ") + preds[i].name + " x" + std::to_string(rejected[i]);
  throw ChoiceError("no candidate for " + what + " at level " + std::to_string(level) +
                    " passed all predicates within " + std::to_string(cfg.max_retries) +
                    " attempts (rejections: " + why + ")");
}

}  // namespace tricover
