#pragma once

#include "tricover/surface.hpp"

#include <string>
#include <vector>

namespace tricover::testing {

struct Fixture {
  std::string name;
  SurfacePresentation sp;
  bool infinitely_near = false;
};

inline BlowupCenter center(int level, std::string chart, int a, int b) {
  return {level, std::move(chart), {Rational(a), Rational(b)}};
}

/// {P2, Sigma_0, Sigma_2, Sigma_3} x {0, 1, 2, 3, 5} blowups. Distinct
/// centers on the base chart, except where a center sits on the previous
/// exceptional curve.
inline std::vector<Fixture> fixture_matrix() {
  static const int pts[5][2] = {{0, 0}, {1, 2}, {-1, 1}, {2, -1}, {-2, -3}};
  std::vector<Fixture> out;
  for (int base : {-1, 0, 2, 3}) {
    for (int r : {0, 1, 2, 3, 5}) {
      Fixture f;
      f.sp.base = base < 0 ? MinimalModel::plane() : MinimalModel::hirzebruch(base);
      const std::string chart = base < 0 ? "Pz" : "H00";
      for (int k = 1; k <= r; ++k) f.sp.centers.push_back(center(k, chart, pts[k - 1][0], pts[k - 1][1]));
      // Infinitely near: the second center on E1 (P2, r = 3) or E1 and E2
      // (Sigma_2, r = 3), the last center on E4 (Sigma_0, r = 5).
      if (base == -1 && r == 3) {
        f.sp.centers[1] = center(2, "E1a", 0, 1);
        f.infinitely_near = true;
      }
      if (base == 2 && r == 3) {
        f.sp.centers[1] = center(2, "E1b", 1, 0);
        f.sp.centers[2] = center(3, "E2a", 0, -1);
        f.infinitely_near = true;
      }
      if (base == 0 && r == 5) {
        f.sp.centers[4] = center(5, "E4a", 0, 2);
        f.infinitely_near = true;
      }
      f.name = f.sp.base.to_string() + " r=" + std::to_string(r) + (f.infinitely_near ? " (near)" : "");
      out.push_back(std::move(f));
    }
  }
  return out;
}

}  // namespace tricover::testing
