#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "pseudomul/xreal.hpp"

namespace pseudomul {

/// Sampling plan for sweeps over [0, inf]: n_points deterministic interior
/// points (decompactified uniform partition of (0, 1)), n_random seeded
/// extras, plus the endpoints 0 and inf.
struct GridSpec {
  int n_points = 33;
  int n_random = 32;
  std::uint64_t seed = 42;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Sorted, duplicate-free sample set of size n_points + n_random + 2.
/// Collisions in the random draw are re-drawn so the size is exact.
inline std::vector<XReal> build_grid(const GridSpec& spec) {
  std::vector<XReal> pts;
  pts.reserve(static_cast<std::size_t>(spec.n_points + spec.n_random) + 2);
  pts.push_back(XReal::zero());
  pts.push_back(XReal::infinity());
  for (int i = 1; i <= spec.n_points; ++i) {
    double u = static_cast<double>(i) / (spec.n_points + 1);
    pts.push_back(decompactify(u));
  }

  std::mt19937_64 gen(spec.seed);
  auto unit = [&gen]() {
    // 53-bit mantissa draw; avoids the unspecified stdlib distributions.
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
  };
  const std::size_t target =
      static_cast<std::size_t>(spec.n_points + spec.n_random) + 2;
  while (pts.size() < target) {
    double u = unit();
    if (u <= 0.0) continue;
    XReal t = decompactify(u);
    if (std::find(pts.begin(), pts.end(), t) == pts.end()) pts.push_back(t);
  }

  std::sort(pts.begin(), pts.end());
  return pts;
}

}  // namespace pseudomul
