#pragma once

#include <cmath>
#include <vector>

#include "rydeit/config.hpp"
#include "rydeit/constants.hpp"

namespace rydeit::testing {

inline double mhz(double f) { return angular_from_mhz(f); }

/// Operating point used throughout the suite: the library's default run
/// configuration.
struct Golden {
  RunConfig config;
  EITParams eit = config.to_eit();
  MediumGeometry geom = config.to_geometry();
  BlockadeParams blk = config.to_blockade();
  double delta_s = config.operating_delta_s();
};

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

inline double relative_error(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace rydeit::testing
