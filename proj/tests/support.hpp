#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "hill4bp/model.hpp"

namespace testing {

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

/// Random phase state with |q| in [0.1, 2] and |p| <= 2.
inline hill4bp::PhaseState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  hill4bp::PhaseState s;
  do {
    for (int i = 0; i < 6; ++i) s[i] = u(rng);
  } while (s.head<3>().norm() < 0.1);
  return s;
}

/// Central difference of f: R^n -> R at x along coordinate i.
template <typename F, typename V>
double partial(const F& f, V x, int i, double h = 1e-6) {
  V xp = x, xm = x;
  xp[i] += h;
  xm[i] -= h;
  return (f(xp) - f(xm)) / (2.0 * h);
}

}  // namespace testing
