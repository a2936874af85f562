#pragma once

#include <random>

#include "hill4bp/model.hpp"

namespace hill4bp::detail {

/// Uniform position in [-half_width, half_width]^3 with |q| >= min_radius, and
/// uniform momentum in the same box.
inline PhaseState random_state(std::mt19937_64& rng, double half_width = 2.0, double min_radius = 0.05) {
  std::uniform_real_distribution<double> u(-half_width, half_width);
  PhaseState s;
  do {
    for (Eigen::Index i = 0; i < 3; ++i) s[i] = u(rng);
  } while (position(s).norm() < min_radius);
  for (Eigen::Index i = 3; i < 6; ++i) s[i] = u(rng);
  return s;
}

inline PhaseState random_planar_state(std::mt19937_64& rng, double half_width = 2.0, double min_radius = 0.05) {
  PhaseState s = random_state(rng, half_width, 0.0);
  s[kZ] = 0.0;
  s[kPz] = 0.0;
  while (position(s).norm() < min_radius) {
    std::uniform_real_distribution<double> u(-half_width, half_width);
    s[kX] = u(rng);
    s[kY] = u(rng);
  }
  return s;
}

/// Uniform point on the unit sphere of dimension N-1 from N standard normals.
template <int N>
Eigen::Matrix<double, N, 1> random_unit_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Matrix<double, N, 1> v;
  double n2 = 0.0;
  do {
    for (int i = 0; i < N; ++i) v[i] = normal(rng);
    n2 = v.squaredNorm();
  } while (n2 < 1e-24);
  return v / std::sqrt(n2);
}

}  // namespace hill4bp::detail
