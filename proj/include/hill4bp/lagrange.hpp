#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "hill4bp/model.hpp"

namespace hill4bp {

struct LagrangePoint {
  std::string name;
  Eigen::Vector3d position;
};

/// L1 = (lambda2^{-1/3}, 0, 0), L2 = -L1, L3 = (0, lambda1^{-1/3}, 0), L4 = -L3.
/// index is 1..4; L3/L4 throw DegenerateError when lambda1 = 0 (mu = 0).
Eigen::Vector3d lagrange_point(const ParameterSet& p, int index);

/// All Lagrange points that exist for p: four for mu in (0, 1/2], L1/L2 at mu = 0.
std::vector<LagrangePoint> lagrange_points(const ParameterSet& p);

/// Phase-space critical point (x, y, 0, -y, x, 0) over a planar critical point
/// of U. Throws DomainError if z != 0.
PhaseState lift_to_phase(const Eigen::Vector3d& position);

struct CriticalValues {
  double h12 = 0.0;               ///< H(L1) = H(L2) = -3/2 lambda2^{1/3}
  std::optional<double> h34;      ///< H(L3) = H(L4) = -3/2 lambda1^{1/3}; absent at mu = 0
};

CriticalValues critical_values(const ParameterSet& p);

struct NewtonOutcome {
  bool converged = false;
  Eigen::Vector2d point = Eigen::Vector2d::Zero();
  int iterations = 0;
  double gradient_norm = 0.0;
  std::string failure;
};

/// Damped Newton on the planar gradient of U with the analytic Hessian: at most
/// 50 iterations, step halved while |grad U| increases. Escapes beyond
/// |q| > 100 or into r < 1e-6 are reported as failures.
NewtonOutcome newton_critical_point(const ParameterSet& p, const Eigen::Vector2d& seed);

struct SeedGrid {
  int n = 40;                ///< seeds per axis
  double half_width = 2.0;   ///< seeds cover [-half_width, half_width]^2
  double exclusion = 0.05;   ///< seeds with |q| < exclusion are skipped
};

struct NumericCriticalPoints {
  std::vector<Eigen::Vector2d> points;  ///< distinct limits, sorted by (x, y)
  std::size_t n_seeds = 0;
  std::size_t n_converged = 0;
  std::size_t n_failed = 0;
};

/// Independent oracle for lagrange_points: Newton from every seed of the grid,
/// limits merged within 1e-7.
NumericCriticalPoints find_critical_points_numeric(const ParameterSet& p, const SeedGrid& grid = {});

}  // namespace hill4bp
