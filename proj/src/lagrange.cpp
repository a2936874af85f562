#include "hill4bp/lagrange.hpp"

#include <algorithm>
#include <cmath>

#include "hill4bp/parallel.hpp"

namespace hill4bp {

namespace {

Eigen::Vector2d planar_gradient(const ParameterSet& p, const Eigen::Vector2d& q) {
  return potential_gradient<double>(p, Eigen::Vector3d(q.x(), q.y(), 0.0)).head<2>();
}

Eigen::Matrix2d planar_hessian(const ParameterSet& p, const Eigen::Vector2d& q) {
  return potential_hessian<double>(p, Eigen::Vector3d(q.x(), q.y(), 0.0)).topLeftCorner<2, 2>();
}

constexpr int kMaxIterations = 50;
constexpr double kGradientTolerance = 1e-11;
constexpr double kEscapeRadius = 100.0;
constexpr double kCollisionRadius = 1e-6;

}  // namespace

Eigen::Vector3d lagrange_point(const ParameterSet& p, int index) {
  switch (index) {
    case 1:
    case 2: {
      const double x = 1.0 / std::cbrt(p.lambda2);
      return {index == 1 ? x : -x, 0.0, 0.0};
    }
    case 3:
    case 4: {
      if (p.lambda1 <= 0.0) throw DegenerateError("L3/L4 do not exist for mu = 0 (lambda1 = 0)");
      const double y = 1.0 / std::cbrt(p.lambda1);
      return {0.0, index == 3 ? y : -y, 0.0};
    }
    default:
      throw DomainError("Lagrange point index must be 1..4");
  }
}

std::vector<LagrangePoint> lagrange_points(const ParameterSet& p) {
  std::vector<LagrangePoint> out{{"L1", lagrange_point(p, 1)}, {"L2", lagrange_point(p, 2)}};
  if (p.lambda1 > 0.0) {
    out.push_back({"L3", lagrange_point(p, 3)});
    out.push_back({"L4", lagrange_point(p, 4)});
  }
  return out;
}

PhaseState lift_to_phase(const Eigen::Vector3d& q) {
  if (q.z() != 0.0) throw DomainError("critical points of U lie in the plane z = 0");
  PhaseState s;
  s << q.x(), q.y(), 0.0, -q.y(), q.x(), 0.0;
  return s;
}

CriticalValues critical_values(const ParameterSet& p) {
  CriticalValues cv;
  cv.h12 = -1.5 * std::cbrt(p.lambda2);
  if (p.lambda1 > 0.0) cv.h34 = -1.5 * std::cbrt(p.lambda1);
  return cv;
}

NewtonOutcome newton_critical_point(const ParameterSet& p, const Eigen::Vector2d& seed) {
  NewtonOutcome out;
  Eigen::Vector2d q = seed;
  Eigen::Vector2d g = planar_gradient(p, q);
  for (out.iterations = 0; out.iterations < kMaxIterations; ++out.iterations) {
    out.gradient_norm = g.norm();
    if (out.gradient_norm < kGradientTolerance) {
      out.converged = true;
      out.point = q;
      return out;
    }
    const Eigen::FullPivLU<Eigen::Matrix2d> lu(planar_hessian(p, q));
    if (!lu.isInvertible()) {
      out.failure = "singular Hessian";
      return out;
    }
    const Eigen::Vector2d step = lu.solve(-g);
    double scale = 1.0;
    Eigen::Vector2d trial;
    Eigen::Vector2d g_trial;
    for (int halvings = 0;; ++halvings) {
      trial = q + scale * step;
      if (trial.norm() < kCollisionRadius) {
        out.failure = "fell into the collision singularity";
        return out;
      }
      g_trial = planar_gradient(p, trial);
      if (g_trial.norm() <= g.norm() || halvings == 30) break;
      scale *= 0.5;
    }
    q = trial;
    g = g_trial;
    if (q.norm() > kEscapeRadius) {
      out.failure = "escaped to infinity";
      return out;
    }
  }
  out.gradient_norm = g.norm();
  if (out.gradient_norm < kGradientTolerance) {
    out.converged = true;
    out.point = q;
  } else {
    out.failure = "iteration limit";
  }
  return out;
}

NumericCriticalPoints find_critical_points_numeric(const ParameterSet& p, const SeedGrid& grid) {
  std::vector<Eigen::Vector2d> seeds;
  for (int i = 0; i < grid.n; ++i) {
    for (int j = 0; j < grid.n; ++j) {
      const double x = -grid.half_width + 2.0 * grid.half_width * (i + 0.5) / grid.n;
      const double y = -grid.half_width + 2.0 * grid.half_width * (j + 0.5) / grid.n;
      if (std::hypot(x, y) >= grid.exclusion) seeds.emplace_back(x, y);
    }
  }
  std::vector<NewtonOutcome> outcomes(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) { outcomes[i] = newton_critical_point(p, seeds[i]); });

  NumericCriticalPoints result;
  result.n_seeds = seeds.size();
  for (const auto& o : outcomes) {
    if (!o.converged) {
      ++result.n_failed;
      continue;
    }
    ++result.n_converged;
    const bool known = std::any_of(result.points.begin(), result.points.end(),
                                   [&](const Eigen::Vector2d& q) { return (q - o.point).norm() < 1e-7; });
    if (!known) result.points.push_back(o.point);
  }
  std::sort(result.points.begin(), result.points.end(), [](const Eigen::Vector2d& l, const Eigen::Vector2d& r) {
    return l.x() != r.x() ? l.x() < r.x() : l.y() < r.y();
  });
  return result;
}

}  // namespace hill4bp
