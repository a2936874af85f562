#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "hill4bp/model.hpp"
#include "hill4bp/regularization.hpp"
#include "hill4bp/symmetry.hpp"

namespace hill4bp {

/// Integration halts when the physical radius drops below this.
inline constexpr double kCollisionRadius = 1e-6;

enum class FlowStatus { kCompleted, kCollisionStop };

std::string to_string(FlowStatus status);

struct Trajectory {
  std::vector<double> t;
  std::vector<PhaseState> states;
  std::vector<double> energy;
  double max_energy_drift = 0.0;  ///< max |H(t) - H(0)| over every accepted step
  double min_radius = 0.0;        ///< over every accepted step
  FlowStatus status = FlowStatus::kCompleted;
  std::size_t n_steps = 0;
};

/// Adaptive Dormand-Prince 8(5,3) integration of the rotating-frame equations.
/// t_final may be negative. Samples are recorded at `outputs` (sorted in the
/// direction of integration) or, if empty, at every accepted step. A collision
/// (r < 1e-6) ends the run early with status kCollisionStop and the partial
/// trajectory. Requires tol in [1e-13, 1e-6]; throws StepFailure on underflow.
Trajectory integrate_physical(const ParameterSet& p, const PhaseState& s0, double t_final, double tol,
                              const std::vector<double>& outputs = {});

/// Right-hand side of the constrained flow of Q on T*S^3, augmented by the
/// physical time t with dt/ds = |eta| (1 - xi0). State layout (xi, eta, t).
Eigen::Matrix<double, 9, 1> regularized_vector_field(const ParameterSet& p, double c,
                                                     const Eigen::Matrix<double, 9, 1>& y);

struct RegularizedTrajectory {
  std::vector<double> s;
  std::vector<double> t;  ///< physical time along the orbit
  std::vector<RegularizedState> states;
  std::vector<double> q;
  double max_q_drift = 0.0;          ///< max |Q - 1/2| over every accepted step
  double min_pole_distance = 0.0;    ///< min of 1 - xi0 over every accepted step
  double max_constraint_error = 0.0; ///< before projection, over every accepted step
  std::size_t n_steps = 0;
};

/// Integrates the flow of Q from r0 (with Q(r0) = 1/2 to 1e-10) over
/// s in [0, s_final], projecting onto |xi| = 1, <xi, eta> = 0 after every
/// accepted step. Throws DomainError if Q(r0) is off the level and DriftError
/// if |Q - 1/2| exceeds 1e-6.
RegularizedTrajectory integrate_regularized(const ParameterSet& p, double c, const RegularizedState& r0,
                                            double s_final, double tol, const std::vector<double>& outputs = {});

struct ShootingResult {
  PhaseState initial;       ///< on Fix(reversor) and on H = c
  double period = 0.0;      ///< twice the half-period return time
  double residual = 0.0;    ///< |return residual| at the half period
  double energy_error = 0.0;
  int iterations = 0;
};

/// Newton shooting for a periodic orbit symmetric under a planar reversor
/// (rho1 / rho2 acting as reflection in the x-axis, rho3 / rho4 in the
/// y-axis). The guess must lie on the fixed set of the reversor with z = pz = 0;
/// its momentum is re-solved on H = c along the branch nearest the guess.
/// Converges when the return residual is below 1e-9; throws NonConvergence
/// after 30 iterations.
ShootingResult symmetric_shooting(const ParameterSet& p, double c, const Involution& reversor,
                                  const PhaseState& guess, double tol = 1e-12);

/// CSV `t,x,y,z,px,py,pz,H`.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
/// CSV `s,xi0,xi1,xi2,xi3,eta0,eta1,eta2,eta3,Q`.
void write_regularized_trajectory_csv(std::ostream& out, const RegularizedTrajectory& trajectory);

}  // namespace hill4bp
