#include "hill4bp/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "hill4bp/runge_kutta.hpp"

namespace hill4bp {

namespace {

using State9 = Eigen::Matrix<double, 9, 1>;

constexpr double kQDriftLimit = 1e-6;
constexpr double kShootingResidual = 1e-9;
constexpr int kShootingIterations = 30;
constexpr double kShootingMaxTime = 100.0;

// Rotating-frame field that signals a collision with NaN instead of throwing,
// so the step controller simply rejects the trial step.
struct PhysicalRhs {
  const ParameterSet& p;
  PhaseState operator()(double, const PhaseState& s) const {
    if (!(position(s).norm() >= kMinRadius)) return PhaseState::Constant(std::numeric_limits<double>::quiet_NaN());
    return vector_field(p, s);
  }
};

void check_tolerance(double tol) {
  if (!(tol >= 1e-13 && tol <= 1e-6)) throw DomainError("integration tolerance must lie in [1e-13, 1e-6]");
}

RegularizedState unpack(const State9& y) {
  RegularizedState r;
  r.xi = y.head<4>();
  r.eta = y.segment<4>(4);
  return r;
}

// Which planar reflection a spatial reversor induces on Fix(sigma).
enum class ReversorAxis { kX, kY };

ReversorAxis reversor_axis(const Involution& reversor) {
  if (reversor.kind != SymplecticKind::kAntiSymplectic && classify_symplectic<6>(reversor.matrix) !=
                                                             SymplecticKind::kAntiSymplectic)
    throw DomainError("shooting requires an anti-symplectic reversor");
  const PlanarInvolution planar = restrict_to_planar(reversor);
  if (planar.matrix == planar_involution("rho_x").matrix) return ReversorAxis::kX;
  if (planar.matrix == planar_involution("rho_y").matrix) return ReversorAxis::kY;
  throw DomainError("reversor does not restrict to a planar axis reflection");
}

// Momentum on Fix(reversor) with H = c: solves for py (x-axis) or px (y-axis)
// along the branch nearest `hint`.
PhaseState fix_state(const ParameterSet& p, double c, ReversorAxis axis, double u, double hint) {
  if (!(std::abs(u) >= kMinRadius)) throw SingularityError("shooting position at the collision");
  const double stiffness = axis == ReversorAxis::kX ? p.a : p.b;
  const double offset = axis == ReversorAxis::kX ? u : -u;
  const double disc = u * u - 2.0 * (stiffness * u * u - 1.0 / std::abs(u) - c);
  if (disc < 0.0) throw NonConvergence("shooting left the energy surface: no real momentum on H = c");
  const double root = std::sqrt(disc);
  const double m = std::abs(offset - root - hint) <= std::abs(offset + root - hint) ? offset - root : offset + root;
  PhaseState s = PhaseState::Zero();
  if (axis == ReversorAxis::kX) {
    s[kX] = u;
    s[kPy] = m;
  } else {
    s[kY] = u;
    s[kPx] = m;
  }
  return s;
}

struct HalfReturn {
  double time = 0.0;
  PhaseState state;
};

// First transversal return to the reversor's section.
HalfReturn half_period_return(const ParameterSet& p, const PhaseState& s0, ReversorAxis axis, double tol) {
  const PhysicalRhs rhs{p};
  const Eigen::Index coord = axis == ReversorAxis::kX ? kY : kX;
  StepControl ctl;
  ctl.tol = tol;
  PhaseState y = s0;
  bool found = false;
  double t_lo = 0.0, h_cross = 0.0;
  PhaseState y_lo;
  integrate_adaptive<6>(
      rhs, 0.0, y, kShootingMaxTime, ctl, {kShootingMaxTime},
      [&](double t_prev, const PhaseState& y_prev, double t_now, PhaseState& y_now) {
        if (position(y_now).norm() < kCollisionRadius) throw NonConvergence("shooting orbit collided");
        if (y_prev[coord] * y_now[coord] < 0.0) {
          found = true;
          h_cross = t_now - t_prev;
          t_lo = t_prev;
          y_lo = y_prev;
          return false;
        }
        return true;
      },
      [](double, const PhaseState&) {});
  if (!found) throw NonConvergence("no return to the symmetry section");

  // Bisection over single steps from the start of the accepted crossing step,
  // whose length already met the error tolerance.
  const double side = y_lo[coord];
  const PhaseState k1 = rhs(t_lo, y_lo);
  double lo = 0.0, hi = h_cross;
  PhaseState z = y_lo;
  for (int i = 0; i < 200 && hi - lo > 1e-16 * std::max(1.0, t_lo); ++i) {
    const double mid = 0.5 * (lo + hi);
    PhaseState trial;
    dop853_step<6>(rhs, t_lo, y_lo, k1, mid, tol, trial);
    (trial[coord] * side > 0.0 ? lo : hi) = mid;
  }
  const double t_final = t_lo + 0.5 * (lo + hi);
  dop853_step<6>(rhs, t_lo, y_lo, k1, t_final - t_lo, tol, z);
  return {t_final, z};
}

}  // namespace

std::string to_string(FlowStatus status) {
  return status == FlowStatus::kCompleted ? "completed" : "collision_stop";
}

Trajectory integrate_physical(const ParameterSet& p, const PhaseState& s0, double t_final, double tol,
                              const std::vector<double>& outputs) {
  check_tolerance(tol);
  detail::checked_radius<double>(position(s0));
  const PhysicalRhs rhs{p};
  StepControl ctl;
  ctl.tol = tol;
  Trajectory out;
  const double h0 = hamiltonian(p, s0);
  out.min_radius = position(s0).norm();
  PhaseState y = s0;
  integrate_adaptive<6>(
      rhs, 0.0, y, t_final, ctl, outputs,
      [&](double, const PhaseState&, double, PhaseState& y_now) {
        ++out.n_steps;
        const double r = position(y_now).norm();
        out.min_radius = std::min(out.min_radius, r);
        if (r < kCollisionRadius) {
          out.status = FlowStatus::kCollisionStop;
          return false;
        }
        out.max_energy_drift = std::max(out.max_energy_drift, std::abs(hamiltonian(p, y_now) - h0));
        return true;
      },
      [&](double t, const PhaseState& s) {
        out.t.push_back(t);
        out.states.push_back(s);
        out.energy.push_back(position(s).norm() >= kMinRadius ? hamiltonian(p, s)
                                                              : std::numeric_limits<double>::quiet_NaN());
      });
  return out;
}

Eigen::Matrix<double, 9, 1> regularized_vector_field(const ParameterSet& p, double c, const State9& y) {
  const RegularizedState r = unpack(y);
  const auto [q_xi, q_eta] = q_gradient(p, c, r);
  const double xi_qeta = r.xi.dot(q_eta);
  State9 f;
  f.head<4>() = q_eta - r.xi * xi_qeta;
  f.segment<4>(4) = -q_xi - r.xi * (r.eta.dot(q_eta) - r.xi.dot(q_xi)) + r.eta * xi_qeta;
  f[8] = r.eta.norm() * (1.0 - r.xi[0]);
  return f;
}

RegularizedTrajectory integrate_regularized(const ParameterSet& p, double c, const RegularizedState& r0,
                                            double s_final, double tol, const std::vector<double>& outputs) {
  check_tolerance(tol);
  if (!(std::abs(q_hamiltonian(p, c, r0) - 0.5) <= 1e-10)) throw DomainError("initial state must satisfy Q = 1/2");
  if (!(r0.constraint_error() <= 1e-10)) throw DomainError("initial state must lie on T*S^3");
  const auto rhs = [&](double, const State9& y) { return regularized_vector_field(p, c, y); };
  StepControl ctl;
  ctl.tol = tol;
  RegularizedTrajectory out;
  out.min_pole_distance = 1.0 - r0.xi[0];
  State9 y;
  y << r0.xi, r0.eta, 0.0;
  integrate_adaptive<9>(
      rhs, 0.0, y, s_final, ctl, outputs,
      [&](double, const State9&, double, State9& y_now) {
        ++out.n_steps;
        RegularizedState r = unpack(y_now);
        out.max_constraint_error = std::max(out.max_constraint_error, r.constraint_error());
        r.project();
        y_now.head<4>() = r.xi;
        y_now.segment<4>(4) = r.eta;
        out.min_pole_distance = std::min(out.min_pole_distance, 1.0 - r.xi[0]);
        const double drift = std::abs(q_hamiltonian(p, c, r) - 0.5);
        if (drift > kQDriftLimit) throw DriftError("Q left the level 1/2 by more than 1e-6");
        out.max_q_drift = std::max(out.max_q_drift, drift);
        return true;
      },
      [&](double s, const State9& y_now) {
        const RegularizedState r = unpack(y_now);
        out.s.push_back(s);
        out.t.push_back(y_now[8]);
        out.states.push_back(r);
        out.q.push_back(q_hamiltonian(p, c, r));
      });
  return out;
}

ShootingResult symmetric_shooting(const ParameterSet& p, double c, const Involution& reversor,
                                  const PhaseState& guess, double tol) {
  check_tolerance(tol);
  const ReversorAxis axis = reversor_axis(reversor);
  const bool on_x = axis == ReversorAxis::kX;
  const double off_fix = on_x ? std::max(std::abs(guess[kY]), std::abs(guess[kPx]))
                              : std::max(std::abs(guess[kX]), std::abs(guess[kPy]));
  if (off_fix > 1e-8 || std::abs(guess[kZ]) > 0.0 || std::abs(guess[kPz]) > 0.0)
    throw DomainError("shooting guess must lie on the planar fixed set of the reversor");
  const Eigen::Index u_index = on_x ? kX : kY;
  const Eigen::Index m_index = on_x ? kPy : kPx;
  const Eigen::Index r_index = on_x ? kPx : kPy;  // residual component at the return

  double u = guess[u_index];
  double hint = guess[m_index];
  auto residual = [&](double uu, PhaseState& start, HalfReturn& ret) {
    start = fix_state(p, c, axis, uu, hint);
    ret = half_period_return(p, start, axis, tol);
    return ret.state[r_index];
  };

  PhaseState start;
  HalfReturn ret;
  for (int it = 1; it <= kShootingIterations; ++it) {
    const double f = residual(u, start, ret);
    if (std::abs(f) < kShootingResidual) {
      ShootingResult out;
      out.initial = start;
      out.period = 2.0 * ret.time;
      out.residual = std::abs(f);
      out.energy_error = std::abs(hamiltonian(p, start) - c);
      out.iterations = it;
      return out;
    }
    hint = start[m_index];
    const double du = 1e-7 * std::max(1.0, std::abs(u));
    PhaseState s_plus, s_minus;
    HalfReturn r_plus, r_minus;
    const double slope = (residual(u + du, s_plus, r_plus) - residual(u - du, s_minus, r_minus)) / (2.0 * du);
    if (!(std::abs(slope) > 0.0)) throw NonConvergence("shooting derivative vanished");
    double step = -f / slope;
    // Keep the iterate on the same side of the collision.
    while (std::abs(step) > 0.5 * std::abs(u)) step *= 0.5;
    u += step;
  }
  throw NonConvergence("symmetric shooting did not converge in 30 iterations");
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "t,x,y,z,px,py,pz,H\n";
  char buf[512];
  for (std::size_t i = 0; i < trajectory.t.size(); ++i) {
    const auto& s = trajectory.states[i];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", trajectory.t[i], s[0], s[1],
                  s[2], s[3], s[4], s[5], trajectory.energy[i]);
    out << buf;
  }
}

void write_regularized_trajectory_csv(std::ostream& out, const RegularizedTrajectory& trajectory) {
  out << "s,xi0,xi1,xi2,xi3,eta0,eta1,eta2,eta3,Q\n";
  char buf[512];
  for (std::size_t i = 0; i < trajectory.s.size(); ++i) {
    const auto& x = trajectory.states[i].xi;
    const auto& e = trajectory.states[i].eta;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  trajectory.s[i], x[0], x[1], x[2], x[3], e[0], e[1], e[2], e[3], trajectory.q[i]);
    out << buf;
  }
}

}  // namespace hill4bp
