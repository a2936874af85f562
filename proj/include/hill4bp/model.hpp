#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "hill4bp/errors.hpp"
#include "hill4bp/parameters.hpp"

namespace hill4bp {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

/// Point (x, y, z, px, py, pz) of T*(R^3 \ {0}) in the rotating frame.
template <typename Scalar>
using PhaseStateT = Eigen::Matrix<Scalar, 6, 1>;
using PhaseState = PhaseStateT<double>;
using Tangent = PhaseState;

// Component indices into a PhaseState.
enum StateIndex : Eigen::Index { kX = 0, kY, kZ, kPx, kPy, kPz };

/// Below this radius the unregularized model refuses to evaluate.
inline constexpr double kMinRadius = 1e-12;

template <typename Derived>
auto position(const Eigen::MatrixBase<Derived>& s) {
  return s.template head<3>();
}
template <typename Derived>
auto momentum(const Eigen::MatrixBase<Derived>& s) {
  return s.template tail<3>();
}

template <typename Scalar>
PhaseStateT<Scalar> make_state(const Vector3<Scalar>& q, const Vector3<Scalar>& p) {
  PhaseStateT<Scalar> s;
  s << q, p;
  return s;
}

struct SphericalPoint {
  double rho = 0.0;
  double theta = 0.0;  ///< azimuth in [0, 2 pi)
  double phi = 0.0;    ///< polar angle from +z in [0, pi]
};

inline Eigen::Vector3d to_cartesian(const SphericalPoint& sp) {
  const double sin_phi = std::sin(sp.phi);
  return {sp.rho * std::cos(sp.theta) * sin_phi, sp.rho * std::sin(sp.theta) * sin_phi,
          sp.rho * std::cos(sp.phi)};
}

inline SphericalPoint to_spherical(const Eigen::Vector3d& q) {
  SphericalPoint sp;
  sp.rho = q.norm();
  double theta = std::atan2(q.y(), q.x());
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  sp.theta = theta;
  sp.phi = sp.rho > 0.0 ? std::acos(std::clamp(q.z() / sp.rho, -1.0, 1.0)) : 0.0;
  return sp;
}

namespace detail {
template <typename Scalar>
Scalar checked_radius(const Vector3<Scalar>& q) {
  const Scalar r = q.norm();
  if (!(r >= Scalar(kMinRadius))) throw SingularityError("position at (or too close to) the collision singularity");
  return r;
}
}  // namespace detail

/// Effective potential U = -1/r - (lambda2 x^2 + lambda1 y^2 - z^2)/2.
template <typename Scalar>
Scalar effective_potential(const Parameters<Scalar>& p, const Vector3<Scalar>& q) {
  const Scalar r = detail::checked_radius(q);
  return -Scalar(1) / r -
         Scalar(0.5) * (p.lambda2 * q.x() * q.x() + p.lambda1 * q.y() * q.y() - q.z() * q.z());
}

inline double effective_potential_spherical(const ParameterSet& p, const SphericalPoint& sp) {
  if (!(sp.rho >= kMinRadius)) throw SingularityError("spherical radius at the collision singularity");
  const double ct = std::cos(sp.theta), st = std::sin(sp.theta);
  const double cp = std::cos(sp.phi), spp = std::sin(sp.phi);
  const double s2 = spp * spp;
  return -1.0 / sp.rho -
         0.5 * sp.rho * sp.rho * (p.lambda2 * ct * ct * s2 + p.lambda1 * st * st * s2 - cp * cp);
}

template <typename Scalar>
Vector3<Scalar> potential_gradient(const Parameters<Scalar>& p, const Vector3<Scalar>& q) {
  const Scalar r = detail::checked_radius(q);
  const Scalar inv_r3 = Scalar(1) / (r * r * r);
  return {q.x() * (inv_r3 - p.lambda2), q.y() * (inv_r3 - p.lambda1), q.z() * (inv_r3 + Scalar(1))};
}

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> potential_hessian(const Parameters<Scalar>& p, const Vector3<Scalar>& q) {
  const Scalar r = detail::checked_radius(q);
  const Scalar r2 = r * r;
  const Scalar inv_r3 = Scalar(1) / (r2 * r);
  Eigen::Matrix<Scalar, 3, 3> h = inv_r3 * Eigen::Matrix<Scalar, 3, 3>::Identity() -
                                  (Scalar(3) * inv_r3 / r2) * (q * q.transpose());
  h(0, 0) -= p.lambda2;
  h(1, 1) -= p.lambda1;
  h(2, 2) += Scalar(1);
  return h;
}

/// H = |p|^2/2 + px y - py x - 1/r + a x^2 + b y^2 + z^2/2.
template <typename Scalar>
Scalar hamiltonian(const Parameters<Scalar>& p, const PhaseStateT<Scalar>& s) {
  const Vector3<Scalar> q = position(s);
  const Scalar r = detail::checked_radius(q);
  return Scalar(0.5) * momentum(s).squaredNorm() + s[kPx] * s[kY] - s[kPy] * s[kX] - Scalar(1) / r +
         p.a * s[kX] * s[kX] + p.b * s[kY] * s[kY] + Scalar(0.5) * s[kZ] * s[kZ];
}

/// H = ((px + y)^2 + (py - x)^2 + pz^2)/2 + U(x, y, z); equal to hamiltonian().
template <typename Scalar>
Scalar hamiltonian_rotating_form(const Parameters<Scalar>& p, const PhaseStateT<Scalar>& s) {
  const Scalar u = s[kPx] + s[kY];
  const Scalar v = s[kPy] - s[kX];
  return Scalar(0.5) * (u * u + v * v + s[kPz] * s[kPz]) + effective_potential<Scalar>(p, position(s));
}

template <typename Scalar>
Scalar jacobi_constant(const Parameters<Scalar>& p, const PhaseStateT<Scalar>& s) {
  return Scalar(-2) * hamiltonian(p, s);
}

/// Hamiltonian vector field (xdot, ydot, zdot, pxdot, pydot, pzdot).
template <typename Scalar>
PhaseStateT<Scalar> vector_field(const Parameters<Scalar>& p, const PhaseStateT<Scalar>& s) {
  const Vector3<Scalar> q = position(s);
  const Scalar r = detail::checked_radius(q);
  const Scalar inv_r3 = Scalar(1) / (r * r * r);
  PhaseStateT<Scalar> f;
  f[kX] = s[kPx] + s[kY];
  f[kY] = s[kPy] - s[kX];
  f[kZ] = s[kPz];
  f[kPx] = s[kPy] - (Scalar(2) * p.a + inv_r3) * s[kX];
  f[kPy] = -s[kPx] - (Scalar(2) * p.b + inv_r3) * s[kY];
  f[kPz] = -(Scalar(1) + inv_r3) * s[kZ];
  return f;
}

/// Eigenvalues (ascending) of the x,y block of the tidal quadratic form before
/// the diagonalizing rotation:
///   [[ 1/8, -(3 sqrt3/8)(1 - 2 mu)], [-(3 sqrt3/8)(1 - 2 mu), -5/8 ]].
/// They coincide with {a, b} from derive_parameters.
inline std::pair<double, double> rotation_diagonalization_check(double mu) {
  if (!(mu >= 0.0 && mu <= 0.5)) throw DomainError("mass ratio mu outside [0, 1/2]");
  const double off = -(3.0 * std::numbers::sqrt3 / 8.0) * (1.0 - 2.0 * mu);
  Eigen::Matrix2d m;
  m << 1.0 / 8.0, off, off, -5.0 / 8.0;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(m, Eigen::EigenvaluesOnly);
  const Eigen::Vector2d ev = solver.eigenvalues();
  return {ev[0], ev[1]};
}

}  // namespace hill4bp
