#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "hill4bp/model.hpp"
#include "hill4bp/scan_report.hpp"

namespace hill4bp {

/// Point of T*S^3 in Moser's picture: xi on the unit sphere of R^4 and a
/// tangent (co)vector eta with <xi, eta> = 0. The North pole xi = (1, 0, 0, 0)
/// is the collision fiber.
struct RegularizedState {
  Eigen::Vector4d xi = Eigen::Vector4d::UnitX();
  Eigen::Vector4d eta = Eigen::Vector4d::Zero();

  /// Renormalizes xi and removes the xi-component of eta.
  void project();
  /// max(| |xi| - 1 |, |<xi, eta>|).
  double constraint_error() const;
};

/// (X, P) -> (-P, X). Symplectic; switch_map(switch_map(s)) = -s.
PhaseState switch_map(const PhaseState& s);
/// Inverse of switch_map: (X, P) -> (P, -X).
PhaseState unswitch_map(const PhaseState& s);
/// 6x6 matrix of switch_map.
Eigen::Matrix<double, 6, 6> switch_matrix();

/// K_c = |X| (H(X, P) - c).
double k_c(const ParameterSet& p, double c, const PhaseState& s);

/// Stereographic projection from the North pole, lifted to cotangent bundles:
///   x_k = xi_k / (1 - xi0),  p_k = eta_k (1 - xi0) + xi_k eta0.
/// Returns the switched-picture state. Throws NorthPoleError if 1 - xi0 < 1e-14.
PhaseState sphere_to_stereo(const RegularizedState& r);

/// Inverse of sphere_to_stereo (defined everywhere).
RegularizedState stereo_to_sphere(const PhaseState& switched);

/// Composite chart: physical state -> switch -> stereographic inverse.
RegularizedState regularize(const PhaseState& physical);
/// Inverse composite: stereographic -> unswitch. Throws NorthPoleError at collision.
PhaseState deregularize(const RegularizedState& r);

/// g_k = eta_k (1 - xi0) + xi_k eta0, k = 1, 2, 3.
Eigen::Vector3d g_components(const RegularizedState& r);

/// f = 1 + (eta1 xi2 - eta2 xi1)(1 - xi0) + (a g1^2 + b g2^2 + g3^2/2)(1 - xi0) - (c + 1/2)(1 - xi0).
double f_factor(const ParameterSet& p, double c, const RegularizedState& r);

/// K~_c = |eta| f - 1.
double k_tilde(const ParameterSet& p, double c, const RegularizedState& r);

/// Q = |eta|^2 f^2 / 2 = (K~_c + 1)^2 / 2.
double q_hamiltonian(const ParameterSet& p, double c, const RegularizedState& r);

/// Gradients (dQ/dxi, dQ/deta) of Q as a function on R^4 x R^4.
std::pair<Eigen::Vector4d, Eigen::Vector4d> q_gradient(const ParameterSet& p, double c, const RegularizedState& r);

/// dQ(X) for the fiber-radial Liouville field X = sum eta_i d/deta_i:
///   2Q + |eta|^2 f (1 - xi0)(eta1 xi2 - eta2 xi1 + 2a g1^2 + 2b g2^2 + g3^2).
double natural_liouville_pairing(const ParameterSet& p, double c, const RegularizedState& r);

/// Smallest positive root t of t f(xi, t eta_hat) = 1 for a unit fiber
/// direction eta_hat, found by a sign-change scan of [1e-6, 10] followed by
/// bisection and Newton polish. Throws RootFindError if there is none.
double solve_fiber_radius(const ParameterSet& p, double c, const Eigen::Vector4d& xi, const Eigen::Vector4d& eta_hat);

/// Points of Q^{-1}(1/2) with 1 - xi0 in (0, eps) and |eta| (1 - xi0) < eps,
/// i.e. physical distance |P| < eps to the collision. Deterministic per seed.
std::vector<RegularizedState> sample_q_level_near_collision(const ParameterSet& p, double c, double eps,
                                                             std::size_t n, std::uint64_t seed);

struct BoundConstant {
  double a_constant = 0.0;  ///< A: sampled max of |2a g1^2 + 2b g2^2 + g3^2|, inflated by 10%
  double eps_max = 0.0;     ///< (1/2) / (1 + A)
  double region_delta = 0.0;
  std::size_t n_samples = 0;
};

/// Estimates A over Q^{-1}(1/2) restricted to the cap 1 - xi0 < region_delta.
BoundConstant estimate_bound_constant(const ParameterSet& p, double c, double region_delta = 0.5,
                                      std::size_t n = 20000, std::uint64_t seed = 1);

struct RegularizedSample {
  RegularizedState state;
  double q = 0.0;
  double pairing = 0.0;  ///< dQ(X)
  double f = 0.0;
  double eta_norm = 0.0;
  double bound_term = 0.0;  ///< |2a g1^2 + 2b g2^2 + g3^2|
};

std::vector<RegularizedSample> regularized_samples(const ParameterSet& p, double c, double eps, std::size_t n,
                                                   std::uint64_t seed);

/// Pass iff min dQ(X) > 0 and every sample satisfies |f| >= 1/2, |eta| <= 2,
/// |bound term| <= A and dQ(X) >= 1 - 2 eps (1 + A) - 1e-10. When eps <= 0 it
/// is chosen as 0.9 eps_max from estimate_bound_constant.
ScanReport regularized_transversality_scan(const ParameterSet& p, double c, double eps, std::size_t n,
                                           std::uint64_t seed);

/// Chart consistency on seeded states: regularize/deregularize round trips
/// (relative 1e-12) and |eta| (1 - xi0) = |P| (1e-12) on n random states, and
/// Q = 1/2 (1e-10) on n samples of Sigma_c^b. Requires c < H(L1).
ScanReport regularization_consistency(const ParameterSet& p, double c, std::size_t n, std::uint64_t seed);

/// CSV `xi0,xi1,xi2,xi3,eta0,eta1,eta2,eta3,Q,dQX,f,eta_norm,bound_term`.
void write_regularized_csv(std::ostream& out, const std::vector<RegularizedSample>& samples);

}  // namespace hill4bp
