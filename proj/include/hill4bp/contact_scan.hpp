#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "hill4bp/model.hpp"
#include "hill4bp/scan_report.hpp"

namespace hill4bp {

/// dH(X) for the radial Liouville field X = x d/dx + y d/dy + z d/dz:
///   px y - py x + 2a x^2 + 2b y^2 + z^2 + 1/r.
double liouville_pairing(const ParameterSet& p, const PhaseState& s);

/// dU/drho = 1/rho^2 - rho (lambda2 cos^2(theta) sin^2(phi) + lambda1 sin^2(theta) sin^2(phi) - cos^2(phi)).
double radial_derivative(const ParameterSet& p, const SphericalPoint& sp);

/// d^2U/drho^2 = -2/rho^3 + cos^2(phi) - sin^2(phi) (lambda2 cos^2(theta) + lambda1 sin^2(theta)).
double radial_second_derivative(const ParameterSet& p, const SphericalPoint& sp);

/// Momentum-independent lower bound for dH(X) on the level set H = c:
///   rho (dU/drho - sin(phi) sqrt(2 (c - U))).
/// Requires U(q) <= c (the radicand is clamped at zero).
double position_bound(const ParameterSet& p, double c, const Eigen::Vector3d& q);

/// (dU_rho/dtheta, dU_rho/dphi) of U restricted to the sphere of radius rho.
Eigen::Vector2d angular_differential(const ParameterSet& p, const SphericalPoint& sp);
/// Hessian of U_rho in (theta, phi).
Eigen::Matrix2d angular_hessian(const ParameterSet& p, const SphericalPoint& sp);

/// For fixed rho in (0, 1): the angular differential vanishes at (0,0),
/// (0,pi/2), (pi/2,0), (pi/2,pi/2); the Hessian at (0, pi/2) is
/// diag(rho^2 (lambda2 - lambda1), rho^2 (lambda2 + 1)) and positive definite;
/// the minimum of U_rho over a (grid_n+1)^2 grid of [0,pi]^2 is attained at
/// (0, pi/2) modulo pi with value -1/rho - rho^2 lambda2 / 2.
ScanReport lemma1_check(const ParameterSet& p, double rho, int grid_n = 180);

struct SphericalGrid {
  int n_rho = 64;
  int n_theta = 64;
  int n_phi = 64;
  double rho_min = 1e-3;
};

/// min of dU/drho over rho in [rho_min, r), all angles; must be > 0. Also checks
/// dU/drho >= 1/rho^2 - lambda2 rho pointwise (slack 1e-12 relative).
ScanReport lemma2_scan(const ParameterSet& p, const SphericalGrid& grid = {});

/// max of d^2U/drho^2 + sin^2(phi) over rho in (0, r]; must be <= 0 (slack
/// 1e-12). Also checks -2/r^3 + 1 = -2 lambda2 + 1 <= -3.
ScanReport lemma3_scan(const ParameterSet& p, const SphericalGrid& grid = {});

/// Samples of the bounded energy component Sigma_c^b, c < H(L1).
///
/// Positions are uniform over K_c^b minus the ball rho < 1e-3: cells of a
/// census grid over the ball of radius lambda2^{-1/3}, dilated by one cell,
/// jittered and accepted iff U <= c. Momenta are uniform on the sphere of
/// radius sqrt(2 (c - U)) centred at (-y, x, 0) (a circle with pz = 0 when
/// planar). Deterministic in (seed, n) for any thread count.
std::vector<PhaseState> sample_level_set(const ParameterSet& p, double c, std::size_t n, std::uint64_t seed,
                                         bool planar = false);

inline constexpr double kScanRhoMin = 1e-3;

struct TransversalitySample {
  PhaseState state;
  double pairing = 0.0;  ///< dH(X)
  double bound = 0.0;    ///< position_bound at the sample's position
};

std::vector<TransversalitySample> transversality_samples(const ParameterSet& p, double c, std::size_t n,
                                                         std::uint64_t seed, bool planar = false);

/// Pass iff min dH(X) > 0, dH(X) >= position_bound - 1e-10 on every sample and
/// the bound itself is positive everywhere.
ScanReport transversality_scan(const ParameterSet& p, double c, std::size_t n, std::uint64_t seed,
                               bool planar = false);

/// CSV `x,y,z,px,py,pz,dHX,bound`.
void write_transversality_csv(std::ostream& out, const std::vector<TransversalitySample>& samples);

}  // namespace hill4bp
