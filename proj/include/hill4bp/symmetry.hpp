#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hill4bp/model.hpp"
#include "hill4bp/scan_report.hpp"

namespace hill4bp {

enum class SymplecticKind { kSymplectic, kAntiSymplectic, kNeither };

std::string to_string(SymplecticKind kind);

/// Linear involution of phase space stored as an exact integer matrix.
///
/// Dim = 6 acts on (x, y, z, px, py, pz); Dim = 4 acts on the planar
/// coordinates (x, y, px, py) of Fix(sigma).
template <int Dim>
struct LinearInvolution {
  using Matrix = Eigen::Matrix<int, Dim, Dim>;
  std::string name;
  Matrix matrix;
  SymplecticKind kind = SymplecticKind::kNeither;
};

using Involution = LinearInvolution<6>;
using PlanarInvolution = LinearInvolution<4>;

/// Standard symplectic matrix J = [[0, -I], [I, 0]] in (q, p) ordering, so
/// that omega(u, v) = u^T J v for omega = sum dp_k ^ dq_k.
template <int Dim>
Eigen::Matrix<int, Dim, Dim> symplectic_matrix() {
  static_assert(Dim % 2 == 0);
  constexpr int n = Dim / 2;
  Eigen::Matrix<int, Dim, Dim> j = Eigen::Matrix<int, Dim, Dim>::Zero();
  j.template topRightCorner<n, n>() = -Eigen::Matrix<int, n, n>::Identity();
  j.template bottomLeftCorner<n, n>() = Eigen::Matrix<int, n, n>::Identity();
  return j;
}

/// M^T J M = J -> symplectic, = -J -> anti-symplectic.
template <int Dim>
SymplecticKind classify_symplectic(const Eigen::Matrix<int, Dim, Dim>& m) {
  const auto j = symplectic_matrix<Dim>();
  const Eigen::Matrix<int, Dim, Dim> pulled = m.transpose() * j * m;
  if (pulled == j) return SymplecticKind::kSymplectic;
  if (pulled == -j) return SymplecticKind::kAntiSymplectic;
  return SymplecticKind::kNeither;
}

template <int Dim>
bool is_involution(const Eigen::Matrix<int, Dim, Dim>& m) {
  return m * m == Eigen::Matrix<int, Dim, Dim>::Identity();
}

/// id, -id, sigma, -sigma, rho1, rho2, rho3, rho4.
std::vector<Involution> spatial_involutions();
/// id, -id, rho_x, rho_y.
std::vector<PlanarInvolution> planar_involutions();

/// Looks up a builtin spatial or planar involution by name; throws DomainError.
Involution spatial_involution(const std::string& name);
PlanarInvolution planar_involution(const std::string& name);

PhaseState apply(const Involution& inv, const PhaseState& s);
/// Applies a planar involution to the Fix(sigma) part of s; z, pz must be zero.
PhaseState apply(const PlanarInvolution& inv, const PhaseState& s);

/// Maximum relative change |H(inv s) - H(s)| / max(1, |H(s)|) over seeded random
/// states; pass iff below 1e-12. Planar involutions are sampled on z = pz = 0.
ScanReport verify_hamiltonian_invariance(const ParameterSet& p, const Involution& inv, std::size_t n_samples,
                                         std::uint64_t seed);
ScanReport verify_hamiltonian_invariance(const ParameterSet& p, const PlanarInvolution& inv,
                                         std::size_t n_samples, std::uint64_t seed);

struct GroupTable {
  std::vector<std::string> names;
  /// product(i, j) = index of element i o j, or -1 if the product left the set.
  Eigen::MatrixXi product;
  bool closed = false;
  bool has_identity = false;
  bool abelian = false;
  bool all_self_inverse = false;

  /// A closed abelian set of involutions of order 8 containing the identity.
  bool is_z2_cubed() const;
};

GroupTable group_closure_table(const std::vector<Involution>& elements);
GroupTable group_closure_table();

/// Restriction of a spatial involution to Fix(sigma) = {z = pz = 0}.
/// Throws DomainError when inv does not map the planar subspace into itself.
PlanarInvolution restrict_to_planar(const Involution& inv);

/// Brute force over all 2^6 * 6! signed permutation matrices: returns those that
/// are involutions, (anti-)symplectic, and leave H invariant on `n_witness`
/// seeded random states.
std::vector<Involution> search_signed_permutation_symmetries(const ParameterSet& p, std::size_t n_witness,
                                                             std::uint64_t seed);

}  // namespace hill4bp
