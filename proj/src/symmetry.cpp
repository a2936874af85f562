#include "hill4bp/symmetry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "hill4bp/parallel.hpp"
#include "random_states.hpp"

namespace hill4bp {

namespace {

// Spatial indices of the planar coordinates (x, y, px, py).
constexpr std::array<int, 4> kPlanarIndex{kX, kY, kPx, kPy};

template <int Dim>
LinearInvolution<Dim> diagonal_involution(std::string name, const std::array<int, Dim>& signs) {
  LinearInvolution<Dim> inv;
  inv.name = std::move(name);
  inv.matrix.setZero();
  for (int i = 0; i < Dim; ++i) inv.matrix(i, i) = signs[i];
  inv.kind = classify_symplectic<Dim>(inv.matrix);
  return inv;
}

double relative_change(double before, double after) {
  return std::abs(after - before) / std::max(1.0, std::abs(before));
}

template <typename Sampler, typename Map>
ScanReport invariance_scan(const ParameterSet& p, const std::string& name, std::size_t n_samples,
                           std::uint64_t seed, Sampler sample, Map map) {
  if (n_samples == 0) throw DomainError("invariance scan needs at least one sample");
  auto rng = make_stream(seed, 0);
  ScanReport report;
  report.bound_kind = "hamiltonian_invariance:" + name;
  report.sense = ScanReport::Sense::kMaximum;
  report.tolerance = 1e-12;
  report.argmin_kind = "phase_state";
  report.n_samples = n_samples;
  report.rng_seed = seed;
  report.mu = p.mu;
  report.extremum = -1.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const PhaseState s = sample(rng);
    const PhaseState t = map(s);
    // Images are never at the origin: the involutions are signed permutations.
    const double change = relative_change(hamiltonian(p, s), hamiltonian(p, t));
    if (change > report.extremum) {
      report.extremum = change;
      report.argmin.assign(s.data(), s.data() + s.size());
    }
  }
  report.pass = report.extremum < report.tolerance;
  return report;
}

}  // namespace

std::string to_string(SymplecticKind kind) {
  switch (kind) {
    case SymplecticKind::kSymplectic:
      return "symplectic";
    case SymplecticKind::kAntiSymplectic:
      return "anti-symplectic";
    case SymplecticKind::kNeither:
      break;
  }
  return "neither";
}

std::vector<Involution> spatial_involutions() {
  return {
      diagonal_involution<6>("id", {1, 1, 1, 1, 1, 1}),
      diagonal_involution<6>("-id", {-1, -1, -1, -1, -1, -1}),
      diagonal_involution<6>("sigma", {1, 1, -1, 1, 1, -1}),
      diagonal_involution<6>("-sigma", {-1, -1, 1, -1, -1, 1}),
      diagonal_involution<6>("rho1", {1, -1, -1, -1, 1, 1}),
      diagonal_involution<6>("rho2", {1, -1, 1, -1, 1, -1}),
      diagonal_involution<6>("rho3", {-1, 1, -1, 1, -1, 1}),
      diagonal_involution<6>("rho4", {-1, 1, 1, 1, -1, -1}),
  };
}

std::vector<PlanarInvolution> planar_involutions() {
  return {
      diagonal_involution<4>("id", {1, 1, 1, 1}),
      diagonal_involution<4>("-id", {-1, -1, -1, -1}),
      diagonal_involution<4>("rho_x", {1, -1, -1, 1}),
      diagonal_involution<4>("rho_y", {-1, 1, 1, -1}),
  };
}

Involution spatial_involution(const std::string& name) {
  for (auto& inv : spatial_involutions())
    if (inv.name == name) return inv;
  throw DomainError("unknown spatial involution '" + name + "'");
}

PlanarInvolution planar_involution(const std::string& name) {
  for (auto& inv : planar_involutions())
    if (inv.name == name) return inv;
  throw DomainError("unknown planar involution '" + name + "'");
}

PhaseState apply(const Involution& inv, const PhaseState& s) { return inv.matrix.cast<double>() * s; }

PhaseState apply(const PlanarInvolution& inv, const PhaseState& s) {
  if (s[kZ] != 0.0 || s[kPz] != 0.0) throw DomainError("planar involution applied off Fix(sigma)");
  Eigen::Vector4d planar;
  for (int i = 0; i < 4; ++i) planar[i] = s[kPlanarIndex[i]];
  const Eigen::Vector4d image = inv.matrix.cast<double>() * planar;
  PhaseState out = PhaseState::Zero();
  for (int i = 0; i < 4; ++i) out[kPlanarIndex[i]] = image[i];
  return out;
}

ScanReport verify_hamiltonian_invariance(const ParameterSet& p, const Involution& inv, std::size_t n_samples,
                                         std::uint64_t seed) {
  return invariance_scan(
      p, inv.name, n_samples, seed, [](std::mt19937_64& rng) { return detail::random_state(rng); },
      [&](const PhaseState& s) { return apply(inv, s); });
}

ScanReport verify_hamiltonian_invariance(const ParameterSet& p, const PlanarInvolution& inv,
                                         std::size_t n_samples, std::uint64_t seed) {
  return invariance_scan(
      p, inv.name, n_samples, seed, [](std::mt19937_64& rng) { return detail::random_planar_state(rng); },
      [&](const PhaseState& s) { return apply(inv, s); });
}

bool GroupTable::is_z2_cubed() const {
  return names.size() == 8 && closed && has_identity && abelian && all_self_inverse;
}

GroupTable group_closure_table(const std::vector<Involution>& elements) {
  const auto n = static_cast<Eigen::Index>(elements.size());
  GroupTable table;
  table.product = Eigen::MatrixXi::Constant(n, n, -1);
  for (const auto& e : elements) table.names.push_back(e.name);
  table.closed = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Involution::Matrix prod = elements[i].matrix * elements[j].matrix;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (elements[k].matrix == prod) {
          table.product(i, j) = static_cast<int>(k);
          break;
        }
      }
      if (table.product(i, j) < 0) table.closed = false;
    }
  }
  table.has_identity = std::any_of(elements.begin(), elements.end(), [](const Involution& e) {
    return e.matrix == Involution::Matrix::Identity();
  });
  table.abelian = table.product == table.product.transpose();
  table.all_self_inverse = std::all_of(elements.begin(), elements.end(),
                                       [](const Involution& e) { return is_involution<6>(e.matrix); });
  return table;
}

GroupTable group_closure_table() { return group_closure_table(spatial_involutions()); }

PlanarInvolution restrict_to_planar(const Involution& inv) {
  constexpr std::array<int, 2> kOffPlane{kZ, kPz};
  for (int row : kOffPlane)
    for (int col : kPlanarIndex)
      if (inv.matrix(row, col) != 0) throw DomainError(inv.name + " does not preserve Fix(sigma)");
  PlanarInvolution out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.matrix(i, j) = inv.matrix(kPlanarIndex[i], kPlanarIndex[j]);
  out.kind = classify_symplectic<4>(out.matrix);
  out.name = "pi(" + inv.name + ")";
  for (const auto& builtin : planar_involutions()) {
    if (builtin.matrix == out.matrix) {
      out.name = builtin.name;
      break;
    }
  }
  return out;
}

std::vector<Involution> search_signed_permutation_symmetries(const ParameterSet& p, std::size_t n_witness,
                                                             std::uint64_t seed) {
  auto rng = make_stream(seed, 0);
  std::vector<PhaseState> witnesses(n_witness);
  std::vector<double> energies(n_witness);
  for (std::size_t i = 0; i < n_witness; ++i) {
    witnesses[i] = detail::random_state(rng);
    energies[i] = hamiltonian(p, witnesses[i]);
  }

  std::vector<Involution> found;
  std::array<int, 6> perm{0, 1, 2, 3, 4, 5};
  do {
    for (int mask = 0; mask < 64; ++mask) {
      Involution::Matrix m = Involution::Matrix::Zero();
      for (int i = 0; i < 6; ++i) m(i, perm[i]) = (mask >> i) & 1 ? -1 : 1;
      if (!is_involution<6>(m)) continue;
      const SymplecticKind kind = classify_symplectic<6>(m);
      if (kind == SymplecticKind::kNeither) continue;
      const Eigen::Matrix<double, 6, 6> md = m.cast<double>();
      bool invariant = true;
      for (std::size_t i = 0; i < n_witness && invariant; ++i)
        invariant = relative_change(energies[i], hamiltonian(p, PhaseState(md * witnesses[i]))) < 1e-12;
      if (!invariant) continue;
      Involution inv;
      inv.matrix = m;
      inv.kind = kind;
      inv.name = "signed_perm";
      for (const auto& builtin : spatial_involutions()) {
        if (builtin.matrix == m) {
          inv.name = builtin.name;
          break;
        }
      }
      found.push_back(std::move(inv));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return found;
}

}  // namespace hill4bp
