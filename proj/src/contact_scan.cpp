#include "hill4bp/contact_scan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "hill4bp/hill_region.hpp"
#include "hill4bp/lagrange.hpp"
#include "hill4bp/parallel.hpp"
#include "random_states.hpp"

namespace hill4bp {

namespace {

constexpr std::size_t kBatchSize = 1024;
constexpr std::size_t kMaxRejections = 1'000'000;

double ball_radius(const ParameterSet& p) { return 1.0 / std::cbrt(p.lambda2); }

void require_below_first_critical(const ParameterSet& p, double c) {
  if (!(c < critical_values(p).h12)) throw DomainError("energy must lie below H(L1)");
}

ScanReport make_report(const ParameterSet& p, double c, std::string kind) {
  ScanReport r;
  r.bound_kind = std::move(kind);
  r.mu = p.mu;
  r.c = c;
  return r;
}

}  // namespace

double liouville_pairing(const ParameterSet& p, const PhaseState& s) {
  const double r = detail::checked_radius<double>(position(s));
  return s[kPx] * s[kY] - s[kPy] * s[kX] + 2.0 * p.a * s[kX] * s[kX] + 2.0 * p.b * s[kY] * s[kY] +
         s[kZ] * s[kZ] + 1.0 / r;
}

double radial_derivative(const ParameterSet& p, const SphericalPoint& sp) {
  const double ct = std::cos(sp.theta), st = std::sin(sp.theta);
  const double cp = std::cos(sp.phi), s2 = std::sin(sp.phi) * std::sin(sp.phi);
  return 1.0 / (sp.rho * sp.rho) - sp.rho * (p.lambda2 * ct * ct * s2 + p.lambda1 * st * st * s2 - cp * cp);
}

double radial_second_derivative(const ParameterSet& p, const SphericalPoint& sp) {
  const double ct = std::cos(sp.theta), st = std::sin(sp.theta);
  const double cp = std::cos(sp.phi), s2 = std::sin(sp.phi) * std::sin(sp.phi);
  return -2.0 / (sp.rho * sp.rho * sp.rho) + cp * cp - s2 * (p.lambda2 * ct * ct + p.lambda1 * st * st);
}

double position_bound(const ParameterSet& p, double c, const Eigen::Vector3d& q) {
  const SphericalPoint sp = to_spherical(q);
  const double slack = std::max(0.0, c - effective_potential<double>(p, q));
  return sp.rho * (radial_derivative(p, sp) - std::sin(sp.phi) * std::sqrt(2.0 * slack));
}

Eigen::Vector2d angular_differential(const ParameterSet& p, const SphericalPoint& sp) {
  const double rho2 = sp.rho * sp.rho;
  const double ct = std::cos(sp.theta), st = std::sin(sp.theta);
  const double cp = std::cos(sp.phi), spp = std::sin(sp.phi);
  const double a = p.lambda2 * ct * ct + p.lambda1 * st * st;
  return {rho2 * (p.lambda2 - p.lambda1) * ct * st * spp * spp, -rho2 * spp * cp * (a + 1.0)};
}

Eigen::Matrix2d angular_hessian(const ParameterSet& p, const SphericalPoint& sp) {
  const double rho2 = sp.rho * sp.rho;
  const double gap = p.lambda2 - p.lambda1;
  const double ct = std::cos(sp.theta), st = std::sin(sp.theta);
  const double a = p.lambda2 * ct * ct + p.lambda1 * st * st;
  const double s2p = std::sin(sp.phi) * std::sin(sp.phi);
  Eigen::Matrix2d h;
  h(0, 0) = rho2 * gap * std::cos(2.0 * sp.theta) * s2p;
  h(0, 1) = h(1, 0) = rho2 * gap * ct * st * std::sin(2.0 * sp.phi);
  h(1, 1) = -rho2 * (a + 1.0) * std::cos(2.0 * sp.phi);
  return h;
}

ScanReport lemma1_check(const ParameterSet& p, double rho, int grid_n) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("lemma1_check needs rho in (0, 1)");
  using std::numbers::pi;
  ScanReport report = make_report(p, std::numeric_limits<double>::quiet_NaN(), "lemma1_angular_minimum");
  report.argmin_kind = "spherical";

  // Differential at the four candidate critical points; rounding in cos(pi/2) only.
  double max_differential = 0.0;
  for (const auto& [theta, phi] : {std::pair{0.0, 0.0}, {0.0, pi / 2}, {pi / 2, 0.0}, {pi / 2, pi / 2}})
    max_differential = std::max(max_differential, angular_differential(p, {rho, theta, phi}).cwiseAbs().maxCoeff());

  const Eigen::Matrix2d hess = angular_hessian(p, {rho, 0.0, pi / 2});
  const Eigen::Vector2d expected_diag(rho * rho * (p.lambda2 - p.lambda1), rho * rho * (p.lambda2 + 1.0));
  const double hess_error = (hess.diagonal() - expected_diag).cwiseAbs().maxCoeff() + std::abs(hess(0, 1));
  const bool positive_definite = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(hess).eigenvalues().minCoeff() > 0.0;

  double grid_min = std::numeric_limits<double>::infinity();
  SphericalPoint argmin;
  for (int i = 0; i <= grid_n; ++i) {
    for (int j = 0; j <= grid_n; ++j) {
      const SphericalPoint sp{rho, pi * i / grid_n, pi * j / grid_n};
      const double u = effective_potential_spherical(p, sp);
      if (u < grid_min) {
        grid_min = u;
        argmin = sp;
      }
    }
  }
  const double expected_min = -1.0 / rho - 0.5 * rho * rho * p.lambda2;
  const double theta_mod_pi = std::fmod(argmin.theta, pi);
  const bool argmin_ok = (theta_mod_pi < 1e-12 || pi - theta_mod_pi < 1e-12) && std::abs(argmin.phi - pi / 2) < 1e-12;

  report.extremum = grid_min;
  report.argmin = {argmin.rho, argmin.theta, argmin.phi};
  report.n_samples = static_cast<std::size_t>((grid_n + 1) * (grid_n + 1));
  report.tolerance = 1e-12;
  report.set_metric("rho", rho);
  report.set_metric("max_differential_at_critical_points", max_differential);
  report.set_metric("hessian_theta_theta", hess(0, 0));
  report.set_metric("hessian_phi_phi", hess(1, 1));
  report.set_metric("hessian_error", hess_error);
  report.set_metric("expected_min", expected_min);
  report.pass = max_differential < 1e-14 * std::max(1.0, rho * rho * (p.lambda2 + 1.0)) &&
                hess_error < 1e-13 && positive_definite && argmin_ok &&
                std::abs(grid_min - expected_min) < 1e-12 * std::max(1.0, std::abs(expected_min));
  return report;
}

ScanReport lemma2_scan(const ParameterSet& p, const SphericalGrid& grid) {
  const double r = ball_radius(p);
  if (!(grid.rho_min > 0.0 && grid.rho_min < r)) throw DomainError("lemma2_scan needs 0 < rho_min < r");
  using std::numbers::pi;
  ScanReport report = make_report(p, std::numeric_limits<double>::quiet_NaN(), "lemma2_dU_drho");
  report.argmin_kind = "spherical";
  report.tolerance = 0.0;
  report.extremum = std::numeric_limits<double>::infinity();
  double min_lower = std::numeric_limits<double>::infinity();
  double max_violation = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.n_rho; ++i) {
    const double rho = grid.rho_min + (r - grid.rho_min) * i / grid.n_rho;
    const double lower = 1.0 / (rho * rho) - p.lambda2 * rho;
    min_lower = std::min(min_lower, lower);
    for (int k = 0; k < grid.n_theta; ++k) {
      for (int j = 0; j < grid.n_phi; ++j) {
        const SphericalPoint sp{rho, 2.0 * pi * k / grid.n_theta, pi * j / grid.n_phi};
        const double du = radial_derivative(p, sp);
        max_violation = std::max(max_violation, (lower - du) / std::max(1.0, std::abs(lower)));
        if (du < report.extremum) {
          report.extremum = du;
          report.argmin = {sp.rho, sp.theta, sp.phi};
        }
      }
    }
  }
  report.n_samples = static_cast<std::size_t>(grid.n_rho) * grid.n_theta * grid.n_phi;
  report.set_metric("min_lower_bound", min_lower);
  report.set_metric("max_lower_bound_violation", max_violation);
  report.set_metric("ball_radius", r);
  report.pass = report.extremum > 0.0 && min_lower > 0.0 && max_violation <= 1e-12;
  return report;
}

ScanReport lemma3_scan(const ParameterSet& p, const SphericalGrid& grid) {
  const double r = ball_radius(p);
  using std::numbers::pi;
  ScanReport report = make_report(p, std::numeric_limits<double>::quiet_NaN(), "lemma3_d2U_drho2_plus_sin2phi");
  report.argmin_kind = "spherical";
  report.sense = ScanReport::Sense::kMaximum;
  report.tolerance = 1e-12;
  report.extremum = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.n_rho; ++i) {
    const double rho = r * (i + 1) / grid.n_rho;
    for (int k = 0; k < grid.n_theta; ++k) {
      for (int j = 0; j < grid.n_phi; ++j) {
        const SphericalPoint sp{rho, 2.0 * pi * k / grid.n_theta, pi * j / grid.n_phi};
        const double s = std::sin(sp.phi);
        const double v = radial_second_derivative(p, sp) + s * s;
        if (v > report.extremum) {
          report.extremum = v;
          report.argmin = {sp.rho, sp.theta, sp.phi};
        }
      }
    }
  }
  const double chain_radius = -2.0 / (r * r * r) + 1.0;
  const double chain_lambda = -2.0 * p.lambda2 + 1.0;
  report.n_samples = static_cast<std::size_t>(grid.n_rho) * grid.n_theta * grid.n_phi;
  report.set_metric("chain_at_ball_radius", chain_radius);
  report.set_metric("chain_in_lambda2", chain_lambda);
  report.set_metric("ball_radius", r);
  report.pass = report.extremum <= report.tolerance && std::abs(chain_radius - chain_lambda) < 1e-12 &&
                chain_lambda <= -3.0;
  return report;
}

std::vector<PhaseState> sample_level_set(const ParameterSet& p, double c, std::size_t n, std::uint64_t seed,
                                         bool planar) {
  require_below_first_critical(p, c);
  if (n == 0) throw DomainError("sample_level_set needs n >= 1");
  const double r = ball_radius(p);

  GridSpec grid;
  grid.dims = planar ? 2 : 3;
  grid.resolution = planar ? 256 : 64;
  grid.half_width = 1.25 * r;
  const RegionCensus census = component_census(p, c, grid);
  if (census.bounded_component < 0) throw EmptyRegionError("no bounded Hill region component at this energy");

  // Bounded-component cells plus their neighbours, so that boundary cells with
  // forbidden centres are still covered; membership is decided pointwise below.
  const int res = grid.resolution;
  std::vector<std::uint8_t> mark(census.labels.size(), 0);
  for (std::size_t flat = 0; flat < census.labels.size(); ++flat) {
    if (!census.in_bounded_component(flat)) continue;
    const auto idx = census.unflatten(flat);
    const int dz = grid.dims == 3 ? 1 : 0;
    for (int k = -dz; k <= dz; ++k)
      for (int j = -1; j <= 1; ++j)
        for (int i = -1; i <= 1; ++i) {
          const std::array<int, 3> nb{idx[0] + i, idx[1] + j, idx[2] + k};
          if (nb[0] < 0 || nb[1] < 0 || nb[2] < 0 || nb[0] >= res || nb[1] >= res || (dz && nb[2] >= res)) continue;
          mark[census.flat_index(nb)] = 1;
        }
  }
  std::vector<std::size_t> cells;
  for (std::size_t flat = 0; flat < mark.size(); ++flat)
    if (mark[flat]) cells.push_back(flat);

  const double h = grid.spacing();
  const std::size_t n_batches = (n + kBatchSize - 1) / kBatchSize;
  std::vector<PhaseState> out(n);
  parallel_for(n_batches, [&](std::size_t b) {
    auto rng = make_stream(seed, b);
    std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    const std::size_t begin = b * kBatchSize;
    const std::size_t end = std::min(n, begin + kBatchSize);
    for (std::size_t i = begin; i < end; ++i) {
      Eigen::Vector3d q;
      double u = 0.0;
      for (std::size_t attempt = 0;; ++attempt) {
        if (attempt == kMaxRejections) throw EmptyRegionError("rejection sampling of K_c^b failed 1e6 times");
        q = census.grid.cell_center(census.unflatten(cells[pick(rng)]));
        const auto axes = grid.dims == 3 ? std::array<int, 3>{0, 1, 2} : std::array<int, 3>{0, 1, -1};
        for (int axis : axes)
          if (axis >= 0) q[axis] += h * jitter(rng);
        const double rho = q.norm();
        if (rho < kScanRhoMin || rho >= r) continue;
        u = effective_potential<double>(p, q);
        if (u <= c) break;
      }
      const double radius = std::sqrt(2.0 * (c - u));
      Eigen::Vector3d mom(-q.y(), q.x(), 0.0);
      if (planar) {
        mom.head<2>() += radius * detail::random_unit_vector<2>(rng);
      } else {
        mom += radius * detail::random_unit_vector<3>(rng);
      }
      out[i] = make_state<double>(q, mom);
    }
  });
  return out;
}

std::vector<TransversalitySample> transversality_samples(const ParameterSet& p, double c, std::size_t n,
                                                         std::uint64_t seed, bool planar) {
  const std::vector<PhaseState> states = sample_level_set(p, c, n, seed, planar);
  std::vector<TransversalitySample> out(states.size());
  parallel_for((states.size() + kBatchSize - 1) / kBatchSize, [&](std::size_t b) {
    const std::size_t end = std::min(states.size(), (b + 1) * kBatchSize);
    for (std::size_t i = b * kBatchSize; i < end; ++i) {
      out[i].state = states[i];
      out[i].pairing = liouville_pairing(p, states[i]);
      out[i].bound = position_bound(p, c, position(states[i]));
    }
  });
  return out;
}

ScanReport transversality_scan(const ParameterSet& p, double c, std::size_t n, std::uint64_t seed, bool planar) {
  const auto samples = transversality_samples(p, c, n, seed, planar);
  ScanReport report = make_report(p, c, planar ? "dH(X)_planar" : "dH(X)");
  report.argmin_kind = "phase_state";
  report.n_samples = samples.size();
  report.rng_seed = seed;
  report.tolerance = 0.0;
  report.extremum = std::numeric_limits<double>::infinity();
  double min_bound = std::numeric_limits<double>::infinity();
  double max_violation = -std::numeric_limits<double>::infinity();
  double max_energy_error = 0.0;
  for (const auto& s : samples) {
    if (s.pairing < report.extremum) {
      report.extremum = s.pairing;
      report.argmin.assign(s.state.data(), s.state.data() + 6);
    }
    min_bound = std::min(min_bound, s.bound);
    max_violation = std::max(max_violation, s.bound - s.pairing);
    const double u = effective_potential<double>(p, position(s.state));
    max_energy_error = std::max(max_energy_error, std::abs(hamiltonian(p, s.state) - c) / std::max(1.0, std::abs(u)));
  }
  report.set_metric("min_position_bound", min_bound);
  report.set_metric("max_bound_violation", max_violation);
  report.set_metric("bound_slack", 1e-10);
  report.set_metric("max_relative_energy_error", max_energy_error);
  report.pass = report.extremum > 0.0 && max_violation <= 1e-10 && min_bound > 0.0;
  return report;
}

void write_transversality_csv(std::ostream& out, const std::vector<TransversalitySample>& samples) {
  out << "x,y,z,px,py,pz,dHX,bound\n";
  char buf[512];
  for (const auto& s : samples) {
    const auto& v = s.state;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", v[0], v[1], v[2], v[3], v[4],
                  v[5], s.pairing, s.bound);
    out << buf;
  }
}

}  // namespace hill4bp
