#include "hill4bp/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "hill4bp/contact_scan.hpp"
#include "hill4bp/lagrange.hpp"
#include "hill4bp/parallel.hpp"
#include "random_states.hpp"

namespace hill4bp {

namespace {

constexpr std::size_t kBatchSize = 1024;
constexpr double kRootLow = 1e-6;
constexpr double kRootHigh = 10.0;
constexpr int kRootScanSteps = 1000;

// Cubic coefficients of F(t) = t f(xi, t eta_hat) - 1 = k3 t^3 + k2 t^2 + k1 t - 1.
Eigen::Vector3d fiber_cubic(const ParameterSet& p, double c, const Eigen::Vector4d& xi, const Eigen::Vector4d& e) {
  const double w = 1.0 - xi[0];
  const double rot = e[1] * xi[2] - e[2] * xi[1];
  const Eigen::Vector3d g = e.tail<3>() * w + xi.tail<3>() * e[0];
  const double quad = p.a * g[0] * g[0] + p.b * g[1] * g[1] + 0.5 * g[2] * g[2];
  return {1.0 - w * (c + 0.5), w * rot, w * quad};
}

double bound_term(const ParameterSet& p, const Eigen::Vector3d& g) {
  return std::abs(2.0 * p.a * g[0] * g[0] + 2.0 * p.b * g[1] * g[1] + g[2] * g[2]);
}

// Random xi with 1 - xi0 uniform in (0, delta] and a uniform unit fiber direction.
std::pair<Eigen::Vector4d, Eigen::Vector4d> random_cap_direction(std::mt19937_64& rng, double delta) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double w = delta * (1.0 - unif(rng));
  Eigen::Vector4d xi;
  xi[0] = 1.0 - w;
  xi.tail<3>() = std::sqrt(w * (2.0 - w)) * detail::random_unit_vector<3>(rng);
  Eigen::Vector4d e;
  do {
    e = detail::random_unit_vector<4>(rng);
    e -= e.dot(xi) * xi;
  } while (e.norm() < 1e-8);
  return {xi, e.normalized()};
}

// Q = 1/2 samples in the cap 1 - xi0 <= delta with |eta|(1 - xi0) < eps.
std::vector<RegularizedState> sample_cap(const ParameterSet& p, double c, double delta, double eps, std::size_t n,
                                         std::uint64_t seed, std::uint64_t stream_offset) {
  std::vector<RegularizedState> out(n);
  const std::size_t n_batches = (n + kBatchSize - 1) / kBatchSize;
  parallel_for(n_batches, [&](std::size_t b) {
    auto rng = make_stream(seed, stream_offset + b);
    const std::size_t end = std::min(n, (b + 1) * kBatchSize);
    std::size_t failures = 0;
    for (std::size_t i = b * kBatchSize; i < end;) {
      if (failures > 1'000'000) throw RootFindError("near-collision sampler could not find Q = 1/2 points");
      auto [xi, e] = random_cap_direction(rng, delta);
      double t = 0.0;
      try {
        t = solve_fiber_radius(p, c, xi, e);
      } catch (const RootFindError&) {
        ++failures;
        continue;
      }
      if (!(t * (1.0 - xi[0]) < eps)) {
        ++failures;
        continue;
      }
      out[i].xi = xi;
      out[i].eta = t * e;
      ++i;
    }
  });
  return out;
}

}  // namespace

void RegularizedState::project() {
  xi.normalize();
  eta -= eta.dot(xi) * xi;
}

double RegularizedState::constraint_error() const {
  return std::max(std::abs(xi.norm() - 1.0), std::abs(xi.dot(eta)));
}

PhaseState switch_map(const PhaseState& s) { return make_state<double>(-momentum(s), position(s)); }

PhaseState unswitch_map(const PhaseState& s) { return make_state<double>(momentum(s), -position(s)); }

Eigen::Matrix<double, 6, 6> switch_matrix() {
  Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
  m.topRightCorner<3, 3>() = -Eigen::Matrix3d::Identity();
  m.bottomLeftCorner<3, 3>() = Eigen::Matrix3d::Identity();
  return m;
}

double k_c(const ParameterSet& p, double c, const PhaseState& s) {
  return position(s).norm() * (hamiltonian(p, s) - c);
}

PhaseState sphere_to_stereo(const RegularizedState& r) {
  const double w = 1.0 - r.xi[0];
  if (!(w >= 1e-14)) throw NorthPoleError("stereographic projection is undefined at the North pole");
  PhaseState s;
  s.head<3>() = r.xi.tail<3>() / w;
  s.tail<3>() = r.eta.tail<3>() * w + r.xi.tail<3>() * r.eta[0];
  return s;
}

RegularizedState stereo_to_sphere(const PhaseState& switched) {
  const Eigen::Vector3d x = position(switched);
  const Eigen::Vector3d y = momentum(switched);
  const double x2 = x.squaredNorm();
  const double xp = x.dot(y);
  RegularizedState r;
  r.xi[0] = (x2 - 1.0) / (x2 + 1.0);
  r.xi.tail<3>() = 2.0 * x / (x2 + 1.0);
  r.eta[0] = xp;
  r.eta.tail<3>() = 0.5 * (x2 + 1.0) * y - xp * x;
  return r;
}

RegularizedState regularize(const PhaseState& physical) { return stereo_to_sphere(switch_map(physical)); }

PhaseState deregularize(const RegularizedState& r) { return unswitch_map(sphere_to_stereo(r)); }

Eigen::Vector3d g_components(const RegularizedState& r) {
  return r.eta.tail<3>() * (1.0 - r.xi[0]) + r.xi.tail<3>() * r.eta[0];
}

double f_factor(const ParameterSet& p, double c, const RegularizedState& r) {
  const double w = 1.0 - r.xi[0];
  const Eigen::Vector3d g = g_components(r);
  const double rot = r.eta[1] * r.xi[2] - r.eta[2] * r.xi[1];
  const double quad = p.a * g[0] * g[0] + p.b * g[1] * g[1] + 0.5 * g[2] * g[2];
  return 1.0 + rot * w + quad * w - (c + 0.5) * w;
}

double k_tilde(const ParameterSet& p, double c, const RegularizedState& r) {
  return r.eta.norm() * f_factor(p, c, r) - 1.0;
}

double q_hamiltonian(const ParameterSet& p, double c, const RegularizedState& r) {
  const double f = f_factor(p, c, r);
  return 0.5 * r.eta.squaredNorm() * f * f;
}

std::pair<Eigen::Vector4d, Eigen::Vector4d> q_gradient(const ParameterSet& p, double c, const RegularizedState& r) {
  const Eigen::Vector4d& xi = r.xi;
  const Eigen::Vector4d& eta = r.eta;
  const double w = 1.0 - xi[0];
  const Eigen::Vector3d g = g_components(r);
  const Eigen::Vector3d gamma(2.0 * p.a * g[0], 2.0 * p.b * g[1], g[2]);  // d(quad)/dg
  const double rot = eta[1] * xi[2] - eta[2] * xi[1];
  const double quad = p.a * g[0] * g[0] + p.b * g[1] * g[1] + 0.5 * g[2] * g[2];
  const double f = 1.0 + w * (rot + quad - (c + 0.5));

  Eigen::Vector4d df_dxi;
  df_dxi[0] = -(rot + quad - (c + 0.5)) - w * gamma.dot(eta.tail<3>());
  df_dxi[1] = w * (-eta[2] + gamma[0] * eta[0]);
  df_dxi[2] = w * (eta[1] + gamma[1] * eta[0]);
  df_dxi[3] = w * gamma[2] * eta[0];

  Eigen::Vector4d df_deta;
  df_deta[0] = w * gamma.dot(xi.tail<3>());
  df_deta[1] = w * (xi[2] + gamma[0] * w);
  df_deta[2] = w * (-xi[1] + gamma[1] * w);
  df_deta[3] = w * gamma[2] * w;

  const double eta2 = eta.squaredNorm();
  return {eta2 * f * df_dxi, f * f * eta + eta2 * f * df_deta};
}

double natural_liouville_pairing(const ParameterSet& p, double c, const RegularizedState& r) {
  const double w = 1.0 - r.xi[0];
  const double f = f_factor(p, c, r);
  const Eigen::Vector3d g = g_components(r);
  const double eta2 = r.eta.squaredNorm();
  const double rot = r.eta[1] * r.xi[2] - r.eta[2] * r.xi[1];
  return eta2 * f * f + eta2 * f * w * (rot + 2.0 * p.a * g[0] * g[0] + 2.0 * p.b * g[1] * g[1] + g[2] * g[2]);
}

double solve_fiber_radius(const ParameterSet& p, double c, const Eigen::Vector4d& xi, const Eigen::Vector4d& eta_hat) {
  const Eigen::Vector3d k = fiber_cubic(p, c, xi, eta_hat);
  auto F = [&](double t) {
    RegularizedState r{xi, t * eta_hat};
    return t * f_factor(p, c, r) - 1.0;
  };
  auto dF = [&](double t) { return k[0] + 2.0 * k[1] * t + 3.0 * k[2] * t * t; };

  double lo = kRootLow;
  double f_lo = F(lo);
  if (f_lo >= 0.0) throw RootFindError("fiber equation positive at the lower bracket");
  double hi = lo;
  bool bracketed = false;
  for (int i = 1; i <= kRootScanSteps; ++i) {
    hi = kRootLow + (kRootHigh - kRootLow) * i / kRootScanSteps;
    if (F(hi) >= 0.0) {
      bracketed = true;
      break;
    }
    lo = hi;
  }
  if (!bracketed) throw RootFindError("no positive root of |eta| f = 1 in (1e-6, 10)");
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (F(mid) < 0.0 ? lo : hi) = mid;
  }
  double t = 0.5 * (lo + hi);
  for (int i = 0; i < 3; ++i) {
    const double d = dF(t);
    if (d == 0.0) break;
    const double next = t - F(t) / d;
    if (!(next > 0.0)) break;
    t = next;
  }
  return t;
}

std::vector<RegularizedState> sample_q_level_near_collision(const ParameterSet& p, double c, double eps,
                                                             std::size_t n, std::uint64_t seed) {
  if (!(c < critical_values(p).h12)) throw DomainError("energy must lie below H(L1)");
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  return sample_cap(p, c, std::min(eps, 2.0), eps, n, seed, 0);
}

BoundConstant estimate_bound_constant(const ParameterSet& p, double c, double region_delta, std::size_t n,
                                      std::uint64_t seed) {
  if (!(c < critical_values(p).h12)) throw DomainError("energy must lie below H(L1)");
  if (!(region_delta > 0.0 && region_delta <= 2.0)) throw DomainError("region_delta must be in (0, 2]");
  // Streams offset so the estimate is independent of the scan it calibrates.
  const auto states = sample_cap(p, c, region_delta, std::numeric_limits<double>::infinity(), n, seed, 1u << 20);
  double max_term = 0.0;
  for (const auto& r : states) max_term = std::max(max_term, bound_term(p, g_components(r)));
  BoundConstant out;
  out.a_constant = 1.1 * max_term;
  out.eps_max = 0.5 / (1.0 + out.a_constant);
  out.region_delta = region_delta;
  out.n_samples = states.size();
  return out;
}

std::vector<RegularizedSample> regularized_samples(const ParameterSet& p, double c, double eps, std::size_t n,
                                                   std::uint64_t seed) {
  const auto states = sample_q_level_near_collision(p, c, eps, n, seed);
  std::vector<RegularizedSample> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    auto& s = out[i];
    s.state = states[i];
    s.f = f_factor(p, c, s.state);
    s.eta_norm = s.state.eta.norm();
    s.q = 0.5 * s.eta_norm * s.eta_norm * s.f * s.f;
    s.pairing = natural_liouville_pairing(p, c, s.state);
    s.bound_term = bound_term(p, g_components(s.state));
  }
  return out;
}

ScanReport regularized_transversality_scan(const ParameterSet& p, double c, double eps, std::size_t n,
                                           std::uint64_t seed) {
  const double region = std::max(0.5, eps);
  const BoundConstant bc = estimate_bound_constant(p, c, region, 20000, seed);
  if (!(eps > 0.0)) eps = 0.9 * bc.eps_max;
  const double lower = 1.0 - 2.0 * eps * (1.0 + bc.a_constant);
  const auto samples = regularized_samples(p, c, eps, n, seed);

  ScanReport report;
  report.bound_kind = "dQ(X)";
  report.argmin_kind = "regularized_state";
  report.mu = p.mu;
  report.c = c;
  report.n_samples = samples.size();
  report.rng_seed = seed;
  report.tolerance = 0.0;
  report.extremum = std::numeric_limits<double>::infinity();
  double min_f = std::numeric_limits<double>::infinity();
  double max_eta = 0.0, max_term = 0.0, max_q_error = 0.0, max_constraint = 0.0, max_distance = 0.0;
  double max_violation = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    if (s.pairing < report.extremum) {
      report.extremum = s.pairing;
      report.argmin.assign(s.state.xi.data(), s.state.xi.data() + 4);
      report.argmin.insert(report.argmin.end(), s.state.eta.data(), s.state.eta.data() + 4);
    }
    min_f = std::min(min_f, std::abs(s.f));
    max_eta = std::max(max_eta, s.eta_norm);
    max_term = std::max(max_term, s.bound_term);
    max_q_error = std::max(max_q_error, std::abs(s.q - 0.5));
    max_constraint = std::max(max_constraint, s.state.constraint_error());
    max_distance = std::max(max_distance, s.eta_norm * (1.0 - s.state.xi[0]));
    max_violation = std::max(max_violation, lower - s.pairing);
  }
  report.set_metric("eps", eps);
  report.set_metric("A", bc.a_constant);
  report.set_metric("eps_max", bc.eps_max);
  report.set_metric("lower_bound", lower);
  report.set_metric("min_abs_f", min_f);
  report.set_metric("max_eta_norm", max_eta);
  report.set_metric("max_bound_term", max_term);
  report.set_metric("max_bound_violation", max_violation);
  report.set_metric("max_abs_Q_minus_half", max_q_error);
  report.set_metric("max_constraint_error", max_constraint);
  report.set_metric("max_collision_distance", max_distance);
  report.pass = report.extremum > 0.0 && min_f >= 0.5 && max_eta <= 2.0 && max_term <= bc.a_constant &&
                max_violation <= 1e-10 && max_q_error < 1e-12;
  return report;
}

ScanReport regularization_consistency(const ParameterSet& p, double c, std::size_t n, std::uint64_t seed) {
  const std::size_t n_batches = (n + kBatchSize - 1) / kBatchSize;
  std::vector<double> round_trip(n), distance(n);
  parallel_for(n_batches, [&](std::size_t b) {
    auto rng = make_stream(seed, b);
    for (std::size_t i = b * kBatchSize; i < std::min(n, (b + 1) * kBatchSize); ++i) {
      const PhaseState s = detail::random_state(rng);
      const RegularizedState r = regularize(s);
      round_trip[i] = (deregularize(r) - s).norm() / std::max(1.0, s.norm());
      distance[i] = std::abs(r.eta.norm() * (1.0 - r.xi[0]) - position(s).norm()) / std::max(1.0, position(s).norm());
    }
  });
  const auto level = sample_level_set(p, c, n, seed);
  std::vector<double> q_error(level.size());
  parallel_for(n_batches, [&](std::size_t b) {
    for (std::size_t i = b * kBatchSize; i < std::min(level.size(), (b + 1) * kBatchSize); ++i)
      q_error[i] = std::abs(q_hamiltonian(p, c, regularize(level[i])) - 0.5);
  });

  ScanReport report;
  report.bound_kind = "chart_consistency";
  report.sense = ScanReport::Sense::kMaximum;
  report.argmin_kind = "none";
  report.mu = p.mu;
  report.c = c;
  report.n_samples = n;
  report.rng_seed = seed;
  report.tolerance = 1e-12;
  const auto worst = std::max_element(round_trip.begin(), round_trip.end());
  report.extremum = worst == round_trip.end() ? 0.0 : *worst;
  const double max_distance = distance.empty() ? 0.0 : *std::max_element(distance.begin(), distance.end());
  const double max_q = q_error.empty() ? 0.0 : *std::max_element(q_error.begin(), q_error.end());
  report.set_metric("max_round_trip_error", report.extremum);
  report.set_metric("max_collision_distance_error", max_distance);
  report.set_metric("max_abs_Q_minus_half", max_q);
  report.pass = report.extremum <= 1e-12 && max_distance <= 1e-12 && max_q <= 1e-10;
  return report;
}

void write_regularized_csv(std::ostream& out, const std::vector<RegularizedSample>& samples) {
  out << "xi0,xi1,xi2,xi3,eta0,eta1,eta2,eta3,Q,dQX,f,eta_norm,bound_term\n";
  char buf[640];
  for (const auto& s : samples) {
    const auto& x = s.state.xi;
    const auto& e = s.state.eta;
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", x[0], x[1],
                  x[2], x[3], e[0], e[1], e[2], e[3], s.q, s.pairing, s.f, s.eta_norm, s.bound_term);
    out << buf;
  }
}

}  // namespace hill4bp
