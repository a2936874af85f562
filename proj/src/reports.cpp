#include "hill4bp/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "hill4bp/contact_scan.hpp"
#include "hill4bp/flow.hpp"
#include "hill4bp/hill_region.hpp"
#include "hill4bp/lagrange.hpp"
#include "hill4bp/parallel.hpp"
#include "hill4bp/regularization.hpp"
#include "hill4bp/symmetry.hpp"

namespace hill4bp {

namespace {

Json vec(const Eigen::VectorXd& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

Json matrix_rows(const Involution::Matrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < 6; ++i) {
    Json row = Json::array();
    for (int j = 0; j < 6; ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json check_entry(const std::string& name, double mu, std::optional<double> offset, std::optional<double> c,
                 bool pass, Json report) {
  Json j;
  j["check"] = name;
  j["mu"] = mu;
  j["c_offset"] = offset ? Json(*offset) : Json(nullptr);
  j["c"] = c ? Json(*c) : Json(nullptr);
  j["verdict"] = pass ? "pass" : "fail";
  j["report"] = std::move(report);
  return j;
}

}  // namespace

std::string version() { return HILL4BP_VERSION; }

Json provenance(const std::vector<std::string>& argv, std::optional<std::uint64_t> seed, const Json& mu,
                const Json& c) {
  Json j;
  j["version"] = version();
  j["argv"] = argv;
  j["seed"] = seed ? Json(*seed) : Json(nullptr);
  j["mu"] = mu;
  j["c"] = c;
  return j;
}

Report parameters_report(const ParameterSet& p) {
  Report r;
  Json params;
  params["mu"] = p.mu;
  params["d"] = p.d;
  params["lambda1"] = p.lambda1;
  params["lambda2"] = p.lambda2;
  params["a"] = p.a;
  params["b"] = p.b;
  r.body["parameters"] = std::move(params);
  const double lambda_sum = p.lambda1 + p.lambda2 - 3.0;
  const double ab_sum = p.a + p.b + 0.5;
  const auto [e_low, e_high] = rotation_diagonalization_check(p.mu);
  const double rotation_error = std::max(std::abs(e_low - p.a), std::abs(e_high - p.b));
  Json checks;
  checks["lambda1_plus_lambda2_minus_3"] = lambda_sum;
  checks["a_plus_b_plus_half"] = ab_sum;
  checks["rotation_eigenvalues"] = {e_low, e_high};
  checks["rotation_error"] = rotation_error;
  r.body["checks"] = std::move(checks);
  r.pass = std::abs(lambda_sum) <= 1e-14 && std::abs(ab_sum) <= 1e-14 && rotation_error <= 1e-12;
  return r;
}

void write_parameter_table(std::ostream& out, int mu_steps) {
  if (mu_steps < 2) throw DomainError("--mu-steps must be at least 2");
  out << "mu,d,lambda1,lambda2,a,b\n";
  char buf[256];
  for (int i = 0; i < mu_steps; ++i) {
    const double mu = 0.5 * i / (mu_steps - 1);
    const auto p = derive_parameters(mu);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", p.mu, p.d, p.lambda1, p.lambda2, p.a,
                  p.b);
    out << buf;
  }
}

Report lagrange_report(const ParameterSet& p) {
  Report r;
  const CriticalValues cv = critical_values(p);
  Json points = Json::array();
  for (const auto& lp : lagrange_points(p)) {
    const double grad = potential_gradient(p, Vector3<double>(lp.position)).norm();
    const PhaseState lifted = lift_to_phase(lp.position);
    const double energy = hamiltonian(p, lifted);
    const bool collinear = lp.name == "L1" || lp.name == "L2";
    const double expected = collinear ? cv.h12 : cv.h34.value_or(std::numeric_limits<double>::quiet_NaN());
    const double energy_error = std::abs(energy - expected);
    const double vf = vector_field(p, lifted).norm();
    Json j;
    j["name"] = lp.name;
    j["position"] = vec(lp.position);
    j["phase_state"] = vec(lifted);
    j["grad_U_norm"] = grad;
    j["vector_field_norm"] = vf;
    j["H"] = energy;
    j["H_error"] = energy_error;
    r.pass = r.pass && grad < 1e-10 && energy_error <= 1e-12 && vf < 1e-10;
    points.push_back(std::move(j));
  }
  r.body["points"] = std::move(points);
  Json values;
  values["h12"] = cv.h12;
  values["h34"] = cv.h34 ? Json(*cv.h34) : Json(nullptr);
  if (cv.h34) r.pass = r.pass && cv.h12 < *cv.h34;
  r.body["critical_values"] = std::move(values);

  const NumericCriticalPoints numeric = find_critical_points_numeric(p);
  const std::size_t expected_count = cv.h34 ? 4 : 2;
  Json oracle;
  oracle["n_seeds"] = numeric.n_seeds;
  oracle["n_converged"] = numeric.n_converged;
  oracle["n_failed"] = numeric.n_failed;
  oracle["n_points"] = numeric.points.size();
  oracle["expected_points"] = expected_count;
  Json found = Json::array();
  double max_mismatch = 0.0;
  for (const auto& q : numeric.points) {
    found.push_back({q.x(), q.y()});
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& lp : lagrange_points(p)) nearest = std::min(nearest, (lp.position.head<2>() - q).norm());
    max_mismatch = std::max(max_mismatch, nearest);
  }
  oracle["points"] = std::move(found);
  oracle["max_distance_to_closed_form"] = max_mismatch;
  r.body["newton_oracle"] = std::move(oracle);
  r.pass = r.pass && numeric.points.size() == expected_count && max_mismatch < 1e-9;
  return r;
}

Report symmetry_report(const ParameterSet& p, std::size_t n, std::uint64_t seed) {
  Report r;
  Json spatial = Json::array();
  for (const auto& inv : spatial_involutions()) {
    const ScanReport inv_report = verify_hamiltonian_invariance(p, inv, n, seed);
    Json j;
    j["name"] = inv.name;
    j["matrix"] = matrix_rows(inv.matrix);
    j["kind"] = to_string(inv.kind);
    j["involution"] = is_involution<6>(inv.matrix);
    try {
      j["planar_restriction"] = restrict_to_planar(inv).name;
    } catch (const DomainError&) {
      j["planar_restriction"] = nullptr;
    }
    j["invariance"] = to_json(inv_report);
    r.pass = r.pass && inv_report.pass && is_involution<6>(inv.matrix);
    spatial.push_back(std::move(j));
  }
  r.body["spatial"] = std::move(spatial);

  Json planar = Json::array();
  for (const auto& inv : planar_involutions()) {
    const ScanReport inv_report = verify_hamiltonian_invariance(p, inv, n, seed);
    Json j;
    j["name"] = inv.name;
    j["kind"] = to_string(inv.kind);
    j["invariance"] = to_json(inv_report);
    r.pass = r.pass && inv_report.pass;
    planar.push_back(std::move(j));
  }
  r.body["planar"] = std::move(planar);

  const GroupTable table = group_closure_table();
  Json group;
  group["elements"] = table.names;
  Json products = Json::array();
  for (Eigen::Index i = 0; i < table.product.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < table.product.cols(); ++j) {
      const int k = table.product(i, j);
      row.push_back(k >= 0 ? Json(table.names[k]) : Json(nullptr));
    }
    products.push_back(std::move(row));
  }
  group["products"] = std::move(products);
  group["closed"] = table.closed;
  group["abelian"] = table.abelian;
  group["all_self_inverse"] = table.all_self_inverse;
  group["z2_cubed"] = table.is_z2_cubed();
  r.body["group"] = std::move(group);
  r.pass = r.pass && table.is_z2_cubed();

  const auto found = search_signed_permutation_symmetries(p, 16, seed);
  Json search;
  search["n_found"] = found.size();
  Json names = Json::array();
  for (const auto& inv : found) names.push_back(inv.name);
  search["found"] = std::move(names);
  r.body["signed_permutation_search"] = std::move(search);
  r.pass = r.pass && found.size() == 8;
  return r;
}

Report flow_report(const ParameterSet& p, double c, std::size_t n_traj, std::uint64_t seed) {
  constexpr double kTFinal = 10.0;
  constexpr double kTol = 1e-10;
  Report r;
  const auto starts = sample_level_set(p, c, n_traj, seed);
  std::vector<double> drift(starts.size());
  std::vector<double> min_radius(starts.size());
  std::vector<int> collided(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) {
    const Trajectory tr = integrate_physical(p, starts[i], kTFinal, kTol);
    drift[i] = tr.max_energy_drift;
    min_radius[i] = tr.min_radius;
    collided[i] = tr.status == FlowStatus::kCollisionStop;
  });
  double max_drift = 0.0;
  for (double d : drift) max_drift = std::max(max_drift, d);
  Json spatial;
  spatial["n_trajectories"] = starts.size();
  spatial["t_final"] = kTFinal;
  spatial["tol"] = kTol;
  spatial["max_energy_drift"] = max_drift;
  spatial["min_radius"] = min_radius.empty() ? 0.0 : *std::min_element(min_radius.begin(), min_radius.end());
  spatial["n_collision_stops"] = std::count(collided.begin(), collided.end(), 1);
  r.body["energy_drift"] = std::move(spatial);

  const auto planar_starts = sample_level_set(p, c, std::max<std::size_t>(1, n_traj / 4), seed, true);
  double max_out_of_plane = 0.0;
  for (const auto& s : planar_starts) {
    const Trajectory tr = integrate_physical(p, s, kTFinal, kTol);
    for (const auto& st : tr.states)
      max_out_of_plane = std::max({max_out_of_plane, std::abs(st[kZ]), std::abs(st[kPz])});
  }
  r.body["planar_max_out_of_plane"] = max_out_of_plane;
  r.pass = max_drift < 1e-8 && max_out_of_plane == 0.0;
  return r;
}

Report verify_all(const VerifyAllOptions& options) {
  Report r;
  Json checks = Json::array();
  std::size_t n_failed = 0;
  auto add = [&](Json entry, bool pass) {
    if (!pass) ++n_failed;
    checks.push_back(std::move(entry));
  };
  const std::size_t n_small = std::min<std::size_t>(options.n, 10000);

  for (double mu : options.mu_list) {
    const ParameterSet p = derive_parameters(mu);
    const double h12 = critical_values(p).h12;

    const Report params = parameters_report(p);
    add(check_entry("parameters", mu, {}, {}, params.pass, params.body), params.pass);
    const Report lagrange = lagrange_report(p);
    add(check_entry("lagrange", mu, {}, {}, lagrange.pass, lagrange.body), lagrange.pass);
    const Report symmetry = symmetry_report(p, 256, options.seed);
    add(check_entry("symmetry", mu, {}, {}, symmetry.pass, symmetry.body), symmetry.pass);

    const double ball = std::cbrt(1.0 / p.lambda2);
    const ScanReport l1 = lemma1_check(p, 0.5 * ball);
    add(check_entry("lemma_angular_minimum", mu, {}, {}, l1.pass, to_json(l1)), l1.pass);
    const ScanReport l2 = lemma2_scan(p);
    add(check_entry("lemma_radial_monotone", mu, {}, {}, l2.pass, to_json(l2)), l2.pass);
    const ScanReport l3 = lemma3_scan(p);
    add(check_entry("lemma_radial_concavity", mu, {}, {}, l3.pass, to_json(l3)), l3.pass);

    for (double offset : options.c_offsets) {
      const double c = h12 - offset;
      const RegionCensus census = component_census(p, c, GridSpec{});
      const bool census_ok = census.n_bounded == 1 && census.bounded_component >= 0;
      add(check_entry("hill_region_census", mu, offset, c, census_ok, to_json(census)), census_ok);
      const ScanReport radius = bounded_radius_check(p, c);
      add(check_entry("bounded_component_radius", mu, offset, c, radius.pass, to_json(radius)), radius.pass);
      const ScanReport chart = regularization_consistency(p, c, n_small, options.seed);
      add(check_entry("regularization_consistency", mu, offset, c, chart.pass, to_json(chart)), chart.pass);
      const ScanReport spatial = transversality_scan(p, c, options.n, options.seed, false);
      add(check_entry("transversality", mu, offset, c, spatial.pass, to_json(spatial)), spatial.pass);
      const ScanReport planar = transversality_scan(p, c, options.n, options.seed, true);
      add(check_entry("transversality_planar", mu, offset, c, planar.pass, to_json(planar)), planar.pass);
      const ScanReport regularized = regularized_transversality_scan(p, c, 0.0, options.n, options.seed);
      add(check_entry("regularized_transversality", mu, offset, c, regularized.pass, to_json(regularized)),
          regularized.pass);
      const Report flow = flow_report(p, c, 8, options.seed);
      add(check_entry("flow_energy", mu, offset, c, flow.pass, flow.body), flow.pass);
    }
  }
  r.body["checks"] = std::move(checks);
  Json summary;
  summary["n_checks"] = r.body["checks"].size();
  summary["n_failed"] = n_failed;
  summary["verdict"] = n_failed == 0 ? "pass" : "fail";
  r.body["summary"] = std::move(summary);
  r.pass = n_failed == 0;
  return r;
}

}  // namespace hill4bp
