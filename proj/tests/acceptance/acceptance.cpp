// Acceptance run: one [PASS]/[FAIL] line per criterion, exit 1 if any fails.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "hill4bp/contact_scan.hpp"
#include "hill4bp/flow.hpp"
#include "hill4bp/hill_region.hpp"
#include "hill4bp/lagrange.hpp"
#include "hill4bp/model.hpp"
#include "hill4bp/regularization.hpp"

using namespace hill4bp;

namespace {

constexpr double kMus[] = {0.0, 0.00095, 0.2, 0.5};
constexpr double kOffsets[] = {0.01, 0.1, 0.5};
constexpr std::uint64_t kSeed = 7;

// 40-digit mpmath evaluations of the closed forms.
struct Frozen {
  double mu, d, lambda1, lambda2, a, b;
};
constexpr Frozen kFrozen[] = {
    {0.0, 1.0, 0.0, 3.0, -1.0, 0.5},
    {0.00095, 0.9985753389204041423827, 0.002136991619393786425915, 2.997863008380606213574,
     -0.998931504190303106787, 0.498931504190303106787},
    {0.2, 0.7211102550927978586238, 0.4183346173608032120642, 2.581665382639196787936, -0.7908326913195983939679,
     0.2908326913195983939679},
    {0.5, 0.5, 0.75, 2.25, -0.625, 0.125},
};

/// Accumulates the verdict of one criterion plus a short measurement summary.
struct Criterion {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED(" << what << ")";
    }
  }
};

double rel_err(double got, double want) {
  return want == 0.0 ? std::abs(got) : std::abs(got - want) / std::abs(want);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

int n_failed = 0;

void run(int number, const std::string& title, double budget_s, const std::function<void(Criterion&)>& body) {
  Criterion cr;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(cr);
  } catch (const std::exception& e) {
    cr.require(false, std::string("exception: ") + e.what());
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0) cr.require(elapsed < budget_s, "runtime budget " + fmt(budget_s) + " s");
  if (!cr.pass) ++n_failed;
  std::printf("[%s] criterion %d: %s;%s; %.2f s\n", cr.pass ? "PASS" : "FAIL", number, title.c_str(),
              cr.detail.str().c_str(), elapsed);
  std::fflush(stdout);
}

void parameter_table(Criterion& cr) {
  double worst = 0.0, identity = 0.0;
  for (const auto& f : kFrozen) {
    const auto p = derive_parameters(f.mu);
    for (auto [got, want] : {std::pair{p.d, f.d}, {p.lambda1, f.lambda1}, {p.lambda2, f.lambda2}, {p.a, f.a},
                             {p.b, f.b}})
      worst = std::max(worst, rel_err(got, want));
    identity = std::max({identity, std::abs(p.lambda1 + p.lambda2 - 3.0), std::abs(p.a + p.b + 0.5)});
  }
  cr.detail << " max rel err " << fmt(worst) << ", identity err " << fmt(identity);
  cr.require(worst <= 1e-14, "closed forms");
  cr.require(identity <= 1e-14, "identities");
}

void rotation_check(Criterion& cr) {
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double mu = 0.005 * i;
    const auto p = derive_parameters(mu);
    const auto [lo, hi] = rotation_diagonalization_check(mu);
    worst = std::max({worst, std::abs(lo - std::min(p.a, p.b)), std::abs(hi - std::max(p.a, p.b))});
  }
  cr.detail << " 101 mu values, max eigenvalue err " << fmt(worst);
  cr.require(worst <= 1e-12, "eigenvalues");
}

void lagrange(Criterion& cr) {
  double grad = 0.0, h_err = 0.0, match = 0.0;
  for (double mu : kMus) {
    const auto p = derive_parameters(mu);
    const CriticalValues cv = critical_values(p);
    for (const auto& lp : lagrange_points(p)) {
      grad = std::max(grad, potential_gradient(p, lp.position).norm());
      const bool collinear = lp.name == "L1" || lp.name == "L2";
      const double want = collinear ? -1.5 * std::cbrt(p.lambda2) : -1.5 * std::cbrt(p.lambda1);
      h_err = std::max(h_err, std::abs(hamiltonian(p, lift_to_phase(lp.position)) - want));
    }
    if (cv.h34) cr.require(cv.h12 < *cv.h34, "h12 < h34");
  }
  for (auto [mu, expected] : {std::pair{0.2, std::size_t{4}}, {0.0, std::size_t{2}}}) {
    const auto p = derive_parameters(mu);
    const NumericCriticalPoints num = find_critical_points_numeric(p);
    cr.detail << " mu=" << mu << ": " << num.points.size() << " points;";
    cr.require(num.points.size() == expected, "Newton oracle count");
    for (const auto& q : num.points) {
      double best = INFINITY;
      for (const auto& lp : lagrange_points(p)) best = std::min(best, (lp.position.head<2>() - q).norm());
      match = std::max(match, best);
    }
  }
  cr.detail << " |grad U| " << fmt(grad) << ", H err " << fmt(h_err) << ", oracle mismatch " << fmt(match);
  cr.require(grad < 1e-10, "gradient");
  cr.require(h_err <= 1e-12, "critical values");
  cr.require(match < 1e-9, "oracle match");
}

struct CensusCase {
  double mu;
  double c;
  std::size_t bounded;
  std::optional<std::size_t> unbounded;
};

std::vector<CensusCase> census_cases() {
  const auto p2 = derive_parameters(0.2);
  const auto p0 = derive_parameters(0.0);
  const CriticalValues cv2 = critical_values(p2);
  return {{0.2, cv2.h12 - 0.1, 1, 1},
          {0.0, critical_values(p0).h12 - 0.1, 1, 2},
          {0.2, 0.5 * (cv2.h12 + *cv2.h34), 0, std::nullopt}};
}

void hill_census(Criterion& cr) {
  for (const auto& cc : census_cases()) {
    const auto p = derive_parameters(cc.mu);
    for (int res : {256, 512}) {
      GridSpec grid;
      grid.resolution = res;
      const RegionCensus census = component_census(p, cc.c, grid);
      cr.detail << " mu=" << cc.mu << " res " << res << ": " << census.n_bounded << "b+" << census.n_unbounded
                << "u;";
      cr.require(census.n_bounded == cc.bounded, "bounded count");
      if (cc.unbounded) cr.require(census.n_unbounded == *cc.unbounded, "unbounded count");
    }
  }
}

void corollary(Criterion& cr) {
  for (const auto& cc : census_cases()) {
    const auto p = derive_parameters(cc.mu);
    if (!(cc.c < critical_values(p).h12)) continue;
    for (int res : {256, 512}) {
      GridSpec grid;
      grid.resolution = res;
      const ScanReport r = bounded_radius_check(p, cc.c, grid);
      cr.detail << " mu=" << cc.mu << " res " << res << ": max |q| " << fmt(r.metric("max_radius_bounded"))
                << " < " << fmt(r.metric("ball_radius")) << ";";
      cr.require(r.pass && r.metric("max_radius_bounded") < r.metric("ball_radius"), "ball containment");
    }
  }
}

void lemma_scans(Criterion& cr) {
  double min2 = INFINITY, max3 = -INFINITY;
  for (double mu : {0.0, 0.2, 0.5}) {
    const auto p = derive_parameters(mu);
    const ScanReport l2 = lemma2_scan(p);
    const ScanReport l3 = lemma3_scan(p);
    cr.require(l2.pass && l2.extremum > 0.0, "lemma2 at mu=" + fmt(mu));
    cr.require(l3.pass && l3.extremum <= 1e-12, "lemma3 at mu=" + fmt(mu));
    min2 = std::min(min2, l2.extremum);
    max3 = std::max(max3, l3.extremum);
  }
  cr.detail << " 64^3 grids, min dU/drho " << fmt(min2) << ", max d2U/drho2 + sin^2 " << fmt(max3);
}

void proposition1(Criterion& cr) {
  double min_pairing = INFINITY, max_violation = -INFINITY;
  for (bool planar : {false, true}) {
    for (double mu : kMus) {
      const auto p = derive_parameters(mu);
      for (double off : kOffsets) {
        const ScanReport r = transversality_scan(p, critical_values(p).h12 - off, 100000, kSeed, planar);
        cr.require(r.pass && r.extremum > 0.0 && r.n_samples == 100000,
                   (planar ? "planar mu=" : "spatial mu=") + fmt(mu) + " off=" + fmt(off));
        cr.require(r.metric("max_bound_violation") <= 1e-10, "proof chain");
        min_pairing = std::min(min_pairing, r.extremum);
        max_violation = std::max(max_violation, r.metric("max_bound_violation"));
      }
    }
  }
  cr.detail << " 24 scans x 1e5, min dH(X) " << fmt(min_pairing) << ", max chain violation "
            << fmt(max_violation);
}

void consistency(Criterion& cr) {
  double round_trip = 0.0, distance = 0.0, q = 0.0;
  for (double mu : kMus) {
    const auto p = derive_parameters(mu);
    const ScanReport r = regularization_consistency(p, critical_values(p).h12 - 0.1, 10000, kSeed);
    cr.require(r.pass, "mu=" + fmt(mu));
    round_trip = std::max(round_trip, r.metric("max_round_trip_error"));
    distance = std::max(distance, r.metric("max_collision_distance_error"));
    q = std::max(q, r.metric("max_abs_Q_minus_half"));
  }
  cr.detail << " 1e4 states per mu, round trip " << fmt(round_trip) << ", |eta|(1-xi0) vs |P| " << fmt(distance)
            << ", |Q-1/2| " << fmt(q);
  cr.require(round_trip <= 1e-12, "round trip");
  cr.require(distance <= 1e-12, "collision distance");
  cr.require(q <= 1e-10, "Q level");
}

void proposition2(Criterion& cr) {
  double min_pairing = INFINITY, min_f = INFINITY, max_eta = 0.0, min_margin = INFINITY;
  for (double mu : kMus) {
    const auto p = derive_parameters(mu);
    for (double off : kOffsets) {
      const ScanReport r = regularized_transversality_scan(p, critical_values(p).h12 - off, 0.0, 100000, kSeed);
      const std::string tag = "mu=" + fmt(mu) + " off=" + fmt(off);
      cr.require(r.pass && r.extremum > 0.0 && r.n_samples == 100000, tag);
      cr.require(r.metric("min_abs_f") >= 0.5, "|f| " + tag);
      cr.require(r.metric("max_eta_norm") <= 2.0, "|eta| " + tag);
      cr.require(r.extremum >= r.metric("lower_bound") - 1e-10, "lower bound " + tag);
      min_pairing = std::min(min_pairing, r.extremum);
      min_f = std::min(min_f, r.metric("min_abs_f"));
      max_eta = std::max(max_eta, r.metric("max_eta_norm"));
      min_margin = std::min(min_margin, r.extremum - r.metric("lower_bound"));
    }
  }
  cr.detail << " 12 scans x 1e5, min dQ(X) " << fmt(min_pairing) << ", min |f| " << fmt(min_f) << ", max |eta| "
            << fmt(max_eta) << ", min margin over bound " << fmt(min_margin);
}

void flow_diagnostics(Criterion& cr) {
  // Energy drift.
  double drift = 0.0;
  std::size_t n_traj = 0;
  for (double mu : kMus) {
    const auto p = derive_parameters(mu);
    for (double off : kOffsets) {
      for (const auto& s : sample_level_set(p, critical_values(p).h12 - off, 8, kSeed)) {
        const Trajectory tr = integrate_physical(p, s, 10.0, 1e-10);
        cr.require(tr.status == FlowStatus::kCompleted, "collision stop");
        drift = std::max(drift, tr.max_energy_drift);
        ++n_traj;
      }
    }
  }
  cr.detail << " " << n_traj << " trajectories, max energy drift " << fmt(drift) << ";";
  cr.require(drift < 1e-8, "energy drift");

  // Transit of the collision fiber.
  double pole_q = 0.0, pole_distance = INFINITY;
  for (double mu : {0.0, 0.2, 0.5}) {
    const auto p = derive_parameters(mu);
    const double c = critical_values(p).h12 - 0.1;
    RegularizedState pole;
    pole.eta = Eigen::Vector4d(0.0, 0.6, 0.8, 0.0);
    pole.eta *= solve_fiber_radius(p, c, pole.xi, pole.eta);
    const RegularizedTrajectory back = integrate_regularized(p, c, pole, -1.0, 1e-12);
    const RegularizedTrajectory through = integrate_regularized(p, c, back.states.back(), 2.0, 1e-12, {1.0});
    cr.require(1.0 - through.states.front().xi[0] > 1e-3 && 1.0 - through.states.back().xi[0] > 1e-3,
               "transit endpoints off the fiber");
    pole_q = std::max({pole_q, back.max_q_drift, through.max_q_drift});
    pole_distance = std::min(pole_distance, through.min_pole_distance);
  }
  cr.detail << " pole transit |Q-1/2| " << fmt(pole_q) << ", min 1-xi0 " << fmt(pole_distance) << ";";
  cr.require(pole_q < 1e-8, "Q drift through the pole");
  cr.require(pole_distance < 1e-6, "pole reached");

  // Physical and regularized flows under the time reparametrization.
  double mismatch = 0.0;
  for (double mu : kMus) {
    const auto p = derive_parameters(mu);
    const double c = critical_values(p).h12 - 0.1;
    std::vector<double> s_out;
    for (int i = 1; i <= 20; ++i) s_out.push_back(0.1 * i);
    for (const auto& s : sample_level_set(p, c, 4, kSeed + 1)) {
      const RegularizedTrajectory rt = integrate_regularized(p, c, regularize(s), 2.0, 1e-12, s_out);
      const std::vector<double> times(rt.t.begin() + 1, rt.t.end());
      const Trajectory pt = integrate_physical(p, s, times.back(), 1e-12, times);
      if (pt.states.size() != rt.states.size()) {
        cr.require(false, "physical run stopped early");
        continue;
      }
      for (std::size_t i = 1; i < rt.states.size(); ++i) {
        if (1.0 - rt.states[i].xi[0] < 1e-3) continue;
        mismatch = std::max(mismatch, (deregularize(rt.states[i]).head<3>() - pt.states[i].head<3>()).norm());
      }
    }
  }
  cr.detail << " physical vs regularized " << fmt(mismatch);
  cr.require(mismatch < 1e-6, "flow match");
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void determinism(Criterion& cr) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("hill4bp_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string args =
      " verify-all --mu-list 0,0.00095,0.2,0.5 --c-offsets 0.01,0.1,0.5 --n 100000 --seed 7 -o ";
  struct Run {
    std::string env;
    std::string file;
  };
  // Thread counts are forced so the comparison holds on single-core hosts too.
  const Run runs[] = {{"HILL4BP_THREADS=4 ", "first.json"},
                      {"HILL4BP_THREADS=4 ", "second.json"},
                      {"HILL4BP_THREADS=1 ", "serial.json"}};
  std::vector<std::string> outputs;
  for (const auto& run : runs) {
    const std::string cmd = run.env + "\"" HILL4BP_CLI "\"" + args + "\"" + (dir / run.file).string() + "\"";
    const int status = std::system(cmd.c_str());
    cr.require(status == 0, run.file + " exit status");
    outputs.push_back(slurp(dir / run.file));
  }
  const bool repeat = !outputs[0].empty() && outputs[0] == outputs[1];
  const bool threads = !outputs[0].empty() && outputs[0] == outputs[2];
  cr.detail << " report " << outputs[0].size() << " bytes, repeat " << (repeat ? "identical" : "differs")
            << ", 1 vs 4 threads " << (threads ? "identical" : "differs");
  cr.require(repeat, "repeat run");
  cr.require(threads, "thread count");
  fs::remove_all(dir);
}

}  // namespace

int main() {
  run(1, "parameter table", 1.0, parameter_table);
  run(2, "rotation eigenvalues", 1.0, rotation_check);
  run(3, "Lagrange points", 10.0, lagrange);
  const auto t_census = std::chrono::steady_clock::now();
  run(4, "Hill-region census", 30.0, hill_census);
  run(5, "bounded component inside the critical ball", 0.0, corollary);
  const double census_total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_census).count();
  if (census_total >= 30.0) {
    ++n_failed;
    std::printf("[FAIL] criteria 4+5 combined runtime %.2f s exceeds 30 s\n", census_total);
  }
  run(6, "radial lemma scans", 20.0, lemma_scans);
  run(7, "physical transversality scans", 120.0, proposition1);
  run(8, "regularization consistency", 10.0, consistency);
  run(9, "regularized transversality scans", 120.0, proposition2);
  run(10, "flow diagnostics", 60.0, flow_diagnostics);
  run(11, "determinism of verify-all", 0.0, determinism);
  std::printf("%d criteria failed\n", n_failed);
  return n_failed == 0 ? 0 : 1;
}
