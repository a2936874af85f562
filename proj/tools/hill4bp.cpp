// Command-line front end: verification reports (JSON) and figure data (CSV).

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hill4bp/contact_scan.hpp"
#include "hill4bp/flow.hpp"
#include "hill4bp/hill_region.hpp"
#include "hill4bp/lagrange.hpp"
#include "hill4bp/regularization.hpp"
#include "hill4bp/reports.hpp"

using namespace hill4bp;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Energy {
  std::optional<double> c;
  std::optional<double> offset;

  void add_options(CLI::App* cmd) {
    auto* c_opt = cmd->add_option("--c", c, "energy level");
    auto* o_opt = cmd->add_option("--c-offset", offset, "energy level as H(L1) - offset");
    c_opt->excludes(o_opt);
  }
  bool given() const { return c || offset; }
  double resolve(const ParameterSet& p) const {
    if (offset) return critical_values(p).h12 - *offset;
    if (c) return *c;
    throw CLI::RequiredError("--c or --c-offset");
  }
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw DomainError("malformed number in list: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw DomainError("empty list");
  return out;
}

GridSpec parse_slice(const std::string& text, GridSpec grid) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq != 1) throw DomainError("--slice expects axis=value, e.g. z=0");
  switch (text[0]) {
    case 'x': grid.slice_axis = Axis::kX; break;
    case 'y': grid.slice_axis = Axis::kY; break;
    case 'z': grid.slice_axis = Axis::kZ; break;
    default: throw DomainError("--slice axis must be x, y or z");
  }
  grid.slice_value = std::stod(text.substr(2));
  return grid;
}

// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open output file " + path);
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json with_provenance(const Json& prov, const Json& body) {
  Json out;
  out["provenance"] = prov;
  for (const auto& [k, v] : body.items()) out[k] = v;
  return out;
}

// argv as recorded in reports: program path and output destination dropped so
// that identical runs written to different files stay byte-identical.
std::vector<std::string> recorded_args(int argc, char** argv) {
  std::vector<std::string> out;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "-o" || a == "--out") {
      ++i;
      continue;
    }
    if (a.rfind("--out=", 0) == 0) continue;
    out.push_back(a);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args = recorded_args(argc, argv);
  CLI::App app{"Spatial Hill four-body approximation: contact-property verification"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_path;
  app.add_option("-o,--out", out_path, "write the report here instead of stdout");

  double mu = 0.0;
  auto add_mu = [&](CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--mu", mu, "mass ratio in [0, 1/2]");
    if (required) opt->required();
  };
  std::size_t n = 100000;
  std::uint64_t seed = 0;

  auto* params = app.add_subcommand("params", "derived parameters, or the parameter table as CSV");
  add_mu(params, false);
  bool table = false;
  int mu_steps = 101;
  params->add_flag("--table", table, "CSV table over mu in [0, 1/2]");
  params->add_option("--mu-steps", mu_steps, "rows of the table");

  auto* lagrange = app.add_subcommand("lagrange", "Lagrange points and critical values");
  add_mu(lagrange, true);

  auto* region = app.add_subcommand("hill-region", "Hill-region census and zero-velocity curves");
  add_mu(region, true);
  Energy region_energy;
  region_energy.add_options(region);
  int grid_n = 256;
  std::string slice = "z=0";
  std::string contour_path;
  bool spatial_grid = false;
  region->add_option("--grid", grid_n, "cells per axis");
  region->add_option("--slice", slice, "2-D slice axis=value");
  region->add_option("--contour", contour_path, "write zero-velocity curves (CSV) here");
  region->add_flag("--3d", spatial_grid, "census over a 3-D grid instead of a slice");

  auto* scan = app.add_subcommand("scan-contact", "transversality scan of dH(X) on Sigma_c^b");
  add_mu(scan, true);
  Energy scan_energy;
  scan_energy.add_options(scan);
  bool planar = false;
  std::string samples_path;
  scan->add_option("--n", n, "number of samples");
  scan->add_option("--seed", seed, "RNG seed");
  scan->add_flag("--planar", planar, "restrict to z = pz = 0");
  scan->add_option("--samples", samples_path, "write per-sample CSV here");

  auto* scan_reg = app.add_subcommand("scan-regularized", "transversality of dQ(X) near the collision fiber");
  add_mu(scan_reg, true);
  Energy reg_energy;
  reg_energy.add_options(scan_reg);
  double eps = 0.0;
  scan_reg->add_option("--n", n, "number of samples");
  scan_reg->add_option("--seed", seed, "RNG seed");
  scan_reg->add_option("--eps", eps, "collision neighbourhood size (default 0.9 eps_max)");
  scan_reg->add_option("--samples", samples_path, "write per-sample CSV here");

  auto* sym = app.add_subcommand("symmetry", "involutions, invariance of H and the group table");
  add_mu(sym, true);
  std::size_t sym_n = 1000;
  sym->add_option("--n", sym_n, "random states per invariance check");
  sym->add_option("--seed", seed, "RNG seed");

  auto* integ = app.add_subcommand("integrate", "trajectory CSV in the physical or regularized chart");
  add_mu(integ, true);
  std::vector<double> state;
  double t_final = 10.0;
  double tol = 1e-10;
  bool regularized = false;
  Energy integ_energy;
  integ->add_option("--state", state, "x y z px py pz")->expected(6)->required();
  integ->add_option("--t", t_final, "final time (arc parameter s with --regularized)");
  integ->add_option("--tol", tol, "local error tolerance in [1e-13, 1e-6]");
  integ->add_flag("--regularized", regularized, "integrate the regularized flow of Q");
  integ_energy.add_options(integ);

  auto* verify = app.add_subcommand("verify-all", "every check over a (mu, c) grid");
  std::string mu_list = "0,0.00095,0.2,0.5";
  std::string c_offsets = "0.01,0.1,0.5";
  verify->add_option("--mu-list", mu_list, "comma-separated mass ratios");
  verify->add_option("--c-offsets", c_offsets, "comma-separated offsets below H(L1)");
  verify->add_option("--n", n, "samples per scan");
  verify->add_option("--seed", seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*params) {
      if (table) {
        std::ostringstream csv;
        write_parameter_table(csv, mu_steps);
        emit(out_path, csv.str());
        return kExitPass;
      }
      const auto p = derive_parameters(mu);
      const Report r = parameters_report(p);
      emit(out_path, dump(with_provenance(provenance(args, {}, mu, nullptr), r.body)));
      return r.pass ? kExitPass : kExitFail;
    }
    if (*lagrange) {
      const auto p = derive_parameters(mu);
      const Report r = lagrange_report(p);
      emit(out_path, dump(with_provenance(provenance(args, {}, mu, nullptr), r.body)));
      return r.pass ? kExitPass : kExitFail;
    }
    if (*region) {
      const auto p = derive_parameters(mu);
      const double c = region_energy.resolve(p);
      GridSpec grid;
      grid.resolution = grid_n;
      if (spatial_grid)
        grid.dims = 3;
      else
        grid = parse_slice(slice, grid);
      const RegionCensus census = component_census(p, c, grid);
      Json body;
      body["census"] = to_json(census);
      bool pass = true;
      if (c < critical_values(p).h12) {
        const ScanReport radius = bounded_radius_check(p, c, grid);
        body["bounded_radius"] = to_json(radius);
        pass = radius.pass;
      }
      if (!contour_path.empty()) {
        if (grid.dims != 2) throw DomainError("--contour needs a 2-D slice");
        std::ostringstream csv;
        write_contour_csv(csv, zero_velocity_contour(p, c, grid));
        emit(contour_path, csv.str());
      }
      emit(out_path, dump(with_provenance(provenance(args, {}, mu, c), body)));
      return pass ? kExitPass : kExitFail;
    }
    if (*scan) {
      const auto p = derive_parameters(mu);
      const double c = scan_energy.resolve(p);
      const ScanReport r = transversality_scan(p, c, n, seed, planar);
      if (!samples_path.empty()) {
        std::ostringstream csv;
        write_transversality_csv(csv, transversality_samples(p, c, n, seed, planar));
        emit(samples_path, csv.str());
      }
      emit(out_path, dump(with_provenance(provenance(args, seed, mu, c), to_json(r))));
      return r.pass ? kExitPass : kExitFail;
    }
    if (*scan_reg) {
      const auto p = derive_parameters(mu);
      const double c = reg_energy.resolve(p);
      const ScanReport r = regularized_transversality_scan(p, c, eps, n, seed);
      if (!samples_path.empty()) {
        std::ostringstream csv;
        write_regularized_csv(csv, regularized_samples(p, c, r.metric("eps"), n, seed));
        emit(samples_path, csv.str());
      }
      emit(out_path, dump(with_provenance(provenance(args, seed, mu, c), to_json(r))));
      return r.pass ? kExitPass : kExitFail;
    }
    if (*sym) {
      const auto p = derive_parameters(mu);
      const Report r = symmetry_report(p, sym_n, seed);
      emit(out_path, dump(with_provenance(provenance(args, seed, mu, nullptr), r.body)));
      return r.pass ? kExitPass : kExitFail;
    }
    if (*integ) {
      const auto p = derive_parameters(mu);
      const PhaseState s0 = Eigen::Map<const PhaseState>(state.data());
      std::ostringstream csv;
      if (regularized) {
        const double h0 = hamiltonian(p, s0);
        const double c = integ_energy.given() ? integ_energy.resolve(p) : h0;
        if (std::abs(h0 - c) > 1e-10 * std::max(1.0, std::abs(c)))
          throw DomainError("--state must lie on H = c for the regularized flow");
        write_regularized_trajectory_csv(csv, integrate_regularized(p, c, regularize(s0), t_final, tol));
      } else {
        const Trajectory tr = integrate_physical(p, s0, t_final, tol);
        write_trajectory_csv(csv, tr);
        if (tr.status == FlowStatus::kCollisionStop)
          std::cerr << "collision stop at t = " << tr.t.back() << "\n";
      }
      emit(out_path, csv.str());
      return kExitPass;
    }
    if (*verify) {
      VerifyAllOptions opts;
      opts.mu_list = parse_list(mu_list);
      opts.c_offsets = parse_list(c_offsets);
      opts.n = n;
      opts.seed = seed;
      const Report r = verify_all(opts);
      Json body = r.body;
      Json prov = provenance(args, seed, opts.mu_list, nullptr);
      prov["c_offsets"] = opts.c_offsets;
      emit(out_path, dump(with_provenance(prov, body)));
      return r.pass ? kExitPass : kExitFail;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: malformed number (" << e.what() << ")\n";
    return kExitUsage;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
