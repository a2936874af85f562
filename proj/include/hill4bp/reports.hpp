#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hill4bp/model.hpp"

namespace hill4bp {

using Json = nlohmann::ordered_json;

std::string version();

/// Report body plus aggregate verdict.
struct Report {
  Json body = Json::object();
  bool pass = true;
};

/// {version, argv, seed, mu, c}; seed, mu and c are null when not applicable.
Json provenance(const std::vector<std::string>& argv, std::optional<std::uint64_t> seed, const Json& mu,
                const Json& c);

/// mu, d, lambda1, lambda2, a, b plus the identities lambda1 + lambda2 - 3,
/// a + b + 1/2 and the rotation eigenvalue check.
Report parameters_report(const ParameterSet& p);

/// CSV `mu,d,lambda1,lambda2,a,b` over mu_steps evenly spaced mu in [0, 1/2].
void write_parameter_table(std::ostream& out, int mu_steps);

/// Closed-form points with |grad U| and H at the lifts, critical values, and
/// the Newton seed-grid oracle.
Report lagrange_report(const ParameterSet& p);

/// Involution kinds, invariance of H, restrictions to Fix(sigma), the group
/// table and the signed-permutation search.
Report symmetry_report(const ParameterSet& p, std::size_t n, std::uint64_t seed);

/// Energy drift over t = 10 at tol 1e-10 on n_traj level-set samples, plus
/// planar invariance.
Report flow_report(const ParameterSet& p, double c, std::size_t n_traj, std::uint64_t seed);

struct VerifyAllOptions {
  std::vector<double> mu_list;
  std::vector<double> c_offsets;
  std::size_t n = 100000;
  std::uint64_t seed = 0;
};

/// Every check over mu_list x c_offsets with c = H(L1) - offset.
Report verify_all(const VerifyAllOptions& options);

}  // namespace hill4bp
