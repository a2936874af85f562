#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "hill4bp/symmetry.hpp"
#include "support.hpp"

using namespace hill4bp;

TEST_CASE("symplectic type of the builtin involutions") {
  for (const auto& inv : spatial_involutions()) {
    CAPTURE(inv.name);
    CHECK(is_involution<6>(inv.matrix));
    CHECK(inv.kind == classify_symplectic<6>(inv.matrix));
    const bool reversor = inv.name.rfind("rho", 0) == 0;
    CHECK(inv.kind == (reversor ? SymplecticKind::kAntiSymplectic : SymplecticKind::kSymplectic));
  }
  CHECK(planar_involution("rho_x").kind == SymplecticKind::kAntiSymplectic);
  CHECK(planar_involution("rho_y").kind == SymplecticKind::kAntiSymplectic);
  CHECK(classify_symplectic<4>(Eigen::Matrix4i::Identity() * 2) == SymplecticKind::kNeither);
}

TEST_CASE("every builtin involution leaves H invariant") {
  for (double mu : {0.0, 0.2, 0.5}) {
    const auto p = derive_parameters(mu);
    for (const auto& inv : spatial_involutions()) {
      const ScanReport r = verify_hamiltonian_invariance(p, inv, 2000, 9);
      CAPTURE(inv.name);
      CHECK(r.pass);
      CHECK(r.extremum <= 1e-12);
    }
    for (const auto& inv : planar_involutions()) CHECK(verify_hamiltonian_invariance(p, inv, 2000, 9).pass);
  }
}

TEST_CASE("a non-symmetry is caught by the invariance scan") {
  Involution swap;
  swap.name = "x<->y";
  swap.matrix = Involution::Matrix::Identity();
  swap.matrix(0, 0) = swap.matrix(1, 1) = swap.matrix(3, 3) = swap.matrix(4, 4) = 0;
  swap.matrix(0, 1) = swap.matrix(1, 0) = swap.matrix(3, 4) = swap.matrix(4, 3) = 1;
  CHECK_FALSE(verify_hamiltonian_invariance(derive_parameters(0.2), swap, 100, 1).pass);
}

TEST_CASE("the involutions form Z2^3 with rho1 rho2 = sigma") {
  const GroupTable t = group_closure_table();
  CHECK(t.is_z2_cubed());
  auto index = [&](const std::string& name) {
    return static_cast<int>(std::find(t.names.begin(), t.names.end(), name) - t.names.begin());
  };
  CHECK(t.product(index("rho1"), index("rho2")) == index("sigma"));
  CHECK(t.product(index("rho3"), index("rho4")) == index("sigma"));
  CHECK(t.product(index("rho1"), index("rho3")) == index("-sigma"));
  CHECK(t.product(index("sigma"), index("-sigma")) == index("-id"));

  auto partial = spatial_involutions();
  partial.erase(partial.begin() + 2);  // drop sigma
  CHECK_FALSE(group_closure_table(partial).closed);
}

TEST_CASE("restriction to the planar problem") {
  CHECK(restrict_to_planar(spatial_involution("rho1")).name == "rho_x");
  CHECK(restrict_to_planar(spatial_involution("rho2")).name == "rho_x");
  CHECK(restrict_to_planar(spatial_involution("rho3")).name == "rho_y");
  CHECK(restrict_to_planar(spatial_involution("rho4")).name == "rho_y");
  CHECK(restrict_to_planar(spatial_involution("sigma")).name == "id");

  PhaseState s;
  s << 0.3, 0.4, 0.0, -0.1, 0.2, 0.0;
  const PhaseState a = apply(planar_involution("rho_x"), s);
  CHECK(a == apply(spatial_involution("rho1"), s));
  s[kZ] = 0.1;
  CHECK_THROWS_AS(apply(planar_involution("rho_x"), s), DomainError);
  CHECK_THROWS_AS(spatial_involution("tau"), DomainError);
}

TEST_CASE("brute-force search finds exactly the eight diagonal symmetries") {
  for (double mu : {0.0, 0.2, 0.5}) {
    const auto found = search_signed_permutation_symmetries(derive_parameters(mu), 16, 4);
    REQUIRE(found.size() == 8);
    std::set<std::string> names;
    for (const auto& inv : found) names.insert(inv.name);
    CHECK(names == std::set<std::string>{"id", "-id", "sigma", "-sigma", "rho1", "rho2", "rho3", "rho4"});
  }
}
