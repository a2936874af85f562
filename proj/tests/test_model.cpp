#include <doctest.h>

#include <random>

#include "hill4bp/model.hpp"
#include "support.hpp"

using namespace hill4bp;

TEST_CASE("both forms of the Hamiltonian agree") {
  std::mt19937_64 rng(1);
  for (double mu : {0.0, 0.00095, 0.2, 0.5}) {
    const auto p = derive_parameters(mu);
    for (int i = 0; i < 200; ++i) {
      const PhaseState s = testing::random_state(rng);
      CHECK(hamiltonian(p, s) == doctest::Approx(hamiltonian_rotating_form(p, s)).epsilon(1e-13));
      CHECK(jacobi_constant(p, s) == doctest::Approx(-2.0 * hamiltonian(p, s)));
    }
  }
}

TEST_CASE("vector field is the symplectic gradient of H") {
  std::mt19937_64 rng(2);
  const auto p = derive_parameters(0.2);
  auto H = [&](const PhaseState& s) { return hamiltonian(p, s); };
  for (int i = 0; i < 100; ++i) {
    const PhaseState s = testing::random_state(rng);
    const PhaseState f = vector_field(p, s);
    for (int k = 0; k < 3; ++k) {
      CHECK(f[k] == doctest::Approx(testing::partial(H, s, k + 3)).epsilon(1e-7));
      CHECK(f[k + 3] == doctest::Approx(-testing::partial(H, s, k)).epsilon(1e-7));
    }
  }
}

TEST_CASE("potential gradient and Hessian match finite differences") {
  std::mt19937_64 rng(3);
  const auto p = derive_parameters(0.5);
  auto U = [&](const Eigen::Vector3d& q) { return effective_potential(p, q); };
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d q = testing::random_state(rng).head<3>();
    const Eigen::Vector3d g = potential_gradient(p, q);
    const Eigen::Matrix3d h = potential_hessian(p, q);
    for (int k = 0; k < 3; ++k) {
      CHECK(g[k] == doctest::Approx(testing::partial(U, q, k)).epsilon(1e-7));
      auto gk = [&](const Eigen::Vector3d& x) { return potential_gradient(p, x)[k]; };
      for (int j = 0; j < 3; ++j) CHECK(h(k, j) == doctest::Approx(testing::partial(gk, q, j)).epsilon(1e-6));
    }
  }
}

TEST_CASE("spherical potential equals the Cartesian one") {
  const auto p = derive_parameters(0.2);
  const SphericalPoint sp{0.4, 1.1, 2.3};
  CHECK(effective_potential_spherical(p, sp) == doctest::Approx(effective_potential(p, to_cartesian(sp))));
  const SphericalPoint back = to_spherical(to_cartesian(sp));
  CHECK(back.rho == doctest::Approx(0.4));
  CHECK(back.theta == doctest::Approx(1.1));
  CHECK(back.phi == doctest::Approx(2.3));
}

TEST_CASE("collision is refused") {
  const auto p = derive_parameters(0.2);
  CHECK_THROWS_AS(effective_potential(p, Eigen::Vector3d::Zero().eval()), SingularityError);
  CHECK_THROWS_AS(vector_field(p, PhaseState::Zero().eval()), SingularityError);
  CHECK_THROWS_AS(hamiltonian(p, make_state<double>(Eigen::Vector3d(1e-13, 0, 0), Eigen::Vector3d::Zero())),
                  SingularityError);
}

TEST_CASE("invariant subspaces of the vector field") {
  const auto p = derive_parameters(0.2);
  PhaseState planar;
  planar << 0.3, -0.2, 0.0, 0.1, 0.7, 0.0;
  const PhaseState fp = vector_field(p, planar);
  CHECK(fp[kZ] == 0.0);
  CHECK(fp[kPz] == 0.0);

  PhaseState axis;
  axis << 0.0, 0.0, 0.5, 0.0, 0.0, 0.2;
  const PhaseState fa = vector_field(p, axis);
  for (int k : {kX, kY, kPx, kPy}) CHECK(fa[k] == 0.0);
  CHECK(fa[kPz] == doctest::Approx(-(1.0 + 1.0 / 0.125) * 0.5));
}
