#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "hill4bp/model.hpp"
#include "support.hpp"

using namespace hill4bp;
using testing::rel_err;

namespace {

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

void check_close(double got, double want) {
  if (want == 0.0)
    CHECK(got == 0.0);
  else
    CHECK(rel_err(got, want) <= 1e-14);
}

}  // namespace

TEST_CASE("derived constants match extended-precision values") {
  for (const auto& f : kFrozen) {
    CAPTURE(f.mu);
    const auto p = derive_parameters(f.mu);
    check_close(p.d, f.d);
    check_close(p.lambda1, f.lambda1);
    check_close(p.lambda2, f.lambda2);
    check_close(p.a, f.a);
    check_close(p.b, f.b);
  }
}

TEST_CASE("lambda1 keeps full relative precision for tiny mu") {
  const auto p = derive_parameters(1e-10);
  CHECK(rel_err(p.lambda1, 2.249999999943749999991562e-10) <= 1e-14);
  CHECK(rel_err(p.b, 0.4999999998875000000028125) <= 1e-15);
}

TEST_CASE("trace identities hold across the whole range") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  for (int i = 0; i < 1000; ++i) {
    const auto p = derive_parameters(u(rng));
    CHECK(std::abs(p.lambda1 + p.lambda2 - 3.0) <= 1e-14);
    CHECK(std::abs(p.a + p.b + 0.5) <= 1e-14);
    CHECK(p.lambda1 <= p.lambda2);
    CHECK(p.a < 0.0);
    CHECK(p.b > 0.0);
  }
}

TEST_CASE("long double evaluation agrees with double") {
  for (const auto& f : kFrozen) {
    const auto pd = derive_parameters(f.mu);
    const auto pl = derive_parameters<long double>(static_cast<long double>(f.mu));
    CHECK(std::abs(pd.lambda1 - static_cast<double>(pl.lambda1)) <= 1e-15);
    CHECK(std::abs(pd.lambda2 - static_cast<double>(pl.lambda2)) <= 4e-16);
  }
}

TEST_CASE("mu outside [0, 1/2] is rejected without folding") {
  CHECK_THROWS_AS(derive_parameters(-1e-12), DomainError);
  CHECK_THROWS_AS(derive_parameters(0.5000001), DomainError);
  CHECK_THROWS_AS(derive_parameters(0.8), DomainError);
  CHECK_THROWS_AS(derive_parameters(std::numeric_limits<double>::quiet_NaN()), DomainError);
  CHECK_NOTHROW(derive_parameters(0.5));
}

TEST_CASE("rotation of the tidal block diagonalizes to (a, b)") {
  for (int i = 0; i <= 100; ++i) {
    const double mu = 0.5 * i / 100.0;
    const auto p = derive_parameters(mu);
    const auto [lo, hi] = rotation_diagonalization_check(mu);
    CHECK(std::abs(lo - p.a) <= 1e-12);
    CHECK(std::abs(hi - p.b) <= 1e-12);
  }
}
