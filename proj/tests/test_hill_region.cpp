#include <doctest.h>

#include <sstream>

#include "hill4bp/hill_region.hpp"
#include "hill4bp/lagrange.hpp"

using namespace hill4bp;

TEST_CASE("classification by the potential") {
  const auto p = derive_parameters(0.2);
  const double c = critical_values(p).h12 - 0.1;
  CHECK(classify(p, c, Eigen::Vector3d(0.1, 0.0, 0.0)) == Allowance::kAllowed);
  CHECK(classify(p, c, Eigen::Vector3d(0.0, 0.0, 2.0)) == Allowance::kForbidden);
  CHECK(classify(p, c, Eigen::Vector3d(2.5, 0.0, 0.0)) == Allowance::kAllowed);
  CHECK_THROWS_AS(classify(p, c, Eigen::Vector3d::Zero()), SingularityError);
}

TEST_CASE("planar census below, between and above the critical values") {
  SUBCASE("mu = 0.2 below H(L1): one bounded, one unbounded") {
    const auto p = derive_parameters(0.2);
    const RegionCensus r = component_census(p, critical_values(p).h12 - 0.1, GridSpec{});
    CHECK(r.n_bounded == 1);
    CHECK(r.n_unbounded == 1);
    CHECK(r.bounded_component >= 0);
    CHECK(r.warnings.empty());
  }
  SUBCASE("mu = 0 below H(L1): one bounded, two unbounded") {
    const auto p = derive_parameters(0.0);
    const RegionCensus r = component_census(p, critical_values(p).h12 - 0.1, GridSpec{});
    CHECK(r.n_bounded == 1);
    CHECK(r.n_unbounded == 2);
  }
  SUBCASE("mu = 0.2 between H(L1) and H(L3): nothing bounded") {
    const auto p = derive_parameters(0.2);
    const auto cv = critical_values(p);
    const RegionCensus r = component_census(p, 0.5 * (cv.h12 + *cv.h34), GridSpec{});
    CHECK(r.n_bounded == 0);
    CHECK(r.bounded_component < 0);
  }
  SUBCASE("energy value quoted for the mu = 0.2 figure at grid 512") {
    GridSpec g;
    g.resolution = 512;
    const RegionCensus r = component_census(derive_parameters(0.2), -2.1576, g);
    CHECK(r.n_bounded == 1);
    CHECK(r.n_unbounded == 1);
  }
}

TEST_CASE("census is stable under grid refinement") {
  for (double mu : {0.0, 0.2}) {
    const auto p = derive_parameters(mu);
    const double c = critical_values(p).h12 - 0.1;
    GridSpec fine;
    fine.resolution = 512;
    const RegionCensus a = component_census(p, c, GridSpec{});
    const RegionCensus b = component_census(p, c, fine);
    CHECK(a.n_bounded == b.n_bounded);
    CHECK(a.n_unbounded == b.n_unbounded);
  }
}

TEST_CASE("spatial census and other slices") {
  const auto p = derive_parameters(0.2);
  const double c = critical_values(p).h12 - 0.1;
  GridSpec g3;
  g3.dims = 3;
  g3.resolution = 64;
  const RegionCensus r3 = component_census(p, c, g3);
  CHECK(r3.n_bounded == 1);
  GridSpec xz;
  xz.slice_axis = Axis::kY;
  const RegionCensus rxz = component_census(p, c, xz);
  CHECK(rxz.n_bounded == 1);
  CHECK(rxz.max_radius_bounded < std::cbrt(1.0 / p.lambda2));
}

TEST_CASE("bounded component lies inside the critical ball") {
  for (double mu : {0.0, 0.00095, 0.2, 0.5}) {
    const auto p = derive_parameters(mu);
    for (double off : {0.01, 0.1, 0.5}) {
      const ScanReport r = bounded_radius_check(p, critical_values(p).h12 - off);
      CAPTURE(mu);
      CAPTURE(off);
      CHECK(r.pass);
      CHECK(r.extremum > 0.0);
      CHECK(r.metric("max_radius_bounded") < r.metric("ball_radius"));
      CHECK(r.metric("sphere_min_U") >= critical_values(p).h12 - 1e-12);
    }
  }
  const auto p = derive_parameters(0.2);
  CHECK_THROWS_AS(bounded_radius_check(p, critical_values(p).h12), DomainError);
}

TEST_CASE("zero-velocity contour around the bounded component") {
  const auto p = derive_parameters(0.2);
  const double c = critical_values(p).h12 - 0.1;
  const Contour contour = zero_velocity_contour(p, c);
  REQUIRE_FALSE(contour.curves.empty());
  const double r = std::cbrt(1.0 / p.lambda2);
  bool found_inner = false;
  for (const auto& curve : contour.curves) {
    double max_norm = 0.0;
    for (const auto& pt : curve.points) {
      max_norm = std::max(max_norm, pt.norm());
      CHECK(std::abs(effective_potential(p, Eigen::Vector3d(pt.x(), pt.y(), 0.0)) - c) < 1e-3 * std::abs(c));
    }
    if (curve.closed && max_norm < r) found_inner = true;
  }
  CHECK(found_inner);

  std::ostringstream csv;
  write_contour_csv(csv, contour);
  CHECK(csv.str().rfind("curve_id,x,y\n", 0) == 0);
}

TEST_CASE("census JSON carries the grid") {
  const auto p = derive_parameters(0.5);
  const auto j = to_json(component_census(p, critical_values(p).h12 - 0.5, GridSpec{}));
  CHECK(j["n_bounded"] == 1);
  CHECK(j["grid"]["resolution"] == 256);
  CHECK(j["grid"]["slice_axis"] == "z");
}
