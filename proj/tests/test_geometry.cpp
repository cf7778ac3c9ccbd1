#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ernscat/geometry.hpp"

using namespace ern;

namespace {
const BlackHoleParams bh(1.0);

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
  return lo + (hi - lo) * u;
}
}  // namespace

TEST_CASE("metric coefficient") {
  CHECK(metric_D(1.0, bh) == doctest::Approx(0.0));
  CHECK(metric_D(2.0, bh) == doctest::Approx(0.25));
  CHECK(metric_D(1e9, bh) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(metric_D(-1.0, bh), std::domain_error);

  // dD/dr against central differences at random exterior points.
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    const double r = uniform_in(rng, 1.1, 50.0);
    const double h = 1e-5 * r;
    const double fd = (metric_D(r + h, bh) - metric_D(r - h, bh)) / (2 * h);
    CHECK(metric_D_prime(r, bh) == doctest::Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("tortoise closed form and derivative identity") {
  CHECK(tortoise(2.0, bh) == doctest::Approx(0.0).epsilon(1e-14));
  // r = 3M: direct evaluation of the closed form.
  const double expected = 3.0 - 1.0 + 1.0 / (1.0 - 3.0) + 2.0 * std::log(2.0);
  CHECK(tortoise(3.0, bh) == doctest::Approx(expected).epsilon(1e-14));
  CHECK_THROWS_AS(tortoise(1.0, bh), std::domain_error);
  // Pole: r -> M+ diverges to -infinity.
  CHECK(tortoise(1.0 + 1e-9, bh) < -1e8);

  // dr_*/dr = 1/D at 100 random exterior points, central FD, rel err < 1e-8.
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const double r = uniform_in(rng, 1.05, 80.0);
    const double h = 1e-6 * r * (r - 1.0) / r;  // scale into the throat
    const double fd = (tortoise(r + h, bh) - tortoise(r - h, bh)) / (2 * h);
    const double exact = 1.0 / metric_D(r, bh);
    CHECK(std::abs(fd - exact) / exact < 1e-8);
  }
}

TEST_CASE("invert_tortoise round trips") {
  CHECK(invert_tortoise(0.0, Branch::Exterior, bh) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(invert_tortoise(tortoise(5.0, bh), Branch::Exterior, bh) ==
        doctest::Approx(5.0).epsilon(1e-12));

  // Deep throat: r - M ~ M^2/|r_*|.
  const double r_deep = invert_tortoise(-1e6, Branch::Exterior, bh);
  CHECK(r_deep - 1.0 == doctest::Approx(1e-6).epsilon(1e-2));
  CHECK(tortoise(r_deep, bh) == doctest::Approx(-1e6).epsilon(1e-10));

  std::mt19937_64 rng(13);
  for (int i = 0; i < 200; ++i) {
    const double rstar = uniform_in(rng, -2000.0, 2000.0);
    const double r = invert_tortoise(rstar, Branch::Exterior, bh);
    CHECK(std::abs(tortoise(r, bh) - rstar) < 1e-10 * (1.0 + std::abs(rstar)));
  }
  for (int i = 0; i < 50; ++i) {
    const double r0 = uniform_in(rng, 0.4, 0.97);
    const double rstar = tortoise(r0, bh);
    const double r = invert_tortoise(rstar, Branch::Interior, bh);
    CHECK(r == doctest::Approx(r0).epsilon(1e-10));
  }
}

TEST_CASE("hyperboloidal time function") {
  // h(M) = 0 and h(2M) = -M on the near branch.
  ChartPoint p{Chart::VR, 10.0, 1.0};
  CHECK(tstar(p, bh) == doctest::Approx(10.0));
  p.r = 2.0;
  CHECK(tstar(p, bh) == doctest::Approx(9.0));
  // Far branch: -2 r_* - 1/log r up to the fixed joining constant; both the
  // 1/log sign and the constant are forced by timelikeness of dt*.
  p.r = 30.0;
  p.coord1 = 100.0;
  CHECK(tstar(p, bh) == doctest::Approx(100.0 - 2.0 * tortoise(30.0, bh) -
                                        1.0 / std::log(30.0) + tstar_far_offset(bh)));
  // The constant scales with the mass.
  const BlackHoleParams bh2(2.0);
  CHECK(tstar_far_offset(bh2) == doctest::Approx(2.0 * tstar_far_offset(bh)));

  // dt* is timelike across both branches and the blend.
  for (double r : {1.001, 1.5, 2.0, 5.0, 9.9, 11.0, 14.0, 17.0, 19.9, 25.0, 50.0, 200.0,
                   1000.0, 0.8, 0.5}) {
    CHECK(tstar_conorm_sq(r, bh) < 0.0);
  }

  // h' matches finite differences of h through the blend region.
  for (double r : {3.0, 10.5, 12.0, 15.0, 18.5, 22.0, 40.0}) {
    const double h = 1e-6;
    const double fd = (tstar_height(r + h, bh) - tstar_height(r - h, bh)) / (2 * h);
    CHECK(tstar_height_prime(r, bh) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("chart conversions commute") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    ChartPoint p{Chart::VR, uniform_in(rng, 5.0, 500.0), uniform_in(rng, 1.05, 90.0)};
    const ChartPoint q = convert(convert(convert(p, Chart::TR, bh), Chart::UR, bh),
                                 Chart::VR, bh);
    CHECK(q.coord1 == doctest::Approx(p.coord1).epsilon(1e-12));
    const ChartPoint w = convert(convert(p, Chart::TSTAR_R, bh), Chart::VR, bh);
    CHECK(w.coord1 == doctest::Approx(p.coord1).epsilon(1e-12));
  }
}

TEST_CASE("couch-torrence inversion") {
  const CouchTorrence fixed = couch_torrence(2.0, bh);
  CHECK(fixed.r_image == doctest::Approx(2.0));
  CHECK(fixed.omega == doctest::Approx(1.0));
  CHECK_THROWS_AS(couch_torrence(1.0, bh), std::domain_error);

  // Involution and r_* antisymmetry at 1000 random radii in (M, 100M).
  std::mt19937_64 rng(19);
  for (int i = 0; i < 1000; ++i) {
    const double r = uniform_in(rng, 1.0 + 1e-6, 100.0);
    const double ri = couch_torrence(r, bh).r_image;
    CHECK(std::abs(couch_torrence(ri, bh).r_image - r) < 1e-10 * (1.0 + r));
    CHECK(std::abs(tortoise(ri, bh) + tortoise(r, bh)) < 1e-10 * (1.0 + std::abs(tortoise(r, bh))));
  }

  // Mass-parameter covariance: the fixed sphere sits at 2M.
  const BlackHoleParams bh3(3.0);
  CHECK(couch_torrence(6.0, bh3).r_image == doctest::Approx(6.0));
}

TEST_CASE("boundary weights") {
  // rho_I -> 0 as r -> infinity at fixed t*.
  ChartPoint p{Chart::TSTAR_R, 50.0, 4000.0};
  CHECK(boundary_weights(p, bh).rho_I == doctest::Approx(50.0 / 4000.0));

  // r = M, t* = 100: rho_F = 1/(100 M).
  ChartPoint ph{Chart::TSTAR_R, 100.0, 1.0};
  CHECK(boundary_weights(ph, bh).rho_F == doctest::Approx(1e-2));
  CHECK(boundary_weights(ph, bh).rho_H == doctest::Approx(0.0));

  // Fixed r > M, t* -> infinity: rho_K -> 0 and rho_F -> (r-M)/r.
  ChartPoint pk{Chart::TSTAR_R, 1e7, 3.0};
  const BoundaryWeights w = boundary_weights(pk, bh);
  CHECK(w.rho_K < 1e-5);
  CHECK(w.rho_F == doctest::Approx(2.0 / 3.0).epsilon(1e-6));

  // Strictly positive on interior samples.
  std::mt19937_64 rng(23);
  for (int i = 0; i < 100; ++i) {
    ChartPoint q{Chart::TSTAR_R, uniform_in(rng, 1.5, 300.0), uniform_in(rng, 1.01, 200.0)};
    const BoundaryWeights bw = boundary_weights(q, bh);
    CHECK(bw.rho_I > 0.0);
    CHECK(bw.rho_plus > 0.0);
    CHECK(bw.rho_K > 0.0);
    CHECK(bw.rho_F > 0.0);
    CHECK(bw.rho_H > 0.0);
  }
  ChartPoint bad{Chart::TSTAR_R, -1.0, 2.0};
  CHECK_THROWS_AS(boundary_weights(bad, bh), std::domain_error);
}

TEST_CASE("conformal transport") {
  // f == 0 integrates to zero.
  const TransportResult zero =
      conformal_transport([](double, double) { return 0.0; }, 20.0, 40.0, 4000.0);
  CHECK(zero.value == doctest::Approx(0.0));

  // Smooth bump: value matches an independent fine-step quadrature to 1e-6.
  const auto bump = [](double u, double v) {
    const double du = (u - 30.0) / 8.0, dv = (v - 60.0) / 12.0;
    return std::exp(-du * du - dv * dv);
  };
  const TransportResult coarse = conformal_transport(bump, 25.0, 45.0, 2000.0, 1e-1);
  const TransportResult fine = conformal_transport(bump, 25.0, 45.0, 8000.0, 1e-3);
  CHECK(std::abs(coarse.value - fine.value) < 1e-6);

  // Applying the conformal scaling field recovers f at interior points.
  std::mt19937_64 rng(29);
  for (int i = 0; i < 10; ++i) {
    const double u = uniform_in(rng, 22.0, 35.0);
    const double v = uniform_in(rng, 40.0, 70.0);
    const auto F = [&](double uu, double vv) {
      return conformal_transport(bump, uu, vv, 6000.0, 2e-3).value;
    };
    const double lhs = apply_conformal_scaling(F, u, v, 1e-3);
    CHECK(lhs == doctest::Approx(bump(u, v)).epsilon(5e-4));
  }
}
