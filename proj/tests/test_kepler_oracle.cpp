#include <cmath>
#include <numbers>

#include "doctest.h"
#include "relnbody/kepler_oracle.hpp"

using namespace relnbody;

namespace {

ConicParams conic(double e, double d) {
  ConicParams p;
  p.e = e;
  p.d = d;
  p.mu_eff = 1.0;
  p.periapsis_dir = {1, 0, 0};
  p.normal_dir = {0, 0, 1};
  return p;
}

// Relative two-body orbit with G(m1 + m2) = 1.5, started at apoapsis r = 3, so
// e = 0.5 and periapsis r = 1.
Scenario eccentric_two_body() {
  Scenario sc;
  sc.name = "eccentric";
  sc.formulation = Formulation::RS1;
  sc.bodies = {Body(1.0, {0, 0, 0}), Body(0.5, {3, 0, 0}, {0, 0.5, 0})};
  const double a = 2.0;
  sc.t_end = 2.0 * std::numbers::pi * std::sqrt(a * a * a / 1.5);
  sc.settings.sample_interval = sc.t_end / 400.0;
  return sc;
}

}  // namespace

TEST_CASE("conic radius") {
  const auto p = conic(0.5, 2.0);
  CHECK(conic_radius(p, 0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(conic_radius(p, std::numbers::pi) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(conic_radius(p, std::numbers::pi / 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(conic_radius(conic(0.0, 1.7), 1.234) == 1.7);
}

TEST_CASE("conic radius is even and smallest at periapsis") {
  for (double e : {0.1, 0.5, 0.9, 1.0, 1.5}) {
    const auto p = conic(e, 2.0);
    const double r0 = conic_radius(p, 0.0);
    for (double th = 0.05; th < 1.5; th += 0.05) {
      CHECK(conic_radius(p, th) == conic_radius(p, -th));
      CHECK(conic_radius(p, th) > r0);
    }
  }
}

TEST_CASE("conic radius outside the admissible range") {
  CHECK_THROWS_AS(conic_radius(conic(1.0, 1.0), std::numbers::pi), std::domain_error);
  CHECK_THROWS_AS(conic_radius(conic(2.0, 1.0), 2.5), std::domain_error);
}

TEST_CASE("fit_conic on a circular orbit") {
  std::vector<OrbitSample> samples;
  const double r = 2.0, mu = 3.0, w = std::sqrt(mu / (r * r * r));
  for (int i = 0; i < 50; ++i) {
    const double th = 0.1 * i;
    samples.push_back({{r * std::cos(th), r * std::sin(th), 0}, {-r * w * std::sin(th), r * w * std::cos(th), 0}});
  }
  const auto fit = fit_conic(samples, mu);
  CHECK(fit.params.e <= 1e-8);
  CHECK(fit.params.d == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.max_radial_residual <= 1e-12);
}

TEST_CASE("fit_conic on the analytic ellipse") {
  // Points on r = p/(1 + e cos th) with the vis-viva velocity of the ellipse.
  const double e = 0.3, p = 1.4, mu = 2.0;
  std::vector<OrbitSample> samples;
  for (int i = 0; i < 60; ++i) {
    const double th = -2.5 + 0.08 * i;
    const double r = p / (1 + e * std::cos(th));
    const double h = std::sqrt(mu * p);
    const Vec3 radial{std::cos(th), std::sin(th), 0};
    const Vec3 along{-std::sin(th), std::cos(th), 0};
    samples.push_back({r * radial, (mu / h) * e * std::sin(th) * radial + (h / r) * along});
  }
  const auto fit = fit_conic(samples, mu);
  CHECK(fit.params.e == doctest::Approx(e).epsilon(1e-12));
  CHECK(fit.params.semi_latus_rectum() == doctest::Approx(p).epsilon(1e-12));
  CHECK(fit.max_radial_residual <= 1e-12);
  CHECK(norm(fit.params.periapsis_dir - Vec3{1, 0, 0}) <= 1e-12);
}

TEST_CASE("fit_conic preconditions") {
  std::vector<OrbitSample> none;
  CHECK_THROWS_AS(fit_conic(none, 1.0), std::invalid_argument);
  std::vector<OrbitSample> one{{{1, 0, 0}, {0, 1, 0}}};
  CHECK_THROWS_AS(fit_conic(one, 0.0), std::invalid_argument);
  std::vector<OrbitSample> bent{{{1, 0, 0}, {0, 1, 0}}, {{0, 1, 0.1}, {-1, 0, 0}}};
  CHECK_THROWS_AS(fit_conic(bent, 1.0), std::domain_error);
}

TEST_CASE("propagated eccentric orbit fits its conic") {
  const auto traj = propagate(eccentric_two_body());
  REQUIRE(traj.termination == Termination::ReachedTEnd);
  const auto samples = orbit_samples(traj, 0);
  const auto fit = fit_conic(samples, 1.5);
  CHECK(fit.params.e == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(fit.max_radial_residual <= 1e-6);

  double r_min = 1e300, r_max = 0.0;
  for (const auto& s : samples) {
    r_min = std::min(r_min, norm(s.position));
    r_max = std::max(r_max, norm(s.position));
  }
  CHECK(r_max / r_min == doctest::Approx(3.0).epsilon(1e-6));

  const auto wrong = fit_conic(samples, 1.0);
  CHECK(wrong.max_radial_residual > fit.max_radial_residual);
}

TEST_CASE("wrong coefficient is distinguishable for m2/m1 >= 0.1") {
  for (double ratio : {0.1, 0.5, 1.0}) {
    auto sc = eccentric_two_body();
    const double mu = 1.0 + ratio;
    sc.bodies = {Body(1.0, {0, 0, 0}), Body(ratio, {3, 0, 0}, {0, std::sqrt(mu / 6.0), 0})};
    sc.t_end = 2.0 * std::numbers::pi * std::sqrt(8.0 / mu);
    sc.settings.sample_interval = sc.t_end / 200.0;
    const auto samples = orbit_samples(propagate(sc), 0);
    CHECK(fit_conic(samples, 1.0).max_radial_residual > fit_conic(samples, mu).max_radial_residual);
  }
}
