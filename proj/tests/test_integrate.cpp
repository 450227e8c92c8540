#include <cmath>
#include <numbers>

#include "doctest.h"
#include "relnbody/integrate.hpp"
#include "support/random_states.hpp"

using namespace relnbody;

namespace {

Scenario kepler_scenario(Formulation f, Method method = Method::RK45) {
  const double mu = 1.5;
  Scenario sc;
  sc.name = "kepler";
  sc.formulation = f;
  sc.bodies = {Body(1.0, {0, 0, 0}), Body(0.5, {-1, 0, 0}, {0, -std::sqrt(mu), 0})};
  sc.t_end = 2.0 * std::numbers::pi / std::sqrt(mu);
  sc.settings.method = method;
  sc.settings.dt = 1e-3;
  return sc;
}

}  // namespace

TEST_CASE("rk4 step") {
  const OdeRhs zero = [](double, std::span<const double>, std::span<double> d) { std::fill(d.begin(), d.end(), 0.0); };
  const std::vector<double> y{1.0, -2.0, 3.5};
  CHECK(rk4_step(zero, y, 0.0, 0.1) == y);

  const OdeRhs growth = [](double, std::span<const double> y, std::span<double> d) { d[0] = y[0]; };
  const std::vector<double> one{1.0};
  const double y1 = rk4_step(growth, one, 0.0, 0.1)[0];
  CHECK(y1 == doctest::Approx(1.1051708).epsilon(1e-7));
  CHECK(std::abs(y1 - std::exp(0.1)) <= 1e-7);
}

TEST_CASE("rk4 harmonic oscillator over one period") {
  const OdeRhs osc = [](double, std::span<const double> y, std::span<double> d) {
    d[0] = y[1];
    d[1] = -y[0];
  };
  std::vector<double> y{1.0, 0.0};
  const double dt = 1e-3;
  const int steps = static_cast<int>(std::llround(2.0 * std::numbers::pi / dt));
  double t = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double h = (i + 1 == steps) ? 2.0 * std::numbers::pi - t : dt;
    y = rk4_step(osc, y, t, h);
    t += h;
  }
  CHECK(std::abs(std::hypot(y[0], y[1]) - 1.0) <= 1e-10);
  CHECK(std::abs(y[0] - 1.0) <= 1e-10);
}

TEST_CASE("rk45 matches exponential and oscillator solutions") {
  const OdeRhs growth = [](double, std::span<const double> y, std::span<double> d) { d[0] = y[0]; };
  const auto y = integrate_rk45(growth, {1.0}, 0.0, 2.0, 1e-12, 1e-14);
  CHECK(y[0] == doctest::Approx(std::exp(2.0)).epsilon(1e-10));

  const OdeRhs osc = [](double, std::span<const double> y, std::span<double> d) {
    d[0] = y[1];
    d[1] = -y[0];
  };
  const auto z = integrate_rk45(osc, {1.0, 0.0}, 0.0, 10.0, 1e-11, 1e-13);
  CHECK(z[0] == doctest::Approx(std::cos(10.0)).epsilon(1e-8));
  CHECK(z[1] == doctest::Approx(-std::sin(10.0)).epsilon(1e-8));

  CHECK_THROWS_AS(integrate_rk45(osc, {1.0, 0.0}, 0.0, -3.0, 1e-11, 1e-13), std::invalid_argument);
  CHECK_THROWS_AS(integrate_rk45(osc, {1.0, 0.0}, 0.0, 100.0, 1e-11, 1e-13, 5), std::runtime_error);
}

TEST_CASE("step factor is clamped") {
  CHECK(DormandPrince45::step_factor(0.0, false) == doctest::Approx(5.0));
  CHECK(DormandPrince45::step_factor(1e10, false) == doctest::Approx(0.2));
  CHECK(DormandPrince45::step_factor(0.5, true) <= 1.0);
}

TEST_CASE("two-body circular orbit holds its radius") {
  for (auto f : {Formulation::RS1, Formulation::RS2, Formulation::BcosReduced, Formulation::NCME}) {
    const auto traj = propagate(kepler_scenario(f));
    CHECK(traj.termination == Termination::ReachedTEnd);
    double worst = 0.0;
    for (std::size_t s = 0; s < traj.samples.size(); ++s) {
      const double r = f == Formulation::NCME ? norm(traj.position(s, 0) - traj.position(s, 1))
                                              : norm(traj.position(s, 0));
      worst = std::max(worst, std::abs(r - 1.0));
    }
    CHECK_MESSAGE(worst <= 1e-8, to_string(f));
    CHECK(traj.samples.back().t == doctest::Approx(traj.samples.front().t + 2.0 * std::numbers::pi / std::sqrt(1.5)));
  }
}

TEST_CASE("rk4 propagation of the circular orbit") {
  const auto traj = propagate(kepler_scenario(Formulation::RS1, Method::RK4));
  CHECK(traj.termination == Termination::ReachedTEnd);
  double worst = 0.0;
  for (std::size_t s = 0; s < traj.samples.size(); ++s) worst = std::max(worst, std::abs(norm(traj.position(s, 0)) - 1.0));
  CHECK(worst <= 1e-10);
}

TEST_CASE("trajectory samples are strictly increasing and carry reports") {
  auto sc = kepler_scenario(Formulation::RS2);
  sc.settings.sample_interval = 0.1;
  const auto traj = propagate(sc);
  REQUIRE(traj.samples.size() > 10);
  for (std::size_t s = 1; s < traj.samples.size(); ++s) CHECK(traj.samples[s].t > traj.samples[s - 1].t);
  CHECK(traj.samples.front().report.has_value());
  CHECK(traj.samples.back().report.has_value());
  CHECK(traj.labels == std::vector<std::string>{"r12"});
}

TEST_CASE("head-on approach ends at the collision guard") {
  Scenario sc;
  sc.name = "head_on";
  sc.formulation = Formulation::NCME;
  sc.bodies = {Body(1, {0, 0, 0}), Body(1, {1, 0, 0}, {-0.1, 0, 0})};
  sc.t_end = 10.0;
  for (auto f : {Formulation::NCME, Formulation::RS1, Formulation::RS2, Formulation::BcosReduced}) {
    for (auto m : {Method::RK45, Method::RK4}) {
      sc.formulation = f;
      sc.settings.method = m;
      const auto traj = propagate(sc);
      CHECK_MESSAGE(traj.termination == Termination::CollisionGuard, to_string(f) << " " << to_string(m));
      CHECK(traj.min_separation > 0.0);
      CHECK(traj.samples.back().t < sc.t_end);
    }
  }
}

TEST_CASE("step budget ends the run with MaxSteps") {
  auto sc = kepler_scenario(Formulation::RS1);
  sc.settings.max_steps = 10;
  CHECK(propagate(sc).termination == Termination::MaxSteps);
}

TEST_CASE("invalid scenarios are rejected before stepping") {
  auto sc = kepler_scenario(Formulation::RS1);
  sc.bodies[1] = Body(0.5, {0, 0, 0});
  CHECK_THROWS_AS(propagate(sc), InvalidScenario);
  auto bad = kepler_scenario(Formulation::RS1);
  bad.settings.rel_tol = -1.0;
  CHECK_THROWS(propagate(bad));
}

TEST_CASE("reduced system tracks RS1 along a trajectory") {
  std::mt19937_64 rng(41);
  auto state = testsupport::random_state(rng, 4);
  Scenario sc;
  sc.name = "reduced_vs_rs1";
  sc.bodies = state.bodies();
  sc.t_end = 2.0;
  sc.formulation = Formulation::RS1;
  const auto a = propagate(sc);
  sc.formulation = Formulation::BcosReduced;
  const auto b = propagate(sc);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t s = 0; s < a.samples.size(); ++s) {
    for (std::size_t e = 0; e < a.entity_count(); ++e) {
      // Reduced entity k holds r_k - r_1 = -(r_1 - r_k).
      CHECK(norm(a.position(s, e) + b.position(s, e)) <= 1e-9 * std::max(1.0, norm(a.position(s, e))));
    }
  }
}

TEST_CASE("body_count") {
  CHECK(body_count(Formulation::NCME, 4) == 4);
  CHECK(body_count(Formulation::RS1, 3) == 4);
  CHECK(body_count(Formulation::BcosReduced, 3) == 4);
  CHECK(body_count(Formulation::RS2, 6) == 4);
  CHECK(body_count(Formulation::RS2, 1) == 2);
}

TEST_CASE("double integral solution") {
  const auto zero = [](double) { return Vec3{}; };
  const Vec3 free = double_integral_solution(zero, {1, 2, 3}, {4, 5, 6}, 0.0, 2.0);
  CHECK(norm(free - Vec3{9, 12, 15}) <= 1e-12);
  const Vec3 constant = double_integral_solution([](double) { return Vec3{2, 0, 0}; }, {}, {}, 0.0, 3.0);
  CHECK(norm(constant - Vec3{9, 0, 0}) <= 1e-10);
  const Vec3 linear = double_integral_solution([](double t) { return Vec3{6 * t, 0, 0}; }, {}, {}, 0.0, 2.0);
  CHECK(norm(linear - Vec3{8, 0, 0}) <= 1e-10);
  const Vec3 same = double_integral_solution([](double t) { return Vec3{t, t, t}; }, {1, 1, 1}, {5, 5, 5}, 3.0, 3.0);
  CHECK(same == Vec3{1, 1, 1});
}
