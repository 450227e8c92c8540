// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "relnbody/dynamics.hpp"
#include "relnbody/integrate.hpp"
#include "relnbody/invariants.hpp"
#include "relnbody/kepler_oracle.hpp"
#include "relnbody/scenario_io.hpp"
#include "support/random_states.hpp"

using namespace relnbody;

namespace {

// Pinned tolerances.
constexpr double kIdentityTol = 1e-10;
constexpr double kTSumTol = 1e-10;
constexpr double kTranslationTol = 1e-9;
constexpr double kGenerationTol = 1e-12;
constexpr double kOracleTol = 1e-6;
constexpr double kCircularRadiusTol = 1e-8;
constexpr double kConicTol = 1e-6;
constexpr double kWrongMuFactor = 10.0;
constexpr double kAntipodalTol = 1e-8;
constexpr double kBodyFrameTol = 1e-12;
constexpr double kPolynomialTol = 1e-10;
constexpr double kRk45AgreementTol = 1e-8;

constexpr std::uint64_t kCorpusSeed = 20240601;
constexpr std::size_t kCorpusSize = 1000;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

const std::vector<NBodyState>& corpus() {
  static const auto states = testsupport::corpus(kCorpusSize, kCorpusSeed, 2, 8);
  return states;
}

Outcome identity() {
  double worst = 0.0;
  bool negative = true;
  for (const auto& s : corpus()) {
    const auto id = motion_identity(s);
    worst = std::max(worst, id.residual);
    negative = negative && id.rhs < 0.0;
  }
  return {worst <= kIdentityTol && negative,
          std::to_string(corpus().size()) + " states, max residual " + sci(worst) + " (tol " + sci(kIdentityTol) +
              "), rhs < 0 in every case: " + (negative ? "yes" : "no")};
}

Outcome t_sum() {
  double worst = 0.0;
  for (const auto& s : corpus()) worst = std::max(worst, t_sum_check(s).residual);
  return {worst <= kTSumTol, "max residual " + sci(worst) + " (tol " + sci(kTSumTol) + ")"};
}

Outcome translation() {
  // c(t) samples from C^2 paths, plus constant shifts.
  const std::vector<std::function<Vec3(double)>> paths{
      [](double t) { return Vec3{t * t, 2 * t, 1}; },
      [](double t) { return Vec3{std::sin(t), std::cos(2 * t), t * t * t / 50.0}; },
      [](double t) { return Vec3{std::exp(t / 4), -3 * t, std::cosh(t / 3)}; },
  };
  std::mt19937_64 rng(kCorpusSeed + 3);
  std::uniform_real_distribution<double> time(0.0, 10.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto s = testsupport::random_state(rng, testsupport::random_count(rng, 2, 8));
    for (int k = 0; k < 10; ++k) {
      const Vec3 shift = k < 5 ? testsupport::random_shift(rng, 100.0)
                               : paths[static_cast<std::size_t>(k) % paths.size()](time(rng));
      worst = std::max(worst, translation_invariance_residual(s, shift));
    }
  }
  return {worst <= kTranslationTol, "100 states x 10 shifts, max residual " + sci(worst) + " (tol " +
                                        sci(kTranslationTol) + ")"};
}

Outcome generation() {
  std::mt19937_64 rng(kCorpusSeed + 4);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const auto s = testsupport::random_state(rng, testsupport::random_count(rng, 2, 6));
    const auto r1 = rs1_rhs(to_relative(s, RelativeMode::RS1));
    const auto r2 = rs2_rhs(to_relative(s, RelativeMode::RS2));
    for (const auto& key : all_pairs(s.size())) {
      const Vec3 a1k = r1.at({1, key.k});
      const Vec3 expect = key.j == 1 ? a1k : a1k - r1.at({1, key.j});
      const double scale =
          std::max({norm(r2.at(key)), norm(a1k), key.j == 1 ? 0.0 : norm(r1.at({1, key.j}))});
      worst = std::max(worst, norm(r2.at(key) - expect) / scale);
    }
  }
  return {worst <= kGenerationTol, "500 states, N <= 6, max relative error " + sci(worst) + " (tol " +
                                       sci(kGenerationTol) + ")"};
}

double dynamical_time(const NBodyState& s) {
  const auto geo = pair_geometry(s);
  double r_max = 0.0;
  for (const auto& sep : geo.separations) r_max = std::max(r_max, norm(sep));
  return std::sqrt(r_max * r_max * r_max / (s.G() * geo.total_mass()));
}

// Max over samples and pairs of |r_jk(RS2) - (r_j - r_k)(NCME)| / max_jk |r_jk|.
double rs2_vs_ncme(const std::vector<Body>& bodies, double& t_span) {
  Scenario sc;
  sc.name = "oracle";
  sc.bodies = bodies;
  const double t_dyn = dynamical_time(sc.initial_state());
  t_span = 10.0 * t_dyn;
  sc.t_end = t_span;
  sc.settings.rel_tol = 1e-10;
  sc.settings.abs_tol = 1e-12;
  sc.settings.sample_interval = t_dyn / 20.0;
  sc.formulation = Formulation::NCME;
  const auto abs = propagate(sc);
  sc.formulation = Formulation::RS2;
  const auto rel = propagate(sc);
  if (abs.termination != Termination::ReachedTEnd || rel.termination != Termination::ReachedTEnd ||
      abs.samples.size() != rel.samples.size()) {
    return std::numeric_limits<double>::infinity();
  }
  const std::size_t n = bodies.size();
  double worst = 0.0;
  for (std::size_t s = 0; s < abs.samples.size(); ++s) {
    if (abs.samples[s].t != rel.samples[s].t) return std::numeric_limits<double>::infinity();
    double scale = 0.0, diff = 0.0;
    std::size_t e = 0;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k, ++e) {
        const Vec3 ref = abs.position(s, j) - abs.position(s, k);
        scale = std::max(scale, norm(ref));
        diff = std::max(diff, norm(rel.position(s, e) - ref));
      }
    }
    worst = std::max(worst, diff / scale);
  }
  return worst;
}

Outcome oracle_equivalence() {
  // Figure-eight three-body orbit and a hierarchical pair of binaries.
  const Vec3 v3{-0.93240737, -0.86473146, 0.0};
  const std::vector<Body> three{Body(1, {-0.97000436, 0.24308753, 0}, -0.5 * v3),
                                Body(1, {0.97000436, -0.24308753, 0}, -0.5 * v3), Body(1, {0, 0, 0}, v3)};
  const double vin_a = std::sqrt(2.0 / 0.5) / 2.0;
  const double vin_b = std::sqrt(1.0 / 0.3) / 2.0;
  const double vout = std::sqrt(3.0 / 4.0);
  const std::vector<Body> four{
      Body(1.0, {-2.0, 0.25, 0}, {-vin_a, -vout / 3.0, 0}),
      Body(1.0, {-2.0, -0.25, 0}, {vin_a, -vout / 3.0, 0}),
      Body(0.5, {2.0, 0.15, 0.05}, {-vin_b, 2.0 * vout / 3.0, 0}),
      Body(0.5, {2.0, -0.15, -0.05}, {vin_b, 2.0 * vout / 3.0, 0}),
  };
  double span3 = 0.0, span4 = 0.0;
  const double e3 = rs2_vs_ncme(three, span3);
  const double e4 = rs2_vs_ncme(four, span4);
  return {std::max(e3, e4) <= kOracleTol, "N=3 over t=" + sci(span3) + ": " + sci(e3) + "; N=4 over t=" + sci(span4) +
                                              ": " + sci(e4) + " (tol " + sci(kOracleTol) + ")"};
}

Outcome modified_kepler() {
  const auto circ = propagate(*io::builtin_scenario("two_body_kepler"));
  double radius_drift = 0.0;
  for (std::size_t s = 0; s < circ.samples.size(); ++s) {
    radius_drift = std::max(radius_drift, std::abs(norm(circ.position(s, 0)) - 1.0));
  }
  const bool full_period = circ.termination == Termination::ReachedTEnd;

  // m2/m1 = 0.5, G(m1 + m2) = 1.5, started at apoapsis r = 3 so e = 0.5.
  Scenario ecc;
  ecc.name = "eccentric";
  ecc.formulation = Formulation::RS1;
  ecc.bodies = {Body(1.0, {0, 0, 0}), Body(0.5, {3, 0, 0}, {0, 0.5, 0})};
  ecc.t_end = 2.0 * std::numbers::pi * std::sqrt(8.0 / 1.5);
  ecc.settings.sample_interval = ecc.t_end / 400.0;
  const auto samples = orbit_samples(propagate(ecc), 0);
  const auto right = fit_conic(samples, 1.5);
  const auto wrong = fit_conic(samples, 1.0);
  const bool pass = full_period && radius_drift <= kCircularRadiusTol && right.max_radial_residual <= kConicTol &&
                    std::abs(right.params.e - 0.5) <= 1e-6 &&
                    wrong.max_radial_residual >= kWrongMuFactor * right.max_radial_residual;
  return {pass, "circular radius drift " + sci(radius_drift) + " (tol " + sci(kCircularRadiusTol) +
                    "); eccentric e=" + sci(right.params.e) + ", residual " + sci(right.max_radial_residual) +
                    " (tol " + sci(kConicTol) + "); with G m1: " + sci(wrong.max_radial_residual) + " (ratio " +
                    sci(wrong.max_radial_residual / right.max_radial_residual) + ", need >= " +
                    sci(kWrongMuFactor) + ")"};
}

Outcome three_body_bcos() {
  // Grid: 5 mass pairs x 10 geometries.
  const std::vector<std::pair<double, double>> masses{{1, 1}, {4, 4}, {0.3, 0.3}, {1, 2}, {2, 1}};
  const std::vector<Vec3> dirs{{1, 0, 0}, {0, 2, 0}, {0.3, -0.4, 1.2}, {-5, 1, 2}, {1e-3, 2e-3, -1e-3}};
  int cases = 0, correct = 0;
  for (const auto& [m2, m3] : masses) {
    for (std::size_t g = 0; g < 10; ++g) {
      const Vec3 r2 = dirs[g % dirs.size()];
      const bool antipodal = g < dirs.size();
      const Vec3 r3 = antipodal ? -r2 : (g % 2 == 0 ? -2.0 * r2 : Vec3{r2.y + 1, -r2.x, r2.z});
      const auto verdict = bcos3_consistency_check(m2, m3, r2, r3).verdict;
      const Bcos3Verdict expect = m2 != m3    ? Bcos3Verdict::InconsistentMassRatio
                                  : antipodal ? Bcos3Verdict::Consistent
                                              : Bcos3Verdict::InconsistentGeometry;
      ++cases;
      correct += verdict == expect;
    }
  }

  const auto traj = propagate(*io::builtin_scenario("bcos3_antipodal"));
  double symmetry = 0.0;
  for (std::size_t s = 0; s < traj.samples.size(); ++s) {
    symmetry = std::max(symmetry, norm(traj.position(s, 0) + traj.position(s, 1)));
  }
  const double mu = 1.0 * (1.0 + 4.0 / 4.0);
  const auto circ_fit = fit_conic(orbit_samples(traj, 1), mu);

  // Sub-circular launch: an eccentric orbit that only the m1 + m3/4 coefficient fits.
  Scenario ecc = *io::builtin_scenario("bcos3_antipodal");
  ecc.bodies = {Body(1.0, {0, 0, 0}), Body(4.0, {-1, 0, 0}, {0, -1.0, 0}), Body(4.0, {1, 0, 0}, {0, 1.0, 0})};
  ecc.t_end = 2.0 * std::numbers::pi * std::sqrt(std::pow(1.0 / (2.0 - 1.0 / mu), 3) / mu);
  ecc.settings.sample_interval = ecc.t_end / 200.0;
  const auto ecc_traj = propagate(ecc);
  const auto ecc_samples = orbit_samples(ecc_traj, 1);
  const auto ecc_fit = fit_conic(ecc_samples, mu);
  const double alt = std::min(fit_conic(ecc_samples, 1.0).max_radial_residual,
                              fit_conic(ecc_samples, 5.0).max_radial_residual);

  const bool pass = correct == cases && cases == 50 && traj.termination == Termination::ReachedTEnd &&
                    ecc_traj.termination == Termination::ReachedTEnd && symmetry <= kAntipodalTol &&
                    circ_fit.max_radial_residual <= kConicTol && ecc_fit.max_radial_residual <= kConicTol &&
                    alt > ecc_fit.max_radial_residual;
  return {pass, std::to_string(correct) + "/" + std::to_string(cases) + " verdicts; |r2 + r3| max " + sci(symmetry) +
                    " (tol " + sci(kAntipodalTol) + "); conic residual at G(m1+m3/4): circular " +
                    sci(circ_fit.max_radial_residual) + ", eccentric (e=" + sci(ecc_fit.params.e) + ") " +
                    sci(ecc_fit.max_radial_residual) + " vs " + sci(alt) + " at G m1 or G(m1+m3)"};
}

Outcome restlessness() {
  std::size_t samples = 0;
  bool ok = true;
  std::string first_failure;
  for (const auto& name : io::builtin_names()) {
    const auto sc = *io::builtin_scenario(name);
    const auto traj = propagate(sc);
    ok = ok && traj.termination == Termination::ReachedTEnd;
    for (std::size_t s = 0; s < traj.samples.size(); ++s) {
      const auto r = traj.report_at(s);
      ++samples;
      const bool good = !r.restless_pairs.empty() && r.bound_ok &&
                        (sc.bodies.size() < 3 || r.accelerating_bodies >= 2);
      if (!good && first_failure.empty()) first_failure = name + " at t=" + sci(traj.samples[s].t);
      ok = ok && good;
    }
  }
  return {ok, std::to_string(io::builtin_names().size()) + " bundled scenarios, " + std::to_string(samples) +
                  " samples" + (first_failure.empty() ? "" : ", first failure " + first_failure)};
}

Outcome body_frame() {
  std::mt19937_64 rng(kCorpusSeed + 9);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto s = testsupport::random_state(rng, testsupport::random_count(rng, 2, 8));
    worst = std::max(worst, body_frame_residual(s).max_relative());
  }
  return {worst <= kBodyFrameTol, "100 states, max residual / acceleration scale " + sci(worst) + " (tol " +
                                      sci(kBodyFrameTol) + ")"};
}

Outcome double_integral() {
  std::mt19937_64 rng(kCorpusSeed + 10);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  auto vec = [&] { return Vec3{coef(rng), coef(rng), coef(rng)}; };
  double poly_worst = 0.0;
  for (int i = 0; i < 40; ++i) {
    const int degree = i % 4;
    std::vector<Vec3> c(4);
    for (int d = 0; d <= degree; ++d) c[static_cast<std::size_t>(d)] = vec();
    const Vec3 r0 = vec(), v0 = vec();
    const double t0 = coef(rng), tau = 0.5 + std::abs(coef(rng));
    const auto A = [&](double u) {
      const double s = u - t0;
      return c[0] + s * c[1] + (s * s) * c[2] + (s * s * s) * c[3];
    };
    Vec3 closed = r0 + tau * v0;
    for (int d = 0; d <= degree; ++d) {
      closed += (std::pow(tau, d + 2) / ((d + 1) * (d + 2))) * c[static_cast<std::size_t>(d)];
    }
    const Vec3 got = double_integral_solution(A, r0, v0, t0, t0 + tau);
    poly_worst = std::max(poly_worst, norm(got - closed) / std::max(1.0, norm(closed)));
  }

  const std::vector<std::function<Vec3(double)>> forcing{
      [](double t) { return Vec3{std::sin(t), std::cos(2 * t), std::exp(-t)}; },
      [](double t) { return Vec3{t * t - 1, 0.5 * t, -2.0}; },
      [](double t) { return Vec3{1.0 / (1.0 + t * t), std::sin(3 * t) * t, std::cos(t)}; },
  };
  double ode_worst = 0.0;
  for (const auto& A : forcing) {
    const Vec3 r0{1, -1, 0.5}, v0{0.2, 0.3, -0.4};
    const double t0 = 0.0, t1 = 3.0;
    const OdeRhs rhs = [&A](double t, std::span<const double> y, std::span<double> d) {
      const Vec3 a = A(t);
      d[0] = y[3], d[1] = y[4], d[2] = y[5];
      d[3] = a.x, d[4] = a.y, d[5] = a.z;
    };
    const auto y = integrate_rk45(rhs, {r0.x, r0.y, r0.z, v0.x, v0.y, v0.z}, t0, t1, 1e-12, 1e-14);
    const Vec3 got = double_integral_solution(A, r0, v0, t0, t1);
    ode_worst = std::max(ode_worst, norm(got - Vec3{y[0], y[1], y[2]}) / std::max(1.0, norm(got)));
  }
  return {poly_worst <= kPolynomialTol && ode_worst <= kRk45AgreementTol,
          "degree <= 3 closed forms: " + sci(poly_worst) + " (tol " + sci(kPolynomialTol) + "); vs RK45: " +
              sci(ode_worst) + " (tol " + sci(kRk45AgreementTol) + ")"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "pair-weighted identity", identity},
      {2, "T-sum closed form", t_sum},
      {3, "translation invariance", translation},
      {4, "RS2 generated from RS1", generation},
      {5, "RS2 vs absolute trajectories", oracle_equivalence},
      {6, "modified Kepler conic", modified_kepler},
      {7, "three-body body-centered analysis", three_body_bcos},
      {8, "restlessness along bundled runs", restlessness},
      {9, "body-frame identity", body_frame},
      {10, "double-integral solution", double_integral},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !out.pass;
    std::printf("%s  criterion %2d  %-36s %s [%.2fs]\n", out.pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), secs);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
