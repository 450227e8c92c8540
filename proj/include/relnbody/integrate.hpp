#pragma once

// Time stepping for every formulation. Second-order systems are integrated as
// first-order systems y = [positions | velocities] of doubled dimension.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relnbody/core_model.hpp"
#include "relnbody/invariants.hpp"
#include "relnbody/scenario.hpp"
#include "relnbody/vec3.hpp"

namespace relnbody {

/// dy/dt = f(t, y). Implementations may throw SingularityError.
using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Classical fourth-order Runge-Kutta step.
std::vector<double> rk4_step(const OdeRhs& rhs, std::span<const double> y, double t, double dt);

/// Dormand-Prince 5(4) embedded pair with first-same-as-last reuse.
class DormandPrince45 {
 public:
  DormandPrince45(OdeRhs rhs, std::size_t dimension, double rel_tol, double abs_tol);

  /// Evaluates the first stage at (t, y). Must precede attempt() after any
  /// change of state not produced by accept().
  void prime(double t, std::span<const double> y);

  /// Tries a step of size h from the primed state. Returns the scaled RMS
  /// error estimate; the step is acceptable when it is <= 1.
  double attempt(double t, std::span<const double> y, double h);

  /// Fifth-order solution of the last attempt.
  std::span<const double> candidate() const { return y5_; }

  /// Reuses the last stage as the next first stage.
  void accept();

  /// Step-size factor suggested by the last error estimate.
  static double step_factor(double error_norm, bool after_reject);

  /// Starting step from the primed derivative.
  double initial_step(double t, std::span<const double> y, double direction_span);

  long evaluations() const { return evaluations_; }

 private:
  OdeRhs rhs_;
  double rel_tol_;
  double abs_tol_;
  std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_;
  std::vector<double> stage_, y5_;
  long evaluations_ = 0;
};

/// Adaptive integration of an arbitrary first-order system from t0 to t1.
/// Throws std::runtime_error if the step budget is exhausted.
std::vector<double> integrate_rk45(const OdeRhs& rhs, std::vector<double> y0, double t0, double t1,
                                   double rel_tol, double abs_tol, long max_steps = 10'000'000);

enum class Termination { ReachedTEnd, CollisionGuard, MaxSteps };

std::string_view to_string(Termination t);

struct TrajectorySample {
  double t = 0.0;
  std::vector<double> y;
  std::optional<InvariantReport> report;
};

struct Trajectory {
  std::string scenario_name;
  Formulation formulation = Formulation::NCME;
  std::vector<double> masses;
  double G = 1.0;
  /// Per-entity labels: "r1".."rN" (NCME), "r12".. (RS1/RS2), "r2".."rN" (BCOS_REDUCED).
  std::vector<std::string> labels;
  std::vector<TrajectorySample> samples;
  Termination termination = Termination::ReachedTEnd;
  long steps = 0;
  long rejected_steps = 0;
  double guard = 0.0;
  double min_separation = 0.0;  // over accepted states
  std::string termination_detail;

  std::size_t entity_count() const { return labels.size(); }
  Vec3 position(std::size_t sample, std::size_t entity) const;
  Vec3 velocity(std::size_t sample, std::size_t entity) const;
  /// NCME samples only.
  NBodyState nbody_state(std::size_t sample) const;
  /// Relative formulations: RS1/RS2 as stored; BCOS_REDUCED as RS1 with r_1k = -r_k.
  RelativeState relative_state(std::size_t sample) const;
  InvariantReport report_at(std::size_t sample) const;
};

/// Rejects invalid scenarios (InvalidScenario) before any stepping.
Trajectory propagate(const Scenario& scenario);
Trajectory propagate(const Scenario& scenario, const IntegratorSettings& settings);

/// Body count implied by a formulation's entity count.
std::size_t body_count(Formulation f, std::size_t entities);

/// r(t) = r0 + v0 (t - t0) + int_{t0}^{t} int_{t0}^{s} A(u) du ds with composite
/// Simpson rules (`intervals`, rounded up to even) on both integrals.
Vec3 double_integral_solution(const std::function<Vec3(double)>& acceleration, const Vec3& r0, const Vec3& v0,
                              double t0, double t, int intervals = 1000);

}  // namespace relnbody
