#include "relnbody/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "relnbody/dynamics.hpp"
#include "relnbody/kernels.hpp"

namespace relnbody {

// ---------------------------------------------------------------------------
// Generic steppers

std::vector<double> rk4_step(const OdeRhs& rhs, std::span<const double> y, double t, double dt) {
  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n), out(n);
  rhs(t, y, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  rhs(t + 0.5 * dt, tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  rhs(t + 0.5 * dt, tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
  rhs(t + dt, tmp, k4);
  for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

namespace dp {
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// fifth-order weights minus fourth-order weights
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace dp

DormandPrince45::DormandPrince45(OdeRhs rhs, std::size_t dimension, double rel_tol, double abs_tol)
    : rhs_(std::move(rhs)),
      rel_tol_(rel_tol),
      abs_tol_(abs_tol),
      k1_(dimension),
      k2_(dimension),
      k3_(dimension),
      k4_(dimension),
      k5_(dimension),
      k6_(dimension),
      k7_(dimension),
      stage_(dimension),
      y5_(dimension) {}

void DormandPrince45::prime(double t, std::span<const double> y) {
  rhs_(t, y, k1_);
  ++evaluations_;
}

double DormandPrince45::attempt(double t, std::span<const double> y, double h) {
  using namespace dp;
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) stage_[i] = y[i] + h * a21 * k1_[i];
  rhs_(t + c2 * h, stage_, k2_);
  for (std::size_t i = 0; i < n; ++i) stage_[i] = y[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
  rhs_(t + c3 * h, stage_, k3_);
  for (std::size_t i = 0; i < n; ++i) stage_[i] = y[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
  rhs_(t + c4 * h, stage_, k4_);
  for (std::size_t i = 0; i < n; ++i) {
    stage_[i] = y[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
  }
  rhs_(t + c5 * h, stage_, k5_);
  for (std::size_t i = 0; i < n; ++i) {
    stage_[i] = y[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i]);
  }
  rhs_(t + h, stage_, k6_);
  for (std::size_t i = 0; i < n; ++i) {
    y5_[i] = y[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] + a76 * k6_[i]);
  }
  rhs_(t + h, y5_, k7_);
  evaluations_ += 6;

  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double err = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] + e7 * k7_[i]);
    const double sc = abs_tol_ + rel_tol_ * std::max(std::abs(y[i]), std::abs(y5_[i]));
    sum += (err / sc) * (err / sc);
  }
  const double e = std::sqrt(sum / static_cast<double>(std::max<std::size_t>(n, 1)));
  return std::isfinite(e) ? e : std::numeric_limits<double>::infinity();
}

void DormandPrince45::accept() { std::swap(k1_, k7_); }

double DormandPrince45::step_factor(double error_norm, bool after_reject) {
  constexpr double safety = 0.9, min_factor = 0.2, max_factor = 5.0;
  if (error_norm == 0.0) return after_reject ? 1.0 : max_factor;
  if (!std::isfinite(error_norm)) return min_factor;
  const double f = std::clamp(safety * std::pow(error_norm, -0.2), min_factor, max_factor);
  return after_reject ? std::min(f, 1.0) : f;
}

double DormandPrince45::initial_step(double t, std::span<const double> y, double direction_span) {
  const std::size_t n = y.size();
  double d0 = 0.0, d1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sc = abs_tol_ + rel_tol_ * std::abs(y[i]);
    d0 += (y[i] / sc) * (y[i] / sc);
    d1 += (k1_[i] / sc) * (k1_[i] / sc);
  }
  d0 = std::sqrt(d0 / static_cast<double>(n));
  d1 = std::sqrt(d1 / static_cast<double>(n));
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, std::abs(direction_span));

  std::vector<double> y1(n), f1(n);
  for (std::size_t i = 0; i < n; ++i) y1[i] = y[i] + h0 * k1_[i];
  rhs_(t + h0, y1, f1);
  ++evaluations_;
  double d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sc = abs_tol_ + rel_tol_ * std::abs(y[i]);
    d2 += ((f1[i] - k1_[i]) / sc) * ((f1[i] - k1_[i]) / sc);
  }
  d2 = std::sqrt(d2 / static_cast<double>(n)) / h0;
  const double dmax = std::max(d1, d2);
  const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
  return std::min({100.0 * h0, h1, std::abs(direction_span)});
}

namespace {

double min_step(double t) { return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)); }

}  // namespace

std::vector<double> integrate_rk45(const OdeRhs& rhs, std::vector<double> y0, double t0, double t1, double rel_tol,
                                   double abs_tol, long max_steps) {
  if (!(t1 > t0)) throw std::invalid_argument("integrate_rk45 needs t1 > t0");
  DormandPrince45 stepper(rhs, y0.size(), rel_tol, abs_tol);
  std::vector<double> y = std::move(y0);
  double t = t0;
  stepper.prime(t, y);
  double h = stepper.initial_step(t, y, t1 - t0);
  bool rejected = false;
  for (long step = 0; step < max_steps;) {
    const bool last = t + h >= t1;
    const double h_used = last ? t1 - t : h;
    const double err = stepper.attempt(t, y, h_used);
    if (err <= 1.0) {
      y.assign(stepper.candidate().begin(), stepper.candidate().end());
      t = last ? t1 : t + h_used;
      stepper.accept();
      ++step;
      if (last) return y;
      h = h_used * DormandPrince45::step_factor(err, rejected);
      rejected = false;
    } else {
      h = h_used * DormandPrince45::step_factor(err, true);
      rejected = true;
      if (h < min_step(t)) throw std::runtime_error("integrate_rk45: step size underflow");
    }
  }
  throw std::runtime_error("integrate_rk45: step budget exhausted");
}

// ---------------------------------------------------------------------------
// Formulation systems

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::ReachedTEnd:
      return "ReachedTEnd";
    case Termination::CollisionGuard:
      return "CollisionGuard";
    case Termination::MaxSteps:
      return "MaxSteps";
  }
  return "unknown";
}

std::size_t body_count(Formulation f, std::size_t entities) {
  switch (f) {
    case Formulation::NCME:
      return entities;
    case Formulation::RS1:
    case Formulation::BcosReduced:
      return entities + 1;
    case Formulation::RS2: {
      std::size_t n = 2;
      while (pair_count(n) < entities) ++n;
      if (pair_count(n) != entities) throw std::invalid_argument("entity count is not a pair count");
      return n;
    }
  }
  return entities;
}

namespace {

Vec3 load(std::span<const double> y, std::size_t offset) { return {y[offset], y[offset + 1], y[offset + 2]}; }

void store(std::span<double> y, std::size_t offset, const Vec3& v) {
  y[offset] = v.x;
  y[offset + 1] = v.y;
  y[offset + 2] = v.z;
}

std::string pair_label(int j, int k, std::size_t n) {
  std::ostringstream os;
  os << 'r' << j;
  if (n >= 10) os << '-';
  os << k;
  return os.str();
}

/// State-vector layout and right-hand side of one formulation.
class FormulationSystem {
 public:
  FormulationSystem(Formulation f, std::vector<double> masses, double G)
      : formulation_(f), masses_(std::move(masses)), G_(G), n_(masses_.size()) {
    switch (formulation_) {
      case Formulation::NCME:
        for (std::size_t i = 1; i <= n_; ++i) labels_.push_back("r" + std::to_string(i));
        break;
      case Formulation::RS1:
        for (int k = 2; k <= static_cast<int>(n_); ++k) labels_.push_back(pair_label(1, k, n_));
        break;
      case Formulation::RS2:
        for (const auto& key : all_pairs(n_)) labels_.push_back(pair_label(key.j, key.k, n_));
        break;
      case Formulation::BcosReduced:
        for (std::size_t k = 2; k <= n_; ++k) labels_.push_back("r" + std::to_string(k));
        break;
    }
    entities_ = labels_.size();
  }

  std::size_t entities() const { return entities_; }
  std::size_t dimension() const { return 6 * entities_; }
  const std::vector<std::string>& labels() const { return labels_; }

  std::vector<double> initial_vector(const NBodyState& s) const {
    std::vector<double> y(dimension());
    auto put = [&](std::size_t e, const Vec3& r, const Vec3& v) {
      store(y, 3 * e, r);
      store(y, 3 * (entities_ + e), v);
    };
    switch (formulation_) {
      case Formulation::NCME:
        for (std::size_t i = 0; i < n_; ++i) put(i, s.bodies()[i].position(), s.bodies()[i].velocity());
        break;
      case Formulation::RS1:
      case Formulation::RS2: {
        const auto rel = to_relative(s, formulation_ == Formulation::RS1 ? RelativeMode::RS1 : RelativeMode::RS2);
        for (std::size_t e = 0; e < entities_; ++e) put(e, rel.diffs()[e].position, rel.diffs()[e].velocity);
        break;
      }
      case Formulation::BcosReduced: {
        const Body& origin = s.bodies()[0];
        for (std::size_t k = 1; k < n_; ++k) {
          put(k - 1, s.bodies()[k].position() - origin.position(), s.bodies()[k].velocity() - origin.velocity());
        }
        break;
      }
    }
    return y;
  }

  /// s(j,k) = r_j - r_k for every pair, from the state vector.
  std::vector<Vec3> separations(std::span<const double> y) const {
    switch (formulation_) {
      case Formulation::NCME: {
        std::vector<Vec3> pos(n_);
        for (std::size_t i = 0; i < n_; ++i) pos[i] = load(y, 3 * i);
        return kernels::separations_from_positions(pos);
      }
      case Formulation::RS2: {
        std::vector<Vec3> seps(entities_);
        for (std::size_t e = 0; e < entities_; ++e) seps[e] = load(y, 3 * e);
        return seps;
      }
      case Formulation::RS1:
      case Formulation::BcosReduced: {
        // d[k] = r_1 - r_k; reduced stores r_k - r_1.
        const double sign = formulation_ == Formulation::RS1 ? 1.0 : -1.0;
        std::vector<Vec3> d(n_);
        for (std::size_t k = 1; k < n_; ++k) d[k] = sign * load(y, 3 * (k - 1));
        std::vector<Vec3> seps;
        seps.reserve(pair_count(n_));
        for (std::size_t j = 0; j < n_; ++j) {
          for (std::size_t k = j + 1; k < n_; ++k) seps.push_back(j == 0 ? d[k] : d[k] - d[j]);
        }
        return seps;
      }
    }
    return {};
  }

  void derivative(std::span<const double> y, std::span<double> dydt, double guard) const {
    const std::size_t half = 3 * entities_;
    std::copy(y.begin() + static_cast<std::ptrdiff_t>(half), y.end(), dydt.begin());
    auto acc_out = dydt.subspan(half);

    if (formulation_ == Formulation::BcosReduced) {
      const RelativeState rel = relative_state(0.0, y);
      const auto acc = body_frame_accelerations(reduced_bcos_rhs(rel, guard));
      for (std::size_t e = 0; e < entities_; ++e) store(acc_out, 3 * e, acc[e]);
      return;
    }

    const auto seps = separations(y);
    const auto fields = kernels::pair_fields(masses_, G_, seps, guard);
    switch (formulation_) {
      case Formulation::NCME:
        for (std::size_t i = 0; i < n_; ++i) store(acc_out, 3 * i, fields[i]);
        break;
      case Formulation::RS1:
        for (std::size_t k = 1; k < n_; ++k) store(acc_out, 3 * (k - 1), fields[0] - fields[k]);
        break;
      case Formulation::RS2: {
        std::size_t e = 0;
        for (std::size_t j = 0; j < n_; ++j) {
          for (std::size_t k = j + 1; k < n_; ++k, ++e) store(acc_out, 3 * e, fields[j] - fields[k]);
        }
        break;
      }
      case Formulation::BcosReduced:
        break;
    }
  }

  double min_separation(std::span<const double> y) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : separations(y)) best = std::min(best, norm(s));
    return best;
  }

  // Closest any pair comes along the straight chord between two states. A
  // fixed step can carry a head-on pair straight through each other.
  double swept_min_separation(std::span<const double> from, std::span<const double> to) const {
    const auto a = separations(from);
    const auto b = separations(to);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < a.size(); ++p) {
      const Vec3 d = b[p] - a[p];
      const double dd = norm2(d);
      const double lambda = dd > 0.0 ? std::clamp(-dot(a[p], d) / dd, 0.0, 1.0) : 0.0;
      best = std::min(best, norm(a[p] + lambda * d));
    }
    return best;
  }

  NBodyState nbody_state(double t, std::span<const double> y) const {
    if (formulation_ != Formulation::NCME) throw std::logic_error("absolute state requested from a relative run");
    std::vector<Body> bodies;
    for (std::size_t i = 0; i < n_; ++i) bodies.emplace_back(masses_[i], load(y, 3 * i), load(y, 3 * (n_ + i)));
    return NBodyState(t, std::move(bodies), G_);
  }

  RelativeState relative_state(double t, std::span<const double> y) const {
    if (formulation_ == Formulation::NCME) throw std::logic_error("relative state requested from an absolute run");
    const RelativeMode mode = formulation_ == Formulation::RS2 ? RelativeMode::RS2 : RelativeMode::RS1;
    const double sign = formulation_ == Formulation::BcosReduced ? -1.0 : 1.0;
    const auto keys = relative_keys(mode, n_);
    std::vector<PairDifference> diffs;
    diffs.reserve(keys.size());
    for (std::size_t e = 0; e < keys.size(); ++e) {
      diffs.push_back({keys[e], sign * load(y, 3 * e), sign * load(y, 3 * (entities_ + e))});
    }
    return RelativeState(t, mode, masses_, G_, std::move(diffs));
  }

  InvariantReport report(double t, std::span<const double> y) const {
    if (formulation_ == Formulation::NCME) return make_invariant_report(nbody_state(t, y));
    return make_invariant_report(relative_state(t, y));
  }

 private:
  Formulation formulation_;
  std::vector<double> masses_;
  double G_;
  std::size_t n_;
  std::size_t entities_ = 0;
  std::vector<std::string> labels_;
};

}  // namespace

Vec3 Trajectory::position(std::size_t sample, std::size_t entity) const {
  return load(samples.at(sample).y, 3 * entity);
}

Vec3 Trajectory::velocity(std::size_t sample, std::size_t entity) const {
  return load(samples.at(sample).y, 3 * (entity_count() + entity));
}

NBodyState Trajectory::nbody_state(std::size_t sample) const {
  return FormulationSystem(formulation, masses, G).nbody_state(samples.at(sample).t, samples.at(sample).y);
}

RelativeState Trajectory::relative_state(std::size_t sample) const {
  return FormulationSystem(formulation, masses, G).relative_state(samples.at(sample).t, samples.at(sample).y);
}

InvariantReport Trajectory::report_at(std::size_t sample) const {
  const auto& s = samples.at(sample);
  if (s.report) return *s.report;
  return FormulationSystem(formulation, masses, G).report(s.t, s.y);
}

Trajectory propagate(const Scenario& scenario) { return propagate(scenario, scenario.settings); }

Trajectory propagate(const Scenario& scenario, const IntegratorSettings& settings) {
  {
    Scenario check = scenario;
    check.settings = settings;
    check.validate();
  }
  const NBodyState initial = scenario.initial_state();
  const FormulationSystem system(scenario.formulation, initial.masses(), initial.G());

  Trajectory traj;
  traj.scenario_name = scenario.name;
  traj.formulation = scenario.formulation;
  traj.masses = initial.masses();
  traj.G = initial.G();
  traj.labels = system.labels();

  std::vector<double> y = system.initial_vector(initial);
  double t = scenario.t0;
  const double t_end = scenario.t_end;
  const double initial_min = system.entities() > 0 && initial.size() > 1 ? system.min_separation(y)
                                                                          : std::numeric_limits<double>::infinity();
  traj.guard = settings.collision_guard.value_or(std::isfinite(initial_min) ? 1e-8 * initial_min : 0.0);
  traj.min_separation = initial_min;
  const double guard = traj.guard;
  const double interval = settings.sample_interval.value_or((t_end - scenario.t0) / 200.0);

  auto record = [&](bool with_report) {
    TrajectorySample s{t, y, std::nullopt};
    if (with_report && initial.size() >= 2) s.report = system.report(t, y);
    traj.samples.push_back(std::move(s));
  };
  record(true);

  const OdeRhs rhs = [&system, guard](double, std::span<const double> yy, std::span<double> dydt) {
    system.derivative(yy, dydt, guard);
  };

  long sample_index = 1;
  auto next_target = [&]() {
    return std::min(t_end, scenario.t0 + static_cast<double>(sample_index) * interval);
  };

  auto finish = [&](Termination why, std::string detail) {
    traj.termination = why;
    traj.termination_detail = std::move(detail);
    if (!traj.samples.back().report && initial.size() >= 2) {
      traj.samples.back().report = system.report(traj.samples.back().t, traj.samples.back().y);
    }
    return traj;
  };

  // Accepted state handling shared by both methods. Returns true when the run ends.
  auto on_accept = [&](std::vector<double>&& candidate, double t_new, bool at_target,
                       std::optional<Termination>& stop) {
    const double sep = system.min_separation(candidate);
    if (sep < guard || system.swept_min_separation(y, candidate) < guard) {
      stop = Termination::CollisionGuard;
      return;
    }
    traj.min_separation = std::min(traj.min_separation, sep);
    y = std::move(candidate);
    t = t_new;
    ++traj.steps;
    if (at_target) {
      const bool at_end = t >= t_end;
      record(settings.report_invariants || at_end);
      ++sample_index;
      if (at_end) {
        stop = Termination::ReachedTEnd;
        return;
      }
    }
    if (traj.steps >= settings.max_steps) stop = Termination::MaxSteps;
  };

  std::optional<Termination> stop;

  if (settings.method == Method::RK4) {
    while (!stop) {
      const double target = next_target();
      const bool clamp =
          t + settings.dt >= target - 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(target));
      const double h = clamp ? target - t : settings.dt;
      std::vector<double> candidate;
      try {
        candidate = rk4_step(rhs, y, t, h);
      } catch (const SingularityError& e) {
        return finish(Termination::CollisionGuard, e.what());
      }
      on_accept(std::move(candidate), clamp ? target : t + h, clamp, stop);
    }
  } else {
    DormandPrince45 stepper(rhs, system.dimension(), settings.rel_tol, settings.abs_tol);
    try {
      stepper.prime(t, y);
    } catch (const SingularityError& e) {
      return finish(Termination::CollisionGuard, e.what());
    }
    double h = stepper.initial_step(t, y, t_end - t);
    bool rejected = false;
    std::string last_singularity;
    while (!stop) {
      const double target = next_target();
      const bool clamp = t + h >= target;
      const double h_used = clamp ? target - t : h;
      double err;
      try {
        err = stepper.attempt(t, y, h_used);
      } catch (const SingularityError& e) {
        last_singularity = e.what();
        err = std::numeric_limits<double>::infinity();
      }
      if (err <= 1.0) {
        std::vector<double> candidate(stepper.candidate().begin(), stepper.candidate().end());
        const double factor = DormandPrince45::step_factor(err, rejected);
        on_accept(std::move(candidate), clamp ? target : t + h_used, clamp, stop);
        if (stop == Termination::CollisionGuard) break;
        stepper.accept();
        // A step shortened to land on a sample time does not shrink the free step.
        h = clamp ? std::max(h, h_used * factor) : h_used * factor;
        rejected = false;
      } else {
        ++traj.rejected_steps;
        h = h_used * (std::isfinite(err) ? DormandPrince45::step_factor(err, true) : 0.25);
        rejected = true;
        if (h < min_step(t)) {
          return finish(Termination::CollisionGuard,
                        "step size underflow near close approach" +
                            (last_singularity.empty() ? std::string() : ": " + last_singularity));
        }
      }
    }
  }

  std::string detail;
  if (*stop == Termination::CollisionGuard) {
    std::ostringstream os;
    os << "separation fell below guard " << guard;
    detail = os.str();
  }
  return finish(*stop, detail);
}

// ---------------------------------------------------------------------------

namespace {

Vec3 simpson(const std::function<Vec3(double)>& f, double a, double b, int intervals) {
  if (a == b) return {};
  const int n = intervals + (intervals % 2);
  const double h = (b - a) / n;
  Vec3 sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
  return (h / 3.0) * sum;
}

}  // namespace

Vec3 double_integral_solution(const std::function<Vec3(double)>& acceleration, const Vec3& r0, const Vec3& v0,
                              double t0, double t, int intervals) {
  if (intervals < 2) throw std::invalid_argument("double_integral_solution needs at least two intervals");
  const auto inner = [&](double s) { return simpson(acceleration, t0, s, intervals); };
  return r0 + (t - t0) * v0 + simpson(inner, t0, t, intervals);
}

}  // namespace relnbody
