#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "relnbody/core_model.hpp"

namespace relnbody {

/// Which system of equations a run integrates.
///   NCME         absolute positions of all N bodies
///   RS1          the N-1 differences r_1k = r_1 - r_k
///   RS2          all N(N-1)/2 differences r_jk = r_j - r_k
///   BcosReduced  positions r_k of bodies 2..N measured from body 1
enum class Formulation { NCME, RS1, RS2, BcosReduced };

std::string_view to_string(Formulation f);
/// Accepts "NCME", "RS1", "RS2", "BCOS_REDUCED" (case-insensitive).
std::optional<Formulation> parse_formulation(std::string_view text);

enum class Method { RK4, RK45 };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view text);

struct IntegratorSettings {
  Method method = Method::RK45;
  double dt = 1e-3;  // RK4 step
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  long max_steps = 10'000'000;
  /// Hard stop distance. Unset: 1e-8 times the initial minimum separation.
  std::optional<double> collision_guard;
  /// Sample cadence. Unset: (t_end - t0) / 200.
  std::optional<double> sample_interval;
  /// Attach an InvariantReport to every sample; otherwise only the first and
  /// last samples carry one.
  bool report_invariants = false;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  friend bool operator==(const IntegratorSettings&, const IntegratorSettings&) = default;
};

class InvalidScenario : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  std::string name;
  double G = 1.0;
  double t0 = 0.0;
  std::vector<Body> bodies;
  Formulation formulation = Formulation::NCME;
  double t_end = 1.0;
  IntegratorSettings settings;

  NBodyState initial_state() const { return NBodyState(t0, bodies, G); }

  /// Structural checks plus validate_initial_conditions. Throws InvalidScenario.
  void validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

}  // namespace relnbody
