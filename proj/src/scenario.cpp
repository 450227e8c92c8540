#include "relnbody/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace relnbody {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  return out;
}

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

std::string_view to_string(Formulation f) {
  switch (f) {
    case Formulation::NCME:
      return "NCME";
    case Formulation::RS1:
      return "RS1";
    case Formulation::RS2:
      return "RS2";
    case Formulation::BcosReduced:
      return "BCOS_REDUCED";
  }
  return "unknown";
}

std::optional<Formulation> parse_formulation(std::string_view text) {
  const std::string u = upper(text);
  if (u == "NCME") return Formulation::NCME;
  if (u == "RS1") return Formulation::RS1;
  if (u == "RS2") return Formulation::RS2;
  if (u == "BCOS_REDUCED") return Formulation::BcosReduced;
  return std::nullopt;
}

std::string_view to_string(Method m) { return m == Method::RK4 ? "RK4" : "RK45"; }

std::optional<Method> parse_method(std::string_view text) {
  const std::string u = upper(text);
  if (u == "RK4") return Method::RK4;
  if (u == "RK45") return Method::RK45;
  return std::nullopt;
}

void IntegratorSettings::validate() const {
  if (!positive_finite(dt)) throw std::invalid_argument("integrator.dt must be > 0");
  if (!positive_finite(rel_tol)) throw std::invalid_argument("integrator.rel_tol must be > 0");
  if (!positive_finite(abs_tol)) throw std::invalid_argument("integrator.abs_tol must be > 0");
  if (max_steps <= 0) throw std::invalid_argument("integrator.max_steps must be > 0");
  if (collision_guard && !positive_finite(*collision_guard)) {
    throw std::invalid_argument("collision_guard_eps must be > 0");
  }
  if (sample_interval && !positive_finite(*sample_interval)) {
    throw std::invalid_argument("sample_interval must be > 0");
  }
}

void Scenario::validate() const {
  if (!positive_finite(G)) throw InvalidScenario("G must be > 0");
  if (bodies.empty()) throw InvalidScenario("bodies: at least one body required");
  if (!std::isfinite(t0) || !std::isfinite(t_end) || !(t_end > t0)) {
    throw InvalidScenario("t_end must be finite and greater than t0");
  }
  if (formulation != Formulation::NCME && bodies.size() < 2) {
    throw InvalidScenario(std::string(to_string(formulation)) + " needs at least two bodies");
  }
  try {
    settings.validate();
  } catch (const std::invalid_argument& e) {
    throw InvalidScenario(e.what());
  }
  const auto check = validate_initial_conditions(initial_state());
  if (!check.ok) {
    std::string msg = "invalid initial conditions: coincident bodies";
    for (const auto& p : check.violating_pairs) msg += " " + to_string(p);
    throw InvalidScenario(msg);
  }
}

}  // namespace relnbody
