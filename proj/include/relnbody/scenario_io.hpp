#pragma once

// Scenario files (JSON) and the bundled reproduction scenarios.
//
//   {
//     "name": "two_body_kepler",
//     "G": 1.0,
//     "t0": 0.0,                       optional, default 0
//     "formulation": "RS1",            NCME | RS1 | RS2 | BCOS_REDUCED
//     "t_end": 5.13,
//     "bodies": [ {"mass": 1.0, "position": [0,0,0], "velocity": [0,0,0]}, ... ],
//     "integrator": {"method": "RK45", "rel_tol": 1e-10, "abs_tol": 1e-12, "max_steps": 1000000}
//                or {"method": "RK4", "dt": 0.001},
//     "sample_interval": 0.05,         optional
//     "collision_guard_eps": 1e-9,     optional
//     "report_invariants": true        optional
//   }

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "relnbody/scenario.hpp"

namespace relnbody::io {

/// Parse failure anchored to a line/column (syntax) or a field path (content).
class ScenarioParseError : public InvalidScenario {
 public:
  using InvalidScenario::InvalidScenario;
};

Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

nlohmann::json scenario_to_json(const Scenario& scenario);
std::string serialize_scenario(const Scenario& scenario);

std::vector<std::string> builtin_names();
std::optional<Scenario> builtin_scenario(std::string_view name);

inline constexpr std::string_view kBuiltinPrefix = "builtin:";

/// "builtin:NAME" selects a bundled scenario; anything else is a file path.
Scenario resolve_scenario(std::string_view reference);

}  // namespace relnbody::io
