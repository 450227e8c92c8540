#pragma once

// Run orchestration behind the command-line tool: integrate a scenario,
// summarize its invariant reports, and write the output artifacts.
//
// Artifacts of a run written into an output directory:
//   trajectory.csv   t, then for each key (r1, r12, ...) the columns
//                    <key>_x,<key>_y,<key>_z,<vkey>_x,<vkey>_y,<vkey>_z
//                    where vkey swaps the leading 'r' for 'v'
//   invariants.csv   one row per sample that carries an invariant report
//   summary.json     termination, step counts, invariant statistics, and the
//                    body-centered consistency verdicts when applicable

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "relnbody/integrate.hpp"
#include "relnbody/scenario.hpp"

namespace relnbody::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitCollisionGuard = 2;
inline constexpr int kExitMaxSteps = 3;

int exit_code(Termination termination);

struct RunOptions {
  std::optional<Formulation> formulation;
  std::optional<bool> report_invariants;
};

struct RunOutcome {
  Trajectory trajectory;
  nlohmann::json summary;
  int exit_code = kExitOk;
};

/// Throws InvalidScenario on bad input.
RunOutcome run_scenario(Scenario scenario, const RunOptions& options = {});

std::string trajectory_csv(const Trajectory& trajectory);
std::string invariants_csv(const Trajectory& trajectory);

void write_outputs(const RunOutcome& outcome, const std::filesystem::path& directory);

/// Body-centered diagnostics for scenarios whose body 1 sits at the origin at
/// rest (or that use BCOS_REDUCED), N = 2 or N = 3. Null otherwise.
nlohmann::json bcos_diagnostics(const Scenario& scenario);

/// Validation and consistency verdicts without integrating.
nlohmann::json check_scenario(const Scenario& scenario);
std::string render_check(const nlohmann::json& report);

struct SweepItem {
  std::string reference;
  std::string name;
  int exit_code = kExitOk;
  std::string message;
};

/// Runs every scenario reference independently, `jobs` at a time, writing each
/// into directory/<index>_<name>/.
std::vector<SweepItem> run_sweep(const std::vector<std::string>& references, const std::filesystem::path& directory,
                                 int jobs, const RunOptions& options = {});

}  // namespace relnbody::cli
