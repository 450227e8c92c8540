// relnbody: run, check and sweep N-body scenarios in absolute or
// difference-coordinate form.

#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relnbody/runner.hpp"
#include "relnbody/scenario_io.hpp"

namespace {

using namespace relnbody;

std::optional<Formulation> formulation_override(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto f = parse_formulation(text);
  if (!f) throw InvalidScenario("--formulation: unknown formulation '" + text + "'");
  return f;
}

cli::RunOptions make_options(const std::string& formulation, CLI::Option* report_flag, bool report) {
  cli::RunOptions opts;
  opts.formulation = formulation_override(formulation);
  if (report_flag->count() > 0) opts.report_invariants = report;
  return opts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relative-difference N-body integrator with invariant monitoring"};
  app.require_subcommand(1);

  std::string scenario_ref;
  std::string output_dir = "relnbody_out";
  std::string formulation;
  bool report = true;

  auto* run = app.add_subcommand("run", "Integrate a scenario and write trajectory.csv, invariants.csv, summary.json");
  run->add_option("scenario", scenario_ref, "Scenario file, or builtin:<name>")->required();
  run->add_option("-o,--output", output_dir, "Output directory")->capture_default_str();
  run->add_option("--formulation", formulation, "Override: NCME, RS1, RS2, BCOS_REDUCED");
  auto* run_report = run->add_flag("--report-invariants,!--no-report-invariants", report,
                                   "Attach an invariant report to every sample");

  auto* check = app.add_subcommand("check", "Validate initial conditions and print consistency verdicts");
  check->add_option("scenario", scenario_ref, "Scenario file, or builtin:<name>")->required();
  bool check_json = false;
  check->add_flag("--json", check_json, "Print the report as JSON");

  std::vector<std::string> sweep_refs;
  int jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Run several scenarios independently on worker threads");
  sweep->add_option("scenarios", sweep_refs, "Scenario files or builtin:<name>")->required();
  sweep->add_option("-o,--output", output_dir, "Output directory")->capture_default_str();
  sweep->add_option("-j,--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--formulation", formulation, "Override: NCME, RS1, RS2, BCOS_REDUCED");
  auto* sweep_report = sweep->add_flag("--report-invariants,!--no-report-invariants", report,
                                       "Attach an invariant report to every sample");

  std::string dump_name;
  auto* builtins = app.add_subcommand("builtins", "List bundled scenarios or print one as JSON");
  builtins->add_option("name", dump_name, "Bundled scenario to print");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitInputError;
  }

  try {
    if (*run) {
      const auto opts = make_options(formulation, run_report, report);
      const auto outcome = cli::run_scenario(io::resolve_scenario(scenario_ref), opts);
      cli::write_outputs(outcome, output_dir);
      const auto& inv = outcome.summary["invariants"];
      std::cout << outcome.summary["scenario"].get<std::string>() << ": "
                << outcome.summary["termination"].get<std::string>() << " at t="
                << outcome.summary["t_final"].get<double>() << " after " << outcome.summary["steps"].get<long>()
                << " steps";
      if (inv.contains("max_identity_residual")) {
        std::cout << ", max identity residual " << inv["max_identity_residual"].get<double>();
      }
      if (outcome.summary.contains("bcos") && outcome.summary["bcos"].contains("verdict")) {
        std::cout << ", body-centered verdict " << outcome.summary["bcos"]["verdict"].get<std::string>();
      }
      std::cout << "\nwrote " << output_dir << "/{trajectory.csv,invariants.csv,summary.json}\n";
      return outcome.exit_code;
    }
    if (*check) {
      const auto report_json = cli::check_scenario(io::resolve_scenario(scenario_ref));
      if (check_json) {
        std::cout << report_json.dump(2) << "\n";
      } else {
        std::cout << cli::render_check(report_json);
      }
      return report_json["valid"].get<bool>() ? cli::kExitOk : cli::kExitInputError;
    }
    if (*sweep) {
      const auto opts = make_options(formulation, sweep_report, report);
      const auto items = cli::run_sweep(sweep_refs, output_dir, jobs, opts);
      int worst = cli::kExitOk;
      for (const auto& item : items) {
        std::cout << item.reference << " -> exit " << item.exit_code << " (" << item.message << ")\n";
        worst = std::max(worst, item.exit_code);
      }
      return worst;
    }
    if (*builtins) {
      if (dump_name.empty()) {
        for (const auto& name : io::builtin_names()) std::cout << name << "\n";
        return cli::kExitOk;
      }
      const auto sc = io::builtin_scenario(dump_name);
      if (!sc) {
        std::cerr << "unknown builtin scenario '" << dump_name << "'\n";
        return cli::kExitInputError;
      }
      std::cout << io::serialize_scenario(*sc);
      return cli::kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitInputError;
  }
  return cli::kExitOk;
}
