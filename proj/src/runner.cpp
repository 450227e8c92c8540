#include "relnbody/runner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "relnbody/dynamics.hpp"
#include "relnbody/invariants.hpp"
#include "relnbody/scenario_io.hpp"

namespace relnbody::cli {

using nlohmann::json;

int exit_code(Termination termination) {
  switch (termination) {
    case Termination::ReachedTEnd:
      return kExitOk;
    case Termination::CollisionGuard:
      return kExitCollisionGuard;
    case Termination::MaxSteps:
      return kExitMaxSteps;
  }
  return kExitInputError;
}

namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

std::string velocity_label(const std::string& position_label) { return "v" + position_label.substr(1); }

json pairs_json(const std::vector<PairKey>& pairs) {
  json arr = json::array();
  for (const auto& p : pairs) arr.push_back(json::array({p.j, p.k}));
  return arr;
}

json report_json(const InvariantReport& r) {
  json j = {{"time", r.time},
            {"identity_lhs", r.identity_lhs},
            {"identity_rhs", r.identity_rhs},
            {"identity_residual", r.identity_residual},
            {"t_sum", r.t_sum},
            {"t_sum_closed", r.t_sum_closed},
            {"t_sum_residual", r.t_sum_residual},
            {"restless_pairs", pairs_json(r.restless_pairs)},
            {"accelerating_bodies", r.accelerating_bodies},
            {"negativity_ok", r.negativity_ok},
            {"bound_ok", r.bound_ok},
            {"relative_energy", r.relative_energy},
            {"triangle_residual", r.triangle_residual}};
  if (r.body_frame_residual) j["body_frame_residual"] = *r.body_frame_residual;
  return j;
}

bool body_centered(const Scenario& sc) {
  if (sc.formulation == Formulation::BcosReduced) return true;
  return sc.bodies.front().position() == Vec3{} && sc.bodies.front().velocity() == Vec3{};
}

json summarize(const Scenario& sc, const Trajectory& traj, int code) {
  json s;
  s["scenario"] = sc.name;
  s["formulation"] = std::string(to_string(traj.formulation));
  s["bodies"] = sc.bodies.size();
  s["termination"] = std::string(to_string(traj.termination));
  if (!traj.termination_detail.empty()) s["termination_detail"] = traj.termination_detail;
  s["exit_code"] = code;
  s["t_start"] = traj.samples.front().t;
  s["t_final"] = traj.samples.back().t;
  s["steps"] = traj.steps;
  s["rejected_steps"] = traj.rejected_steps;
  s["samples"] = traj.samples.size();
  s["collision_guard"] = traj.guard;
  if (std::isfinite(traj.min_separation)) s["min_separation"] = traj.min_separation;

  json inv;
  std::size_t reports = 0;
  double max_identity = 0.0, max_tsum = 0.0, max_triangle = 0.0, max_body_frame = 0.0;
  bool all_negative = true, all_bound = true, any_body_frame = false;
  std::size_t min_restless = std::numeric_limits<std::size_t>::max();
  int min_accelerating = std::numeric_limits<int>::max();
  const InvariantReport* first = nullptr;
  const InvariantReport* last = nullptr;
  for (const auto& sample : traj.samples) {
    if (!sample.report) continue;
    const auto& r = *sample.report;
    ++reports;
    if (!first) first = &r;
    last = &r;
    max_identity = std::max(max_identity, r.identity_residual);
    max_tsum = std::max(max_tsum, r.t_sum_residual);
    max_triangle = std::max(max_triangle, r.triangle_residual);
    all_negative = all_negative && r.negativity_ok;
    all_bound = all_bound && r.bound_ok;
    min_restless = std::min(min_restless, r.restless_pairs.size());
    min_accelerating = std::min(min_accelerating, r.accelerating_bodies);
    if (r.body_frame_residual) {
      any_body_frame = true;
      max_body_frame = std::max(max_body_frame, *r.body_frame_residual);
    }
  }
  inv["reports"] = reports;
  if (reports > 0) {
    inv["max_identity_residual"] = max_identity;
    inv["max_t_sum_residual"] = max_tsum;
    inv["all_rhs_negative"] = all_negative;
    inv["all_bound_ok"] = all_bound;
    inv["min_restless_pairs"] = min_restless;
    inv["min_accelerating_bodies"] = min_accelerating;
    inv["max_triangle_residual"] = max_triangle;
    if (any_body_frame) inv["max_body_frame_residual"] = max_body_frame;
    inv["relative_energy_initial"] = first->relative_energy;
    inv["relative_energy_final"] = last->relative_energy;
    inv["relative_energy_drift"] =
        std::abs(last->relative_energy - first->relative_energy) /
        std::max(std::abs(first->relative_energy), kResidualFloor);
    inv["final"] = report_json(*last);
  }
  s["invariants"] = std::move(inv);

  const json bcos = bcos_diagnostics(sc);
  if (!bcos.is_null()) s["bcos"] = bcos;
  return s;
}

}  // namespace

RunOutcome run_scenario(Scenario scenario, const RunOptions& options) {
  if (options.formulation) scenario.formulation = *options.formulation;
  if (options.report_invariants) scenario.settings.report_invariants = *options.report_invariants;
  scenario.validate();
  RunOutcome out;
  out.trajectory = propagate(scenario);
  out.exit_code = exit_code(out.trajectory.termination);
  out.summary = summarize(scenario, out.trajectory, out.exit_code);
  return out;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t";
  for (const auto& label : traj.labels) {
    for (const char* axis : {"_x", "_y", "_z"}) out += "," + label + axis;
    const std::string v = velocity_label(label);
    for (const char* axis : {"_x", "_y", "_z"}) out += "," + v + axis;
  }
  out += '\n';
  const std::size_t entities = traj.entity_count();
  for (const auto& s : traj.samples) {
    append_number(out, s.t);
    for (std::size_t e = 0; e < entities; ++e) {
      for (std::size_t c = 0; c < 3; ++c) {
        out += ',';
        append_number(out, s.y[3 * e + c]);
      }
      for (std::size_t c = 0; c < 3; ++c) {
        out += ',';
        append_number(out, s.y[3 * (entities + e) + c]);
      }
    }
    out += '\n';
  }
  return out;
}

std::string invariants_csv(const Trajectory& traj) {
  std::string out =
      "t,identity_lhs,identity_rhs,identity_residual,t_sum,t_sum_closed,t_sum_residual,restless_pairs,"
      "accelerating_bodies,negativity_ok,bound_ok,relative_energy,triangle_residual,body_frame_residual\n";
  for (const auto& s : traj.samples) {
    if (!s.report) continue;
    const auto& r = *s.report;
    for (double v : {s.t, r.identity_lhs, r.identity_rhs, r.identity_residual, r.t_sum, r.t_sum_closed,
                     r.t_sum_residual}) {
      append_number(out, v);
      out += ',';
    }
    out += std::to_string(r.restless_pairs.size()) + ',' + std::to_string(r.accelerating_bodies) + ',' +
           (r.negativity_ok ? "1" : "0") + ',' + (r.bound_ok ? "1" : "0") + ',';
    append_number(out, r.relative_energy);
    out += ',';
    append_number(out, r.triangle_residual);
    out += ',';
    if (r.body_frame_residual) append_number(out, *r.body_frame_residual);
    out += '\n';
  }
  return out;
}

void write_outputs(const RunOutcome& outcome, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  auto write = [&](const char* name, const std::string& body) {
    std::ofstream f(directory / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (directory / name).string());
    f << body;
  };
  write("trajectory.csv", trajectory_csv(outcome.trajectory));
  write("invariants.csv", invariants_csv(outcome.trajectory));
  write("summary.json", outcome.summary.dump(2) + "\n");
}

json bcos_diagnostics(const Scenario& sc) {
  const std::size_t n = sc.bodies.size();
  if (!body_centered(sc) || (n != 2 && n != 3)) return nullptr;
  const Vec3 origin = sc.bodies.front().position();
  json d;
  if (n == 2) {
    const Vec3 r2 = sc.bodies[1].position() - origin;
    d["two_body_contradiction"] = two_body_bcos_contradiction(sc.bodies[1].mass(), r2, sc.G);
    return d;
  }
  const Vec3 r2 = sc.bodies[1].position() - origin;
  const Vec3 r3 = sc.bodies[2].position() - origin;
  const auto c = bcos3_consistency_check(sc.bodies[1].mass(), sc.bodies[2].mass(), r2, r3);
  d["verdict"] = std::string(to_string(c.verdict));
  d["mass_mismatch"] = c.mass_mismatch;
  d["geometry_mismatch"] = c.geometry_mismatch;
  d["geometry_tolerance"] = c.geometry_tolerance;
  d["constraint_residual"] = c.constraint_residual;
  d["two_body_contradiction_m2"] = two_body_bcos_contradiction(sc.bodies[1].mass(), r2, sc.G);
  d["two_body_contradiction_m3"] = two_body_bcos_contradiction(sc.bodies[2].mass(), r3, sc.G);
  return d;
}

json check_scenario(const Scenario& sc) {
  json report;
  report["scenario"] = sc.name;
  report["formulation"] = std::string(to_string(sc.formulation));
  report["bodies"] = sc.bodies.size();
  const auto v = validate_initial_conditions(sc.initial_state());
  report["valid"] = v.ok;
  report["violating_pairs"] = pairs_json(v.violating_pairs);
  report["relative_violations"] = pairs_json(v.relative_violations);
  if (v.ok) {
    const json bcos = bcos_diagnostics(sc);
    if (!bcos.is_null()) report["bcos"] = bcos;
    if (sc.bodies.size() >= 2) {
      const auto id = motion_identity(sc.initial_state());
      report["identity_rhs"] = id.rhs;
      report["identity_residual"] = id.residual;
    }
  }
  return report;
}

std::string render_check(const json& report) {
  std::ostringstream os;
  os << "scenario: " << report["scenario"].get<std::string>() << " (" << report["formulation"].get<std::string>()
     << ", " << report["bodies"].get<std::size_t>() << " bodies)\n";
  if (!report["valid"].get<bool>()) {
    os << "initial conditions: INVALID\n";
    for (const auto& p : report["violating_pairs"]) {
      os << "  coincident bodies (" << p[0].get<int>() << "," << p[1].get<int>() << ")\n";
    }
    for (const auto& p : report["relative_violations"]) {
      os << "  difference condition fails for (" << p[0].get<int>() << "," << p[1].get<int>() << ")\n";
    }
    return os.str();
  }
  os << "initial conditions: ok\n";
  if (report.contains("identity_rhs")) {
    os << "pair identity: rhs " << report["identity_rhs"].get<double>() << ", residual "
       << report["identity_residual"].get<double>() << "\n";
  }
  if (report.contains("bcos")) {
    const auto& b = report["bcos"];
    if (b.contains("verdict")) {
      os << "body-centered consistency: " << b["verdict"].get<std::string>() << "\n";
      os << "  constraint residual |m2 r2/|r2|^3 + m3 r3/|r3|^3| = " << b["constraint_residual"].get<double>()
         << "\n";
      os << "  mass mismatch " << b["mass_mismatch"].get<double>() << ", geometry mismatch "
         << b["geometry_mismatch"].get<double>() << "\n";
      os << "  forced-zero accelerations G m/|r|^2: m2 " << b["two_body_contradiction_m2"].get<double>() << ", m3 "
         << b["two_body_contradiction_m3"].get<double>() << "\n";
    } else {
      os << "two-body body-centered contradiction G m2/|r2|^2 = " << b["two_body_contradiction"].get<double>()
         << "\n";
    }
  }
  return os.str();
}

std::vector<SweepItem> run_sweep(const std::vector<std::string>& references, const std::filesystem::path& directory,
                                 int jobs, const RunOptions& options) {
  std::vector<SweepItem> items(references.size());
  const int count = static_cast<int>(references.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs))
  for (int i = 0; i < count; ++i) {
    SweepItem& item = items[static_cast<std::size_t>(i)];
    item.reference = references[static_cast<std::size_t>(i)];
    try {
      Scenario sc = io::resolve_scenario(item.reference);
      item.name = sc.name;
      const RunOutcome out = run_scenario(std::move(sc), options);
      write_outputs(out, directory / (std::to_string(i) + "_" + item.name));
      item.exit_code = out.exit_code;
      item.message = std::string(to_string(out.trajectory.termination));
    } catch (const std::exception& e) {
      item.exit_code = kExitInputError;
      item.message = e.what();
    }
  }
  return items;
}

}  // namespace relnbody::cli
