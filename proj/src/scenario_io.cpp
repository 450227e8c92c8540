#include "relnbody/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace relnbody::io {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw ScenarioParseError("field '" + path + "': " + what);
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (auto a : allowed) known = known || it.key() == a;
    if (!known) field_error(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
  }
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) field_error(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) field_error(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) field_error(path, "must be finite");
  return d;
}

double positive(const json& v, const std::string& path) {
  const double d = number(v, path);
  if (!(d > 0.0)) field_error(path, "must be > 0");
  return d;
}

Vec3 vec3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) field_error(path, "expected an array of three numbers");
  return {number(v[0], path + "[0]"), number(v[1], path + "[1]"), number(v[2], path + "[2]")};
}

std::string string_field(const json& v, const std::string& path) {
  if (!v.is_string()) field_error(path, "expected a string");
  return v.get<std::string>();
}

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

}  // namespace

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream os;
    os << "line " << line << ", column " << col << ": malformed JSON (" << e.what() << ")";
    throw ScenarioParseError(os.str());
  }
  if (!doc.is_object()) throw ScenarioParseError("line 1, column 1: scenario must be a JSON object");

  reject_unknown(doc, "",
                 {"name", "G", "t0", "formulation", "t_end", "bodies", "integrator", "sample_interval",
                  "collision_guard_eps", "report_invariants"});

  Scenario sc;
  sc.name = string_field(require(doc, "name", ""), "name");
  sc.G = doc.contains("G") ? positive(doc["G"], "G") : 1.0;
  sc.t0 = doc.contains("t0") ? number(doc["t0"], "t0") : 0.0;
  {
    const std::string f = string_field(require(doc, "formulation", ""), "formulation");
    const auto parsed = parse_formulation(f);
    if (!parsed) field_error("formulation", "unknown formulation '" + f + "' (NCME, RS1, RS2, BCOS_REDUCED)");
    sc.formulation = *parsed;
  }
  sc.t_end = number(require(doc, "t_end", ""), "t_end");
  if (!(sc.t_end > sc.t0)) field_error("t_end", "must be greater than t0");

  const json& bodies = require(doc, "bodies", "");
  if (!bodies.is_array() || bodies.empty()) field_error("bodies", "expected a non-empty array");
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    const std::string path = "bodies[" + std::to_string(i) + "]";
    const json& b = bodies[i];
    if (!b.is_object()) field_error(path, "expected an object");
    reject_unknown(b, path, {"mass", "position", "velocity"});
    const double m = positive(require(b, "mass", path), path + ".mass");
    const Vec3 r = vec3(require(b, "position", path), path + ".position");
    const Vec3 v = b.contains("velocity") ? vec3(b["velocity"], path + ".velocity") : Vec3{};
    sc.bodies.emplace_back(m, r, v);
  }

  IntegratorSettings& st = sc.settings;
  if (doc.contains("integrator")) {
    const json& in = doc["integrator"];
    if (!in.is_object()) field_error("integrator", "expected an object");
    reject_unknown(in, "integrator", {"method", "dt", "rel_tol", "abs_tol", "max_steps"});
    if (in.contains("method")) {
      const std::string m = string_field(in["method"], "integrator.method");
      const auto parsed = parse_method(m);
      if (!parsed) field_error("integrator.method", "unknown method '" + m + "' (RK4, RK45)");
      st.method = *parsed;
    }
    if (in.contains("dt")) st.dt = positive(in["dt"], "integrator.dt");
    if (in.contains("rel_tol")) st.rel_tol = positive(in["rel_tol"], "integrator.rel_tol");
    if (in.contains("abs_tol")) st.abs_tol = positive(in["abs_tol"], "integrator.abs_tol");
    if (in.contains("max_steps")) {
      if (!in["max_steps"].is_number_integer() || in["max_steps"].get<long>() <= 0) {
        field_error("integrator.max_steps", "expected a positive integer");
      }
      st.max_steps = in["max_steps"].get<long>();
    }
  }
  if (doc.contains("sample_interval")) st.sample_interval = positive(doc["sample_interval"], "sample_interval");
  if (doc.contains("collision_guard_eps")) {
    st.collision_guard = positive(doc["collision_guard_eps"], "collision_guard_eps");
  }
  if (doc.contains("report_invariants")) {
    if (!doc["report_invariants"].is_boolean()) field_error("report_invariants", "expected true or false");
    st.report_invariants = doc["report_invariants"].get<bool>();
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidScenario("cannot open scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const ScenarioParseError& e) {
    throw ScenarioParseError(path.string() + ": " + e.what());
  }
}

json scenario_to_json(const Scenario& sc) {
  json doc;
  doc["name"] = sc.name;
  doc["G"] = sc.G;
  doc["t0"] = sc.t0;
  doc["formulation"] = std::string(to_string(sc.formulation));
  doc["t_end"] = sc.t_end;
  json bodies = json::array();
  for (const auto& b : sc.bodies) {
    bodies.push_back({{"mass", b.mass()}, {"position", vec_json(b.position())}, {"velocity", vec_json(b.velocity())}});
  }
  doc["bodies"] = std::move(bodies);
  const auto& st = sc.settings;
  doc["integrator"] = {{"method", std::string(to_string(st.method))},
                       {"dt", st.dt},
                       {"rel_tol", st.rel_tol},
                       {"abs_tol", st.abs_tol},
                       {"max_steps", st.max_steps}};
  if (st.sample_interval) doc["sample_interval"] = *st.sample_interval;
  if (st.collision_guard) doc["collision_guard_eps"] = *st.collision_guard;
  doc["report_invariants"] = st.report_invariants;
  return doc;
}

std::string serialize_scenario(const Scenario& sc) { return scenario_to_json(sc).dump(2) + "\n"; }

namespace {

IntegratorSettings precise(double sample_interval) {
  IntegratorSettings st;
  st.method = Method::RK45;
  st.rel_tol = 1e-10;
  st.abs_tol = 1e-12;
  st.sample_interval = sample_interval;
  st.report_invariants = true;
  return st;
}

Scenario two_body_kepler() {
  // Relative circular orbit of (r1 - r2)'' = -G (m1 + m2)(r1 - r2)/|r1 - r2|^3.
  const double mu = 1.5;
  const double period = 2.0 * std::numbers::pi / std::sqrt(mu);
  Scenario sc;
  sc.name = "two_body_kepler";
  sc.formulation = Formulation::RS1;
  sc.bodies = {Body(1.0, {0, 0, 0}, {0, 0, 0}), Body(0.5, {-1, 0, 0}, {0, -std::sqrt(mu), 0})};
  sc.t_end = period;
  sc.settings = precise(period / 100.0);
  return sc;
}

Scenario bcos3_antipodal() {
  // m2 = m3 with r2 = -r3 about body 1: r3'' = -G (m1 + m3/4) r3/|r3|^3, circular speed sqrt(2).
  const double speed = std::sqrt(2.0);
  const double period = 2.0 * std::numbers::pi / speed;
  Scenario sc;
  sc.name = "bcos3_antipodal";
  sc.formulation = Formulation::BcosReduced;
  sc.bodies = {Body(1.0, {0, 0, 0}), Body(4.0, {-1, 0, 0}, {0, -speed, 0}), Body(4.0, {1, 0, 0}, {0, speed, 0})};
  sc.t_end = period;
  sc.settings = precise(period / 100.0);
  return sc;
}

Scenario bcos3_unequal_masses() {
  Scenario sc;
  sc.name = "bcos3_unequal_masses";
  sc.formulation = Formulation::BcosReduced;
  sc.bodies = {Body(1.0, {0, 0, 0}), Body(1.0, {-1, 0, 0}, {0, -1.2, 0}), Body(2.0, {1, 0, 0}, {0, 1.2, 0})};
  sc.t_end = 4.0;
  sc.settings = precise(0.02);
  return sc;
}

Scenario rs2_random_n5() {
  Scenario sc;
  sc.name = "rs2_random_n5";
  sc.formulation = Formulation::RS2;
  sc.bodies = {
      Body(3.0, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}),
      Body(0.8, {2.1, 0.3, -0.2}, {0.1, 1.15, 0.05}),
      Body(1.2, {-1.7, 1.9, 0.4}, {-0.75, -0.6, 0.0}),
      Body(0.5, {0.4, -2.8, 0.6}, {1.0, 0.1, -0.1}),
      Body(2.0, {-3.2, -1.1, -0.5}, {0.3, -0.8, 0.1}),
  };
  sc.t_end = 4.0;
  sc.settings = precise(0.02);
  return sc;
}

Scenario body_frame_identity() {
  Scenario sc;
  sc.name = "body_frame_identity";
  sc.formulation = Formulation::NCME;
  sc.bodies = {
      Body(2.0, {0.5, -0.2, 0.1}, {0.05, 0.1, 0.0}),
      Body(1.0, {-1.5, 0.8, 0.0}, {-0.3, -0.5, 0.05}),
      Body(1.5, {1.8, 1.6, -0.3}, {-0.45, 0.35, 0.0}),
      Body(0.7, {0.2, -2.4, 0.5}, {0.7, -0.05, -0.05}),
  };
  sc.t_end = 4.0;
  sc.settings = precise(0.02);
  return sc;
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"two_body_kepler", "bcos3_antipodal", "bcos3_unequal_masses", "rs2_random_n5", "body_frame_identity"};
}

std::optional<Scenario> builtin_scenario(std::string_view name) {
  if (name == "two_body_kepler") return two_body_kepler();
  if (name == "bcos3_antipodal") return bcos3_antipodal();
  if (name == "bcos3_unequal_masses") return bcos3_unequal_masses();
  if (name == "rs2_random_n5") return rs2_random_n5();
  if (name == "body_frame_identity") return body_frame_identity();
  return std::nullopt;
}

Scenario resolve_scenario(std::string_view reference) {
  if (reference.starts_with(kBuiltinPrefix)) {
    const auto name = reference.substr(kBuiltinPrefix.size());
    auto sc = builtin_scenario(name);
    if (!sc) throw InvalidScenario("unknown builtin scenario '" + std::string(name) + "'");
    return *sc;
  }
  return load_scenario(std::filesystem::path(std::string(reference)));
}

}  // namespace relnbody::io
