#include "config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qmotor/errors.hpp"
#include "units.hpp"

namespace qmotor::cli {

using nlohmann::json;

namespace {

const json& reduced_defaults() {
  static const json d = {{"m", 1.0},    {"k", 1.0},    {"b", 1.0},  {"v0", 0.5},       {"phi", std::numbers::pi / 2},
                         {"eta0", 1.0}, {"hbar", 1.0}, {"t1", 1.0}, {"t2", 2.5},       {"cutoff", "ohmic"},
                         {"lambda", 0.0}, {"f1", 0.0}, {"f2", 0.0}, {"force", 0.0},   {"classical", false}};
  return d;
}

const json& physical_defaults() {
  static const json d = {{"m", 40.0},    {"omega", 702.5}, {"b", 10.0},  {"v0", 0.25}, {"phi", std::numbers::pi / 2},
                         {"gamma", 10.0}, {"t1", 1.0},     {"t2", 2.5},  {"cutoff", "soft_lorentzian"},
                         {"lambda", 1000.0}, {"f1", 0.0},  {"f2", 0.0},  {"force", 0.0}, {"classical", false}};
  return d;
}

CutoffFamily parse_family(const std::string& s) {
  if (s == "ohmic") return CutoffFamily::Ohmic;
  if (s == "soft_lorentzian" || s == "lorentzian") return CutoffFamily::SoftLorentzian;
  if (s == "exponential") return CutoffFamily::Exponential;
  throw ConfigError("unknown cutoff '" + s + "' (ohmic, soft_lorentzian, exponential)");
}

double number(const json& p, const char* key) {
  const auto it = p.find(key);
  if (it == p.end() || !it->is_number()) throw ConfigError(std::string("parameter '") + key + "' must be a number");
  return it->get<double>();
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

SimMode parse_mode(const std::string& s) {
  if (s == "qmd") return SimMode::QMD;
  if (s == "md") return SimMode::MD;
  throw ConfigError("mode must be qmd or md, got '" + s + "'");
}

}  // namespace

std::vector<double> SweepAxis::values() const {
  if (points < 1) throw ConfigError("sweep needs at least one point");
  if (!std::isfinite(min) || !std::isfinite(max)) throw ConfigError("sweep range must be finite");
  if (log && !(min > 0.0 && max > 0.0)) throw ConfigError("log sweep needs a positive range");
  std::vector<double> v(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double s = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    v[i] = log ? std::exp(std::log(min) + s * (std::log(max) - std::log(min))) : min + s * (max - min);
  }
  if (points > 1) {
    v.front() = min;
    v.back() = max;
  }
  return v;
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  c.command = get_or<std::string>(j, "command", "");
  const auto units = get_or<std::string>(j, "units", "reduced");
  if (units != "reduced" && units != "physical") throw ConfigError("units must be reduced or physical");
  c.physical = units == "physical";
  c.system = get_or<std::string>(j, "system", "motor");
  if (c.system != "motor" && c.system != "single") throw ConfigError("system must be motor or single");
  c.target = get_or<std::string>(j, "target", "exact");
  if (c.target != "exact" && c.target != "classical" && c.target != "forced" && c.target != "single")
    throw ConfigError("target must be exact, classical, forced or single");
  if (auto it = j.find("params"); it != j.end()) {
    if (!it->is_object()) throw ConfigError("params must be an object");
    c.params = *it;
  }
  if (auto it = j.find("sweep"); it != j.end() && !it->is_null()) {
    SweepAxis a;
    a.name = get_or<std::string>(*it, "axis", "");
    a.min = get_or<double>(*it, "min", 0.0);
    a.max = get_or<double>(*it, "max", 0.0);
    a.points = get_or<std::size_t>(*it, "points", 0);
    a.log = get_or<bool>(*it, "log", false);
    if (!a.name.empty()) c.axis = a;
  }
  if (auto it = j.find("series"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("series must be an array of parameter objects");
    for (const auto& s : *it) {
      if (!s.is_object()) throw ConfigError("series entries must be objects");
      c.series.push_back(s);
    }
  }
  const json sim = j.value("simulation", json::object());
  c.sim.mode = parse_mode(get_or<std::string>(sim, "mode", "qmd"));
  c.sim.n_traj = get_or<std::size_t>(sim, "traj", c.sim.n_traj);
  c.sim.n_steps = get_or<std::size_t>(sim, "steps", c.sim.n_steps);
  c.sim.dt = get_or<double>(sim, "dt", 0.0);
  c.sim.master_seed = get_or<std::uint64_t>(sim, "seed", c.sim.master_seed);
  c.sim.estimator_window = get_or<double>(sim, "window", c.sim.estimator_window);
  const auto init = get_or<std::string>(sim, "initial", "origin");
  if (init == "origin") c.sim.initial = InitialConditions::Origin;
  else if (init == "thermal") c.sim.initial = InitialConditions::Thermal;
  else throw ConfigError("initial must be origin or thermal");

  const json tol = j.value("tolerance", json::object());
  c.tol.rel_tol = get_or<double>(tol, "rel_tol", c.tol.rel_tol);
  c.tol.truncation = get_or<double>(tol, "truncation", c.tol.truncation);
  c.tol.kernel.rel_tol = get_or<double>(tol, "kernel_rel_tol", c.tol.kernel.rel_tol);
  c.tol.kernel.abs_tol = get_or<double>(tol, "kernel_abs_tol", c.tol.kernel.abs_tol);
  if (!(c.tol.rel_tol > 0.0) || !(c.tol.truncation > 0.0) || !(c.tol.kernel.rel_tol > 0.0))
    throw ConfigError("tolerances must be positive");

  const json noise = j.value("noise", json::object());
  c.bins = get_or<std::size_t>(noise, "bins", c.bins);
  c.dump = get_or<std::string>(noise, "dump", "");
  c.workers = get_or<std::size_t>(j, "workers", 1);
  if (c.workers < 1) throw ConfigError("workers must be >= 1");
  c.out = get_or<std::string>(j, "out", "");
  return c;
}

json RunConfig::to_json() const {
  json j;
  j["command"] = command;
  j["units"] = physical ? "physical" : "reduced";
  j["system"] = system;
  j["target"] = target;
  j["params"] = params;
  if (axis) {
    j["sweep"] = {{"axis", axis->name}, {"min", axis->min}, {"max", axis->max}, {"points", axis->points}, {"log", axis->log}};
  }
  if (!series.empty()) j["series"] = series;
  j["simulation"] = {{"mode", sim.mode == SimMode::QMD ? "qmd" : "md"},
                     {"traj", sim.n_traj},
                     {"steps", sim.n_steps},
                     {"dt", sim.dt},
                     {"seed", sim.master_seed},
                     {"window", sim.estimator_window},
                     {"initial", sim.initial == InitialConditions::Origin ? "origin" : "thermal"}};
  j["tolerance"] = {{"rel_tol", tol.rel_tol},
                    {"truncation", tol.truncation},
                    {"kernel_rel_tol", tol.kernel.rel_tol},
                    {"kernel_abs_tol", tol.kernel.abs_tol}};
  j["noise"] = {{"bins", bins}, {"dump", dump}};
  j["workers"] = workers;
  j["out"] = out;
  return j;
}

Resolved RunConfig::resolve(const json& overrides, std::optional<double> axis_value) const {
  json p = physical ? physical_defaults() : reduced_defaults();
  for (auto it = params.begin(); it != params.end(); ++it) p[it.key()] = it.value();
  for (auto it = overrides.begin(); it != overrides.end(); ++it) p[it.key()] = it.value();
  if (axis && axis_value) {
    if (axis->name == "theta") {
      const double ratio = number(p, "t2") / number(p, "t1");
      p["t1"] = *axis_value;
      p["t2"] = *axis_value * ratio;
    } else {
      if (!p.contains(axis->name) || !p[axis->name].is_number())
        throw ConfigError("sweep axis '" + axis->name + "' is not a numeric parameter");
      p[axis->name] = *axis_value;
    }
  }
  for (auto it = p.begin(); it != p.end(); ++it) {
    static const char* known[] = {"m",      "k",  "b",  "v0",    "phi",       "eta0",       "hbar", "t1",
                                  "t2",     "cutoff", "lambda", "f1", "f2", "force", "classical", "v0_over_t1",
                                  "omega",  "gamma"};
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("unknown parameter '" + it.key() + "'");
  }
  if (p.contains("v0_over_t1")) p["v0"] = number(p, "v0_over_t1") * number(p, "t1");

  Resolved r;
  const auto family = parse_family(get_or<std::string>(p, "cutoff", "ohmic"));
  const bool classical = get_or<bool>(p, "classical", false);
  if (physical) {
    PhysicalInputs in;
    in.mass_amu = number(p, "m");
    in.omega_khz = number(p, "omega");
    in.b_per_um = number(p, "b");
    in.v0_uk = number(p, "v0");
    in.phi = number(p, "phi");
    in.gamma_hz = number(p, "gamma");
    in.t1_uk = number(p, "t1");
    in.t2_uk = number(p, "t2");
    in.cutoff = family;
    in.lambda_khz = family == CutoffFamily::Ohmic ? 0.0 : number(p, "lambda");
    in.classical = classical;
    r.params = convert_units(in);
    r.forces = {force_to_reduced(number(p, "f1")), force_to_reduced(number(p, "f2"))};
    r.force = force_to_reduced(number(p, "force"));
  } else {
    MotorParams& mp = r.params;
    mp.m = number(p, "m");
    mp.k = number(p, "k");
    mp.b = number(p, "b");
    mp.v0 = number(p, "v0");
    mp.phi = number(p, "phi");
    BathSpec bath;
    bath.eta0 = number(p, "eta0");
    bath.hbar = classical ? 0.0 : number(p, "hbar");
    switch (family) {
      case CutoffFamily::Ohmic: bath.cutoff = Cutoff::ohmic(); break;
      case CutoffFamily::SoftLorentzian: bath.cutoff = Cutoff::soft_lorentzian(number(p, "lambda")); break;
      case CutoffFamily::Exponential: bath.cutoff = Cutoff::exponential(number(p, "lambda")); break;
    }
    mp.bath1 = bath;
    mp.bath2 = bath;
    mp.bath1.temperature = number(p, "t1");
    mp.bath2.temperature = number(p, "t2");
    r.forces = {number(p, "f1"), number(p, "f2")};
    r.force = number(p, "force");
  }
  return r;
}

json read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '#') {
    std::istringstream lines(text);
    std::string line;
    const std::string tag = "# config: ";
    while (std::getline(lines, line)) {
      if (line.rfind(tag, 0) == 0) return json::parse(line.substr(tag.size()));
    }
    throw ConfigError(path + ": no '# config:' line");
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace qmotor::cli
