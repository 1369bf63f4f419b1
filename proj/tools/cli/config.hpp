#pragma once

// Run configuration: a JSON document, optionally overridden by flags.
//
// {
//   "command": "sweep",
//   "units": "reduced" | "physical",
//   "system": "motor" | "single",          (simulate only)
//   "target": "exact" | "classical" | "forced" | "single",   (sweep only)
//   "params": { ... },                     see below
//   "sweep": {"axis": "k", "min": 0.01, "max": 100, "points": 25, "log": true},
//   "series": [ {"lambda": 1000}, ... ],   parameter overrides, one curve each
//   "simulation": {"mode": "qmd", "traj": 512, "steps": 262144, "dt": 0,
//                  "seed": 1, "window": 0.5, "initial": "origin"},
//   "tolerance": {"rel_tol": 1e-8, "truncation": 1e-10, "kernel_rel_tol": 1e-10},
//   "noise": {"bins": 32, "dump": ""},
//   "workers": 1,
//   "out": ""
// }
//
// Reduced params: m, k, b, v0, phi, eta0, hbar, t1, t2, cutoff, lambda,
// f1, f2, force, classical, and optionally v0_over_t1 (V0 = ratio * T1).
// Physical params replace k by omega [kHz], eta0 by gamma [Hz, eta0/m],
// lambda is in kHz, temperatures and V0 in uK, b in 1/um, m in amu and
// forces in uK/um; hbar follows from the unit system.
//
// The sweep axis is any numeric parameter, or "theta" which sets T1 = theta
// and keeps T2/T1 fixed.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmotor/bath.hpp"
#include "qmotor/dynamics.hpp"
#include "qmotor/velocity.hpp"

namespace qmotor::cli {

struct SweepAxis {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  std::size_t points = 0;
  bool log = false;

  std::vector<double> values() const;
};

struct Resolved {
  MotorParams params;
  ForceSpec forces;
  double force = 0.0;  // single-particle tilt
};

struct RunConfig {
  std::string command;
  bool physical = false;
  std::string system = "motor";
  std::string target = "exact";
  nlohmann::json params = nlohmann::json::object();
  std::optional<SweepAxis> axis;
  std::vector<nlohmann::json> series;
  SimConfig sim;
  VelocityOptions tol;
  std::size_t bins = 32;
  std::string dump;
  std::size_t workers = 1;
  std::string out;

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  /// Base parameters with `overrides` applied, then the axis value if given.
  Resolved resolve(const nlohmann::json& overrides = nlohmann::json::object(),
                   std::optional<double> axis_value = std::nullopt) const;
};

/// Reads a JSON file, or the "# config:" line of a CSV written by this tool.
nlohmann::json read_config_file(const std::string& path);

}  // namespace qmotor::cli
