#include <fstream>
#include <sstream>
#include <iostream>
#include <string>
#include <vector>

#include <boost/program_options.hpp>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "qmotor/errors.hpp"

namespace po = boost::program_options;
using nlohmann::json;

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

const char* kUsage =
    "usage: qmotor <command> [options]\n"
    "commands: exact, forced, single, simulate, sweep, noise-check\n";

// Parameter overrides "key=value"; the value is parsed as JSON when possible.
void apply_sets(json& params, const std::vector<std::string>& sets) {
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw qmotor::ConfigError("--set expects key=value, got '" + s + "'");
    const std::string key = s.substr(0, eq);
    const std::string val = s.substr(eq + 1);
    json v = json::parse(val, nullptr, false);
    params[key] = v.is_discarded() ? json(val) : v;
  }
}

int run(int argc, char** argv) {
  if (argc < 2 || std::string(argv[1]) == "--help" || std::string(argv[1]) == "-h") {
    std::cout << kUsage;
    return argc < 2 ? kConfigError : 0;
  }
  const std::string command = argv[1];

  po::options_description opts("options");
  opts.add_options()
      ("help,h", "show help")
      ("config", po::value<std::string>(), "JSON config, or a CSV written by qmotor")
      ("set", po::value<std::vector<std::string>>()->composing(), "parameter override key=value (repeatable)")
      ("units", po::value<std::string>(), "reduced | physical")
      ("system", po::value<std::string>(), "motor | single (simulate)")
      ("target", po::value<std::string>(), "exact | classical | forced | single (sweep)")
      ("axis", po::value<std::string>(), "sweep parameter")
      ("min", po::value<double>(), "sweep start")
      ("max", po::value<double>(), "sweep end")
      ("points", po::value<std::size_t>(), "sweep points")
      ("log", po::bool_switch(), "log-spaced sweep")
      ("mode", po::value<std::string>(), "qmd | md")
      ("traj", po::value<std::size_t>(), "trajectories")
      ("steps", po::value<std::size_t>(), "time steps (power of two)")
      ("dt", po::value<double>(), "time step, 0 for the default")
      ("seed", po::value<std::uint64_t>(), "master seed")
      ("bins", po::value<std::size_t>(), "periodogram bins (noise-check)")
      ("dump", po::value<std::string>(), "raw noise dump path (noise-check)")
      ("out", po::value<std::string>(), "output CSV, stdout when omitted")
      ("workers", po::value<std::size_t>(), "worker threads")
      ("tol", po::value<double>(), "lag-integral relative tolerance");

  po::variables_map vm;
  po::store(po::command_line_parser(argc - 1, argv + 1).options(opts).run(), vm);
  po::notify(vm);
  if (vm.count("help")) {
    std::cout << kUsage << opts;
    return 0;
  }

  json j = vm.count("config") ? qmotor::cli::read_config_file(vm["config"].as<std::string>()) : json::object();
  j["command"] = command;
  auto str = [&](const char* k) { return vm[k].as<std::string>(); };
  if (vm.count("units")) j["units"] = str("units");
  if (vm.count("system")) j["system"] = str("system");
  if (vm.count("target")) j["target"] = str("target");
  if (vm.count("set")) {
    if (!j.contains("params")) j["params"] = json::object();
    apply_sets(j["params"], vm["set"].as<std::vector<std::string>>());
  }
  if (vm.count("axis") || vm.count("min") || vm.count("max") || vm.count("points") || vm["log"].as<bool>()) {
    json& s = j["sweep"];
    if (s.is_null()) s = json::object();
    if (vm.count("axis")) s["axis"] = str("axis");
    if (vm.count("min")) s["min"] = vm["min"].as<double>();
    if (vm.count("max")) s["max"] = vm["max"].as<double>();
    if (vm.count("points")) s["points"] = vm["points"].as<std::size_t>();
    if (vm["log"].as<bool>()) s["log"] = true;
  }
  json& sim = j["simulation"];
  if (sim.is_null()) sim = json::object();
  if (vm.count("mode")) sim["mode"] = str("mode");
  if (vm.count("traj")) sim["traj"] = vm["traj"].as<std::size_t>();
  if (vm.count("steps")) sim["steps"] = vm["steps"].as<std::size_t>();
  if (vm.count("dt")) sim["dt"] = vm["dt"].as<double>();
  if (vm.count("seed")) sim["seed"] = vm["seed"].as<std::uint64_t>();
  if (vm.count("tol")) j["tolerance"]["rel_tol"] = vm["tol"].as<double>();
  if (vm.count("bins")) j["noise"]["bins"] = vm["bins"].as<std::size_t>();
  if (vm.count("dump")) j["noise"]["dump"] = str("dump");
  if (vm.count("workers")) j["workers"] = vm["workers"].as<std::size_t>();
  if (vm.count("out")) j["out"] = str("out");

  const auto cfg = qmotor::cli::RunConfig::from_json(j);
  if (cfg.out.empty()) {
    qmotor::cli::run(cfg, std::cout, std::cerr);
  } else {
    std::ostringstream buf;
    qmotor::cli::run(cfg, buf, std::cerr);
    std::ofstream os(cfg.out);
    if (!os) throw qmotor::ConfigError("cannot write " + cfg.out);
    os << buf.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const qmotor::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const po::error& e) {
    std::cerr << "config error: " << e.what() << "\n" << kUsage;
    return kConfigError;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const qmotor::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalError;
  }
}
