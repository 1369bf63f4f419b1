#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "qmotor/errors.hpp"
#include "units.hpp"

using namespace qmotor;
using namespace qmotor::cli;
using nlohmann::json;

namespace {

std::vector<std::string> data_rows(const std::string& csv) {
  std::vector<std::string> rows;
  std::istringstream is(csv);
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    rows.push_back(line);
  }
  return rows;
}

std::string run_to_string(const RunConfig& c) {
  std::ostringstream os, log;
  run(c, os, log);
  return os.str();
}

int run_exe(const std::string& args, std::string* out = nullptr) {
  const auto tmp = std::filesystem::temp_directory_path() / "qmotor_cli_test.out";
  const std::string cmd = std::string(QMOTOR_EXE) + " " + args + " > " + tmp.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (out) {
    std::ifstream is(tmp);
    *out = std::string(std::istreambuf_iterator<char>(is), {});
  }
  std::filesystem::remove(tmp);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunConfig reduced_sweep() {
  RunConfig c = RunConfig::from_json(json::parse(R"({
    "command": "sweep", "params": {"k": 1.0, "t1": 1.0, "t2": 2.5, "v0": 0.5},
    "sweep": {"axis": "k", "min": 0.5, "max": 2.0, "points": 3, "log": true}})"));
  return c;
}

}  // namespace

TEST(Units, Scales) {
  EXPECT_NEAR(lab_units().time_s(), 1.0966875352677375e-5, 1e-18);
  EXPECT_NEAR(lab_units().hbar(), 0.69648211837411855, 1e-14);
}

TEST(Units, RoundTrip) {
  PhysicalInputs in;
  in.omega_khz = 123.4;
  in.lambda_khz = 5000.0;
  in.gamma_hz = 321.0;
  const MotorParams p = convert_units(in);
  const double w = 123.4e3 * lab_units().time_s();
  EXPECT_NEAR(p.k, 40.0 * w * w, 1e-12 * p.k);
  const PhysicalInputs back = to_physical(p);
  for (auto [a, b] : {std::pair{back.omega_khz, in.omega_khz}, {back.lambda_khz, in.lambda_khz},
                      {back.gamma_hz, in.gamma_hz}, {back.b_per_um, in.b_per_um}, {back.v0_uk, in.v0_uk},
                      {back.t1_uk, in.t1_uk}, {back.t2_uk, in.t2_uk}, {back.mass_amu, in.mass_amu}})
    EXPECT_NEAR(a, b, 1e-12 * std::abs(b));
  EXPECT_NEAR(force_to_physical(force_to_reduced(0.37)), 0.37, 1e-15);
  EXPECT_NEAR(velocity_to_um_per_s(1.0), 1.0 / lab_units().time_s(), 1e-6);
  in.classical = true;
  EXPECT_EQ(convert_units(in).bath1.hbar, 0.0);
  in.t1_uk = -1.0;
  EXPECT_THROW(convert_units(in), ConfigError);
}

TEST(Config, ReducedPassthrough) {
  const Resolved r = reduced_sweep().resolve();
  EXPECT_EQ(r.params.k, 1.0);
  EXPECT_EQ(r.params.v0, 0.5);
  EXPECT_EQ(r.params.bath2.temperature, 2.5);
  EXPECT_EQ(r.params.bath1.cutoff.family, CutoffFamily::Ohmic);
}

TEST(Config, ThetaAxisKeepsRatio) {
  RunConfig c = reduced_sweep();
  c.params["v0_over_t1"] = 0.25;
  const Resolved r = c.resolve(json::object(), std::nullopt);
  EXPECT_DOUBLE_EQ(r.params.v0, 0.25);
  c.axis = SweepAxis{"theta", 0.1, 1.0, 2, false};
  const Resolved t = c.resolve(json::object(), 0.2);
  EXPECT_DOUBLE_EQ(t.params.bath1.temperature, 0.2);
  EXPECT_DOUBLE_EQ(t.params.bath2.temperature, 0.5);
  EXPECT_DOUBLE_EQ(t.params.v0, 0.05);
}

TEST(Config, UnknownParameterRejected) {
  RunConfig c = reduced_sweep();
  c.params["kk"] = 1.0;
  EXPECT_THROW(c.resolve(), ConfigError);
  EXPECT_THROW(RunConfig::from_json(json::parse(R"({"units": "imperial"})")), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  const RunConfig c = reduced_sweep();
  EXPECT_EQ(RunConfig::from_json(c.to_json()).to_json(), c.to_json());
}

TEST(Config, AxisGrid) {
  const SweepAxis a{"k", 0.01, 100.0, 5, true};
  const auto v = a.values();
  ASSERT_EQ(v.size(), 5u);
  EXPECT_NEAR(v[2], 1.0, 1e-14);
  EXPECT_EQ(v.front(), 0.01);
  EXPECT_EQ(v.back(), 100.0);
}

TEST(Commands, CsvReproducesFromOwnHeader) {
  const std::string first = run_to_string(reduced_sweep());
  ASSERT_NE(first.find("# config: "), std::string::npos);
  const auto path = std::filesystem::temp_directory_path() / "qmotor_repro.csv";
  std::ofstream(path) << first;
  RunConfig again = RunConfig::from_json(read_config_file(path.string()));
  std::filesystem::remove(path);
  EXPECT_EQ(data_rows(run_to_string(again)), data_rows(first));
  EXPECT_EQ(data_rows(first).size(), 3u);
}

TEST(Commands, SweepOrderInvariant) {
  RunConfig c = reduced_sweep();
  const auto forward = data_rows(run_to_string(c));
  c.workers = 3;
  EXPECT_EQ(data_rows(run_to_string(c)), forward);
}

TEST(Commands, LambdaRaisesVelocityNearPeak) {
  RunConfig c = RunConfig::from_json(json::parse(R"({
    "command": "exact", "units": "physical", "params": {"omega": 125.0, "v0_over_t1": 0.25},
    "series": [{"lambda": 100.0}, {"lambda": 1000.0}, {"lambda": 10000.0}]})"));
  std::vector<double> v;
  for (const auto& row : data_rows(run_to_string(c))) {
    std::vector<std::string> cells;
    std::stringstream ss(row);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    v.push_back(std::stod(cells.at(1)));
  }
  ASSERT_EQ(v.size(), 3u);
  EXPECT_LT(v[0], v[1]);
  EXPECT_LT(v[1], v[2]);
}

TEST(Executable, ExitCodes) {
  std::string out;
  EXPECT_EQ(run_exe("exact --set k=0.5", &out), 0) << out;
  EXPECT_NE(out.find("velocity"), std::string::npos);
  EXPECT_EQ(run_exe("exact --set nonsense=1"), 2);
  EXPECT_EQ(run_exe("sweep"), 2);
  EXPECT_EQ(run_exe("frobnicate"), 2);
  EXPECT_EQ(run_exe("exact --config /nonexistent.json"), 2);
  EXPECT_EQ(run_exe("simulate --steps 1000"), 2);
}

TEST(Executable, ShippedConfigsParse) {
  for (const auto& e : std::filesystem::directory_iterator(QMOTOR_CONFIG_DIR)) {
    EXPECT_NO_THROW(RunConfig::from_json(read_config_file(e.path().string())).resolve()) << e.path();
  }
}
