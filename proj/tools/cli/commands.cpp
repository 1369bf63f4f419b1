#include "commands.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "qmotor/errors.hpp"
#include "qmotor/noise.hpp"
#include "units.hpp"

#ifndef QMOTOR_GIT_DESCRIBE
#define QMOTOR_GIT_DESCRIBE "unknown"
#endif

namespace qmotor::cli {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string describe(const MotorParams& p) {
  std::ostringstream os;
  os << std::setprecision(17) << "m=" << p.m << " k=" << p.k << " b=" << p.b << " v0=" << p.v0 << " phi=" << p.phi
     << " eta0=" << p.bath1.eta0 << " hbar=" << p.hbar() << " t1=" << p.bath1.temperature
     << " t2=" << p.bath2.temperature << " cutoff=" << to_string(p.bath1.cutoff);
  return os.str();
}

void header(const RunConfig& cfg, std::ostream& os, const std::vector<std::string>& columns) {
  const Resolved base = cfg.resolve();
  os << "# qmotor " << QMOTOR_GIT_DESCRIBE << "\n";
  os << "# command: " << cfg.command << "\n";
  if (cfg.physical) {
    os << "# units: physical; reduced with tau0=" << num(lab_units().time_s()) << " s, length 1 um, mass 1 amu, "
       << "energy k_B uK\n";
  } else {
    os << "# units: reduced\n";
  }
  os << "# resolved (reduced): " << describe(base.params) << " f1=" << num(base.forces.f1)
     << " f2=" << num(base.forces.f2) << " force=" << num(base.force) << "\n";
  os << "# seed: " << cfg.sim.master_seed << "\n";
  os << "# tolerances: rel_tol=" << num(cfg.tol.rel_tol) << " truncation=" << num(cfg.tol.truncation)
     << " kernel_rel_tol=" << num(cfg.tol.kernel.rel_tol) << " kernel_abs_tol=" << num(cfg.tol.kernel.abs_tol)
     << "\n";
  os << "# config: " << cfg.to_json().dump() << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << "\n";
}

struct Point {
  std::size_t series = 0;
  std::optional<double> x;
};

std::vector<Point> points(const RunConfig& cfg) {
  std::vector<Point> pts;
  const std::size_t ns = std::max<std::size_t>(1, cfg.series.size());
  std::vector<double> xs;
  if (cfg.axis) xs = cfg.axis->values();
  for (std::size_t s = 0; s < ns; ++s) {
    if (xs.empty()) pts.push_back({s, std::nullopt});
    for (double x : xs) pts.push_back({s, x});
  }
  return pts;
}

Resolved resolve_point(const RunConfig& cfg, const Point& pt) {
  const nlohmann::json none = nlohmann::json::object();
  return cfg.resolve(cfg.series.empty() ? none : cfg.series[pt.series], pt.x);
}

// Runs f(i) for i < n on `workers` threads; rethrows the lowest-index failure.
template <class F>
void parallel_for(std::size_t n, std::size_t workers, F&& f) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t w = std::min(workers, n);
  if (w <= 1) {
    body();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < w; ++t) pool.emplace_back(body);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void quadrature(const RunConfig& cfg, const std::string& target, std::ostream& os, std::ostream& log) {
  const auto pts = points(cfg);
  std::vector<std::string> cols;
  if (!cfg.series.empty()) cols.push_back("series");
  if (cfg.axis) cols.push_back(cfg.axis->name);
  if (target == "single") cols.push_back("force");
  cols.insert(cols.end(), {"velocity", "abs_error", "tau_truncation"});
  if (target == "forced") cols.push_back("work_rate");
  if (cfg.physical) cols.push_back("velocity_um_per_s");
  header(cfg, os, cols);

  VelocityOptions opt = cfg.tol;
  opt.workers = pts.size() == 1 ? cfg.workers : 1;
  std::vector<VelocityEstimate> res(pts.size());
  std::vector<double> work(pts.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<double> forces(pts.size(), 0.0);
  parallel_for(pts.size(), pts.size() == 1 ? 1 : cfg.workers, [&](std::size_t i) {
    const Resolved r = resolve_point(cfg, pts[i]);
    r.params.validate();
    if (target == "exact") {
      res[i] = steady_velocity(r.params, opt);
    } else if (target == "classical") {
      res[i] = classical_velocity(r.params, opt);
    } else if (target == "forced") {
      res[i] = forced_velocity(r.params, r.forces, opt);
      if (r.forces.f1 == r.forces.f2) work[i] = -r.forces.f1 * res[i].value;
    } else {
      const BathSpec& bath = r.params.bath1;
      forces[i] = r.force;
      res[i] = single_particle_velocity(bath, r.params.m, r.params.b, r.params.v0, r.force, opt);
    }
  });
  std::set<std::string> seen;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (const auto& w : res[i].diagnostics.warnings)
      if (seen.insert(w).second) log << "warning: " << w << "\n";
    std::vector<std::string> row;
    if (!cfg.series.empty()) row.push_back(std::to_string(pts[i].series));
    if (cfg.axis) row.push_back(num(*pts[i].x));
    if (target == "single") row.push_back(num(forces[i]));
    row.insert(row.end(), {num(res[i].value), num(res[i].abs_error), num(res[i].diagnostics.tau_truncation)});
    if (target == "forced") row.push_back(num(work[i]));
    if (cfg.physical) row.push_back(num(velocity_to_um_per_s(res[i].value)));
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
    os << "\n";
  }
}

System make_system(const RunConfig& cfg, const Resolved& r) {
  if (cfg.system == "single") {
    r.params.bath1.validate();
    return SingleSystem{r.params.bath1, r.params.m, r.params.b, r.params.v0, r.force};
  }
  r.params.validate();
  return MotorSystem{r.params, r.forces};
}

void simulate(const RunConfig& cfg, std::ostream& os, std::ostream& log) {
  const auto pts = points(cfg);
  std::vector<std::string> cols;
  if (!cfg.series.empty()) cols.push_back("series");
  if (cfg.axis) cols.push_back(cfg.axis->name);
  cols.insert(cols.end(), {"velocity", "stderr", "mean_kinetic", "mean_kinetic_err", "mean_y2", "mean_y2_err", "dt",
                           "n_traj", "n_steps", "mode"});
  header(cfg, os, cols);
  SimConfig sc = cfg.sim;
  sc.workers = cfg.workers;
  for (const auto& pt : pts) {
    const System sys = make_system(cfg, resolve_point(cfg, pt));
    const EnsembleResult e = run_ensemble(sys, sc);
    std::vector<std::string> row;
    if (!cfg.series.empty()) row.push_back(std::to_string(pt.series));
    if (cfg.axis) row.push_back(num(*pt.x));
    row.insert(row.end(), {num(e.velocity.value), num(e.velocity.abs_error), num(e.mean_kinetic),
                           num(e.mean_kinetic_error), num(e.mean_y2), num(e.mean_y2_error), num(e.dt),
                           std::to_string(sc.n_traj), std::to_string(sc.n_steps), to_string(sc.mode)});
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
    os << "\n";
    for (const auto& w : e.velocity.diagnostics.warnings) log << "warning: " << w << "\n";
  }
}

void noise_check(const RunConfig& cfg, std::ostream& os, std::ostream& log) {
  const Resolved r = cfg.resolve();
  BathSpec spec = r.params.bath1;
  spec.validate();
  const double dt = cfg.sim.dt > 0.0 ? cfg.sim.dt : default_time_step(MotorSystem{r.params, r.forces});
  std::vector<std::string> warnings;
  check_sampling(spec, cfg.sim.n_steps, dt, &warnings);
  for (const auto& w : warnings) log << "warning: " << w << "\n";
  const NoiseTrack track = synthesize(spec, cfg.sim.n_steps, dt, cfg.sim.master_seed);
  if (!cfg.dump.empty()) dump_track(track, cfg.dump);
  const auto dev = periodogram_check(track, cfg.bins);

  double mean = 0.0, var = 0.0;
  for (double x : track.samples) mean += x;
  mean /= static_cast<double>(track.samples.size());
  for (double x : track.samples) var += (x - mean) * (x - mean);
  var /= static_cast<double>(track.samples.size() - 1);

  header(cfg, os, {"bin", "omega_lo", "omega_hi", "deviation"});
  os << "# dt=" << num(dt) << " samples=" << track.samples.size() << " variance=" << num(var);
  if (!spec.quantum() && spec.cutoff.family == CutoffFamily::Ohmic)
    os << " white_variance=" << num(2.0 * spec.eta0 * spec.temperature / dt);
  os << "\n";
  const std::size_t n = track.samples.size();
  const std::size_t modes = n / 2 - 1;
  const double dw = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
  double worst = 0.0;
  for (std::size_t b = 0; b < dev.size(); ++b) {
    const std::size_t lo = 1 + b * modes / dev.size();
    const std::size_t hi = 1 + (b + 1) * modes / dev.size();
    os << b << "," << num(dw * lo) << "," << num(dw * (hi - 1)) << "," << num(dev[b]) << "\n";
    worst = std::max(worst, std::abs(dev[b]));
  }
  log << "max |deviation| = " << worst << "\n";
}

}  // namespace

void run(const RunConfig& cfg, std::ostream& os, std::ostream& log) {
  const std::string& c = cfg.command;
  if (c == "exact") {
    quadrature(cfg, "exact", os, log);
  } else if (c == "forced") {
    quadrature(cfg, "forced", os, log);
  } else if (c == "single") {
    quadrature(cfg, "single", os, log);
  } else if (c == "sweep") {
    if (!cfg.axis) throw ConfigError("sweep needs --axis (or a \"sweep\" block in the config)");
    quadrature(cfg, cfg.target, os, log);
  } else if (c == "simulate") {
    simulate(cfg, os, log);
  } else if (c == "noise-check") {
    noise_check(cfg, os, log);
  } else {
    throw ConfigError("unknown command '" + c + "'");
  }
}

}  // namespace qmotor::cli
