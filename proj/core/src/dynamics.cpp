#include "qmotor/dynamics.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "qmotor/errors.hpp"
#include "qmotor/noise.hpp"

namespace qmotor {

namespace {

bool power_of_two(std::size_t n) {
  return n > 0 && (n & (n - 1)) == 0;
}

// One synthesizer per (thread, block length); plans are reused across trajectories.
NoiseSynthesizer& thread_synthesizer(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<NoiseSynthesizer>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<NoiseSynthesizer>(n);
  return *slot;
}

struct Particles {
  std::size_t count;
  std::array<BathSpec, 2> bath;
  std::array<double, 2> phase{};
  std::array<double, 2> force{};
  double m, k, b, v0;
};

void fill_noise(const BathSpec& bath, const SimConfig& cfg, double dt, std::uint64_t seed, std::vector<double>& out) {
  if (cfg.mode == SimMode::QMD) {
    thread_synthesizer(cfg.n_steps).generate(bath, dt, seed, out);
    return;
  }
  const double sigma = std::sqrt(2.0 * bath.eta0 * bath.temperature / dt);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  out.resize(cfg.n_steps);
  for (auto& x : out) x = sigma * gauss(rng);
}

TrajectoryRecord integrate(const Particles& sys, const SimConfig& cfg, std::size_t traj) {
  const double dt = cfg.dt;
  const std::size_t n = cfg.n_steps;
  const std::size_t np = sys.count;
  std::array<std::vector<double>, 2> xi;
  for (std::size_t i = 0; i < np; ++i) {
    const BathSpec bath = cfg.mode == SimMode::QMD ? sys.bath[i] : [&] {
      BathSpec c = sys.bath[i];
      c.hbar = 0.0;
      return c;
    }();
    fill_noise(bath, cfg, dt, derive_seed(cfg.master_seed, traj, i), xi[i]);
  }

  std::array<double, 2> q{}, p{}, f{};
  if (cfg.initial == InitialConditions::Thermal) {
    std::mt19937_64 rng(derive_seed(~cfg.master_seed, traj, 0));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < np; ++i) p[i] = std::sqrt(sys.m * sys.bath[i].temperature) * gauss(rng);
  }
  auto forces = [&] {
    for (std::size_t i = 0; i < np; ++i) {
      double fi = -sys.v0 * sys.b * std::sin(sys.b * q[i] + sys.phase[i]) + sys.force[i];
      if (np == 2) fi -= sys.k * (q[i] - q[1 - i]);
      f[i] = fi;
    }
  };
  forces();

  const double eta0 = sys.bath[0].eta0;
  const double gamma = eta0 / sys.m;
  const double decay = std::exp(-gamma * dt);
  const double kick = -std::expm1(-gamma * dt) / gamma;
  const double half = 0.5 * dt;
  const double inv_m = 1.0 / sys.m;

  const std::size_t dec = std::max<std::size_t>(1, n / std::max<std::size_t>(1, cfg.saved_points));
  const std::size_t window_start = static_cast<std::size_t>(std::floor((1.0 - cfg.estimator_window) * n));
  TrajectoryRecord rec;
  rec.times.reserve(n / dec);
  rec.com.reserve(n / dec);
  double kin = 0.0, y2 = 0.0;
  std::size_t samples = 0;

  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < np; ++i) {
      p[i] += half * f[i];
      q[i] += half * p[i] * inv_m;
      p[i] = decay * p[i] + kick * xi[i][s];
      q[i] += half * p[i] * inv_m;
    }
    forces();
    for (std::size_t i = 0; i < np; ++i) p[i] += half * f[i];

    if (s >= window_start) {
      for (std::size_t i = 0; i < np; ++i) kin += 0.5 * p[i] * p[i] * inv_m;
      if (np == 2) y2 += (q[0] - q[1]) * (q[0] - q[1]);
      ++samples;
    }
    if ((s + 1) % dec == 0) {
      const double x = np == 2 ? 0.5 * (q[0] + q[1]) : q[0];
      if (!std::isfinite(x) || !std::isfinite(p[0]) || !std::isfinite(p[np - 1])) {
        std::ostringstream os;
        os << "trajectory " << traj << " diverged at step " << s + 1;
        throw NumericalError(os.str());
      }
      rec.times.push_back(static_cast<double>(s + 1) * dt);
      rec.com.push_back(x);
    }
  }
  if (samples > 0) {
    rec.mean_kinetic = kin / static_cast<double>(samples * np);
    rec.mean_y2 = y2 / static_cast<double>(samples);
  }
  const std::size_t first =
      static_cast<std::size_t>(std::floor((1.0 - cfg.estimator_window) * static_cast<double>(rec.times.size())));
  rec.slope = least_squares_slope(rec.times, rec.com, first);
  return rec;
}

Particles motor_particles(const MotorParams& p, const ForceSpec& f) {
  return {2, {p.bath1, p.bath2}, {0.0, p.phi}, {f.f1, f.f2}, p.m, p.k, p.b, p.v0};
}

Particles single_particles(const SingleSystem& s) {
  return {1, {s.bath, s.bath}, {0.0, 0.0}, {s.force, 0.0}, s.m, 0.0, s.b, s.v0};
}

SimConfig resolved(const System& s, SimConfig cfg) {
  if (cfg.dt == 0.0) cfg.dt = default_time_step(s);
  return cfg;
}

std::uint64_t system_fingerprint(const System& s) {
  if (const auto* m = std::get_if<MotorSystem>(&s))
    return hash_double(hash_double(m->params.fingerprint(), m->forces.f1), m->forces.f2);
  const auto& x = std::get<SingleSystem>(s);
  std::uint64_t h = bath_fingerprint(x.bath);
  for (double v : {x.m, x.b, x.v0, x.force}) h = hash_double(h, v);
  return h;
}

}  // namespace

std::string to_string(SimMode m) {
  return m == SimMode::QMD ? "qmd" : "md";
}

std::uint64_t SimConfig::fingerprint() const {
  std::uint64_t h = 0x3c6ef372fe94f82bULL;
  h = hash_double(h, dt);
  h = hash_combine(h, n_steps);
  h = hash_combine(h, n_traj);
  h = hash_combine(h, master_seed);
  h = hash_combine(h, static_cast<std::uint64_t>(mode));
  h = hash_double(h, estimator_window);
  h = hash_combine(h, static_cast<std::uint64_t>(initial));
  return hash_combine(h, saved_points);
}

double max_frequency(const System& s) {
  if (const auto* m = std::get_if<MotorSystem>(&s)) {
    const auto& p = m->params;
    return std::max(std::sqrt(2.0 * p.k / p.m + std::abs(p.v0) * p.b * p.b / p.m), p.bath1.eta0 / p.m);
  }
  const auto& x = std::get<SingleSystem>(s);
  return std::max(std::sqrt(std::abs(x.v0) * x.b * x.b / x.m), x.bath.eta0 / x.m);
}

double default_time_step(const System& s) {
  return 0.05 / max_frequency(s);
}

void validate(const System& s, const SimConfig& cfg) {
  if (const auto* m = std::get_if<MotorSystem>(&s)) {
    m->params.validate();
    if (m->params.bath1.cutoff.family != CutoffFamily::Ohmic)
      throw ConfigError("simulation supports Ohmic baths only");
    if (!std::isfinite(m->forces.f1) || !std::isfinite(m->forces.f2)) throw ConfigError("forces must be finite");
  } else {
    const auto& x = std::get<SingleSystem>(s);
    x.bath.validate();
    if (x.bath.cutoff.family != CutoffFamily::Ohmic) throw ConfigError("simulation supports Ohmic baths only");
    if (!(x.m > 0.0) || !(x.b > 0.0) || !std::isfinite(x.v0) || !std::isfinite(x.force))
      throw ConfigError("single particle: invalid m, b, V0 or force");
  }
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("time step must be positive");
  if (cfg.dt * max_frequency(s) >= 0.1) {
    std::ostringstream os;
    os << "time step " << cfg.dt << " violates dt * w_max < 0.1 (w_max = " << max_frequency(s) << ")";
    throw ConfigError(os.str());
  }
  if (!power_of_two(cfg.n_steps) || cfg.n_steps < 1024)
    throw ConfigError("n_steps must be a power of two >= 1024");
  if (!(cfg.estimator_window > 0.0 && cfg.estimator_window <= 1.0))
    throw ConfigError("estimator window must lie in (0, 1]");
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t first) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < first + 2) return 0.0;
  const double cnt = static_cast<double>(n - first);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = first; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= cnt;
  my /= cnt;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = first; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

TrajectoryRecord integrate_motor(const MotorParams& p, const ForceSpec& f, const SimConfig& cfg,
                                 std::size_t traj_index) {
  const System s = MotorSystem{p, f};
  const SimConfig c = resolved(s, cfg);
  validate(s, c);
  return integrate(motor_particles(p, f), c, traj_index);
}

TrajectoryRecord integrate_single(const BathSpec& bath, double m, double b, double v0, double force,
                                  const SimConfig& cfg, std::size_t traj_index) {
  const SingleSystem x{bath, m, b, v0, force};
  const System s = x;
  const SimConfig c = resolved(s, cfg);
  validate(s, c);
  return integrate(single_particles(x), c, traj_index);
}

EnsembleResult run_ensemble(const System& s, const SimConfig& cfg_in) {
  const SimConfig cfg = resolved(s, cfg_in);
  validate(s, cfg);
  if (cfg.n_traj < 2) throw ConfigError("ensemble needs at least two trajectories");
  const Particles sys = std::holds_alternative<MotorSystem>(s)
                            ? motor_particles(std::get<MotorSystem>(s).params, std::get<MotorSystem>(s).forces)
                            : single_particles(std::get<SingleSystem>(s));

  std::vector<TrajectoryRecord> records(cfg.n_traj);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < cfg.n_traj; i = next++) {
      try {
        records[i] = integrate(sys, cfg, i);
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          std::ostringstream os;
          os << e.what() << " (master seed " << cfg.master_seed << ", trajectory " << i << ", noise seeds "
             << derive_seed(cfg.master_seed, i, 0) << "/" << derive_seed(cfg.master_seed, i, 1) << ")";
          failure = std::make_exception_ptr(NumericalError(os.str()));
        }
        next = cfg.n_traj;
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.workers, cfg.n_traj));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  EnsembleResult out;
  out.dt = cfg.dt;
  out.times = records.front().times;
  out.mean_com_trajectory.assign(out.times.size(), 0.0);
  const double nt = static_cast<double>(cfg.n_traj);
  auto mean_err = [&](auto get, double& mean, double& err) {
    double s1 = 0.0;
    for (const auto& r : records) s1 += get(r);
    mean = s1 / nt;
    double s2 = 0.0;
    for (const auto& r : records) s2 += (get(r) - mean) * (get(r) - mean);
    err = std::sqrt(s2 / (nt - 1.0) / nt);
  };
  for (const auto& r : records) {
    out.per_traj_slopes.push_back(r.slope);
    for (std::size_t i = 0; i < out.times.size(); ++i) out.mean_com_trajectory[i] += r.com[i] / nt;
  }
  double v = 0.0, ve = 0.0;
  mean_err([](const TrajectoryRecord& r) { return r.slope; }, v, ve);
  mean_err([](const TrajectoryRecord& r) { return r.mean_kinetic; }, out.mean_kinetic, out.mean_kinetic_error);
  mean_err([](const TrajectoryRecord& r) { return r.mean_y2; }, out.mean_y2, out.mean_y2_error);
  out.velocity.value = v;
  out.velocity.abs_error = ve;
  out.velocity.method = cfg.mode == SimMode::QMD ? Method::QMD : Method::MD;
  out.velocity.params_fingerprint = system_fingerprint(s);
  out.config_fingerprint = cfg.fingerprint();
  return out;
}

}  // namespace qmotor
