#include "qmotor/correlators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>
#include <thread>

#include "qmotor/errors.hpp"
#include "qmotor/greens.hpp"

namespace qmotor {

namespace {

using cd = std::complex<double>;
constexpr std::size_t kN = KernelValues::kCount;
constexpr double kInf = std::numeric_limits<double>::infinity();
enum Index : std::size_t { kGx, kGy, kA12, kA11, kC12, kC21, kC11, kC22 };

// Frequency-domain building blocks at one w > 0. Quantities that diverge as
// w -> 0 are stored multiplied by w (suffix _w) so that, combined with
// sin(wt)/w, the integrands stay finite.
struct Spectrum {
  double s1, s2;          // symmetrized noise spectra
  double ac;              // N hbar (commutator weight divided by w)
  double inv_dxr2;        // 1/|Dx/w|^2 = w^2 Hx
  double hy;              // |G~y|^2
  double diff_w;          // w (Hx - Hy)
  double re_w, im_w;      // w G~x conj(G~y)
  double imgx_w, imgy;    // w Im G~x, Im G~y
};

Spectrum spectrum(const MotorParams& p, double w) {
  const cd eta = memory_kernel_ft(p.bath1, w);
  const cd dxr(p.m * w - eta.imag(), eta.real());
  const cd dx = w * dxr;
  const cd dy(y_detuning(p, w) - w * eta.imag(), dx.imag());
  Spectrum s{};
  const double n = density_of_states(p.bath1, w);
  s.s1 = n * symmetric_fdt_weight(p.bath1, w);
  s.s2 = n * symmetric_fdt_weight(p.bath2, w);
  s.ac = n * p.hbar();
  s.inv_dxr2 = 1.0 / std::norm(dxr);
  s.hy = 1.0 / std::norm(dy);
  // |Dy|^2 - |Dx|^2 = 4k^2 - 4k Re Dx, exact without cancellation.
  s.diff_w = (4.0 * p.k * p.k - 4.0 * p.k * dx.real()) * s.hy * s.inv_dxr2 / w;
  const cd cross = 1.0 / (dxr * std::conj(dy));
  s.re_w = cross.real();
  s.im_w = cross.imag();
  s.imgx_w = dxr.imag() * s.inv_dxr2;
  s.imgy = dy.imag() * s.hy;
  return s;
}

struct Mask {
  bool green = true;  // integrate gx, gy numerically
  bool cross = true;  // c12, c21 finite (k > 0)
};

void full_integrand(const MotorParams& p, const Mask& mask, double tau, double w, quad::Vec<kN>& out) {
  const Spectrum s = spectrum(p, w);
  const double b2 = p.b * p.b;
  const double pref = b2 / (2.0 * std::numbers::pi);
  const double apref = b2 / (4.0 * std::numbers::pi);
  const double sn = std::sin(w * tau);
  const double cs = std::cos(w * tau);
  const double sh = std::sin(0.5 * w * tau);
  const double sn_w = sn / w;
  const double sh_w = sh / w;
  const double omc = 2.0 * sh * sh;          // 1 - cos
  const double hx_omc = 2.0 * sh_w * sh_w * s.inv_dxr2;  // Hx (1 - cos)
  const double hy = s.hy;

  out[kGx] = mask.green ? 2.0 / std::numbers::pi * s.imgx_w * sn_w : 0.0;
  out[kGy] = mask.green ? 2.0 / std::numbers::pi * s.imgy * sn : 0.0;
  out[kA12] = apref * s.ac * s.diff_w * sn;
  out[kA11] = apref * s.ac * (s.inv_dxr2 * sn_w + w * hy * sn);
  if (mask.cross) {
    const double sym = (s.s1 + s.s2) * (hx_omc + hy * (1.0 + cs));
    const double asym = 2.0 * (s.s1 - s.s2) * s.im_w * sn_w;
    out[kC12] = pref * (sym + asym);
    out[kC21] = pref * (sym - asym);
  } else {
    out[kC12] = out[kC21] = 0.0;
  }
  const double base = hx_omc + hy * omc;
  const double mix = 2.0 * s.re_w * (omc / w);
  out[kC11] = pref * (s.s1 * (base + mix) + s.s2 * (base - mix));
  out[kC22] = pref * (s.s2 * (base + mix) + s.s1 * (base - mix));
}

void tail_integrand(const MotorParams& p, const Mask& mask, double w, spectral::TailCoefficients<kN>& c) {
  const Spectrum s = spectrum(p, w);
  const double b2 = p.b * p.b;
  const double pref = b2 / (2.0 * std::numbers::pi);
  const double apref = b2 / (4.0 * std::numbers::pi);
  const double hx = s.inv_dxr2 / (w * w);
  const double hy = s.hy;
  c = {};
  if (mask.green) {
    c.r[kGx] = 2.0 / std::numbers::pi * s.imgx_w / w;
    c.r[kGy] = 2.0 / std::numbers::pi * s.imgy;
  }
  c.r[kA12] = apref * s.ac * s.diff_w;
  c.r[kA11] = apref * s.ac * w * (hx + hy);
  if (mask.cross) {
    const double sp = s.s1 + s.s2;
    c.p[kC12] = c.p[kC21] = pref * sp * (hx + hy);
    c.q[kC12] = c.q[kC21] = pref * sp * (hy - hx);
    c.r[kC12] = pref * 2.0 * (s.s1 - s.s2) * s.im_w / w;
    c.r[kC21] = -c.r[kC12];
  }
  const double base = hx + hy;
  const double mix = 2.0 * s.re_w / w;
  c.p[kC11] = pref * (s.s1 * (base + mix) + s.s2 * (base - mix));
  c.p[kC22] = pref * (s.s2 * (base + mix) + s.s1 * (base - mix));
  c.q[kC11] = -c.p[kC11];
  c.q[kC22] = -c.p[kC22];
}

// Fritsch-Butland slope at interior node i.
double node_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t i) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  if (i == 0) return (y[1] - y[0]) / (x[1] - x[0]);
  if (i == n - 1) return (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
  const double h0 = x[i] - x[i - 1];
  const double h1 = x[i + 1] - x[i];
  const double d0 = (y[i] - y[i - 1]) / h0;
  const double d1 = (y[i + 1] - y[i]) / h1;
  if (d0 * d1 <= 0.0) return 0.0;
  return 3.0 * (h0 + h1) / ((2.0 * h1 + h0) / d0 + (h1 + 2.0 * h0) / d1);
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

}  // namespace

double& KernelValues::operator[](std::size_t i) {
  switch (i) {
    case kGx: return gx;
    case kGy: return gy;
    case kA12: return a12;
    case kA11: return a11;
    case kC12: return c12;
    case kC21: return c21;
    case kC11: return c11;
    default: return c22;
  }
}

double KernelValues::operator[](std::size_t i) const {
  return const_cast<KernelValues&>(*this)[i];
}

KernelEvaluator::KernelEvaluator(const MotorParams& params, KernelOptions options)
    : params_(params), options_(options) {
  params_.validate();
  scales_ = frequency_scales(params_);
  closed_form_green_ = green_time_closed_form(params_);
}

KernelValues KernelEvaluator::operator()(double tau, KernelValues* error, std::size_t* evaluations) const {
  if (!std::isfinite(tau)) throw NumericalError("kernel lag must be finite");
  const Mask mask{!closed_form_green_, params_.k > 0.0};
  quad::Tolerance<kN> tol;
  tol.rel = options_.rel_tol;
  tol.max_intervals = options_.max_intervals;
  const double g_floor = options_.rel_tol / (params_.m * scales_.max_feature());
  for (std::size_t j = 0; j < kN; ++j) tol.abs[j] = (j <= kGy) ? g_floor : options_.abs_tol;

  auto full = [&](double w, quad::Vec<kN>& out) { full_integrand(params_, mask, tau, w, out); };
  auto tail = [&](double w, spectral::TailCoefficients<kN>& c) { tail_integrand(params_, mask, w, c); };
  const auto r = spectral::fourier_half_line<kN>(full, tail, tau, scales_, tol);
  if (!r.converged) {
    std::ostringstream os;
    os << "kernel quadrature did not converge at tau=" << tau << "; worst frequency panel [" << r.worst_lo << ", "
       << r.worst_hi << "]";
    throw NumericalError(os.str());
  }
  KernelValues v, e;
  for (std::size_t j = 0; j < kN; ++j) {
    v[j] = r.value[j];
    e[j] = r.error[j];
  }
  if (!mask.green) {
    v.gx = green_x_time(params_, tau);
    v.gy = green_y_time(params_, tau);
    e.gx = e.gy = 0.0;
  } else if (tau <= 0.0) {
    v.gx = v.gy = 0.0;
  }
  if (!mask.cross) {
    v.c12 = v.c21 = kInf;
    e.c12 = e.c21 = 0.0;
  }
  if (error) *error = e;
  if (evaluations) *evaluations = r.evaluations;
  return v;
}

void evaluate_kernels(const KernelEvaluator& eval, const std::vector<double>& taus, std::vector<KernelValues>& values,
                      std::vector<KernelValues>& errors, std::size_t workers) {
  values.assign(taus.size(), {});
  errors.assign(taus.size(), {});
  workers = std::max<std::size_t>(1, std::min(workers, taus.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < taus.size(); ++i) values[i] = eval(taus[i], &errors[i]);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < taus.size(); i = next++) {
      try {
        values[i] = eval(taus[i], &errors[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = taus.size();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double commutator_a12(const MotorParams& p, double tau) {
  return KernelEvaluator(p)(tau).a12;
}

double commutator_a11(const MotorParams& p, double tau) {
  return KernelEvaluator(p)(tau).a11;
}

std::pair<double, double> msd_cross(const MotorParams& p, double tau) {
  const KernelValues v = KernelEvaluator(p)(tau);
  return {v.c12, v.c21};
}

double msd_self(const MotorParams& p, double tau, int particle) {
  if (particle != 1 && particle != 2) throw ConfigError("msd_self: particle must be 1 or 2");
  const KernelValues v = KernelEvaluator(p)(tau);
  return particle == 1 ? v.c11 : v.c22;
}

std::vector<double> tau_panels(const MotorParams& p, double tau_max, std::size_t n_panels) {
  if (!(tau_max > 0.0)) throw ConfigError("tau_max must be positive");
  n_panels = std::max<std::size_t>(1, n_panels);
  const double w_char = p.k > 0.0 ? std::sqrt(2.0 * p.k / p.m) : p.bath1.eta0 / p.m;
  const double t_lin = 5.0 / w_char;
  std::vector<double> edges{0.0};
  if (tau_max <= t_lin || n_panels == 1) {
    for (std::size_t i = 1; i <= n_panels; ++i) edges.push_back(tau_max * static_cast<double>(i) / n_panels);
    return edges;
  }
  const std::size_t n_lin = std::max<std::size_t>(1, n_panels / 2);
  const std::size_t n_geo = n_panels - n_lin;
  for (std::size_t i = 1; i <= n_lin; ++i) edges.push_back(t_lin * static_cast<double>(i) / n_lin);
  const double ratio = std::pow(tau_max / t_lin, 1.0 / static_cast<double>(n_geo));
  for (std::size_t i = 1; i < n_geo; ++i) edges.push_back(t_lin * std::pow(ratio, static_cast<double>(i)));
  edges.push_back(tau_max);
  return edges;
}

std::vector<double> panel_nodes(const std::vector<double>& panels) {
  std::vector<double> out;
  if (panels.size() < 2) return out;
  out.reserve((panels.size() - 1) * CorrelatorTable::kNodesPerPanel + 1);
  for (std::size_t i = 0; i + 1 < panels.size(); ++i) {
    out.push_back(panels[i]);
    const auto x = quad::GK15::nodes(panels[i], panels[i + 1]);
    out.insert(out.end(), x.begin(), x.end());
  }
  out.push_back(panels.back());
  return out;
}

KernelValues CorrelatorTable::interpolate(double t) const {
  if (tau.empty()) throw NumericalError("interpolate: empty correlator table");
  if (t < 0.0) {
    KernelValues v = interpolate(-t);
    KernelValues out = v;
    out.gx = out.gy = 0.0;
    out.a12 = -v.a12;
    out.a11 = -v.a11;
    out.c12 = v.c21;
    out.c21 = v.c12;
    return out;
  }
  if (t > tau.back()) throw NumericalError("interpolate: lag beyond table range");
  auto it = std::upper_bound(tau.begin(), tau.end(), t);
  std::size_t i = (it == tau.begin()) ? 0 : static_cast<std::size_t>(it - tau.begin()) - 1;
  if (i >= tau.size() - 1) return values.back();
  if (t == tau[i]) return values[i];

  const double h = tau[i + 1] - tau[i];
  const double s = (t - tau[i]) / h;
  const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
  const double h10 = s * (1.0 - s) * (1.0 - s);
  const double h01 = s * s * (3.0 - 2.0 * s);
  const double h11 = s * s * (s - 1.0);
  KernelValues out;
  for (std::size_t j = 0; j < KernelValues::kCount; ++j) {
    const double y0 = values[i][j];
    const double y1 = values[i + 1][j];
    if (!std::isfinite(y0) || !std::isfinite(y1)) {
      out[j] = kInf;
      continue;
    }
    // Slopes need only the neighbours of i and i+1.
    const std::size_t lo = (i == 0) ? 0 : i - 1;
    const std::size_t hi = std::min(tau.size() - 1, i + 2);
    std::vector<double> xs(tau.begin() + lo, tau.begin() + hi + 1);
    std::vector<double> ys;
    for (std::size_t k = lo; k <= hi; ++k) ys.push_back(values[k][j]);
    const double m0 = node_slope(xs, ys, i - lo);
    const double m1 = node_slope(xs, ys, i + 1 - lo);
    out[j] = h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
  }
  return out;
}

void CorrelatorTable::check_invariants(const MotorParams& p) const {
  if (tau.empty() || values.size() != tau.size() || errors.size() != tau.size())
    throw NumericalError("correlator table: inconsistent array sizes");
  if (tau.front() == 0.0) {
    const KernelValues& z = values.front();
    if (z.a12 != 0.0 || z.c11 != 0.0 || z.c22 != 0.0)
      throw NumericalError("correlator table: a12(0), c11(0) and c22(0) must vanish");
  }
  const bool equilibrium = p.bath1.temperature == p.bath2.temperature;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const KernelValues& v = values[i];
    const KernelValues& e = errors[i];
    for (std::size_t j : {kC12, kC21, kC11, kC22}) {
      if (std::isnan(v[j]) || v[j] < -(e[j] + tolerance.abs_tol))
        throw NumericalError("correlator table: negative mean-square displacement at tau=" + std::to_string(tau[i]));
    }
    if (equilibrium && std::isfinite(v.c12) &&
        std::abs(v.c12 - v.c21) > 1e-10 * std::max(1.0, std::abs(v.c12)))
      throw NumericalError("correlator table: c12 != c21 at equal temperatures");
  }
}

CorrelatorTable build_table(const MotorParams& p, double tau_max, std::size_t n_points, const KernelOptions& opt,
                            std::size_t workers) {
  if (n_points < 16) throw ConfigError("build_table: n_points must be at least 16");
  const std::size_t n_panels = std::max<std::size_t>(1, (n_points - 1 + 15) / 16);
  KernelEvaluator eval(p, opt);
  CorrelatorTable t;
  t.panels = tau_panels(p, tau_max, n_panels);
  t.tau = panel_nodes(t.panels);
  t.params_hash = p.fingerprint();
  t.tolerance = opt;
  evaluate_kernels(eval, t.tau, t.values, t.errors, workers);
  t.check_invariants(p);
  return t;
}

namespace {

nlohmann::json kernel_arrays(const std::vector<KernelValues>& v) {
  static constexpr const char* kNames[] = {"gx", "gy", "a12", "a11", "c12", "c21", "c11", "c22"};
  nlohmann::json out = nlohmann::json::object();
  for (std::size_t j = 0; j < KernelValues::kCount; ++j) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& x : v) {
      if (std::isfinite(x[j]))
        arr.push_back(x[j]);
      else
        arr.push_back(nullptr);
    }
    out[kNames[j]] = std::move(arr);
  }
  return out;
}

std::vector<KernelValues> read_kernel_arrays(const nlohmann::json& j, std::size_t n) {
  static constexpr const char* kNames[] = {"gx", "gy", "a12", "a11", "c12", "c21", "c11", "c22"};
  std::vector<KernelValues> out(n);
  for (std::size_t c = 0; c < KernelValues::kCount; ++c) {
    const auto& arr = j.at(kNames[c]);
    if (arr.size() != n) throw ConfigError(std::string("correlator cache: bad length for ") + kNames[c]);
    for (std::size_t i = 0; i < n; ++i) out[i][c] = arr[i].is_null() ? kInf : arr[i].get<double>();
  }
  return out;
}

}  // namespace

void save_table(const CorrelatorTable& table, const std::filesystem::path& path) {
  nlohmann::json j;
  j["schema"] = "qmotor.correlator_table/1";
  j["params_hash"] = hex64(table.params_hash);
  j["rel_tol"] = table.tolerance.rel_tol;
  j["abs_tol"] = table.tolerance.abs_tol;
  j["tau"] = table.tau;
  j["panels"] = table.panels;
  j["values"] = kernel_arrays(table.values);
  j["errors"] = kernel_arrays(table.errors);
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write correlator cache " + path.string());
  os << j.dump() << '\n';
}

CorrelatorTable load_table(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read correlator cache " + path.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("correlator cache " + path.string() + ": " + e.what());
  }
  if (j.value("schema", "") != "qmotor.correlator_table/1")
    throw ConfigError("correlator cache " + path.string() + ": unknown schema");
  CorrelatorTable t;
  t.params_hash = std::stoull(j.at("params_hash").get<std::string>(), nullptr, 16);
  t.tolerance.rel_tol = j.at("rel_tol").get<double>();
  t.tolerance.abs_tol = j.at("abs_tol").get<double>();
  t.tau = j.at("tau").get<std::vector<double>>();
  t.panels = j.at("panels").get<std::vector<double>>();
  t.values = read_kernel_arrays(j.at("values"), t.tau.size());
  t.errors = read_kernel_arrays(j.at("errors"), t.tau.size());
  return t;
}

}  // namespace qmotor
