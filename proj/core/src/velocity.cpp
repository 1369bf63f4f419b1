#include "qmotor/velocity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "qmotor/errors.hpp"
#include "qmotor/quadrature.hpp"

namespace qmotor {

namespace {

constexpr std::size_t kNodes = quad::GK15::kPoints;
constexpr double kGrowth = 1.25;
constexpr int kQuietPanels = 3;

// Integrand value, an upper envelope insensitive to oscillation zeros, and
// the first-order effect of the kernel errors.
struct Sample {
  double f = 0.0;
  double envelope = 0.0;
  double propagated = 0.0;
};

using Integrand = std::function<Sample(double, const KernelValues&, const KernelValues&)>;

double half_exp(double c) {
  return std::isfinite(c) ? std::exp(-0.5 * c) : 0.0;
}

// d/da [sin(a)/a]
double sinc_slope(double a) {
  if (std::abs(a) < 1e-4) return -a / 3.0;
  return (a * std::cos(a) - std::sin(a)) / (a * a);
}

Integrand steady_integrand(const MotorParams& p) {
  const double b2 = p.b * p.b;
  return [b2](double, const KernelValues& v, const KernelValues& e) {
    const double e12 = half_exp(v.c12);
    const double e21 = half_exp(v.c21);
    const double dg = v.gx - v.gy;
    const double sa = b2 * sinc(v.a12);
    const double de = e12 - e21;
    Sample s;
    s.f = 0.25 * dg * sa * de;
    s.envelope = 0.25 * b2 * (std::abs(v.gx) + std::abs(v.gy)) * std::max(e12, e21);
    s.propagated = 0.25 * b2 *
                   ((e.gx + e.gy) * std::abs(de) +
                    std::abs(dg) * (0.5 * e12 * e.c12 + 0.5 * e21 * e.c21 +
                                    std::abs(de) * std::abs(sinc_slope(v.a12)) * e.a12));
    return s;
  };
}

Integrand forced_integrand(const MotorParams& p, const ForceSpec& f) {
  const double b2 = p.b * p.b;
  const double eta_zero = memory_kernel_ft(p.bath1, 0.0).real();
  const double u = p.b * (f.f1 + f.f2) / (2.0 * eta_zero);
  const bool cross = p.k > 0.0;
  // Bound particles share the mean drift; free ones (k = 0) drift at F_i / eta~(0).
  const double u1 = cross ? u : p.b * f.f1 / eta_zero;
  const double u2 = cross ? u : p.b * f.f2 / eta_zero;
  const double ys = cross ? p.b * (f.f1 - f.f2) / (2.0 * p.k) : 0.0;
  const double phase = p.phi - ys;
  return [=](double tau, const KernelValues& v, const KernelValues& e) {
    Sample s;
    const double e11 = half_exp(v.c11);
    const double e22 = half_exp(v.c22);
    const double drift = std::sin(u1 * tau) * e11 + std::sin(u2 * tau) * e22;
    const double gs = v.gx + v.gy;
    const double s11 = b2 * sinc(v.a11);
    const double self = gs * s11 * drift;
    double cr = 0.0;
    double cross_env = 0.0;
    double cross_err = 0.0;
    if (cross) {
      const double e12 = half_exp(v.c12);
      const double e21 = half_exp(v.c21);
      const double dg = v.gx - v.gy;
      const double s12 = b2 * sinc(v.a12);
      const double sa = std::sin(phase - u * tau);
      const double sb = std::sin(phase + u * tau);
      const double br = sa * e12 - sb * e21;
      cr = dg * s12 * br;
      cross_env = b2 * (std::abs(v.gx) + std::abs(v.gy)) * (e12 + e21);
      cross_err = b2 * ((e.gx + e.gy) * std::abs(br) +
                        std::abs(dg) * (0.5 * e12 * e.c12 + 0.5 * e21 * e.c21 +
                                        std::abs(br) * std::abs(sinc_slope(v.a12)) * e.a12));
    }
    s.f = 0.25 * (cr - self);
    s.envelope = 0.25 * (cross_env + b2 * (std::abs(v.gx) + std::abs(v.gy)) * (e11 + e22));
    s.propagated =
        0.25 * (cross_err + b2 * ((e.gx + e.gy) * std::abs(drift) +
                                  std::abs(gs) * (0.5 * e11 * e.c11 + 0.5 * e22 * e.c22 +
                                                  (e11 + e22) * std::abs(sinc_slope(v.a11)) * e.a11)));
    return s;
  };
}

struct LagPanel {
  double a = 0.0, b = 0.0;
  std::array<double, kNodes> tau{};
  std::array<KernelValues, kNodes> v{}, e{};
  KernelValues edge_v, edge_e;  // right edge
  double kronrod = 0.0, gauss = 0.0, propagated = 0.0, envelope = 0.0, envelope_integral = 0.0;
  double quad_error() const { return std::abs(kronrod - gauss); }
};

void score(LagPanel& pn, const Integrand& g) {
  const auto wk = quad::GK15::kronrod_weights(pn.a, pn.b);
  const auto wg = quad::GK15::gauss_weights(pn.a, pn.b);
  pn.kronrod = pn.gauss = pn.propagated = pn.envelope = pn.envelope_integral = 0.0;
  for (std::size_t i = 0; i < kNodes; ++i) {
    const Sample s = g(pn.tau[i], pn.v[i], pn.e[i]);
    pn.kronrod += wk[i] * s.f;
    pn.gauss += wg[i] * s.f;
    pn.propagated += wk[i] * s.propagated;
    pn.envelope = std::max(pn.envelope, s.envelope);
    pn.envelope_integral += wk[i] * s.envelope;
  }
  const Sample edge = g(pn.b, pn.edge_v, pn.edge_e);
  pn.envelope = std::max(pn.envelope, edge.envelope);
}

class LagBuilder {
 public:
  // With `exponential_tail` the lag range may end early once the integrand
  // has reached its large-lag form A exp(-alpha tau / 2), alpha being the
  // common slope of c12 and c21; the remainder is then added analytically.
  LagBuilder(const MotorParams& p, const VelocityOptions& opt, Integrand g, bool exponential_tail = false)
      : p_(p), opt_(opt), g_(std::move(g)), eval_(p, opt.kernel), exponential_tail_(exponential_tail) {}

  LagIntegral run() {
    LagIntegral out;
    zero_v_ = eval_(0.0, &zero_e_);
    count_ += 1;
    extend(out.diagnostics);
    refine();
    double value = 0.0, qerr = 0.0, perr = 0.0, env = 0.0;
    for (const auto& pn : panels_) {
      value += pn.kronrod;
      qerr += pn.quad_error();
      perr += pn.propagated;
      env += pn.envelope_integral;
    }
    const auto& last = panels_.back();
    const double tail = tail_value_ != 0.0 ? tail_error_ : last.envelope * (last.b - last.a);
    out.value = value + tail_value_;
    out.abs_error = qerr + perr + tail;
    out.diagnostics.tail_fraction = env > 0.0 ? tail / env : 0.0;
    out.diagnostics.tau_truncation = last.b;
    out.diagnostics.tau_panels = panels_.size();
    out.diagnostics.kernel_evaluations = count_;
    out.table = assemble();
    return out;
  }

 private:
  double initial_width() const {
    const double w_char = p_.k > 0.0 ? std::sqrt(2.0 * p_.k / p_.m) : p_.bath1.eta0 / p_.m;
    double t_eff = std::max(p_.bath1.temperature, p_.bath2.temperature);
    if (p_.quantum()) t_eff = std::max(t_eff, 0.5 * p_.hbar() * std::max(w_char, p_.bath1.eta0 / p_.m));
    double t_scale = 5.0 / w_char;
    if (t_eff > 0.0) t_scale = std::min(t_scale, 1.0 / (p_.b * std::sqrt(t_eff / p_.m)));
    return t_scale / 8.0;
  }

  void fill(std::vector<LagPanel*>& batch) {
    std::vector<double> taus;
    taus.reserve(batch.size() * (kNodes + 1));
    for (LagPanel* pn : batch) {
      pn->tau = quad::GK15::nodes(pn->a, pn->b);
      taus.insert(taus.end(), pn->tau.begin(), pn->tau.end());
      taus.push_back(pn->b);
    }
    std::vector<KernelValues> vals, errs;
    evaluate_kernels(eval_, taus, vals, errs, opt_.workers);
    count_ += taus.size();
    std::size_t k = 0;
    for (LagPanel* pn : batch) {
      for (std::size_t i = 0; i < kNodes; ++i, ++k) {
        pn->v[i] = vals[k];
        pn->e[i] = errs[k];
      }
      pn->edge_v = vals[k];
      pn->edge_e = errs[k];
      ++k;
      score(*pn, g_);
    }
  }

  void extend(VelocityDiagnostics&) {
    const double h0 = initial_width();
    const double limit = opt_.tau_limit > 0.0 ? opt_.tau_limit : 1e7 * h0;
    double tau = 0.0, width = h0, env_total = 0.0;
    int quiet = 0;
    while (true) {
      if (tau >= limit || panels_.size() >= opt_.max_panels) {
        std::ostringstream os;
        os << "lag integrand has not decayed by tau=" << tau << "; raise the lag limit above " << 2.0 * tau;
        throw NumericalError(os.str());
      }
      LagPanel pn;
      pn.a = tau;
      pn.b = std::min(tau + width, limit);
      std::vector<LagPanel*> batch{&pn};
      fill(batch);
      panels_.push_back(pn);
      env_total += pn.envelope_integral;
      tau = pn.b;
      if (exponential_tail_ && try_tail()) break;
      const double bound = pn.envelope * (pn.b - pn.a);
      if (bound <= opt_.truncation * env_total) {
        if (++quiet >= kQuietPanels) break;
      } else {
        quiet = 0;
      }
      width *= kGrowth;
    }
  }

  // Accepts the analytic remainder when S = f exp(c/2) (c the mean of c12
  // and c21) has settled over the last three panel edges. Corrections to S
  // decay with the mode relaxation rates, so once the step from t1 to t2 is
  // smaller than the one before, it bounds what is left.
  bool try_tail() {
    const std::size_t n = panels_.size();
    if (n < 3) return false;
    const LagPanel& p2 = panels_[n - 1];
    const LagPanel& p1 = panels_[n - 2];
    const LagPanel& p0 = panels_[n - 3];
    const double t0 = p0.b, t1 = p1.b, t2 = p2.b;
    const KernelValues &v0 = p0.edge_v, &v1 = p1.edge_v, &v2 = p2.edge_v;
    if (!std::isfinite(v2.c12) || !std::isfinite(v2.c21)) return false;
    const double a12 = (v2.c12 - v1.c12) / (t2 - t1);
    const double a21 = (v2.c21 - v1.c21) / (t2 - t1);
    const double alpha = 0.5 * (a12 + a21);
    if (!(alpha > 0.0) || std::abs(a12 - a21) > 1e-6 * alpha) return false;
    const double early = 0.5 * ((v1.c12 - v0.c12) + (v1.c21 - v0.c21)) / (t1 - t0);
    if (std::abs(early - alpha) > 1e-6 * alpha) return false;
    const Sample f2 = g_(t2, v2, p2.edge_e);
    if (f2.f == 0.0) return false;
    const double f0 = g_(t0, v0, p0.edge_e).f, f1 = g_(t1, v1, p1.edge_e).f;
    const double s0 = f0 / f2.f * std::exp(0.25 * ((v0.c12 - v2.c12) + (v0.c21 - v2.c21)));
    const double s1 = f1 / f2.f * std::exp(0.25 * ((v1.c12 - v2.c12) + (v1.c21 - v2.c21)));
    const double step = std::abs(s1 - 1.0);
    if (step > 1e-12 && std::abs(s0 - s1) < step) return false;
    const double decay = 2.0 / alpha;
    const double tail = f2.f * decay;
    const double truncation = std::abs(tail) * step;
    double value = 0.0;
    for (const auto& pn : panels_) value += pn.kronrod;
    if (truncation > 0.1 * opt_.rel_tol * std::abs(value + tail)) return false;
    tail_value_ = tail;
    tail_error_ = truncation + f2.propagated * decay;
    return true;
  }

  void refine() {
    while (panels_.size() < opt_.max_panels) {
      double value = tail_value_, qerr = 0.0, env = 0.0;
      for (const auto& pn : panels_) {
        value += pn.kronrod;
        qerr += pn.quad_error();
        env += pn.envelope_integral;
      }
      const double target = std::max(opt_.rel_tol * std::abs(value), 1e-3 * opt_.rel_tol * env);
      if (qerr <= target) return;
      // Split the worst tenth (at least one panel) in one batch.
      std::vector<std::size_t> order(panels_.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(),
                [&](std::size_t x, std::size_t y) { return panels_[x].quad_error() > panels_[y].quad_error(); });
      const std::size_t n_split = std::max<std::size_t>(1, order.size() / 10);
      std::vector<LagPanel> fresh;
      fresh.reserve(2 * n_split);
      std::vector<char> drop(panels_.size(), 0);
      for (std::size_t j = 0; j < n_split; ++j) {
        const LagPanel& old = panels_[order[j]];
        if (old.quad_error() == 0.0) break;
        const double mid = 0.5 * (old.a + old.b);
        if (!(mid > old.a && mid < old.b)) continue;
        drop[order[j]] = 1;
        LagPanel l, r;
        l.a = old.a;
        l.b = mid;
        r.a = mid;
        r.b = old.b;
        fresh.push_back(l);
        fresh.push_back(r);
      }
      if (fresh.empty()) return;
      std::vector<LagPanel*> batch;
      for (auto& pn : fresh) batch.push_back(&pn);
      fill(batch);
      std::vector<LagPanel> merged;
      merged.reserve(panels_.size() + fresh.size() / 2);
      for (std::size_t i = 0; i < panels_.size(); ++i)
        if (!drop[i]) merged.push_back(std::move(panels_[i]));
      for (auto& pn : fresh) merged.push_back(std::move(pn));
      std::sort(merged.begin(), merged.end(), [](const LagPanel& x, const LagPanel& y) { return x.a < y.a; });
      panels_ = std::move(merged);
    }
  }

  CorrelatorTable assemble() const {
    CorrelatorTable t;
    t.params_hash = p_.fingerprint();
    t.tolerance = opt_.kernel;
    t.panels.push_back(0.0);
    t.tau.push_back(0.0);
    t.values.push_back(zero_v_);
    t.errors.push_back(zero_e_);
    for (const auto& pn : panels_) {
      for (std::size_t i = 0; i < kNodes; ++i) {
        t.tau.push_back(pn.tau[i]);
        t.values.push_back(pn.v[i]);
        t.errors.push_back(pn.e[i]);
      }
      t.panels.push_back(pn.b);
      t.tau.push_back(pn.b);
      t.values.push_back(pn.edge_v);
      t.errors.push_back(pn.edge_e);
    }
    return t;
  }

  const MotorParams& p_;
  VelocityOptions opt_;
  Integrand g_;
  KernelEvaluator eval_;
  std::vector<LagPanel> panels_;
  KernelValues zero_v_, zero_e_;
  std::size_t count_ = 0;
  bool exponential_tail_ = false;
  double tail_value_ = 0.0, tail_error_ = 0.0;
};

double eta_zero(const MotorParams& p) {
  return memory_kernel_ft(p.bath1, 0.0).real();
}

LagIntegral vanishing_integral(const MotorParams& p) {
  LagIntegral out;
  out.table.params_hash = p.fingerprint();
  out.diagnostics.warnings.push_back("k = 0: Gx - Gy vanishes identically");
  return out;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::Quadrature:
      return "quadrature";
    case Method::QMD:
      return "qmd";
    case Method::MD:
      return "md";
  }
  return "unknown";
}

VelocityOptions VelocityOptions::halved() const {
  VelocityOptions o = *this;
  o.rel_tol *= 0.5;
  o.truncation *= 0.5;
  o.kernel.rel_tol *= 0.5;
  o.kernel.abs_tol *= 0.5;
  return o;
}

double sinc(double x) {
  if (std::abs(x) < 1e-6) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

double exact_sin(double phi) {
  const double q = std::round(phi / std::numbers::pi);
  const double r = phi - q * std::numbers::pi;
  if (r == 0.0) return 0.0;
  const double s = std::sin(r);
  return (static_cast<long long>(q) % 2 == 0) ? s : -s;
}

std::vector<std::string> perturbative_warnings(const MotorParams& p) {
  std::vector<std::string> w;
  const double v0 = std::abs(p.v0);
  auto check = [&](double scale, const char* name) {
    if (v0 > 0.5 * scale) {
      std::ostringstream os;
      os << "V0=" << p.v0 << " exceeds half of " << name << "=" << scale << "; second-order result may be inaccurate";
      w.push_back(os.str());
    }
  };
  check(std::min(p.bath1.temperature, p.bath2.temperature), "min(T1,T2)");
  if (p.k > 0.0) {
    check(p.k / (p.b * p.b), "k/b^2");
    if (p.quantum()) check(p.hbar() * std::sqrt(p.k / p.m), "hbar*sqrt(k/m)");
  }
  return w;
}

double velocity_integral_I(const CorrelatorTable& table, const MotorParams& p, double* abs_error) {
  const std::size_t np = table.panel_count();
  if (np == 0 || table.tau.size() != np * CorrelatorTable::kNodesPerPanel + 1)
    throw NumericalError("velocity_integral_I: table is not laid out on Gauss-Kronrod panels");
  if (p.k == 0.0) {
    if (abs_error) *abs_error = 0.0;
    return 0.0;
  }
  const Integrand g = steady_integrand(p);
  double value = 0.0, err = 0.0, env_total = 0.0, last_bound = 0.0;
  for (std::size_t i = 0; i < np; ++i) {
    LagPanel pn;
    pn.a = table.panels[i];
    pn.b = table.panels[i + 1];
    const std::size_t base = i * CorrelatorTable::kNodesPerPanel;
    for (std::size_t j = 0; j < kNodes; ++j) {
      pn.tau[j] = table.tau[base + 1 + j];
      pn.v[j] = table.values[base + 1 + j];
      pn.e[j] = table.errors[base + 1 + j];
    }
    pn.edge_v = table.values[base + CorrelatorTable::kNodesPerPanel];
    pn.edge_e = table.errors[base + CorrelatorTable::kNodesPerPanel];
    score(pn, g);
    value += pn.kronrod;
    err += pn.quad_error() + pn.propagated;
    env_total += pn.envelope_integral;
    last_bound = pn.envelope * (pn.b - pn.a);
  }
  if (last_bound > 1e-8 * env_total) {
    std::ostringstream os;
    os << "lag integrand has not decayed by tau_max=" << table.tau_max() << "; rebuild with tau_max >= "
       << 2.0 * table.tau_max();
    throw NumericalError(os.str());
  }
  if (abs_error) *abs_error = err + last_bound;
  return value;
}

LagIntegral compute_velocity_integral(const MotorParams& p, const VelocityOptions& opt) {
  p.validate();
  if (p.k == 0.0) return vanishing_integral(p);
  LagBuilder builder(p, opt, steady_integrand(p), true);
  return builder.run();
}

LagIntegral compute_forced_integral(const MotorParams& p, const ForceSpec& f, const VelocityOptions& opt) {
  p.validate();
  if (!std::isfinite(f.f1) || !std::isfinite(f.f2)) throw ConfigError("forces must be finite");
  LagBuilder builder(p, opt, forced_integrand(p, f));
  return builder.run();
}

VelocityEstimate steady_velocity(const MotorParams& p, const VelocityOptions& opt) {
  const LagIntegral r = compute_velocity_integral(p, opt);
  const double scale = p.v0 * p.v0 * p.b / (2.0 * eta_zero(p));
  const double s = exact_sin(p.phi);
  VelocityEstimate v;
  v.value = scale * s * r.value;
  v.abs_error = std::abs(scale * s) * r.abs_error;
  v.method = Method::Quadrature;
  v.params_fingerprint = p.fingerprint();
  v.diagnostics = r.diagnostics;
  for (auto& w : perturbative_warnings(p)) v.diagnostics.warnings.push_back(std::move(w));
  return v;
}

VelocityEstimate forced_velocity(const MotorParams& p, const ForceSpec& f, const VelocityOptions& opt) {
  if (f.f1 == 0.0 && f.f2 == 0.0) return steady_velocity(p, opt);
  const LagIntegral r = compute_forced_integral(p, f, opt);
  const double eta = eta_zero(p);
  const double scale = p.v0 * p.v0 * p.b / (2.0 * eta);
  VelocityEstimate v;
  v.value = (f.f1 + f.f2) / (2.0 * eta) + scale * r.value;
  v.abs_error = std::abs(scale) * r.abs_error;
  v.method = Method::Quadrature;
  v.params_fingerprint = hash_double(hash_double(p.fingerprint(), f.f1), f.f2);
  v.diagnostics = r.diagnostics;
  for (auto& w : perturbative_warnings(p)) v.diagnostics.warnings.push_back(std::move(w));
  return v;
}

double output_work_rate(const MotorParams& p, const ForceSpec& f, const VelocityOptions& opt) {
  if (f.f1 != f.f2) throw ConfigError("output work rate is defined only for equal forces on both particles");
  if (f.f1 == 0.0) return 0.0;
  return -f.f1 * forced_velocity(p, f, opt).value;
}

VelocityEstimate single_particle_velocity(const BathSpec& bath, double m, double b, double v0, double force,
                                          const VelocityOptions& opt) {
  MotorParams p;
  p.m = m;
  p.k = 0.0;
  p.b = b;
  p.v0 = v0;
  p.phi = 0.0;
  p.bath1 = bath;
  p.bath2 = bath;
  return forced_velocity(p, {force, force}, opt);
}

VelocityEstimate classical_velocity(const MotorParams& p, const VelocityOptions& opt) {
  return steady_velocity(classical_limit(p), opt);
}

}  // namespace qmotor
