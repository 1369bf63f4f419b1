#pragma once

// Gauss-Kronrod (7/15) quadrature on panel lists with global adaptive
// refinement. Integrands may be vector valued; each component carries its own
// tolerance.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <vector>

namespace qmotor::quad {

struct GK15 {
  // Kronrod abscissae on [0, 1); index 1, 3, 5, 7 are the Gauss points.
  static constexpr std::array<double, 8> x = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> wk = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> wg = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
  static constexpr std::size_t kPoints = 15;

  /// The 15 nodes on [a, b] in increasing order.
  static std::array<double, kPoints> nodes(double a, double b);
  /// Kronrod and Gauss weights aligned with nodes(a, b); Gauss weight is zero
  /// at Kronrod-only nodes.
  static std::array<double, kPoints> kronrod_weights(double a, double b);
  static std::array<double, kPoints> gauss_weights(double a, double b);
};

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
struct Result {
  Vec<N> value{};
  Vec<N> error{};
  std::size_t evaluations = 0;
  std::size_t intervals = 0;
  bool converged = true;
  // Panel with the largest remaining error when not converged.
  double worst_lo = 0.0;
  double worst_hi = 0.0;
};

template <std::size_t N>
struct Tolerance {
  double rel = 1e-10;
  Vec<N> abs{};
  std::size_t max_intervals = 200000;
};

namespace detail {

template <std::size_t N>
struct Panel {
  double a, b;
  Vec<N> value, error;
  double badness;
  bool operator<(const Panel& o) const { return badness < o.badness; }
};

template <std::size_t N, class F>
Panel<N> gk15_panel(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  Vec<N> fc{}, fx1{}, fx2{};
  Vec<N> k{}, g{}, absint{};
  f(c, fc);
  for (std::size_t j = 0; j < N; ++j) {
    k[j] = GK15::wk[7] * fc[j];
    g[j] = GK15::wg[3] * fc[j];
    absint[j] = GK15::wk[7] * std::abs(fc[j]);
  }
  for (std::size_t i = 0; i < 7; ++i) {
    const double dx = h * GK15::x[i];
    f(c - dx, fx1);
    f(c + dx, fx2);
    for (std::size_t j = 0; j < N; ++j) {
      const double s = fx1[j] + fx2[j];
      k[j] += GK15::wk[i] * s;
      absint[j] += GK15::wk[i] * (std::abs(fx1[j]) + std::abs(fx2[j]));
      if (i % 2 == 1) g[j] += GK15::wg[i / 2] * s;
    }
  }
  Panel<N> p{a, b, {}, {}, 0.0};
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t j = 0; j < N; ++j) {
    p.value[j] = k[j] * h;
    const double roundoff = 50.0 * eps * absint[j] * std::abs(h);
    p.error[j] = std::max(std::abs((k[j] - g[j]) * h), roundoff);
  }
  return p;
}

}  // namespace detail

/// Integrate f over the union of consecutive panels given by `breakpoints`
/// (sorted, at least two entries). f has signature void(double, Vec<N>&).
/// Refinement bisects the panel with the largest scaled error until every
/// component satisfies err_j <= max(abs_j, rel * |value_j|).
template <std::size_t N, class F>
Result<N> integrate(F&& f, std::span<const double> breakpoints, const Tolerance<N>& tol) {
  using detail::Panel;
  Result<N> out;
  if (breakpoints.size() < 2) return out;

  std::vector<Panel<N>> panels;
  panels.reserve(breakpoints.size() - 1);
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] <= breakpoints[i]) continue;
    panels.push_back(detail::gk15_panel<N>(f, breakpoints[i], breakpoints[i + 1]));
  }
  out.evaluations = panels.size() * GK15::kPoints;

  Vec<N> total{}, err{};
  for (const auto& p : panels)
    for (std::size_t j = 0; j < N; ++j) {
      total[j] += p.value[j];
      err[j] += p.error[j];
    }

  auto scales = [&] {
    Vec<N> s{};
    for (std::size_t j = 0; j < N; ++j) {
      s[j] = std::max(tol.abs[j], tol.rel * std::abs(total[j]));
      if (!(s[j] > 0.0)) s[j] = std::numeric_limits<double>::min();
    }
    return s;
  };
  auto done = [&](const Vec<N>& s) {
    for (std::size_t j = 0; j < N; ++j)
      if (err[j] > s[j]) return false;
    return true;
  };
  auto badness = [](const Panel<N>& p, const Vec<N>& s) {
    double worst = 0.0;
    for (std::size_t j = 0; j < N; ++j) worst = std::max(worst, p.error[j] / s[j]);
    return worst;
  };

  Vec<N> s = scales();
  std::priority_queue<Panel<N>> queue;
  for (auto& p : panels) {
    p.badness = badness(p, s);
    queue.push(p);
  }
  std::size_t count = panels.size();
  std::size_t since_rescale = 0;
  while (!done(s)) {
    if (count >= tol.max_intervals || queue.empty()) {
      out.converged = false;
      if (!queue.empty()) {
        out.worst_lo = queue.top().a;
        out.worst_hi = queue.top().b;
      }
      break;
    }
    Panel<N> worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Panel cannot be split further in floating point.
      out.converged = false;
      out.worst_lo = worst.a;
      out.worst_hi = worst.b;
      break;
    }
    Panel<N> left = detail::gk15_panel<N>(f, worst.a, mid);
    Panel<N> right = detail::gk15_panel<N>(f, mid, worst.b);
    out.evaluations += 2 * GK15::kPoints;
    for (std::size_t j = 0; j < N; ++j) {
      total[j] += left.value[j] + right.value[j] - worst.value[j];
      err[j] += left.error[j] + right.error[j] - worst.error[j];
    }
    ++count;
    if (++since_rescale == 64) {
      since_rescale = 0;
      s = scales();
    }
    left.badness = badness(left, s);
    right.badness = badness(right, s);
    queue.push(left);
    queue.push(right);
  }
  // Re-sum from the final panel set to shed accumulated update round-off.
  Vec<N> clean{}, clean_err{};
  while (!queue.empty()) {
    const auto& p = queue.top();
    for (std::size_t j = 0; j < N; ++j) {
      clean[j] += p.value[j];
      clean_err[j] += p.error[j];
    }
    queue.pop();
  }
  out.value = clean;
  out.error = clean_err;
  out.intervals = count;
  return out;
}

/// Scalar convenience wrapper over [a, b].
double integrate_scalar(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10,
                        double abs_tol = 0.0, double* error = nullptr);

}  // namespace qmotor::quad
