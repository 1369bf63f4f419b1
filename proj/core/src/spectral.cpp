#include "qmotor/spectral.hpp"

#include <algorithm>
#include <numbers>

namespace qmotor::spectral {

namespace {
constexpr double kFeatureMultiple = 16.0;
constexpr double kMinTailPhase = 400.0;
constexpr int kPointsPerDecade = 8;
}  // namespace

double FrequencyScales::max_feature() const {
  double m = 0.0;
  for (double f : features) m = std::max(m, f);
  return m > 0.0 ? m : 1.0;
}

double FrequencyScales::min_feature() const {
  double m = 0.0;
  for (double f : features)
    if (f > 0.0) m = (m == 0.0) ? f : std::min(m, f);
  return m > 0.0 ? m : 1.0;
}

double panel_limit(const FrequencyScales& scales, double tau) {
  double W = kFeatureMultiple * scales.max_feature();
  if (tau != 0.0) W = std::max(W, kMinTailPhase / std::abs(tau));
  return W;
}

std::vector<double> frequency_breakpoints(const FrequencyScales& scales, double tau, double W) {
  std::vector<double> pts;
  pts.reserve(256);
  pts.push_back(0.0);

  double fmin = scales.min_feature();
  if (tau != 0.0) fmin = std::min(fmin, 1.0 / std::abs(tau));
  const double lo = 1e-3 * fmin;
  const double step = std::pow(10.0, 1.0 / kPointsPerDecade);
  for (double w = lo; w < W; w *= step) pts.push_back(w);
  for (double f : scales.features)
    if (f > 0.0 && f < W) pts.push_back(f);

  if (scales.resonance > 0.0 && scales.resonance_width > 0.0) {
    const double w0 = scales.resonance;
    pts.push_back(w0);
    for (double d = 0.125 * scales.resonance_width; d < 0.5 * w0; d *= 2.0) {
      pts.push_back(w0 - d);
      pts.push_back(w0 + d);
    }
  }

  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  while (!pts.empty() && pts.back() >= W) pts.pop_back();
  pts.push_back(W);

  if (tau == 0.0) return pts;

  const double period = 2.0 * std::numbers::pi / std::abs(tau);
  std::vector<double> out;
  out.reserve(pts.size() + static_cast<std::size_t>(W / period) + 1);
  out.push_back(pts.front());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double a = pts[i - 1];
    const double b = pts[i];
    const auto pieces = static_cast<std::size_t>(std::ceil((b - a) / period));
    for (std::size_t j = 1; j < pieces; ++j) out.push_back(a + (b - a) * static_cast<double>(j) / pieces);
    out.push_back(b);
  }
  return out;
}

}  // namespace qmotor::spectral
