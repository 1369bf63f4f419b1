#pragma once

// Two-time kernels of the zeroth-order (V0 = 0) dynamics with q = bQ.
//
// With S_i = N(w) Fs_i(w) the symmetrized noise spectrum of bath i,
// Hx = |G~x|^2, Hy = |G~y|^2, R + iJ = G~x conj(G~y) and all integrals over
// the half line (1/pi) int_0^inf dw:
//
//   c12(t) = (b^2/2) { (S1+S2) [Hx (1 - cos wt) + Hy (1 + cos wt)] + 2 (S1-S2) J sin wt }
//   c21(t) = c12(-t)
//   c11(t) = (b^2/2) (1 - cos wt) { S1 (Hx+Hy+2R) + S2 (Hx+Hy-2R) },  c22: S1 <-> S2
//   a12(t) = (b^2/4) N hbar w (Hx - Hy) sin wt
//   a11(t) = (b^2/4) N hbar w (Hx + Hy) sin wt
//
// c12 = <(q1(t) - q2(0))^2>, c11 = <(q1(t) - q1(0))^2>, and a_ij is the
// c-number commutator (i/2)[q_i(t), q_j(0)].

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "qmotor/bath.hpp"
#include "qmotor/spectral.hpp"

namespace qmotor {

struct KernelValues {
  double gx = 0.0;
  double gy = 0.0;
  double a12 = 0.0;
  double a11 = 0.0;
  double c12 = 0.0;
  double c21 = 0.0;
  double c11 = 0.0;
  double c22 = 0.0;

  static constexpr std::size_t kCount = 8;
  double& operator[](std::size_t i);
  double operator[](std::size_t i) const;
};

struct KernelOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;  // absolute floor for a_ij and c_ij (they enter as phases/exponents)
  std::size_t max_intervals = 200000;
};

/// Evaluates all kernels at one lag by a single vector-valued frequency
/// quadrature. Response functions with closed forms are evaluated directly.
/// c12 and c21 are +inf at k = 0 (the relative coordinate diffuses).
class KernelEvaluator {
 public:
  explicit KernelEvaluator(const MotorParams& params, KernelOptions options = {});

  /// Throws NumericalError carrying the worst frequency panel when the
  /// quadrature does not converge.
  KernelValues operator()(double tau, KernelValues* error = nullptr, std::size_t* evaluations = nullptr) const;

  const MotorParams& params() const { return params_; }
  const KernelOptions& options() const { return options_; }
  const spectral::FrequencyScales& scales() const { return scales_; }

 private:
  MotorParams params_;
  KernelOptions options_;
  spectral::FrequencyScales scales_;
  bool closed_form_green_;
};

/// Evaluate many lags, optionally on `workers` threads. Output order follows input.
void evaluate_kernels(const KernelEvaluator& eval, const std::vector<double>& taus, std::vector<KernelValues>& values,
                      std::vector<KernelValues>& errors, std::size_t workers = 1);

double commutator_a12(const MotorParams& p, double tau);
double commutator_a11(const MotorParams& p, double tau);
/// (c12(tau), c21(tau)).
std::pair<double, double> msd_cross(const MotorParams& p, double tau);
/// c11 (particle 1) or c22 (particle 2).
double msd_self(const MotorParams& p, double tau, int particle);

/// Kernels tabulated on Gauss-Kronrod panels in tau. Node layout: panel i
/// covers [panels[i], panels[i+1]] and owns entries 16i (left edge) and
/// 16i+1 .. 16i+15 (the 15 Kronrod nodes); the final entry is the last edge.
struct CorrelatorTable {
  std::vector<double> tau;
  std::vector<double> panels;
  std::vector<KernelValues> values;
  std::vector<KernelValues> errors;
  std::uint64_t params_hash = 0;
  KernelOptions tolerance;

  static constexpr std::size_t kNodesPerPanel = 16;

  std::size_t panel_count() const { return panels.empty() ? 0 : panels.size() - 1; }
  double tau_max() const { return panels.empty() ? 0.0 : panels.back(); }

  /// Monotone cubic (Fritsch-Carlson) interpolation; negative lags use
  /// a12(-t) = -a12(t), c12(-t) = c21(t), even c11/c22/a11 and causal G.
  KernelValues interpolate(double t) const;

  /// Throws NumericalError when a structural invariant fails:
  /// a12(0) = c11(0) = c22(0) = 0, c12, c21, c11, c22 >= -error,
  /// and c12 == c21 when the two temperatures are equal.
  void check_invariants(const MotorParams& p) const;
};

/// Panel edges on [0, tau_max]: linear up to 5/w_char (w_char = sqrt(2k/m), or
/// eta0/m at k = 0), geometric beyond.
std::vector<double> tau_panels(const MotorParams& p, double tau_max, std::size_t n_panels);

/// Node layout for the given panel edges (see CorrelatorTable).
std::vector<double> panel_nodes(const std::vector<double>& panels);

/// Tabulate all kernels with about n_points lags and check invariants.
CorrelatorTable build_table(const MotorParams& p, double tau_max, std::size_t n_points, const KernelOptions& opt = {},
                            std::size_t workers = 1);

/// JSON cache. Schema "qmotor.correlator_table/1": params_hash (hex string),
/// rel_tol, abs_tol, tau, panels, one array per kernel under "values" and
/// "errors". Infinite entries are stored as null.
void save_table(const CorrelatorTable& table, const std::filesystem::path& path);
CorrelatorTable load_table(const std::filesystem::path& path);

}  // namespace qmotor
