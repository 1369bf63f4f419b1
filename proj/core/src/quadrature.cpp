#include "qmotor/quadrature.hpp"

#include "qmotor/errors.hpp"

namespace qmotor::quad {

std::array<double, GK15::kPoints> GK15::nodes(double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<double, kPoints> out{};
  for (std::size_t i = 0; i < 7; ++i) {
    out[i] = c - h * x[i];
    out[kPoints - 1 - i] = c + h * x[i];
  }
  out[7] = c;
  return out;
}

std::array<double, GK15::kPoints> GK15::kronrod_weights(double a, double b) {
  const double h = 0.5 * (b - a);
  std::array<double, kPoints> out{};
  for (std::size_t i = 0; i < 7; ++i) {
    out[i] = h * wk[i];
    out[kPoints - 1 - i] = h * wk[i];
  }
  out[7] = h * wk[7];
  return out;
}

std::array<double, GK15::kPoints> GK15::gauss_weights(double a, double b) {
  const double h = 0.5 * (b - a);
  std::array<double, kPoints> out{};
  for (std::size_t i = 1; i < 7; i += 2) {
    out[i] = h * wg[i / 2];
    out[kPoints - 1 - i] = h * wg[i / 2];
  }
  out[7] = h * wg[3];
  return out;
}

double integrate_scalar(const std::function<double(double)>& f, double a, double b, double rel_tol, double abs_tol,
                        double* error) {
  const std::array<double, 2> bp{a, b};
  Tolerance<1> tol;
  tol.rel = rel_tol;
  tol.abs = {abs_tol};
  auto r = integrate<1>([&](double x, Vec<1>& out) { out[0] = f(x); }, bp, tol);
  if (error) *error = r.error[0];
  return r.value[0];
}

}  // namespace qmotor::quad
