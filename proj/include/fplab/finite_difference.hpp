#ifndef FPLAB_FINITE_DIFFERENCE_HPP
#define FPLAB_FINITE_DIFFERENCE_HPP

#include <algorithm>
#include <cmath>

namespace fplab::fd {

// Relative step sizes for the 4th-order centered stencils. The first
// derivative tolerates a tiny step; the second derivative needs a larger one
// because its round-off grows like eps / h^2.
inline constexpr double first_step = 1e-5;
inline constexpr double second_step = 1e-3;

inline double scaled_step(double rel, double coord) { return rel * std::max(1.0, std::abs(coord)); }

template <class F>
double d1(F&& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

template <class F>
double d2(F&& f, double x, double h) {
  return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

/// d/dx of f(x, t) at fixed t.
template <class F>
double dx(F&& f, double x, double t) {
  return d1([&](double s) { return f(s, t); }, x, scaled_step(first_step, x));
}

template <class F>
double dxx(F&& f, double x, double t) {
  return d2([&](double s) { return f(s, t); }, x, scaled_step(second_step, x));
}

/// d/dt of f(x, t); the step is proportional to t so the stencil stays in t > 0.
template <class F>
double dt(F&& f, double x, double t) {
  return d1([&](double s) { return f(x, s); }, t, first_step * t);
}

}  // namespace fplab::fd

#endif  // FPLAB_FINITE_DIFFERENCE_HPP
