#ifndef FPLAB_QUADRATURE_HPP
#define FPLAB_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "fplab/errors.hpp"

namespace fplab::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1].
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error, l1;  // l1: Kronrod estimate of int |f|
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kronrod_weights[7];
  double gauss = fc * gauss_weights[3];
  double l1 = std::abs(fc) * kronrod_weights[7];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = h * kronrod_nodes[j];
    const double fl = f(c - dx);
    const double fr = f(c + dx);
    const double s = fl + fr;
    kronrod += kronrod_weights[j] * s;
    l1 += kronrod_weights[j] * (std::abs(fl) + std::abs(fr));
    if (j % 2 == 1) gauss += gauss_weights[j / 2] * s;
  }
  return {a, b, kronrod * h, std::abs((kronrod - gauss) * h), l1 * std::abs(h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate falls below max(abs_tol, rel_tol * |I|, 50 eps int|f|); the last
/// term is the roundoff floor for integrands that cancel to (near) zero.
/// Throws NumericalError when the panel budget is exhausted first.
template <class F>
Result gauss_kronrod(F&& f, double a, double b, double rel_tol = 1e-10,
                     double abs_tol = 0.0, std::size_t max_panels = 4000) {
  if (!(std::isfinite(a) && std::isfinite(b)))
    throw ArgumentError("gauss_kronrod: interval bounds must be finite");
  if (a == b) return {};
  std::priority_queue<detail::Panel> panels;
  auto first = detail::gk15(f, a, b);
  double total = first.value;
  double error = first.error;
  double l1 = first.l1;
  panels.push(first);
  std::size_t evals = 15;
  constexpr double roundoff = 50.0 * std::numeric_limits<double>::epsilon();
  while (error > std::max({abs_tol, rel_tol * std::abs(total), roundoff * l1})) {
    if (panels.size() >= max_panels)
      throw NumericalError("gauss_kronrod: no convergence after " +
                           std::to_string(max_panels) + " panels");
    auto worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    evals += 30;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    l1 += left.l1 + right.l1 - worst.l1;
    panels.push(left);
    panels.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  double sum = 0.0, err = 0.0;
  while (!panels.empty()) {
    sum += panels.top().value;
    err += panels.top().error;
    panels.pop();
  }
  return {sum, err, evals};
}

namespace detail {

template <class F>
double simpson_step(F& f, double a, double fa, double m, double fm, double b, double fb,
                    double whole, double tol, int depth, std::size_t& evals) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  evals += 2;
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) throw NumericalError("adaptive_simpson: maximum bisection depth reached");
  return simpson_step(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1, evals) +
         simpson_step(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1, evals);
}

}  // namespace detail

/// Adaptive Simpson bisection with the Richardson correction (S2 - S1)/15.
/// The tolerance is absolute per call; callers pass rel_tol * scale.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 48) {
  if (a == b) return 0.0;
  std::size_t evals = 3;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, fa, m, fm, b, fb, whole, tol, max_depth, evals);
}

/// Composite trapezoid rule on uniformly spaced samples.
inline double trapezoid(std::span<const double> values, double dx) {
  if (values.size() < 2) return 0.0;
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
  return sum * dx;
}

}  // namespace fplab::quad

#endif  // FPLAB_QUADRATURE_HPP
