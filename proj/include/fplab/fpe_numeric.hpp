#ifndef FPLAB_FPE_NUMERIC_HPP
#define FPLAB_FPE_NUMERIC_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fplab/drift.hpp"
#include "fplab/errors.hpp"
#include "fplab/finite_difference.hpp"
#include "fplab/model.hpp"
#include "fplab/quadrature.hpp"
#include "fplab/similarity.hpp"

namespace fplab {

enum class Boundary { zero_flux, dirichlet_zero };

struct SolverConfig {
  Grid grid;
  Boundary boundary = Boundary::zero_flux;
  double theta = 0.5;
  std::size_t record_every = 1;  // trajectory stride

  explicit SolverConfig(Grid g, Boundary b = Boundary::zero_flux, double th = 0.5, std::size_t stride = 1)
      : grid(std::move(g)), boundary(b), theta(th), record_every(stride) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw InvariantError("SolverConfig: theta must lie in [0, 1]");
    if (record_every == 0) throw InvariantError("SolverConfig: record_every must be positive");
  }
};

/// D1(x, t) = -lambda dU1/dx.
inline double drift_coefficient(const DriftPotential& u1, double lambda, double x, double t) {
  if (!(t > 0.0)) throw DomainError("drift_coefficient: t must be positive");
  if (lambda == 0.0) return 0.0;
  return -lambda * u1.dx(x, t);
}

/// Thomas elimination for a tridiagonal system. lower[0] and upper[n-1] are
/// ignored. Throws NumericalError on a vanishing pivot.
inline void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                              std::span<const double> upper, std::span<const double> rhs, std::span<double> x) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n || x.size() != n)
    throw ArgumentError("solve_tridiagonal: size mismatch");
  std::vector<double> c(n);
  double pivot = diag[0];
  if (!(std::abs(pivot) > 1e-300)) throw NumericalError("solve_tridiagonal: pivot underflow at row 0");
  c[0] = upper[0] / pivot;
  x[0] = rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = diag[i] - lower[i] * c[i - 1];
    if (!(std::abs(pivot) > 1e-300))
      throw NumericalError("solve_tridiagonal: pivot underflow at row " + std::to_string(i));
    c[i] = upper[i] / pivot;
    x[i] = (rhs[i] - lower[i] * x[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i > 0; --i) x[i - 1] -= c[i - 1] * x[i];
}

/// Trapezoidal integral of a gridded density.
inline double mass(const DensityField& field) { return quad::trapezoid(field.values(), field.grid().dx()); }

using StepObserver = std::function<void(std::size_t step, double t, std::span<const double> values)>;

namespace detail {

/// Flux-form operator L W = d/dx (D dW/dx - D1 W) at time t. Fluxes at cell
/// interfaces use the interface drift and the mean of the adjacent nodes; at
/// zero-flux walls the end nodes own half cells, so the trapezoid mass is
/// conserved exactly.
struct FluxOperator {
  std::vector<double> lower, diag, upper;

  void assemble(const Grid& grid, const DriftPotential& u1, double lambda, double D, double t, Boundary bc) {
    const std::size_t n = grid.nx();
    const double dx = grid.dx();
    lower.assign(n, 0.0);
    diag.assign(n, 0.0);
    upper.assign(n, 0.0);
    // Interface i+1/2 couples nodes i and i+1.
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double xf = grid.x(i) + 0.5 * dx;
      const double c = drift_coefficient(u1, lambda, xf, t);
      const double to_right = D / dx - 0.5 * c;   // coefficient of W_{i+1} in F_{i+1/2}
      const double to_left = -D / dx - 0.5 * c;   // coefficient of W_i in F_{i+1/2}
      const double wl = (i == 0 ? 0.5 : 1.0) * dx;
      const double wr = (i + 2 == n ? 0.5 : 1.0) * dx;
      // +F_{i+1/2} enters node i, -F_{i+1/2} enters node i+1.
      diag[i] += to_left / wl;
      upper[i] += to_right / wl;
      lower[i + 1] -= to_left / wr;
      diag[i + 1] -= to_right / wr;
    }
    if (bc == Boundary::dirichlet_zero) {
      lower[0] = diag[0] = upper[0] = 0.0;
      lower[n - 1] = diag[n - 1] = upper[n - 1] = 0.0;
    }
  }
};

}  // namespace detail

/// Theta-scheme (Crank-Nicolson at theta = 1/2) evolution of
///   dW/dt = d/dx (D dW/dx - D1 W),  D1 = -lambda dU1/dx,
/// from initial.t = grid.t0 to grid.t_end. The operator is frozen at the half
/// time level of each step. The observer sees step 0 (initial data) and
/// every completed step. Returns the final field.
inline DensityField evolve(const DensityField& initial, const DriftPotential& u1, const PhysParams& params,
                           const SolverConfig& cfg, const StepObserver& observer = {}) {
  const Grid& grid = cfg.grid;
  if (initial.grid().nx() != grid.nx())
    throw ArgumentError("evolve: initial field is not defined on the solver grid");
  if (std::abs(initial.t() - grid.t0()) > 1e-12 * std::max(1.0, grid.t0()))
    throw ArgumentError("evolve: initial field time differs from grid.t0");
  const std::size_t n = grid.nx();
  const double dt = grid.dt();
  const double D = params.diffusion();
  const double th = cfg.theta;

  std::vector<double> w = initial.values();
  if (cfg.boundary == Boundary::dirichlet_zero) w.front() = w.back() = 0.0;
  std::vector<double> rhs(n), next(n), lo(n), di(n), up(n);
  detail::FluxOperator op;
  if (observer) observer(0, grid.t0(), w);

  for (std::size_t k = 0; k < grid.nt(); ++k) {
    const double t = grid.t(k);
    op.assemble(grid, u1, params.lambda(), D, t + 0.5 * dt, cfg.boundary);
    for (std::size_t i = 0; i < n; ++i) {
      double lw = op.diag[i] * w[i];
      if (i > 0) lw += op.lower[i] * w[i - 1];
      if (i + 1 < n) lw += op.upper[i] * w[i + 1];
      rhs[i] = w[i] + (1.0 - th) * dt * lw;
      lo[i] = -th * dt * op.lower[i];
      di[i] = 1.0 - th * dt * op.diag[i];
      up[i] = -th * dt * op.upper[i];
    }
    if (cfg.boundary == Boundary::dirichlet_zero) rhs.front() = rhs.back() = 0.0;
    solve_tridiagonal(lo, di, up, rhs, next);
    for (std::size_t i = 0; i < n; ++i)
      if (!std::isfinite(next[i])) throw DivergenceError(k + 1, "evolve: non-finite density");
    w.swap(next);
    if (observer) observer(k + 1, grid.t(k + 1), w);
  }
  return {grid, grid.t_end(), std::move(w), initial.normalized()};
}

/// Runs evolve() and keeps every record_every-th field (the initial field and
/// the final field are always kept).
inline std::vector<DensityField> evolve_trajectory(const DensityField& initial, const DriftPotential& u1,
                                                   const PhysParams& params, const SolverConfig& cfg) {
  std::vector<DensityField> out;
  const std::size_t last = cfg.grid.nt();
  evolve(initial, u1, params, cfg, [&](std::size_t step, double t, std::span<const double> v) {
    if (step % cfg.record_every == 0 || step == last)
      out.emplace_back(cfg.grid, t, std::vector<double>(v.begin(), v.end()), initial.normalized());
  });
  return out;
}

/// dW/dt + d/dx (D1 W) - D W'' with W's analytic derivatives.
inline double fpe_residual(const ClosedFormSolution& sol, const DriftPotential& u1, const PhysParams& params,
                           double x, double t) {
  if (!(t > 0.0)) throw DomainError("fpe_residual: t must be positive");
  const Jet j = sol.jet(x, t);
  const double lam = params.lambda();
  const double flux_div = -lam * (u1.dxx(x, t) * j.w + u1.dx(x, t) * j.wx);
  return j.wt + flux_div - params.diffusion() * j.wxx;
}

/// Same residual for a density known only by value (centered differences).
inline double fpe_residual(const DensityFn& w, const DriftPotential& u1, const PhysParams& params, double x,
                           double t) {
  if (!(t > 0.0)) throw DomainError("fpe_residual: t must be positive");
  const double lam = params.lambda();
  auto flux = [&](double s, double tt) { return drift_coefficient(u1, lam, s, tt) * w(s, tt); };
  return fd::dt(w, x, t) + fd::dx(flux, x, t) - params.diffusion() * fd::dxx(w, x, t);
}

/// max_i |field_i - w(x_i, field.t)|.
inline double max_abs_error(const DensityField& field, const DensityFn& w) {
  double err = 0.0;
  const auto& v = field.values();
  for (std::size_t i = 0; i < v.size(); ++i)
    err = std::max(err, std::abs(v[i] - w(field.grid().x(i), field.t())));
  return err;
}

}  // namespace fplab

#endif  // FPLAB_FPE_NUMERIC_HPP
