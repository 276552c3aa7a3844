#ifndef FPLAB_PERTURBATION_HPP
#define FPLAB_PERTURBATION_HPP

// Logarithmic representation W = exp{(S - U/2)/D} with S = sum lambda^n S_n,
// the order-by-order equations for S_n, and the Schroedinger form of the FPE.

#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fplab/drift.hpp"
#include "fplab/errors.hpp"
#include "fplab/finite_difference.hpp"
#include "fplab/model.hpp"

namespace fplab {

/// A field over (x, t > 0) with optional analytic derivatives. Missing
/// derivatives are taken by centered differences.
class Field {
 public:
  explicit Field(DensityFn value, std::optional<DensityFn> dx = std::nullopt,
                 std::optional<DensityFn> dxx = std::nullopt, std::optional<DensityFn> dt = std::nullopt)
      : value_(std::move(value)), dx_(std::move(dx)), dxx_(std::move(dxx)), dt_(std::move(dt)) {}

  static Field constant(double c) {
    auto zero = [](double, double) { return 0.0; };
    return Field([c](double, double) { return c; }, zero, zero, zero);
  }

  /// c * U + offset, with U's analytic derivatives when it has them.
  static Field from_drift(const DriftPotential& u, double c, double offset = 0.0) {
    auto p = std::make_shared<const DriftPotential>(u);
    Field f([p, c, offset](double x, double t) { return offset + c * p->value(x, t); });
    if (u.analytic()) {
      f.dx_ = [p, c](double x, double t) { return c * p->dx(x, t); };
      f.dxx_ = [p, c](double x, double t) { return c * p->dxx(x, t); };
      f.dt_ = [p, c](double x, double t) { return c * p->dt(x, t); };
    }
    return f;
  }

  double operator()(double x, double t) const { return value_(x, t); }
  double dx(double x, double t) const { return dx_ ? (*dx_)(x, t) : fd::dx(value_, x, t); }
  double dxx(double x, double t) const { return dxx_ ? (*dxx_)(x, t) : fd::dxx(value_, x, t); }
  double dt(double x, double t) const { return dt_ ? (*dt_)(x, t) : fd::dt(value_, x, t); }

 private:
  DensityFn value_;
  std::optional<DensityFn> dx_, dxx_, dt_;
};

/// S_0(x, t) = -(D/2) ln(4 pi D t) - x^2 / (4t), the delta-initial diffusion action.
inline double s0(double x, double t, double diffusion) {
  if (!(t > 0.0)) throw DomainError("s0: t must be positive");
  return -0.5 * diffusion * std::log(4.0 * std::numbers::pi * diffusion * t) - x * x / (4.0 * t);
}

inline Field s0_field(double diffusion) {
  const double D = diffusion;
  return Field([D](double x, double t) { return s0(x, t, D); },
               [](double x, double t) { return -x / (2.0 * t); },
               [](double, double t) { return -1.0 / (2.0 * t); },
               [D](double x, double t) { return -D / (2.0 * t) + x * x / (4.0 * t * t); });
}

/// Truncated series S = sum_n lambda^n S_n. Term 0 is always present.
class SAction {
 public:
  SAction(PhysParams params, std::vector<Field> terms) : params_(params), terms_(std::move(terms)) {
    if (terms_.empty()) throw InvariantError("SAction: S_0 must be present");
  }

  /// S_0 from the delta initial profile, S_1 = alpha_1 - U1/2, S_n = alpha_n
  /// for n >= 2. alphas[k] holds alpha_{k+1}; missing entries are zero.
  static SAction similarity(const PhysParams& params, const DriftPotential& u1, std::vector<double> alphas = {},
                            std::size_t order = 2) {
    std::vector<Field> terms{s0_field(params.diffusion())};
    auto alpha = [&](std::size_t n) { return n - 1 < alphas.size() ? alphas[n - 1] : 0.0; };
    if (order >= 1) terms.push_back(Field::from_drift(u1, -0.5, alpha(1)));
    for (std::size_t n = 2; n <= order; ++n) terms.push_back(Field::constant(alpha(n)));
    return {params, std::move(terms)};
  }

  const PhysParams& params() const noexcept { return params_; }
  std::size_t orders() const noexcept { return terms_.size(); }
  const Field& term(std::size_t n) const {
    if (n >= terms_.size())
      throw RangeError("SAction: order " + std::to_string(n) + " not stored (have " +
                       std::to_string(terms_.size()) + " terms)");
    return terms_[n];
  }

 private:
  PhysParams params_;
  std::vector<Field> terms_;
};

/// U-bar = (D/2) U'' - U'^2 / 4 + U-dot / 2 for the full potential U.
inline double effective_potential(const DriftPotential& u, double diffusion, double x, double t) {
  if (!(t > 0.0)) throw DomainError("effective_potential: t must be positive");
  const double ux = u.dx(x, t);
  return 0.5 * diffusion * u.dxx(x, t) - 0.25 * ux * ux + 0.5 * u.dt(x, t);
}

/// LHS - RHS of the order-n equation for U = lambda U1 (U_0 = 0):
///   n = 1: S1-dot = D S1'' + 2 S0' S1' + (D/2) U1'' + U1-dot / 2
///   n = 2: S2-dot = D S2'' + 2 S0' S2' + S1'^2 - U1'^2 / 4
inline double hierarchy_residual(std::size_t n, const SAction& action, const DriftPotential& u1, double x,
                                 double t) {
  if (!(t > 0.0)) throw DomainError("hierarchy_residual: t must be positive");
  if (n != 1 && n != 2) throw RangeError("hierarchy_residual: order " + std::to_string(n) + " not supported");
  const double D = action.params().diffusion();
  const Field& sn = action.term(n);
  const double s0x = action.term(0).dx(x, t);
  const double lhs = sn.dt(x, t);
  double rhs = D * sn.dxx(x, t) + 2.0 * s0x * sn.dx(x, t);
  if (n == 1) {
    rhs += 0.5 * D * u1.dxx(x, t) + 0.5 * u1.dt(x, t);
  } else {
    const double s1x = action.term(1).dx(x, t);
    const double u1x = u1.dx(x, t);
    rhs += s1x * s1x - 0.25 * u1x * u1x;
  }
  return lhs - rhs;
}

/// S1'^2 - U1'^2 / 4, the source that drives S_2. Zero when S1 = const - U1/2.
inline double order2_source(const SAction& action, const DriftPotential& u1, double x, double t) {
  const double s1x = action.term(1).dx(x, t);
  const double u1x = u1.dx(x, t);
  return s1x * s1x - 0.25 * u1x * u1x;
}

inline constexpr double max_exp_argument = 700.0;

/// psi = exp(U / 2D) W for the full potential U.
inline double to_schrodinger(const DensityFn& w, const DriftPotential& u, double diffusion, double x, double t) {
  if (!(t > 0.0)) throw DomainError("to_schrodinger: t must be positive");
  const double arg = u.value(x, t) / (2.0 * diffusion);
  if (arg > max_exp_argument)
    throw RangeError("to_schrodinger: U/2D = " + std::to_string(arg) + " at x = " + std::to_string(x) +
                     ", t = " + std::to_string(t) + " overflows exp");
  return std::exp(arg) * w(x, t);
}

inline DensityFn schrodinger_field(DensityFn w, DriftPotential u, double diffusion) {
  return [w = std::move(w), u = std::move(u), diffusion](double x, double t) {
    return to_schrodinger(w, u, diffusion, x, t);
  };
}

/// psi-dot - D psi'' - (U''/2 - U'^2/4D + U-dot/2D) psi, by centered differences in psi.
inline double schrodinger_residual(const DensityFn& psi, const DriftPotential& u, double diffusion, double x,
                                   double t) {
  if (!(t > 0.0)) throw DomainError("schrodinger_residual: t must be positive");
  const double D = diffusion;
  const double ux = u.dx(x, t);
  const double v = 0.5 * u.dxx(x, t) - ux * ux / (4.0 * D) + u.dt(x, t) / (2.0 * D);
  return fd::dt(psi, x, t) - D * fd::dxx(psi, x, t) - v * psi(x, t);
}

/// W = exp{(S_0 + sum_{n=1}^{order} lambda^n S_n - lambda U1 / 2) / D}.
/// order defaults to every stored term.
inline double assemble_density(const SAction& action, const DriftPotential& u1, double x, double t,
                               std::optional<std::size_t> order = std::nullopt) {
  if (!(t > 0.0)) throw DomainError("assemble_density: t must be positive");
  const std::size_t top = order.value_or(action.orders() - 1);
  if (top >= action.orders())
    throw RangeError("assemble_density: requested order " + std::to_string(top) + " beyond stored terms");
  const double lam = action.params().lambda();
  double s = 0.0;
  double power = 1.0;
  for (std::size_t n = 0; n <= top; ++n) {
    s += power * action.term(n)(x, t);
    power *= lam;
  }
  return std::exp((s - 0.5 * lam * u1.value(x, t)) / action.params().diffusion());
}

}  // namespace fplab

#endif  // FPLAB_PERTURBATION_HPP
