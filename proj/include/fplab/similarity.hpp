#ifndef FPLAB_SIMILARITY_HPP
#define FPLAB_SIMILARITY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "fplab/errors.hpp"
#include "fplab/model.hpp"
#include "fplab/quadrature.hpp"

namespace fplab {

/// y'' - (z / 2D) y' = f(z), the first-order perturbation equation written in
/// the similarity variable. f(z) = -u''(z)/2 + z u'(z) / (4D).
struct OdeProblem {
  double diffusion = 1.0;
  std::function<double(double)> source;

  double f(double z) const { return source(z); }

  /// y'' - (z/2D) y' - f(z) for a candidate with known derivatives.
  double residual(double z, double dy, double d2y) const {
    return d2y - z / (2.0 * diffusion) * dy - f(z);
  }
};

inline OdeProblem reduce_to_ode(const SimilarityProfile& profile, const PhysParams& params) {
  const double D = params.diffusion();
  auto prof = std::make_shared<const SimilarityProfile>(profile);
  return {D, [prof, D](double z) { return -0.5 * prof->d2u(z) + z * prof->du(z) / (4.0 * D); }};
}

/// y(z) = alpha0 * int_0^z exp(s^2/4D) ds + alpha1 + y_p(z).
///
/// Only alpha0 = 0 gives a bounded function on the whole line; the alpha0
/// branch is kept so that its divergence can be demonstrated.
struct OdeSolution {
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  double diffusion = 1.0;
  std::function<double(double)> particular;
  std::function<double(double)> dparticular;
  std::function<double(double)> d2particular;

  bool bounded() const noexcept { return alpha0 == 0.0; }

  OdeSolution with_divergent_branch(double a0, double D) const {
    OdeSolution s = *this;
    s.alpha0 = a0;
    s.diffusion = D;
    return s;
  }

  double operator()(double z) const {
    double y = alpha1 + particular(z);
    if (alpha0 != 0.0) y += alpha0 * homogeneous_branch(z, diffusion);
    return y;
  }
  double derivative(double z) const {
    return dparticular(z) + alpha0 * std::exp(z * z / (4.0 * diffusion));
  }
  double second_derivative(double z) const {
    return d2particular(z) + alpha0 * z / (2.0 * diffusion) * std::exp(z * z / (4.0 * diffusion));
  }

  /// int_0^z exp(s^2 / 4D) ds.
  static double homogeneous_branch(double z, double D) {
    return quad::gauss_kronrod([D](double s) { return std::exp(s * s / (4.0 * D)); }, 0.0, z, 1e-12).value;
  }
};

/// Bounded branch: alpha0 = 0 and y_p = -u/2, which solves the reduced ODE
/// for any twice differentiable profile.
inline OdeSolution particular_solution(const SimilarityProfile& profile, double alpha1 = 0.0) {
  auto prof = std::make_shared<const SimilarityProfile>(profile);
  OdeSolution s;
  s.alpha1 = alpha1;
  s.particular = [prof](double z) { return -0.5 * prof->u(z); };
  s.dparticular = [prof](double z) { return -0.5 * prof->du(z); };
  s.d2particular = [prof](double z) { return -0.5 * prof->d2u(z); };
  return s;
}

/// Integrates the reduced ODE by two nested quadratures.
///
/// y'(s) = exp(s^2/4D) [alpha0 + B(s)] with B(s) = int_{-inf}^s f(r) exp(-r^2/4D) dr,
/// which is the bracket that vanishes at -inf; for s > 0 it is evaluated as
/// -int_s^inf (the total integral is zero for sources built from a profile).
/// The returned value is y(z) = alpha1 + int_{z_lo}^z y'(s) ds, i.e. alpha1
/// anchors y at z_lo.
inline double solve_ode_quadrature(const OdeProblem& prob, double alpha0, double alpha1, double z_lo,
                                   double z, double rel_tol = 1e-10) {
  if (!std::isfinite(z_lo) || !std::isfinite(z))
    throw ArgumentError("solve_ode_quadrature: endpoints must be finite");
  const double D = prob.diffusion;
  const double reach = 40.0 * std::sqrt(D);
  auto slope = [&](double s) {
    auto weighted = [&](double r) { return prob.f(r) * std::exp((s * s - r * r) / (4.0 * D)); };
    double bracket;
    if (s <= 0.0)
      bracket = quad::gauss_kronrod(weighted, s - reach, s, rel_tol, 1e-300).value;
    else
      bracket = -quad::gauss_kronrod(weighted, s, s + reach, rel_tol, 1e-300).value;
    return alpha0 * std::exp(s * s / (4.0 * D)) + bracket;
  };
  const double scale = std::max(1.0, std::abs(slope(0.5 * (z_lo + z))) * std::abs(z - z_lo));
  return alpha1 + quad::adaptive_simpson(slope, z_lo, z, rel_tol * scale);
}

/// Value and analytic derivatives of a density at one point.
struct Jet {
  double w = 0.0;
  double wx = 0.0;
  double wxx = 0.0;
  double wt = 0.0;
};

/// Explicit Gaussian form: mean = mean_coeff * sqrt(t), variance = var_coeff * t.
struct GaussianForm {
  double mean_coeff = 0.0;
  double var_coeff = 2.0;
};

inline constexpr double normalization_rel_tol = 1e-10;
inline constexpr double tail_floor = 1e-300;

/// Normalized similarity density
///   W(x, t) = exp(-x^2/(4Dt) - lambda u(x/sqrt t)/D) / (sqrt(t) C),
///   C = int exp(-z^2/4D - lambda u(z)/D) dz.
class ClosedFormSolution {
 public:
  ClosedFormSolution(PhysParams params, SimilarityProfile profile, double norm_const, double z_half_width,
                     double z_mean, double z_variance, std::optional<GaussianForm> gaussian = std::nullopt)
      : params_(params), profile_(std::move(profile)), norm_const_(norm_const),
        log_norm_(std::log(norm_const)), z_half_width_(z_half_width), z_mean_(z_mean),
        z_variance_(z_variance), gaussian_(gaussian) {
    if (!(norm_const > 0.0) || !std::isfinite(norm_const))
      throw InvariantError("ClosedFormSolution: normalization constant must be positive and finite");
  }

  const PhysParams& params() const noexcept { return params_; }
  const SimilarityProfile& profile() const noexcept { return profile_; }
  double norm_const() const noexcept { return norm_const_; }
  double z_half_width() const noexcept { return z_half_width_; }
  const std::optional<GaussianForm>& gaussian() const noexcept { return gaussian_; }

  double operator()(double x, double t) const { return evaluate(x, t); }

  double evaluate(double x, double t) const {
    const double z = similarity_variable(x, t);
    if (gaussian_) {
      const double var = gaussian_->var_coeff * t;
      const double r = x - gaussian_->mean_coeff * std::sqrt(t);
      return std::exp(-r * r / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
    }
    return std::exp(exponent(z) - log_norm_) / std::sqrt(t);
  }

  Jet jet(double x, double t) const {
    const double z = similarity_variable(x, t);
    if (gaussian_) {
      const double vt = gaussian_->var_coeff * t;
      const double m = gaussian_->mean_coeff;
      const double r = x - m * std::sqrt(t);
      const double w = std::exp(-r * r / (2.0 * vt)) / std::sqrt(2.0 * std::numbers::pi * vt);
      return {w, -w * r / vt, w * (r * r / (vt * vt) - 1.0 / vt),
              w * (-0.5 / t + r * r / (2.0 * vt * t) + r * m / (2.0 * std::sqrt(t) * vt))};
    }
    const double D = params_.diffusion();
    const double lam = params_.lambda();
    const double w = std::exp(exponent(z) - log_norm_) / std::sqrt(t);
    const double dphi_dz = -z / (2.0 * D) - lam * profile_.du(z) / D;
    const double phi_x = dphi_dz / std::sqrt(t);
    const double phi_xx = (-1.0 / (2.0 * D) - lam * profile_.d2u(z) / D) / t;
    const double phi_t = -dphi_dz * z / (2.0 * t);
    return {w, w * phi_x, w * (phi_xx + phi_x * phi_x), w * (-0.5 / t + phi_t)};
  }

  double mean(double t) const { return z_mean_ * std::sqrt(t); }
  double variance(double t) const { return z_variance_ * t; }

  DensityFn as_function() const {
    auto self = std::make_shared<const ClosedFormSolution>(*this);
    return [self](double x, double t) { return self->evaluate(x, t); };
  }

 private:
  double exponent(double z) const {
    const double D = params_.diffusion();
    return -z * z / (4.0 * D) - params_.lambda() * profile_.u(z) / D;
  }

  PhysParams params_;
  SimilarityProfile profile_;
  double norm_const_;
  double log_norm_;
  double z_half_width_;
  double z_mean_;
  double z_variance_;
  std::optional<GaussianForm> gaussian_;
};

namespace detail {

struct Normalization {
  double norm_const;
  double half_width;
  double mean;
  double variance;
};

/// Truncates at max(20 sqrt D, first |z| where the integrand drops below 1e-300)
/// and integrates the normalization integrand and its first two moments.
inline Normalization normalize_profile(const PhysParams& params, const SimilarityProfile& profile) {
  const double D = params.diffusion();
  const double lam = params.lambda();
  auto integrand = [&](double z) { return std::exp(-z * z / (4.0 * D) - lam * profile.u(z) / D); };
  double L = 20.0 * std::sqrt(D);
  const double cap = 1e6 * std::sqrt(D);
  while (true) {
    const double left = integrand(-L);
    const double right = integrand(L);
    if (!std::isfinite(left) || !std::isfinite(right))
      throw NormalizabilityError(Reason::quadrature_divergence, "normalization integrand overflows");
    if (left < tail_floor && right < tail_floor) break;
    L *= 1.25;
    if (L > cap)
      throw NormalizabilityError(Reason::quadrature_divergence, "normalization integrand does not decay");
  }
  auto integrate = [&](auto&& g) {
    return quad::gauss_kronrod(g, -L, 0.0, normalization_rel_tol, 1e-300).value +
           quad::gauss_kronrod(g, 0.0, L, normalization_rel_tol, 1e-300).value;
  };
  const double c = integrate(integrand);
  if (!(c > 0.0) || !std::isfinite(c))
    throw NormalizabilityError(Reason::quadrature_divergence, "normalization integral is not positive and finite");
  const double m1 = integrate([&](double z) { return z * integrand(z); }) / c;
  const double m2 = integrate([&](double z) { return z * z * integrand(z); }) / c;
  return {c, L, m1, m2 - m1 * m1};
}

}  // namespace detail

/// Normalized density for a general scale-invariant profile. The additive
/// constants alpha_n are absorbed into the normalization.
inline ClosedFormSolution assemble_closed_form(const PhysParams& params, const SimilarityProfile& profile) {
  if (profile.half_line())
    throw NormalizabilityError(Reason::half_line_profile, "half-line profiles have no whole-line density");
  const auto n = detail::normalize_profile(params, profile);
  return {params, profile, n.norm_const, n.half_width, n.mean, n.variance};
}

/// Power-law entry point: runs the normalizability gate first.
inline ClosedFormSolution assemble_closed_form(const PhysParams& params, const PowerLawPotential& pot) {
  const auto verdict = validate_potential(pot, params);
  if (!verdict) throw NormalizabilityError(verdict.reason, "assemble_closed_form: " + verdict.message);
  return assemble_closed_form(params, pot.profile());
}

/// Heat kernel exp(-x^2/4Dt) / sqrt(4 pi D t).
inline ClosedFormSolution diffusion_kernel(double diffusion) {
  const PhysParams params(diffusion, 0.0);
  const double c = std::sqrt(4.0 * std::numbers::pi * diffusion);
  const double L = std::sqrt(4.0 * diffusion * -std::log(tail_floor));
  return {params, SimilarityProfile::constant(0.0), c, std::max(L, 20.0 * std::sqrt(diffusion)),
          0.0, 2.0 * diffusion, GaussianForm{0.0, 2.0 * diffusion}};
}

/// U1 = x / sqrt(t): a Gaussian with mean -2 lambda sqrt(t) and variance 2Dt.
inline ClosedFormSolution solution_p1(const PhysParams& params) {
  const double D = params.diffusion();
  const double lam = params.lambda();
  const double c = std::sqrt(4.0 * std::numbers::pi * D) * std::exp(lam * lam / D);
  const double L = 2.0 * std::abs(lam) + std::sqrt(4.0 * D * -std::log(tail_floor));
  return {params, SimilarityProfile::power_law(1.0, 1.0), c, std::max(L, 20.0 * std::sqrt(D)),
          -2.0 * lam, 2.0 * D, GaussianForm{-2.0 * lam, 2.0 * D}};
}

/// U1 = x^2 / (2t): a centered Gaussian with variance 2Dt / (1 + 2 lambda).
inline ClosedFormSolution solution_p2(const PhysParams& params) {
  const double D = params.diffusion();
  const double k = 1.0 + 2.0 * params.lambda();
  if (!(k > 0.0)) throw NormalizabilityError(Reason::nonpositive_gaussian_coefficient, "solution_p2: 1 + 2 lambda <= 0");
  const double c = std::sqrt(4.0 * std::numbers::pi * D / k);
  const double L = std::sqrt(4.0 * D * -std::log(tail_floor) / k);
  return {params, SimilarityProfile::power_law(0.5, 2.0), c, std::max(L, 20.0 * std::sqrt(D)),
          0.0, 2.0 * D / k, GaussianForm{0.0, 2.0 * D / k}};
}

/// Tabulated CDF of a closed-form density at fixed t: cumulative quadrature
/// on a uniform node table, piecewise cubic Hermite interpolation with the
/// density itself as the slope.
class CdfTable {
 public:
  CdfTable(const ClosedFormSolution& sol, double t, std::size_t points = 10000) : t_(t) {
    if (points < 2) throw ArgumentError("CdfTable: need at least two nodes");
    const double half = sol.z_half_width() * std::sqrt(t);
    lo_ = -half;
    h_ = 2.0 * half / static_cast<double>(points - 1);
    cdf_.resize(points);
    pdf_.resize(points);
    auto w = [&](double x) { return sol.evaluate(x, t); };
    pdf_[0] = w(lo_);
    cdf_[0] = 0.0;
    // Neumaier-compensated running sum over 10^4 panels.
    double sum = 0.0, carry = 0.0;
    for (std::size_t i = 1; i < points; ++i) {
      const double piece = quad::gauss_kronrod(w, node(i - 1), node(i), 1e-13, 1e-300).value;
      const double next = sum + piece;
      carry += std::abs(sum) >= std::abs(piece) ? (sum - next) + piece : (piece - next) + sum;
      sum = next;
      cdf_[i] = sum + carry;
      pdf_[i] = w(node(i));
    }
    const double total = cdf_.back();
    for (std::size_t i = 0; i < points; ++i) {
      cdf_[i] /= total;
      pdf_[i] /= total;
    }
  }

  double t() const noexcept { return t_; }
  double lower() const noexcept { return lo_; }
  double upper() const noexcept { return node(cdf_.size() - 1); }

  double operator()(double x) const {
    if (x <= lo_) return 0.0;
    if (x >= upper()) return 1.0;
    const auto i = std::min(static_cast<std::size_t>((x - lo_) / h_), cdf_.size() - 2);
    return hermite(i, (x - node(i)) / h_);
  }

  /// x with F(x) = u, by bisection on the table then safeguarded Newton.
  double inverse(double u) const {
    if (u <= 0.0) return lo_;
    if (u >= 1.0) return upper();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1) - 1;
    double a = 0.0, b = 1.0;
    double s = cdf_[i + 1] > cdf_[i] ? (u - cdf_[i]) / (cdf_[i + 1] - cdf_[i]) : 0.5;
    for (int iter = 0; iter < 60; ++iter) {
      const double g = hermite(i, s) - u;
      if (g > 0.0) b = s; else a = s;
      const double slope = hermite_slope(i, s);
      double next = slope > 0.0 ? s - g / slope : 0.5 * (a + b);
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      if (std::abs(next - s) < 1e-15) {
        s = next;
        break;
      }
      s = next;
    }
    return node(i) + s * h_;
  }

 private:
  double node(std::size_t i) const { return lo_ + static_cast<double>(i) * h_; }

  double hermite(std::size_t i, double s) const {
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * cdf_[i] + (s3 - 2 * s2 + s) * h_ * pdf_[i] +
           (-2 * s3 + 3 * s2) * cdf_[i + 1] + (s3 - s2) * h_ * pdf_[i + 1];
  }
  double hermite_slope(std::size_t i, double s) const {
    const double s2 = s * s;
    return (6 * s2 - 6 * s) * cdf_[i] + (3 * s2 - 4 * s + 1) * h_ * pdf_[i] +
           (-6 * s2 + 6 * s) * cdf_[i + 1] + (3 * s2 - 2 * s) * h_ * pdf_[i + 1];
  }

  double t_;
  double lo_ = 0.0;
  double h_ = 0.0;
  std::vector<double> cdf_;
  std::vector<double> pdf_;
};

}  // namespace fplab

#endif  // FPLAB_SIMILARITY_HPP
