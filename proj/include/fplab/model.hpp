#ifndef FPLAB_MODEL_HPP
#define FPLAB_MODEL_HPP

// Domain types shared by every module: physical parameters, the power-law
// drift family, scale-invariant profiles u(z), grids and gridded densities.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fplab/errors.hpp"

namespace fplab {

/// Evaluable density or field over (x, t).
using DensityFn = std::function<double(double x, double t)>;

inline constexpr double default_lambda_cap = 0.5;

/// Constant diffusion D and perturbation strength lambda.
class PhysParams {
 public:
  PhysParams(double diffusion, double lambda, double lambda_cap = default_lambda_cap)
      : diffusion_(diffusion), lambda_(lambda) {
    if (!(diffusion > 0.0) || !std::isfinite(diffusion))
      throw InvariantError("PhysParams.D must be positive and finite, got " + std::to_string(diffusion));
    if (!std::isfinite(lambda) || !(std::abs(lambda) < lambda_cap))
      throw InvariantError("PhysParams.lambda must satisfy |lambda| < " + std::to_string(lambda_cap) +
                           " (perturbation cap), got " + std::to_string(lambda));
  }

  double diffusion() const noexcept { return diffusion_; }
  double lambda() const noexcept { return lambda_; }

  PhysParams with_lambda(double lambda) const { return {diffusion_, lambda}; }

 private:
  double diffusion_;
  double lambda_;
};

/// z = x / sqrt(t).
inline double similarity_variable(double x, double t) {
  if (!(t > 0.0)) throw DomainError("similarity_variable: t must be positive");
  return x / std::sqrt(t);
}

namespace detail {

inline bool is_integer(double p) { return std::isfinite(p) && std::floor(p) == p; }

/// c * x^p with the conventions 0 * anything = 0 and x^0 = 1. Integer
/// exponents up to 64 use repeated squaring, which is faster than pow and
/// well-defined for negative x.
inline double power_term(double c, double x, double p) {
  if (c == 0.0) return 0.0;
  if (p == 0.0) return c;
  if (is_integer(p) && std::abs(p) <= 64.0) {
    auto n = static_cast<long>(std::abs(p));
    double base = x, acc = 1.0;
    while (n) {
      if (n & 1) acc *= base;
      base *= base;
      n >>= 1;
    }
    return p > 0 ? c * acc : c / acc;
  }
  if (x < 0.0) throw DomainError("power_term: negative base with non-integer exponent");
  return c * std::pow(x, p);
}

}  // namespace detail

/// Scale-invariant drift profile u(z) with its first two derivatives.
///
/// Half-line profiles (non-integer exponents) are only defined for z >= 0 and
/// throw DomainError elsewhere.
class SimilarityProfile {
 public:
  using Fn = std::function<double(double)>;

  SimilarityProfile(Fn u, Fn du, Fn d2u, bool half_line = false, std::string name = "custom")
      : u_(std::move(u)), du_(std::move(du)), d2u_(std::move(d2u)), half_line_(half_line),
        name_(std::move(name)) {}

  /// u(z) = mu z^p.
  static SimilarityProfile power_law(double mu, double p) {
    const bool half = !detail::is_integer(p);
    return SimilarityProfile(
        [mu, p](double z) { return detail::power_term(mu, z, p); },
        [mu, p](double z) { return detail::power_term(mu * p, z, p - 1.0); },
        [mu, p](double z) { return detail::power_term(mu * p * (p - 1.0), z, p - 2.0); }, half,
        "power_law");
  }

  static SimilarityProfile constant(double c) {
    return SimilarityProfile([c](double) { return c; }, [](double) { return 0.0; },
                             [](double) { return 0.0; }, false, "constant");
  }

  double u(double z) const { return u_(check(z)); }
  double du(double z) const { return du_(check(z)); }
  double d2u(double z) const { return d2u_(check(z)); }

  bool half_line() const noexcept { return half_line_; }
  const std::string& name() const noexcept { return name_; }

 private:
  double check(double z) const {
    if (half_line_ && z < 0.0) throw DomainError("SimilarityProfile: half-line profile evaluated at z < 0");
    return z;
  }

  Fn u_, du_, d2u_;
  bool half_line_;
  std::string name_;
};

/// U1(x, t) = mu x^p t^q. Scale-invariant iff q = -p/2; the type admits other
/// q so that invariance violations can be represented and diagnosed.
struct PowerLawPotential {
  double mu = 1.0;
  double p = 1.0;
  double q = -0.5;

  /// The only user-facing constructor: q is derived as -p/2.
  static PowerLawPotential scale_invariant(double mu, double p) { return {mu, p, -p / 2.0}; }

  bool is_scale_invariant() const noexcept { return q == -p / 2.0; }

  double operator()(double x, double t) const {
    if (!(t > 0.0)) throw DomainError("PowerLawPotential: t must be positive");
    return detail::power_term(mu, x, p) * std::pow(t, q);
  }

  SimilarityProfile profile() const {
    if (!is_scale_invariant())
      throw ScaleInvarianceError("PowerLawPotential: q must equal -p/2 for a similarity profile");
    return SimilarityProfile::power_law(mu, p);
  }
};

struct Verdict {
  bool accepted = false;
  Reason reason = Reason::accepted;
  std::string message;

  explicit operator bool() const noexcept { return accepted; }
};

/// Normalizability gate for power-law drift potentials on the whole line.
///
/// Allowed exponents are 0, 1, 2 and even integers above 2. For p = 2 the
/// Gaussian coefficient 1/(4D) + lambda mu / D must stay positive; for p > 2
/// the z^p term dominates the tail, so lambda mu >= 0 is required.
inline Verdict validate_potential(const PowerLawPotential& pot, const PhysParams& params) {
  if (!pot.is_scale_invariant())
    throw ScaleInvarianceError("validate_potential: q = " + std::to_string(pot.q) +
                               " violates q = -p/2 for p = " + std::to_string(pot.p));
  const double p = pot.p;
  const double lm = params.lambda() * pot.mu;
  if (!detail::is_integer(p))
    return {false, Reason::non_integer_exponent, "non-integer p is only defined on the half line"};
  if (p < 0.0) return {false, Reason::negative_exponent, "negative p is singular at z = 0"};
  if (p == 0.0 || p == 1.0) return {true, Reason::accepted, "accepted"};
  if (p == 2.0) {
    const double coeff = 1.0 / (4.0 * params.diffusion()) + lm / params.diffusion();
    if (coeff > 0.0) return {true, Reason::accepted, "accepted"};
    return {false, Reason::nonpositive_gaussian_coefficient,
            "p = 2 requires 1/(4D) + lambda*mu/D > 0"};
  }
  if (std::fmod(p, 2.0) != 0.0)
    return {false, Reason::odd_exponent, "p must be 0, 1, 2 or an even integer"};
  if (lm < 0.0)
    return {false, Reason::tail_divergence, "even p > 2 requires lambda*mu >= 0 for a decaying tail"};
  return {true, Reason::accepted, "accepted"};
}

/// Uniform space-time grid. Time steps run from t0 to t_end in nt steps.
class Grid {
 public:
  Grid(double x_min, double x_max, std::size_t nx, double t0, double t_end, std::size_t nt)
      : x_min_(x_min), x_max_(x_max), nx_(nx), t0_(t0), t_end_(t_end), nt_(nt) {
    if (!(x_min < x_max)) throw InvariantError("Grid: x_min must be below x_max");
    if (nx < 3) throw InvariantError("Grid: nx must be at least 3");
    if (!(t0 > 0.0) || !(t0 < t_end)) throw InvariantError("Grid: require 0 < t0 < t_end");
    if (nt < 1) throw InvariantError("Grid: nt must be at least 1");
  }

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t nx() const noexcept { return nx_; }
  double t0() const noexcept { return t0_; }
  double t_end() const noexcept { return t_end_; }
  std::size_t nt() const noexcept { return nt_; }

  double dx() const noexcept { return (x_max_ - x_min_) / static_cast<double>(nx_ - 1); }
  double dt() const noexcept { return (t_end_ - t0_) / static_cast<double>(nt_); }
  double x(std::size_t i) const noexcept {
    return i + 1 == nx_ ? x_max_ : x_min_ + static_cast<double>(i) * dx();
  }
  double t(std::size_t k) const noexcept {
    return k == nt_ ? t_end_ : t0_ + static_cast<double>(k) * dt();
  }

  std::vector<double> nodes() const {
    std::vector<double> xs(nx_);
    for (std::size_t i = 0; i < nx_; ++i) xs[i] = x(i);
    return xs;
  }

 private:
  double x_min_, x_max_;
  std::size_t nx_;
  double t0_, t_end_;
  std::size_t nt_;
};

/// Gridded density W(x_i, t).
class DensityField {
 public:
  DensityField(Grid grid, double t, std::vector<double> values, bool normalized = false)
      : grid_(std::move(grid)), t_(t), values_(std::move(values)), normalized_(normalized) {
    if (values_.size() != grid_.nx())
      throw InvariantError("DensityField: value count does not match grid.nx");
  }

  /// Sample an evaluable density on the grid nodes at time t.
  static DensityField sample(const Grid& grid, double t, const DensityFn& w, bool normalized = true) {
    std::vector<double> v(grid.nx());
    for (std::size_t i = 0; i < grid.nx(); ++i) v[i] = w(grid.x(i), t);
    return {grid, t, std::move(v), normalized};
  }

  const Grid& grid() const noexcept { return grid_; }
  double t() const noexcept { return t_; }
  const std::vector<double>& values() const noexcept { return values_; }
  bool normalized() const noexcept { return normalized_; }

  double min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : values_) m = std::min(m, v);
    return m;
  }
  double max_value() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : values_) m = std::max(m, v);
    return m;
  }
  /// All values >= -rel_tol * max (bounded undershoot).
  bool nonnegative(double rel_tol = 0.0) const { return min_value() >= -rel_tol * std::abs(max_value()); }

 private:
  Grid grid_;
  double t_;
  std::vector<double> values_;
  bool normalized_;
};

/// x -> eps^a x, t -> eps^b t, W -> eps^gamma W, U -> eps^d U. Construction
/// enforces the FPE-invariant exponent pair b = 2a, d = 0.
class ScalingTransform {
 public:
  ScalingTransform(double eps, double a, double b, double gamma, double d)
      : eps_(eps), a_(a), b_(b), gamma_(gamma), d_(d) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InvariantError("ScalingTransform: eps must be positive");
    if (b != 2.0 * a) throw InvariantError("ScalingTransform: b must equal 2a");
    if (d != 0.0) throw InvariantError("ScalingTransform: d must be 0");
  }

  double eps() const noexcept { return eps_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double gamma() const noexcept { return gamma_; }
  double d() const noexcept { return d_; }

  double scale_x(double x) const { return std::pow(eps_, a_) * x; }
  double scale_t(double t) const { return std::pow(eps_, b_) * t; }

 private:
  double eps_, a_, b_, gamma_, d_;
};

}  // namespace fplab

#endif  // FPLAB_MODEL_HPP
