#ifndef FPLAB_DRIFT_HPP
#define FPLAB_DRIFT_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <utility>

#include "fplab/errors.hpp"
#include "fplab/finite_difference.hpp"
#include "fplab/model.hpp"

namespace fplab {

/// Drift potential U(x, t) together with U', U'' (in x) and U-dot (in t).
///
/// Power-law and profile-backed potentials carry analytic derivatives;
/// from_function() falls back to 4th-order centered differences.
class DriftPotential {
 public:
  using Fn = std::function<double(double, double)>;

  DriftPotential(Fn value, Fn dx, Fn dxx, Fn dt, bool analytic = true)
      : value_(std::move(value)), dx_(std::move(dx)), dxx_(std::move(dxx)), dt_(std::move(dt)),
        analytic_(analytic) {}

  static DriftPotential zero() {
    auto z = [](double, double) { return 0.0; };
    return {z, z, z, z};
  }

  /// mu x^p t^q for arbitrary q.
  static DriftPotential power_law(double mu, double p, double q) {
    using detail::power_term;
    DriftPotential u{[=](double x, double t) { return power_term(mu, x, p) * std::pow(t, q); },
            [=](double x, double t) { return power_term(mu * p, x, p - 1) * std::pow(t, q); },
            [=](double x, double t) { return power_term(mu * p * (p - 1), x, p - 2) * std::pow(t, q); },
            [=](double x, double t) { return power_term(mu * q, x, p) * std::pow(t, q - 1); }};
    u.power_form_ = PowerLawPotential{mu, p, q};
    return u;
  }

  static DriftPotential power_law(const PowerLawPotential& pot) { return power_law(pot.mu, pot.p, pot.q); }

  /// U(x, t) = u(x / sqrt(t)) via the chain rule.
  static DriftPotential from_profile(const SimilarityProfile& profile) {
    auto prof = std::make_shared<const SimilarityProfile>(profile);
    return {[prof](double x, double t) { return prof->u(similarity_variable(x, t)); },
            [prof](double x, double t) { return prof->du(similarity_variable(x, t)) / std::sqrt(t); },
            [prof](double x, double t) { return prof->d2u(similarity_variable(x, t)) / t; },
            [prof](double x, double t) {
              const double z = similarity_variable(x, t);
              return -0.5 * z * prof->du(z) / t;
            }};
  }

  static DriftPotential from_function(Fn u) {
    auto f = std::make_shared<const Fn>(std::move(u));
    return {[f](double x, double t) { return (*f)(x, t); },
            [f](double x, double t) { return fd::dx(*f, x, t); },
            [f](double x, double t) { return fd::dxx(*f, x, t); },
            [f](double x, double t) { return fd::dt(*f, x, t); }, false};
  }

  /// c * U with all derivatives scaled; used to form U = lambda U1.
  DriftPotential scaled(double c) const {
    if (power_form_) return power_law(c * power_form_->mu, power_form_->p, power_form_->q);
    auto self = std::make_shared<const DriftPotential>(*this);
    return {[self, c](double x, double t) { return c * self->value(x, t); },
            [self, c](double x, double t) { return c * self->dx(x, t); },
            [self, c](double x, double t) { return c * self->dxx(x, t); },
            [self, c](double x, double t) { return c * self->dt(x, t); }, analytic_};
  }

  double value(double x, double t) const { return value_(x, check(t)); }
  double dx(double x, double t) const { return dx_(x, check(t)); }
  double dxx(double x, double t) const { return dxx_(x, check(t)); }
  double dt(double x, double t) const { return dt_(x, check(t)); }
  double operator()(double x, double t) const { return value(x, t); }

  bool analytic() const noexcept { return analytic_; }

  /// Set when the potential is known to be mu x^p t^q; lets hot loops skip
  /// the type-erased calls.
  const std::optional<PowerLawPotential>& power_form() const noexcept { return power_form_; }

 private:
  static double check(double t) {
    if (!(t > 0.0)) throw DomainError("DriftPotential: t must be positive");
    return t;
  }

  Fn value_, dx_, dxx_, dt_;
  bool analytic_;
  std::optional<PowerLawPotential> power_form_;
};

}  // namespace fplab

#endif  // FPLAB_DRIFT_HPP
