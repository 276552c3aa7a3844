#ifndef FPLAB_TOLERANCES_HPP
#define FPLAB_TOLERANCES_HPP

// Every pass/fail threshold used by reports and the acceptance suite.

namespace fplab::tol {

// Residuals of closed forms, relative to max |dW/dt| over the probe lattice.
inline constexpr double fpe_residual_exact = 1e-10;    // explicit Gaussian solutions
inline constexpr double fpe_residual_general = 1e-9;   // quadrature-normalized profiles

inline constexpr double hierarchy_floor = 1e-7;        // order-n equations, absolute
inline constexpr double order2_source_rel = 1e-12;     // S1'^2 - U1'^2/4 relative to U1'^2/4
inline constexpr double schrodinger_floor = 1e-6;      // centered differences of psi
inline constexpr double ode_residual_rel = 1e-10;      // scaled by 1 + |u''| + |z u'|
inline constexpr double collapse_rel = 1e-12;          // relative to max density on probes
inline constexpr double closed_form_mass = 1e-8;       // trapezoid mass of a tabulated closed form

// Crank-Nicolson evolution.
inline constexpr double evolve_max_abs_error = 1e-4;
inline constexpr double evolve_mass_drift = 1e-6;
inline constexpr double evolve_undershoot_rel = 1e-12;
inline constexpr double convergence_ratio_min = 3.5;
inline constexpr double convergence_ratio_max = 4.5;

// Monte Carlo comparisons.
inline constexpr double mc_mean_sigmas = 3.0;          // |mean gap| <= 3 sqrt(var / n)
inline constexpr double mc_variance_rel = 0.03;
inline constexpr double mc_variance_sigmas = 3.0;      // standard error of the sample variance
inline constexpr double ks_critical_99 = 1.63;         // KS <= 1.63 / sqrt(n)
inline constexpr double mc_histogram_l1 = 0.03;             // at n = 1e5; scales as n^(-1/3)
inline constexpr double mc_histogram_reference_n = 1e5;
inline constexpr int width_monotone_min_seeds = 8;     // of 10

}  // namespace fplab::tol

#endif  // FPLAB_TOLERANCES_HPP
