#ifndef FPLAB_CLI_SCENARIO_HPP
#define FPLAB_CLI_SCENARIO_HPP

#include <algorithm>
#include <array>
#include <span>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fplab/cli/config.hpp"
#include "fplab/drift.hpp"
#include "fplab/errors.hpp"
#include "fplab/fpe_numeric.hpp"
#include "fplab/langevin.hpp"
#include "fplab/model.hpp"
#include "fplab/perturbation.hpp"
#include "fplab/scaling.hpp"
#include "fplab/similarity.hpp"
#include "fplab/tolerances.hpp"

namespace fplab::cli {

struct Metric {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Density table behind the CSV output; absent columns are omitted.
struct DensityTable {
  std::vector<double> x;
  double t = 0.0;
  std::optional<std::vector<double>> w_analytic;
  std::optional<std::vector<double>> w_numeric;
  std::optional<std::vector<double>> abs_err;
};

struct Report {
  std::string scenario;
  RunConfig config;
  std::vector<Metric> metrics;
  std::optional<DensityTable> table;

  bool pass() const {
    return std::all_of(metrics.begin(), metrics.end(), [](const Metric& m) { return m.pass; });
  }
};

inline constexpr std::array<std::string_view, 5> scenario_names{"analytic", "evolve", "sample", "verify",
                                                                "collapse"};

/// Pass iff value <= tolerance (NaN fails).
inline Metric upper_bound(std::string name, double value, double tolerance) {
  return {std::move(name), value, tolerance, value <= tolerance};
}

/// Closed form for a validated power-law configuration: the explicit
/// Gaussians for the two worked cases, quadrature normalization otherwise.
inline ClosedFormSolution closed_form_for(const PhysParams& params, const PowerLawPotential& pot) {
  if (pot.p == 1.0 && pot.mu == 1.0) return solution_p1(params);
  if (pot.p == 2.0 && pot.mu == 0.5) return solution_p2(params);
  return assemble_closed_form(params, pot);
}

namespace detail {

inline Report analytic(const RunConfig& cfg) {
  const auto sol = closed_form_for(cfg.params(), cfg.potential());
  const auto grid = cfg.grid();
  const auto field = DensityField::sample(grid, grid.t_end(), sol.as_function());
  Report r{"analytic", cfg, {}, DensityTable{grid.nodes(), grid.t_end(), field.values(), {}, {}}};
  r.metrics.push_back(upper_bound("mass_error", std::abs(mass(field) - 1.0), tol::closed_form_mass));
  return r;
}

inline Report evolve(const RunConfig& cfg) {
  const auto params = cfg.params();
  const auto pot = cfg.potential();
  const auto sol = closed_form_for(params, pot);
  const auto solver = cfg.solver();
  const auto& grid = solver.grid;
  const auto initial = DensityField::sample(grid, grid.t0(), sol.as_function());
  double drift = 0.0;
  const double dx = grid.dx();
  const auto final_field = fplab::evolve(initial, DriftPotential::power_law(pot), params, solver,
                                         [&](std::size_t, double, std::span<const double> v) {
                                           drift = std::max(drift, std::abs(quad::trapezoid(v, dx) - 1.0));
                                         });
  DensityTable table{grid.nodes(), grid.t_end(), std::vector<double>(grid.nx()), final_field.values(),
                     std::vector<double>(grid.nx())};
  double err = 0.0;
  for (std::size_t i = 0; i < grid.nx(); ++i) {
    (*table.w_analytic)[i] = sol(grid.x(i), grid.t_end());
    (*table.abs_err)[i] = std::abs((*table.w_numeric)[i] - (*table.w_analytic)[i]);
    err = std::max(err, (*table.abs_err)[i]);
  }
  Report r{"evolve", cfg, {}, std::move(table)};
  r.metrics.push_back(upper_bound("max_abs_error", err, tol::evolve_max_abs_error));
  r.metrics.push_back(upper_bound("max_mass_drift", drift, tol::evolve_mass_drift));
  const double undershoot = std::max(0.0, -final_field.min_value()) / final_field.max_value();
  r.metrics.push_back(upper_bound("undershoot_rel", undershoot, tol::evolve_undershoot_rel));
  return r;
}

inline Report sample(const RunConfig& cfg) {
  const auto params = cfg.params();
  const auto pot = cfg.potential();
  const auto sol = closed_form_for(params, pot);
  const auto spec = cfg.sampler();
  const auto ens = simulate_em(DriftPotential::power_law(pot), params, spec, InitialLaw::from_solution(sol, spec.t0));
  const auto m = compare_distribution(ens, sol, spec.t_end);
  const double nd = static_cast<double>(m.n);
  std::vector<double> err(m.histogram.size());
  for (std::size_t b = 0; b < err.size(); ++b) err[b] = std::abs(m.histogram[b] - m.expected[b]);
  Report r{"sample", cfg, {}, DensityTable{m.bin_centers, spec.t_end, m.expected, m.histogram, err}};
  r.metrics.push_back(
      upper_bound("mean_gap", m.mean_gap, tol::mc_mean_sigmas * std::sqrt(m.analytic_variance / nd)));
  // 3% at n = 1e5, widened to three standard errors for smaller ensembles.
  const double var_tol = std::max(tol::mc_variance_rel, tol::mc_variance_sigmas * std::sqrt(2.0 / (nd - 1.0)));
  r.metrics.push_back(upper_bound("variance_rel_gap", m.variance_gap / m.analytic_variance, var_tol));
  r.metrics.push_back(upper_bound("ks_statistic", m.ks, tol::ks_critical_99 / std::sqrt(nd)));
  r.metrics.push_back(
      upper_bound("histogram_l1", m.l1, tol::mc_histogram_l1 * std::cbrt(tol::mc_histogram_reference_n / nd)));
  return r;
}

inline Report verify(const RunConfig& cfg) {
  const auto params = cfg.params();
  const auto pot = cfg.potential();
  const auto sol = closed_form_for(params, pot);
  const auto u1 = DriftPotential::power_law(pot);
  const auto action = SAction::similarity(params, u1);
  const double D = params.diffusion();
  Report r{"verify", cfg, {}, {}};

  double res = 0.0, wt = 0.0, h1 = 0.0, h2 = 0.0, src = 0.0, src_scale = 0.0;
  for (const auto& pr : residual_lattice()) {
    res = std::max(res, std::abs(fpe_residual(sol, u1, params, pr.x, pr.t)));
    wt = std::max(wt, std::abs(sol.jet(pr.x, pr.t).wt));
    h1 = std::max(h1, std::abs(hierarchy_residual(1, action, u1, pr.x, pr.t)));
    h2 = std::max(h2, std::abs(hierarchy_residual(2, action, u1, pr.x, pr.t)));
    src = std::max(src, std::abs(order2_source(action, u1, pr.x, pr.t)));
    const double ux = u1.dx(pr.x, pr.t);
    src_scale = std::max(src_scale, 0.25 * ux * ux);
  }
  const double fpe_tol = sol.gaussian() ? tol::fpe_residual_exact : tol::fpe_residual_general;
  r.metrics.push_back(upper_bound("fpe_residual_rel", res / wt, fpe_tol));
  r.metrics.push_back(upper_bound("hierarchy_order1_residual", h1, tol::hierarchy_floor));
  r.metrics.push_back(upper_bound("hierarchy_order2_residual", h2, tol::hierarchy_floor));
  r.metrics.push_back(
      upper_bound("order2_source_rel", src_scale > 0.0 ? src / src_scale : src, tol::order2_source_rel));

  const auto u = u1.scaled(params.lambda());
  const auto psi = schrodinger_field(sol.as_function(), u, D);
  double sres = 0.0;
  for (const auto& pr : schrodinger_probes())
    sres = std::max(sres, std::abs(schrodinger_residual(psi, u, D, pr.x, pr.t)));
  r.metrics.push_back(upper_bound("schrodinger_residual", sres, tol::schrodinger_floor));

  const auto profile = pot.profile();
  const auto ode = reduce_to_ode(profile, params);
  const auto y = particular_solution(profile);
  double ode_res = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double z = -6.0 + 12.0 * i / 99.0;
    const double scale = 1.0 + std::abs(profile.d2u(z)) + std::abs(z * profile.du(z));
    ode_res = std::max(ode_res, std::abs(ode.residual(z, y.derivative(z), y.second_derivative(z))) / scale);
  }
  r.metrics.push_back(upper_bound("ode_residual_rel", ode_res, tol::ode_residual_rel));
  return r;
}

inline Report collapse(const RunConfig& cfg) {
  const auto sol = closed_form_for(cfg.params(), cfg.potential());
  const auto probes = default_probes();
  const double scale = max_density(sol.as_function(), probes);
  Report r{"collapse", cfg, {}, {}};
  for (double eps : {0.5, 2.0, 10.0}) {
    std::string name = "collapse_rel_eps_";
    name += eps == 0.5 ? "0.5" : eps == 2.0 ? "2" : "10";
    r.metrics.push_back(upper_bound(name, collapse_deviation(sol, eps, probes) / scale, tol::collapse_rel));
  }
  return r;
}

}  // namespace detail

inline Report run_scenario(const RunConfig& cfg, std::string_view scenario) {
  try {
    if (scenario == "analytic") return detail::analytic(cfg);
    if (scenario == "evolve") return detail::evolve(cfg);
    if (scenario == "sample") return detail::sample(cfg);
    if (scenario == "verify") return detail::verify(cfg);
    if (scenario == "collapse") return detail::collapse(cfg);
  } catch (const Error& e) {
    throw Error("scenario " + std::string(scenario) + ": " + e.what());
  }
  throw ArgumentError("unknown scenario '" + std::string(scenario) +
                      "' (expected analytic, evolve, sample, verify or collapse)");
}

}  // namespace fplab::cli

#endif  // FPLAB_CLI_SCENARIO_HPP
