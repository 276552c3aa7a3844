#ifndef FPLAB_SCALING_HPP
#define FPLAB_SCALING_HPP

// Stretching group x -> eps^a x, t -> eps^{2a} t under which the FPE with a
// scale-invariant drift potential keeps its form.

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "fplab/errors.hpp"
#include "fplab/model.hpp"
#include "fplab/similarity.hpp"

namespace fplab {

struct ScalingExponents {
  double a = 1.0;
  double b = 2.0;
  double d = 0.0;
  double gamma = 1.0;  // free; fixed to a for delta-function initial data
};

inline ScalingExponents infer_exponents(double a) {
  if (a == 0.0 || !std::isfinite(a)) throw ArgumentError("infer_exponents: a = 0 is a degenerate transform");
  return {a, 2.0 * a, 0.0, a};
}

struct Probe {
  double x;
  double t;
};

/// x in +-{0.1, 0.5, 1, 2, 5}, t in {0.25, 1, 4, 16}.
inline std::vector<Probe> default_probes() {
  std::vector<Probe> probes;
  for (double t : {0.25, 1.0, 4.0, 16.0})
    for (double x : {0.1, 0.5, 1.0, 2.0, 5.0}) {
      probes.push_back({x, t});
      probes.push_back({-x, t});
    }
  return probes;
}

/// 10 x 10 lattice, x in [-8, 8], t in [0.25, 4] (geometric in t).
inline std::vector<Probe> residual_lattice() {
  std::vector<Probe> probes;
  for (int j = 0; j < 10; ++j) {
    const double t = 0.25 * std::pow(16.0, j / 9.0);
    for (int i = 0; i < 10; ++i) probes.push_back({-8.0 + 16.0 * i / 9.0, t});
  }
  return probes;
}

inline std::vector<Probe> schrodinger_probes() {
  std::vector<Probe> probes;
  for (double t : {0.5, 1.0, 2.0, 4.0})
    for (double x : {-4.0, -2.0, -1.0, 0.5, 3.0}) probes.push_back({x, t});
  return probes;
}

/// max over probes of |U1(x, t) - U1(eps^a x, eps^{2a} t)|.
inline double check_drift_invariance(const PowerLawPotential& pot, double eps, double a,
                                     const std::vector<Probe>& probes) {
  if (probes.empty()) throw ArgumentError("check_drift_invariance: empty probe list");
  if (!(eps > 0.0)) throw ArgumentError("check_drift_invariance: eps must be positive");
  const double sx = std::pow(eps, a);
  const double st = std::pow(eps, 2.0 * a);
  double worst = 0.0;
  for (const auto& pr : probes) {
    if (!(pr.t > 0.0)) throw ArgumentError("check_drift_invariance: probe with t <= 0");
    worst = std::max(worst, std::abs(pot(pr.x, pr.t) - pot(sx * pr.x, st * pr.t)));
  }
  return worst;
}

/// (x, t) -> eps^gamma W(eps^a x, eps^{2a} t).
inline DensityFn scale_density(DensityFn w, double eps, const ScalingExponents& ex) {
  if (!(eps > 0.0)) throw ArgumentError("scale_density: eps must be positive");
  const double amp = std::pow(eps, ex.gamma);
  const double sx = std::pow(eps, ex.a);
  const double st = std::pow(eps, ex.b);
  return [w = std::move(w), amp, sx, st](double x, double t) { return amp * w(sx * x, st * t); };
}

/// max over probes of |W(x, t) - eps W(eps x, eps^2 t)| for a = gamma = 1.
inline double collapse_deviation(const DensityFn& w, double eps, const std::vector<Probe>& probes) {
  if (!(eps > 0.0)) throw ArgumentError("collapse_deviation: eps must be positive");
  const auto scaled = scale_density(w, eps, infer_exponents(1.0));
  double worst = 0.0;
  for (const auto& pr : probes) worst = std::max(worst, std::abs(w(pr.x, pr.t) - scaled(pr.x, pr.t)));
  return worst;
}

inline double collapse_deviation(const ClosedFormSolution& sol, double eps,
                                 const std::vector<Probe>& probes = default_probes()) {
  return collapse_deviation(sol.as_function(), eps, probes);
}

/// Largest |W| over a probe set, the scale used to relativize deviations.
inline double max_density(const DensityFn& w, const std::vector<Probe>& probes) {
  double m = 0.0;
  for (const auto& pr : probes) m = std::max(m, std::abs(w(pr.x, pr.t)));
  return m;
}

}  // namespace fplab

#endif  // FPLAB_SCALING_HPP
