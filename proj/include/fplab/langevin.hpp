#ifndef FPLAB_LANGEVIN_HPP
#define FPLAB_LANGEVIN_HPP

// Euler-Maruyama sampling of dx = D1(x, t) dt + sqrt(2D) dW, the Ito process
// whose density obeys the FPE with constant diffusion D.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "fplab/drift.hpp"
#include "fplab/errors.hpp"
#include "fplab/model.hpp"
#include "fplab/similarity.hpp"

namespace fplab {

namespace rng {

/// SplitMix64 output function.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

/// Standard normal quantile, Wichura's AS241 (relative accuracy ~1e-16).
inline double normal_quantile(double p) {
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num = (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                             6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                           1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                         1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) * q;
    const double den = (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                             3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                           5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                         4.2313330701600911252e+1) * r + 1.0);
    return num / den;
  }
  double r = std::sqrt(-std::log(q <= 0.0 ? p : 1.0 - p));
  double num, den;
  if (r <= 5.0) {
    r -= 1.6;
    num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
               1.27045825245236838258e+0) * r + 3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
            4.63033784615654529590e+0) * r + 1.42343711074968357734e+0);
    den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
               1.48103976427480074590e-1) * r + 6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
            2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
               2.65321895265761230930e-2) * r + 2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
            5.46378491116411436990e+0) * r + 6.65790464350110377720e+0);
    den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
               7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -num / den : num / den;
}

/// Counter-based stream for one path: draw c depends only on (seed, path, c),
/// so results do not depend on how paths are distributed over threads.
class PathStream {
 public:
  PathStream(std::uint64_t seed, std::uint64_t path)
      : key_(mix64(seed ^ mix64(path * golden_gamma + 0x632BE59BD9B4E019ULL))) {}

  std::uint64_t bits(std::uint64_t counter) const { return mix64(key_ + (counter + 1) * golden_gamma); }

  /// Uniform in the open interval (0, 1).
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal draw c, by inverse CDF of uniform(c).
  double normal(std::uint64_t counter) const;

 private:
  std::uint64_t key_;
};

inline double PathStream::normal(std::uint64_t counter) const { return normal_quantile(uniform(counter)); }

/// Counter reserved for the initial-position draw.
inline constexpr std::uint64_t initial_counter = ~std::uint64_t{0} - 1;

}  // namespace rng

struct Ensemble {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  double t = 0.0;
  std::vector<double> positions;
};

enum class Schedule { uniform, geometric };

struct SamplerSpec {
  std::size_t n = 100000;
  std::uint64_t seed = 42;
  double t0 = 0.25;
  double t_end = 1.0;
  double dt = 0.0;  // <= 0 selects (t_end - t0) / default_steps
  Schedule schedule = Schedule::uniform;
  unsigned threads = 0;  // 0 = hardware concurrency

  static constexpr std::size_t default_steps = 2000;
};

/// Law of the initial positions: a point mass or a closed-form density at t0
/// sampled by inverse CDF.
class InitialLaw {
 public:
  static InitialLaw point(double x0) {
    InitialLaw law;
    law.point_ = x0;
    return law;
  }

  static InitialLaw from_solution(const ClosedFormSolution& sol, double t0, std::size_t table_points = 10000) {
    InitialLaw law;
    law.cdf_ = std::make_shared<const CdfTable>(sol, t0, table_points);
    return law;
  }

  double draw(double u) const { return point_ ? *point_ : cdf_->inverse(u); }

 private:
  std::optional<double> point_;
  std::shared_ptr<const CdfTable> cdf_;
};

/// Step times t_0 < ... < t_N = t_end for the sampler's schedule. The step
/// count is round((t_end - t0) / dt); a uniform schedule then uses equal
/// steps, a geometric one constant ratios.
inline std::vector<double> time_schedule(const SamplerSpec& spec) {
  if (!(spec.t0 > 0.0)) throw ArgumentError("simulate_em: t0 must be positive");
  if (!(spec.t_end > spec.t0)) throw ArgumentError("simulate_em: t_end must exceed t0");
  const double span = spec.t_end - spec.t0;
  double dt = spec.dt;
  if (dt == 0.0) dt = span / static_cast<double>(SamplerSpec::default_steps);
  if (!(dt > 0.0)) throw ArgumentError("simulate_em: dt must be positive");
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::round(span / dt)));
  std::vector<double> ts(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(steps);
    ts[k] = spec.schedule == Schedule::uniform ? spec.t0 + f * span
                                               : spec.t0 * std::pow(spec.t_end / spec.t0, f);
  }
  ts.back() = spec.t_end;
  return ts;
}

/// Runs simulate_em for several lambda values at once on common random
/// numbers: member l equals simulate_em(u1, params.with_lambda(lambdas[l]),
/// spec, initial[l]) bit for bit, but each normal draw is shared.
inline std::vector<Ensemble> simulate_em_sweep(const DriftPotential& u1, const PhysParams& params,
                                               const std::vector<double>& lambdas, const SamplerSpec& spec,
                                               const std::vector<InitialLaw>& initial) {
  if (lambdas.size() != initial.size())
    throw ArgumentError("simulate_em_sweep: need one initial law per lambda");
  for (double lam : lambdas) (void)params.with_lambda(lam);  // re-checks the cap
  const auto ts = time_schedule(spec);
  const std::size_t nl = lambdas.size();
  std::vector<Ensemble> out(nl, Ensemble{spec.seed, spec.n, spec.t_end, std::vector<double>(spec.n)});
  if (spec.n == 0 || nl == 0) return out;

  const std::size_t steps = ts.size() - 1;
  const auto& power_form = u1.power_form();
  const double D = params.diffusion();
  std::vector<double> h(steps), noise(steps), tq(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    h[k] = ts[k + 1] - ts[k];
    noise[k] = std::sqrt(2.0 * D * h[k]);
    if (power_form) tq[k] = std::pow(ts[k], power_form->q);
  }
  // force(x, k) = -lambda dU1/dx at (x, t_k)
  std::vector<double> pf_coeff(nl, 0.0);
  for (std::size_t l = 0; l < nl; ++l)
    if (power_form) pf_coeff[l] = -lambdas[l] * power_form->mu * power_form->p;
  const double pf_exp = power_form ? power_form->p - 1.0 : 0.0;

  // Paths advance in lockstep blocks so the independent chains overlap in
  // the pipeline; each path still sees exactly its own arithmetic.
  constexpr std::size_t block = 16;
  auto run_range = [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(nl * block);
    std::array<double, block> xi{};
    std::vector<rng::PathStream> streams;
    streams.reserve(block);
    for (std::size_t i0 = begin; i0 < end; i0 += block) {
      const std::size_t m = std::min(block, end - i0);
      streams.clear();
      for (std::size_t j = 0; j < m; ++j) {
        streams.emplace_back(spec.seed, i0 + j);
        const double u0 = streams[j].uniform(rng::initial_counter);
        for (std::size_t l = 0; l < nl; ++l) x[l * block + j] = initial[l].draw(u0);
      }
      for (std::size_t k = 0; k < steps; ++k) {
        for (std::size_t j = 0; j < m; ++j) xi[j] = noise[k] * streams[j].normal(k);
        bool finite = true;
        for (std::size_t l = 0; l < nl; ++l) {
          const double lam = lambdas[l];
          double* xl = x.data() + l * block;
          for (std::size_t j = 0; j < m; ++j) {
            double force = 0.0;
            if (lam != 0.0)
              force = power_form ? detail::power_term(pf_coeff[l], xl[j], pf_exp) * tq[k]
                                 : -lam * u1.dx(xl[j], ts[k]);
            xl[j] += force * h[k] + xi[j];
            finite = finite && std::isfinite(xl[j]);
          }
        }
        if (!finite)
          for (std::size_t l = 0; l < nl; ++l)
            for (std::size_t j = 0; j < m; ++j)
              if (!std::isfinite(x[l * block + j]))
                throw DivergenceError(k + 1, "simulate_em: path " + std::to_string(i0 + j) +
                                                 " left the finite range");
      }
      for (std::size_t l = 0; l < nl; ++l)
        for (std::size_t j = 0; j < m; ++j) out[l].positions[i0 + j] = x[l * block + j];
    }
  };

  unsigned workers = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, spec.n));
  if (workers <= 1) {
    run_range(0, spec.n);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  const std::size_t chunk = (spec.n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        run_range(std::min(spec.n, w * chunk), std::min(spec.n, (w + 1) * chunk));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

/// x_{k+1} = x_k + D1(x_k, t_k) h_k + sqrt(2 D h_k) xi_k over [t0, t_end].
///
/// Path i uses the counter stream keyed by (seed, i); the step-k normal is
/// draw k and the initial position comes from a reserved counter. Paths are
/// split over threads statically and each writes only its own slot, so the
/// ensemble is bit-identical for any thread count.
inline Ensemble simulate_em(const DriftPotential& u1, const PhysParams& params, const SamplerSpec& spec,
                            const InitialLaw& initial) {
  return std::move(simulate_em_sweep(u1, params, {params.lambda()}, spec, {initial}).front());
}

/// n independent draws from a closed form at time t (inverse CDF).
inline Ensemble draw_exact(const ClosedFormSolution& sol, double t, std::size_t n, std::uint64_t seed) {
  Ensemble ens{seed, n, t, std::vector<double>(n)};
  if (n == 0) return ens;
  const CdfTable cdf(sol, t);
  for (std::size_t i = 0; i < n; ++i)
    ens.positions[i] = cdf.inverse(rng::PathStream(seed, i).uniform(rng::initial_counter));
  return ens;
}

struct DistributionMetrics {
  std::size_t n = 0;
  double l1 = 0.0;
  double ks = 0.0;
  double sample_mean = 0.0;
  double sample_variance = 0.0;
  double analytic_mean = 0.0;
  double analytic_variance = 0.0;
  double mean_gap = 0.0;
  double variance_gap = 0.0;
  double bin_width = 0.0;
  std::vector<double> bin_centers;
  std::vector<double> histogram;  // sample density per bin
  std::vector<double> expected;   // analytic bin-averaged density
};

inline constexpr std::size_t min_compare_samples = 100;

/// Histogram L1 distance (Scott bin width), Kolmogorov-Smirnov statistic and
/// the first two moment gaps between an ensemble and a closed form at ens.t.
inline DistributionMetrics compare_distribution(const Ensemble& ens, const ClosedFormSolution& sol, double t) {
  if (std::abs(ens.t - t) > 1e-12 * std::max(1.0, std::abs(t)))
    throw ArgumentError("compare_distribution: ensemble time " + std::to_string(ens.t) +
                        " differs from comparison time " + std::to_string(t));
  if (ens.positions.size() < min_compare_samples)
    throw ArgumentError("compare_distribution: need at least 100 samples");
  std::vector<double> xs = ens.positions;
  std::sort(xs.begin(), xs.end());
  const auto n = xs.size();
  const double nd = static_cast<double>(n);

  DistributionMetrics m;
  m.n = n;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.sample_mean = sum / nd;
  double ss = 0.0;
  for (double x : xs) ss += (x - m.sample_mean) * (x - m.sample_mean);
  m.sample_variance = ss / (nd - 1.0);
  m.analytic_mean = sol.mean(t);
  m.analytic_variance = sol.variance(t);
  m.mean_gap = std::abs(m.sample_mean - m.analytic_mean);
  m.variance_gap = std::abs(m.sample_variance - m.analytic_variance);

  const CdfTable cdf(sol, t);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(xs[i]);
    m.ks = std::max({m.ks, f - static_cast<double>(i) / nd, static_cast<double>(i + 1) / nd - f});
  }

  const double sd = m.sample_variance > 0.0 ? std::sqrt(m.sample_variance) : std::sqrt(m.analytic_variance);
  const double width = 3.49 * sd * std::cbrt(1.0 / nd);
  double lo = xs.front(), hi = xs.back();
  std::size_t bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
  if (bins == 0) {
    bins = 1;
    lo -= 0.5 * width;
  }
  hi = lo + static_cast<double>(bins) * width;
  m.bin_width = width;
  m.histogram.assign(bins, 0.0);
  for (double x : xs) {
    auto b = static_cast<std::size_t>((x - lo) / width);
    m.histogram[std::min(b, bins - 1)] += 1.0;
  }
  m.bin_centers.resize(bins);
  m.expected.resize(bins);
  double l1 = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double a = lo + static_cast<double>(b) * width;
    m.bin_centers[b] = a + 0.5 * width;
    m.histogram[b] /= nd * width;
    m.expected[b] = (cdf(a + width) - cdf(a)) / width;
    l1 += std::abs(m.histogram[b] - m.expected[b]) * width;
  }
  m.l1 = l1 + cdf(lo) + (1.0 - cdf(hi));
  return m;
}

}  // namespace fplab

#endif  // FPLAB_LANGEVIN_HPP
