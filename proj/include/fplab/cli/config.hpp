#ifndef FPLAB_CLI_CONFIG_HPP
#define FPLAB_CLI_CONFIG_HPP

// Flat key-value run configuration:
//
//   # comment
//   [potential]
//   p = 2
//   mu = 0.5
//   params.lambda = 0.1     # a section prefix is optional
//
// Every key has exactly one home section; unknown or duplicate keys are errors.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "fplab/errors.hpp"
#include "fplab/fpe_numeric.hpp"
#include "fplab/langevin.hpp"
#include "fplab/model.hpp"

namespace fplab::cli {

struct RunConfig {
  // [potential]; q is always -p/2
  double mu = 1.0;
  double p = 1.0;
  // [params]
  double diffusion = 1.0;
  double lambda = 0.1;
  // [grid]
  double x_min = -10.0;
  double x_max = 10.0;
  std::size_t nx = 2001;
  double t0 = 0.25;
  double t_end = 1.0;
  std::size_t nt = 750;
  // [solver]
  Boundary boundary = Boundary::zero_flux;
  double theta = 0.5;
  // [sampler]
  std::size_t n = 100000;
  std::uint64_t seed = 42;
  double dt = 0.0;  // 0 = (t_end - t0) / 2000
  Schedule schedule = Schedule::uniform;
  unsigned threads = 0;
  // [run]
  std::string scenario;
  // [output]
  std::string out_dir = ".";
  std::string format;  // empty = csv and jsonl

  PowerLawPotential potential() const { return PowerLawPotential::scale_invariant(mu, p); }
  PhysParams params() const { return {diffusion, lambda}; }
  Grid grid() const { return {x_min, x_max, nx, t0, t_end, nt}; }
  SolverConfig solver() const { return SolverConfig(grid(), boundary, theta); }
  SamplerSpec sampler() const {
    SamplerSpec s;
    s.n = n;
    s.seed = seed;
    s.t0 = t0;
    s.t_end = t_end;
    s.dt = dt;
    s.schedule = schedule;
    s.threads = threads;
    return s;
  }
};

namespace detail {

struct KeySpec {
  std::string_view section;
  std::string_view key;
};

inline constexpr std::array<KeySpec, 20> known_keys{{
    {"potential", "mu"}, {"potential", "p"},     {"params", "D"},      {"params", "lambda"},
    {"grid", "x_min"},   {"grid", "x_max"},      {"grid", "nx"},       {"grid", "t0"},
    {"grid", "t_end"},   {"grid", "nt"},         {"solver", "boundary"}, {"solver", "theta"},
    {"sampler", "n"},    {"sampler", "seed"},    {"sampler", "dt"},    {"sampler", "schedule"},
    {"sampler", "threads"}, {"run", "scenario"}, {"output", "out"},    {"output", "format"},
}};

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string where(std::size_t line) { return "line " + std::to_string(line) + ": "; }

inline double parse_real(std::string_view v, std::size_t line, std::string_view path) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError(where(line) + std::string(path) + ": expected a real number, got '" + std::string(v) + "'");
  return out;
}

inline std::uint64_t parse_unsigned(std::string_view v, std::size_t line, std::string_view path) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError(where(line) + std::string(path) + ": expected a non-negative integer, got '" +
                      std::string(v) + "'");
  return out;
}

}  // namespace detail

/// Parses and validates a configuration document. Syntax errors carry the
/// line number; invariant violations carry the field path.
inline RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto c = s.find_first_of("#;"); c != std::string_view::npos) s = s.substr(0, c);
    s = detail::trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) throw ConfigError(detail::where(line) + "malformed section header");
      section = std::string(detail::trim(s.substr(1, s.size() - 2)));
      const bool known = std::any_of(detail::known_keys.begin(), detail::known_keys.end(),
                                     [&](const auto& k) { return k.section == section; });
      if (!known) throw ConfigError(detail::where(line) + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ConfigError(detail::where(line) + "expected 'key = value'");
    std::string_view key = detail::trim(s.substr(0, eq));
    const std::string_view value = detail::trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(detail::where(line) + "empty key");
    if (value.empty()) throw ConfigError(detail::where(line) + "empty value for '" + std::string(key) + "'");
    std::string_view sect = section;
    if (const auto dot = key.find('.'); dot != std::string_view::npos) {
      sect = key.substr(0, dot);
      key = key.substr(dot + 1);
    }
    if (key == "q")
      throw ConfigError(detail::where(line) + "q is not settable; it is always -p/2 (scale invariance)");
    const auto spec = std::find_if(detail::known_keys.begin(), detail::known_keys.end(),
                                   [&](const auto& k) { return k.key == key && (sect.empty() || k.section == sect); });
    if (spec == detail::known_keys.end())
      throw ConfigError(detail::where(line) + "unknown key '" + (sect.empty() ? "" : std::string(sect) + ".") +
                        std::string(key) + "'");
    const std::string path = std::string(spec->section) + "." + std::string(spec->key);
    if (!seen.insert(path).second) throw ConfigError(detail::where(line) + "duplicate key '" + path + "'");

    auto real = [&] { return detail::parse_real(value, line, path); };
    auto count = [&] { return detail::parse_unsigned(value, line, path); };
    if (key == "mu") cfg.mu = real();
    else if (key == "p") cfg.p = real();
    else if (key == "D") cfg.diffusion = real();
    else if (key == "lambda") cfg.lambda = real();
    else if (key == "x_min") cfg.x_min = real();
    else if (key == "x_max") cfg.x_max = real();
    else if (key == "nx") cfg.nx = count();
    else if (key == "t0") cfg.t0 = real();
    else if (key == "t_end") cfg.t_end = real();
    else if (key == "nt") cfg.nt = count();
    else if (key == "theta") cfg.theta = real();
    else if (key == "n") cfg.n = count();
    else if (key == "seed") cfg.seed = count();
    else if (key == "dt") cfg.dt = real();
    else if (key == "threads") cfg.threads = static_cast<unsigned>(count());
    else if (key == "scenario") cfg.scenario = std::string(value);
    else if (key == "out") cfg.out_dir = std::string(value);
    else if (key == "boundary") {
      if (value == "zero_flux") cfg.boundary = Boundary::zero_flux;
      else if (value == "dirichlet_zero") cfg.boundary = Boundary::dirichlet_zero;
      else throw ConfigError(detail::where(line) + path + ": expected zero_flux or dirichlet_zero");
    } else if (key == "schedule") {
      if (value == "uniform") cfg.schedule = Schedule::uniform;
      else if (value == "geometric") cfg.schedule = Schedule::geometric;
      else throw ConfigError(detail::where(line) + path + ": expected uniform or geometric");
    } else if (key == "format") {
      if (value != "csv" && value != "jsonl") throw ConfigError(detail::where(line) + path + ": expected csv or jsonl");
      cfg.format = std::string(value);
    }
  }

  // Re-validate every module invariant at load time.
  auto field = [](const std::string& path, const std::exception& e) {
    return ConfigError(path + ": " + e.what());
  };
  try {
    (void)cfg.params();
  } catch (const Error& e) {
    throw field(std::string("params.") + (cfg.diffusion > 0.0 ? "lambda" : "D"), e);
  }
  const auto verdict = validate_potential(cfg.potential(), cfg.params());
  if (!verdict)
    throw ConfigError(std::string("potential.p: rejected by the normalizability rule (") +
                      reason_code(verdict.reason) + "): " + verdict.message);
  try {
    (void)cfg.grid();
  } catch (const Error& e) {
    throw field("grid", e);
  }
  try {
    (void)cfg.solver();
  } catch (const Error& e) {
    throw field("solver.theta", e);
  }
  if (cfg.dt < 0.0) throw ConfigError("sampler.dt: must be positive (or 0 for the default schedule)");
  return cfg;
}

}  // namespace fplab::cli

#endif  // FPLAB_CLI_CONFIG_HPP
