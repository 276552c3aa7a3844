#ifndef FPLAB_CLI_REPORT_HPP
#define FPLAB_CLI_REPORT_HPP

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "fplab/cli/scenario.hpp"
#include "fplab/errors.hpp"

namespace fplab::cli {

enum class Format { csv, jsonl };

/// Shortest-safe binary64 text: 17 significant digits round-trip exactly.
inline std::string format_real(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::string json_real(double v) { return std::isfinite(v) ? format_real(v) : "null"; }

inline std::string json_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

/// Header `x,t,w_analytic,w_numeric,abs_err`, minus the columns the table lacks.
inline std::string render_csv(const DensityTable& table) {
  std::string out = "x,t";
  if (table.w_analytic) out += ",w_analytic";
  if (table.w_numeric) out += ",w_numeric";
  if (table.abs_err) out += ",abs_err";
  out += '\n';
  const std::string t = format_real(table.t);
  for (std::size_t i = 0; i < table.x.size(); ++i) {
    out += format_real(table.x[i]);
    out += ',';
    out += t;
    for (const auto* col : {&table.w_analytic, &table.w_numeric, &table.abs_err})
      if (*col) {
        out += ',';
        out += format_real((**col)[i]);
      }
    out += '\n';
  }
  return out;
}

/// One JSON object per metric.
inline std::string render_jsonl(const Report& report) {
  const auto& c = report.config;
  const std::string params = "{\"D\":" + json_real(c.diffusion) + ",\"lambda\":" + json_real(c.lambda) +
                             ",\"mu\":" + json_real(c.mu) + ",\"p\":" + json_real(c.p) +
                             ",\"q\":" + json_real(-c.p / 2.0) + "}";
  std::string out;
  for (const auto& m : report.metrics) {
    out += "{\"scenario\":" + json_string(report.scenario) + ",\"params\":" + params +
           ",\"metric\":" + json_string(m.name) + ",\"value\":" + json_real(m.value) +
           ",\"tolerance\":" + json_real(m.tolerance) + ",\"pass\":" + (m.pass ? "true" : "false") + "}\n";
  }
  return out;
}

/// Writes <dir>/<scenario>.csv and/or <dir>/<scenario>.jsonl; returns the
/// paths written. CSV is skipped for scenarios without a density table.
inline std::vector<std::filesystem::path> emit_report(const Report& report, const std::vector<Format>& formats,
                                                      const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << body;
    out.close();
    if (!out) throw IoError("write failed for " + path.string());
    written.push_back(path);
  };
  for (Format f : formats) {
    if (f == Format::csv && report.table) write(dir / (report.scenario + ".csv"), render_csv(*report.table));
    if (f == Format::jsonl) write(dir / (report.scenario + ".jsonl"), render_jsonl(report));
  }
  return written;
}

}  // namespace fplab::cli

#endif  // FPLAB_CLI_REPORT_HPP
