#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include "bbm/errors.hpp"
#include "bbm/harness.hpp"
#include "bbm/simd/kernels.hpp"
#include "json.hpp"

namespace bbm {
namespace {

using nlohmann::ordered_json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json reference_policy(const StudyConfig& config) {
  const ControllerConstants c{};
  return {
      {"method", "dormand-prince 5(4), error-per-unit-step control, max norm over coefficients"},
      {"abs_tol", config.reference_tol.abs_tol},
      {"rel_tol", config.reference_tol.rel_tol},
      {"max_steps", config.reference_tol.max_steps},
      {"controller", {{"safety", c.safety}, {"min_factor", c.min_factor}, {"max_factor", c.max_factor}}},
  };
}

}  // namespace

ReportFormat parse_format(std::string_view text) {
  if (text == "csv") return ReportFormat::csv;
  if (text == "json") return ReportFormat::json;
  if (text == "plotdata") return ReportFormat::plotdata;
  throw std::invalid_argument("unknown report format '" + std::string(text) + "'");
}

std::string render_csv(std::span<const ConvergenceRecord> records) {
  std::string out = "scheme,epsilon,tau,error_l2,error_hr,runtime_ms,flag\n";
  for (const auto& r : records) {
    out += std::string(scheme_name(r.scheme)) + ',' + fmt_double(r.epsilon) + ',' + fmt_double(r.tau) + ',' +
           fmt_double(r.error_l2) + ',' + fmt_double(r.error_hr) + ',' + fmt_double(r.runtime_ms) + ',' +
           std::string(flag_name(r.flag)) + '\n';
  }
  return out;
}

std::string render_json(std::span<const ConvergenceRecord> records, const StudyConfig& config) {
  ordered_json meta = {
      {"code_version", version()},
      {"kernels", simd::isa_name(simd::active().isa)},
      {"n_points", config.n_points},
      {"dealias", config.dealias},
      {"final_time", config.final_time},
      {"initial_datum", datum_name(config.datum)},
      {"norm_r", config.norm_r},
      {"dispersion_odd_coefficients", config.polynomial.odd_coefficients()},
      {"seed", config.seed},
      {"reference_policy", reference_policy(config)},
  };
  ordered_json rows = ordered_json::array();
  for (const auto& r : records) {
    ordered_json row = {
        {"scheme", scheme_name(r.scheme)}, {"epsilon", r.epsilon},       {"tau", r.tau},
        {"error_l2", r.error_l2},          {"error_hr", r.error_hr},     {"runtime_ms", r.runtime_ms},
        {"flag", flag_name(r.flag)},
    };
    if (!r.message.empty()) row["message"] = r.message;
    rows.push_back(std::move(row));
  }
  return ordered_json{{"metadata", meta}, {"records", rows}}.dump(2) + '\n';
}

std::string render_plotdata(std::span<const ConvergenceRecord> records) {
  // Keep first-seen order of (scheme, epsilon) series.
  std::vector<std::pair<SchemeName, double>> keys;
  std::map<std::pair<SchemeName, double>, std::map<double, double>> series;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.scheme, r.epsilon);
    if (!series.contains(key)) keys.push_back(key);
    auto& s = series[key];
    if (r.flag == CellFlag::ok) s.emplace(r.tau, r.error_l2);
  }
  std::string out;
  bool first = true;
  for (const auto& key : keys) {
    if (!first) out += "\n\n";
    first = false;
    out += "# scheme=" + std::string(scheme_name(key.first)) + " epsilon=" + fmt_double(key.second) + '\n';
    out += "# tau error_l2\n";
    for (const auto& [tau, err] : series[key]) out += fmt_double(tau) + ' ' + fmt_double(err) + '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) throw IoError("failed writing '" + path.string() + "'");
}

void emit_report(std::span<const ConvergenceRecord> records, const StudyConfig& config,
                 const std::filesystem::path& path, ReportFormat format) {
  if (records.empty()) throw std::invalid_argument("emit_report: no records");
  switch (format) {
    case ReportFormat::csv:
      write_text_file(path, render_csv(records));
      break;
    case ReportFormat::json:
      write_text_file(path, render_json(records, config));
      break;
    case ReportFormat::plotdata:
      write_text_file(path, render_plotdata(records));
      break;
  }
}

std::string render_kdv_csv(std::span<const KdvLimitRecord> records) {
  std::string out = "epsilon,tau,difference_l2,runtime_ms\n";
  for (const auto& r : records) {
    out += fmt_double(r.epsilon) + ',' + fmt_double(r.tau) + ',' + fmt_double(r.difference_l2) + ',' +
           fmt_double(r.runtime_ms) + '\n';
  }
  return out;
}

std::string render_kdv_json(std::span<const KdvLimitRecord> records, const KdvLimitConfig& config) {
  ordered_json rows = ordered_json::array();
  for (const auto& r : records) {
    rows.push_back(
        {{"epsilon", r.epsilon}, {"tau", r.tau}, {"difference_l2", r.difference_l2}, {"runtime_ms", r.runtime_ms}});
  }
  ordered_json meta = {
      {"code_version", version()},  {"n_points", config.n_points},
      {"dealias", config.dealias},  {"final_time", config.final_time},
      {"initial_datum", datum_name(config.datum)},
      {"bbm_scheme", "lie"},        {"kdv_scheme", "yoshida4 with exact linear flow"},
  };
  ordered_json doc = {{"metadata", meta}, {"records", rows}};
  std::vector<double> positive;
  for (const auto& r : records) {
    if (r.epsilon > 0.0 && r.difference_l2 > 0.0) positive.push_back(r.epsilon);
  }
  if (positive.size() >= 2) doc["slope"] = kdv_limit_slope(records);
  return doc.dump(2) + '\n';
}

std::string render_lemma_json(std::span<const LemmaResult> results) {
  ordered_json rows = ordered_json::array();
  for (const auto& r : results) {
    rows.push_back({
        {"inequality", inequality_name(r.inequality)},
        {"epsilon", r.setting.epsilon},
        {"sigma", r.setting.sigma},
        {"r", r.setting.r},
        {"t", r.setting.t},
        {"trials", r.trials},
        {"worst_ratio", r.worst_ratio},
        {"pass", r.pass},
    });
  }
  return rows.dump(2) + '\n';
}

}  // namespace bbm
