#pragma once

// Convergence, uniform-accuracy and KdV-limit studies, and their reports.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bbm/dispersion.hpp"
#include "bbm/reference.hpp"
#include "bbm/splitting.hpp"

namespace bbm {

std::string_view version();

enum class InitialDatum {
  standard,  // 3 sin(2x) / (2 - cos x)
  sine,      // sin x
};

InitialDatum parse_datum(std::string_view text);
std::string_view datum_name(InitialDatum datum);
Field initial_datum(const GridPtr& grid, InitialDatum datum);

enum class CellFlag { ok, blowup, invalid_config, numerical_failure };
std::string_view flag_name(CellFlag flag);

struct ConvergenceRecord {
  SchemeName scheme;
  double epsilon;
  double tau;
  double error_l2 = 0.0;  // zero when flagged
  double error_hr = 0.0;
  double runtime_ms = 0.0;
  CellFlag flag = CellFlag::ok;
  std::string message;
};

// tau = 5 / n for n = 50, 100, 200, 500, 1000, 2000, 5000
std::vector<double> default_taus();
// 0.1, 0.2, ..., 1.0
std::vector<double> default_epsilons();

struct StudyConfig {
  std::vector<SchemeName> schemes{all_schemes().begin(), all_schemes().end()};
  std::vector<double> epsilons = default_epsilons();
  std::vector<double> taus = default_taus();
  int n_points = 200;
  bool dealias = false;
  double final_time = 5.0;
  InitialDatum datum = InitialDatum::standard;
  double norm_r = 1.0;
  DispersionPolynomial polynomial = DispersionPolynomial::classical();
  ToleranceSpec reference_tol{1e-12, 1e-12, 2'000'000};
  unsigned threads = 0;  // 0: hardware concurrency
  bool record_timing = false;  // runtimes make reports non-reproducible
  std::uint64_t seed = 0;

  void validate() const;
};

// One record per (scheme, epsilon, tau) in list order. Cells that blow up or
// whose tau does not divide T are flagged instead of aborting the study.
std::vector<ConvergenceRecord> convergence_study(const StudyConfig& config);

struct EocOptions {
  double accuracy_floor = 1e-10;     // errors at or below are dropped
  double stability_tolerance = 0.10;  // spread of local slopes relative to their mean
};

struct EocFit {
  double order;
  std::vector<double> taus;  // fit window, ascending
  std::vector<double> errors;
};

// Least-squares slope over the longest run of consecutive step sizes whose
// local slopes agree within the stability tolerance (ties go to larger tau);
// falls back to every usable point when no run of three is stable.
EocFit fit_order(std::span<const ConvergenceRecord> records, SchemeName scheme, double epsilon,
                 const EocOptions& options = {});
double estimate_order(std::span<const ConvergenceRecord> records, SchemeName scheme, double epsilon,
                      const EocOptions& options = {});

// Slope of log(error_l2) vs log(epsilon) at fixed tau; needs four epsilons.
double epsilon_scaling(std::span<const ConvergenceRecord> records, SchemeName scheme, double tau);

struct KdvLimitConfig {
  std::vector<double> epsilons{0.02, 0.05, 0.1, 0.2};
  double tau = 1e-4;
  double final_time = 5.0;
  int n_points = 200;
  bool dealias = false;
  InitialDatum datum = InitialDatum::standard;
  DispersionPolynomial polynomial = DispersionPolynomial::classical();
  unsigned threads = 0;
  bool record_timing = false;
};

struct KdvLimitRecord {
  double epsilon;
  double tau;
  double difference_l2;
  double runtime_ms;
};

// ||u_BBM(T) - u_KdV(T)||_L2 per epsilon, BBM by Lie splitting. Only the
// classical P = d/dx has a KdV limit.
std::vector<KdvLimitRecord> kdv_limit_study(const KdvLimitConfig& config);
double kdv_limit_slope(std::span<const KdvLimitRecord> records);

// ---------------------------------------------------------------------------
// Reports

enum class ReportFormat { csv, json, plotdata };
ReportFormat parse_format(std::string_view text);

std::string render_csv(std::span<const ConvergenceRecord> records);
std::string render_json(std::span<const ConvergenceRecord> records, const StudyConfig& config);
// Blocks per (scheme, epsilon): '#' header then "tau error_l2" rows, two
// blank lines between blocks.
std::string render_plotdata(std::span<const ConvergenceRecord> records);

// Throws std::invalid_argument on empty records and IoError when the path
// cannot be written.
void emit_report(std::span<const ConvergenceRecord> records, const StudyConfig& config,
                 const std::filesystem::path& path, ReportFormat format);

std::string render_kdv_csv(std::span<const KdvLimitRecord> records);
std::string render_kdv_json(std::span<const KdvLimitRecord> records, const KdvLimitConfig& config);

// [{inequality, epsilon, sigma, r, t, trials, worst_ratio, pass}, ...]
std::string render_lemma_json(std::span<const LemmaResult> results);

void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace bbm
