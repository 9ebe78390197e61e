#include "bbm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>

#include "bbm/errors.hpp"
#include "bbm/nonlinear_flow.hpp"

namespace bbm {
namespace {

// Runs fn(i) for i in [0, count) on a small worker pool. Results must be
// written to per-index slots; the first exception escaping fn is rethrown.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

bool same_value(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); }

}  // namespace

std::string_view version() {
#ifdef BBM_VERSION
  return BBM_VERSION;
#else
  return "unknown";
#endif
}

InitialDatum parse_datum(std::string_view text) {
  if (text == "standard") return InitialDatum::standard;
  if (text == "sine") return InitialDatum::sine;
  throw std::invalid_argument("unknown initial datum '" + std::string(text) + "'");
}

std::string_view datum_name(InitialDatum datum) {
  return datum == InitialDatum::standard ? "standard" : "sine";
}

Field initial_datum(const GridPtr& grid, InitialDatum datum) {
  if (datum == InitialDatum::sine) return Field::from_function(grid, [](double x) { return std::sin(x); });
  return Field::from_function(grid, [](double x) { return 3.0 * std::sin(2.0 * x) / (2.0 - std::cos(x)); });
}

std::string_view flag_name(CellFlag flag) {
  switch (flag) {
    case CellFlag::ok:
      return "ok";
    case CellFlag::blowup:
      return "blowup";
    case CellFlag::invalid_config:
      return "invalid_config";
    case CellFlag::numerical_failure:
      return "numerical_failure";
  }
  return "unknown";
}

std::vector<double> default_taus() {
  std::vector<double> taus;
  for (int n : {50, 100, 200, 500, 1000, 2000, 5000}) taus.push_back(5.0 / n);
  return taus;
}

std::vector<double> default_epsilons() {
  std::vector<double> eps;
  for (int i = 1; i <= 10; ++i) eps.push_back(i / 10.0);
  return eps;
}

void StudyConfig::validate() const {
  if (schemes.empty() || epsilons.empty() || taus.empty()) throw std::invalid_argument("study lists must be nonempty");
  if (n_points < 4 || n_points % 2 != 0) throw std::invalid_argument("grid size must be even and >= 4");
  if (!(final_time > 0.0)) throw std::invalid_argument("final time must be positive");
  if (!(norm_r >= 0.0)) throw std::invalid_argument("norm index r must be >= 0");
  for (double e : epsilons) {
    if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  }
}

std::vector<ConvergenceRecord> convergence_study(const StudyConfig& config) {
  config.validate();
  const GridPtr grid = make_grid(config.n_points, config.dealias);
  const Field u0 = initial_datum(grid, config.datum);

  std::vector<std::optional<Field>> reference(config.epsilons.size());
  std::vector<std::string> reference_error(config.epsilons.size());
  parallel_for(config.epsilons.size(), config.threads, [&](std::size_t i) {
    try {
      reference[i] = adaptive_reference(bbm_system(grid, config.epsilons[i], config.polynomial), u0,
                                        config.final_time, config.reference_tol);
    } catch (const NumericalFailure& e) {
      reference_error[i] = e.what();
    }
  });

  std::vector<ConvergenceRecord> records;
  for (SchemeName s : config.schemes) {
    for (double e : config.epsilons) {
      for (double t : config.taus) records.push_back(ConvergenceRecord{s, e, t, 0.0, 0.0, 0.0, CellFlag::ok, {}});
    }
  }
  const std::size_t per_scheme = config.epsilons.size() * config.taus.size();

  parallel_for(records.size(), config.threads, [&](std::size_t i) {
    ConvergenceRecord& rec = records[i];
    const std::size_t eps_index = (i % per_scheme) / config.taus.size();
    if (!reference[eps_index]) {
      rec.flag = CellFlag::numerical_failure;
      rec.message = "reference failed: " + reference_error[eps_index];
      return;
    }
    const auto start = std::chrono::steady_clock::now();
    try {
      const std::size_t steps = checked_step_count(rec.tau, config.final_time);
      const auto stepper =
          SplittingStepper::for_bbm(scheme_coefficients(rec.scheme), grid, rec.epsilon, config.polynomial, rec.tau);
      const Field u = integrate(stepper, u0, steps).final_state;
      const Field diff = u - *reference[eps_index];
      rec.error_l2 = sobolev_norm(diff, 0.0);
      rec.error_hr = sobolev_norm(diff, config.norm_r);
    } catch (const BlowUpError& ex) {
      rec.flag = CellFlag::blowup;
      rec.message = ex.what();
    } catch (const NumericalFailure& ex) {
      rec.flag = CellFlag::numerical_failure;
      rec.message = ex.what();
    } catch (const std::invalid_argument& ex) {
      rec.flag = CellFlag::invalid_config;
      rec.message = ex.what();
    }
    if (config.record_timing) rec.runtime_ms = elapsed_ms(start);
  });
  return records;
}

EocFit fit_order(std::span<const ConvergenceRecord> records, SchemeName scheme, double epsilon,
                 const EocOptions& options) {
  std::map<double, double> by_tau;
  for (const auto& r : records) {
    if (r.scheme != scheme || !same_value(r.epsilon, epsilon) || r.flag != CellFlag::ok) continue;
    if (!std::isfinite(r.error_l2) || r.error_l2 <= options.accuracy_floor) continue;
    by_tau.emplace(r.tau, r.error_l2);
  }
  if (by_tau.size() < 3) {
    throw InsufficientDataError("estimate_order: need at least 3 usable records at distinct tau for " +
                                std::string(scheme_name(scheme)));
  }
  std::vector<double> taus, errors;
  for (const auto& [t, e] : by_tau) {
    taus.push_back(t);
    errors.push_back(e);
  }
  std::vector<double> local;
  for (std::size_t i = 0; i + 1 < taus.size(); ++i) {
    local.push_back(std::log(errors[i + 1] / errors[i]) / std::log(taus[i + 1] / taus[i]));
  }

  // Window [first, last] over points; its local slopes are local[first .. last-1].
  std::size_t best_first = 0, best_last = taus.size() - 1;
  std::size_t best_len = 0;
  for (std::size_t first = 0; first + 2 < taus.size(); ++first) {
    double lo = local[first], hi = local[first], sum = local[first];
    for (std::size_t last = first + 2; last < taus.size(); ++last) {
      const double s = local[last - 1];
      lo = std::min(lo, s);
      hi = std::max(hi, s);
      sum += s;
      const double mean = sum / static_cast<double>(last - first);
      if (hi - lo > options.stability_tolerance * std::abs(mean)) break;
      const std::size_t len = last - first + 1;
      if (len >= best_len) {
        best_len = len;
        best_first = first;
        best_last = last;
      }
    }
  }
  if (best_len < 3) {
    best_first = 0;
    best_last = taus.size() - 1;
  }
  EocFit fit;
  fit.taus.assign(taus.begin() + static_cast<std::ptrdiff_t>(best_first),
                  taus.begin() + static_cast<std::ptrdiff_t>(best_last) + 1);
  fit.errors.assign(errors.begin() + static_cast<std::ptrdiff_t>(best_first),
                    errors.begin() + static_cast<std::ptrdiff_t>(best_last) + 1);
  fit.order = loglog_slope(fit.taus, fit.errors);
  return fit;
}

double estimate_order(std::span<const ConvergenceRecord> records, SchemeName scheme, double epsilon,
                      const EocOptions& options) {
  return fit_order(records, scheme, epsilon, options).order;
}

double epsilon_scaling(std::span<const ConvergenceRecord> records, SchemeName scheme, double tau) {
  std::map<double, double> by_eps;
  bool any = false;
  for (const auto& r : records) {
    if (r.scheme != scheme || !same_value(r.tau, tau) || r.flag != CellFlag::ok) continue;
    any = true;
    if (r.error_l2 > 0.0 && std::isfinite(r.error_l2) && r.epsilon > 0.0) by_eps.emplace(r.epsilon, r.error_l2);
  }
  if (any && by_eps.empty()) throw InsufficientDataError("epsilon_scaling: all errors are zero");
  if (by_eps.size() < 4) throw InsufficientDataError("epsilon_scaling: need at least 4 epsilon values");
  std::vector<double> eps, err;
  for (const auto& [e, v] : by_eps) {
    eps.push_back(e);
    err.push_back(v);
  }
  return loglog_slope(eps, err);
}

std::vector<KdvLimitRecord> kdv_limit_study(const KdvLimitConfig& config) {
  if (!config.polynomial.is_classical()) {
    throw std::invalid_argument("kdv_limit_study: the KdV limit holds only for P = d/dx");
  }
  if (config.epsilons.empty()) throw std::invalid_argument("kdv_limit_study: empty epsilon list");
  for (double e : config.epsilons) {
    if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("kdv_limit_study: epsilon must lie in [0, 1]");
  }
  const std::size_t steps = checked_step_count(config.tau, config.final_time);
  const GridPtr grid = make_grid(config.n_points, config.dealias);
  const Field u0 = initial_datum(grid, config.datum);
  const SchemeSpec lie = scheme_coefficients(SchemeName::lie);

  std::vector<KdvLimitRecord> records(config.epsilons.size());
  parallel_for(records.size(), config.threads, [&](std::size_t i) {
    const double eps = config.epsilons[i];
    const auto start = std::chrono::steady_clock::now();
    const auto stepper = SplittingStepper::for_bbm(lie, grid, eps, config.polynomial, config.tau);
    const Field bbm = integrate(stepper, u0, steps).final_state;
    const Field kdv = kdv_solve(u0, config.final_time, config.tau, eps);
    records[i] = {eps, config.tau, l2_distance(bbm, kdv), config.record_timing ? elapsed_ms(start) : 0.0};
  });
  return records;
}

double kdv_limit_slope(std::span<const KdvLimitRecord> records) {
  std::vector<double> eps, diff;
  for (const auto& r : records) {
    if (r.epsilon > 0.0 && r.difference_l2 > 0.0) {
      eps.push_back(r.epsilon);
      diff.push_back(r.difference_l2);
    }
  }
  if (eps.size() < 2) throw InsufficientDataError("kdv_limit_slope: need two positive epsilons");
  return loglog_slope(eps, diff);
}

}  // namespace bbm
