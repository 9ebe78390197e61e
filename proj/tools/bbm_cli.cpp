// bbmsplit: command-line driver for trajectories, studies and checks.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "bbm/errors.hpp"
#include "bbm/harness.hpp"
#include "bbm/nonlinear_flow.hpp"
#include "bbm/reference.hpp"

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitNumerical = 2;

struct Options {
  std::vector<std::string> schemes;
  std::vector<double> epsilons;
  std::vector<double> taus;
  std::vector<double> sigmas;
  std::vector<double> dispersion;
  int modes = 200;
  double time = 5.0;
  double norm_r = 1.0;
  std::string out;
  std::string format;
  std::uint64_t seed = 0;
  bool dealias = false;
  std::string datum = "standard";
  unsigned threads = 0;
  bool timings = false;
  std::size_t stride = 0;
  int trials = 100;
  double lemma_t = 1.0;
  std::string weight = "bracket";
  std::vector<int> orders;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bbm::DispersionPolynomial polynomial(const Options& o) {
  return o.dispersion.empty() ? bbm::DispersionPolynomial::classical() : bbm::DispersionPolynomial(o.dispersion);
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty() || o.out == "-") {
    std::cout << text;
  } else {
    bbm::write_text_file(o.out, text);
  }
}

double single(const std::vector<double>& values, double fallback, const char* name) {
  if (values.empty()) return fallback;
  if (values.size() != 1) throw std::invalid_argument(std::string("simulate takes a single --") + name);
  return values.front();
}

int run_simulate(const Options& o) {
  const std::string scheme = o.schemes.empty() ? "strang" : o.schemes.front();
  if (o.schemes.size() > 1) throw std::invalid_argument("simulate takes a single --scheme");
  const bbm::SchemeSpec spec = bbm::scheme_coefficients(scheme);
  const double eps = single(o.epsilons, 0.1, "epsilon");
  const double tau = single(o.taus, 1e-2, "tau");
  const auto grid = bbm::make_grid(o.modes, o.dealias);
  const bbm::TrajectoryConfig config{eps, polynomial(o), tau, o.time,
                                     bbm::initial_datum(grid, bbm::parse_datum(o.datum))};
  const std::size_t steps = config.step_count();
  bbm::IntegrateOptions io;
  io.store_trajectory = true;
  io.snapshot_stride = o.stride == 0 ? steps : o.stride;
  const auto traj = bbm::integrate(spec, config, io);
  std::ostringstream os;
  bbm::write_snapshots_csv(os, spec, eps, tau, traj.snapshots);
  emit(o, os.str());
  std::cerr << "simulate: " << scheme << " eps=" << fmt(eps) << " tau=" << fmt(tau) << " steps=" << steps
            << " |u(T)|_L2=" << fmt(bbm::sobolev_norm(traj.final_state, 0.0)) << '\n';
  return 0;
}

int run_convergence(const Options& o) {
  bbm::StudyConfig config;
  if (!o.schemes.empty()) {
    config.schemes.clear();
    for (const auto& s : o.schemes) config.schemes.push_back(bbm::parse_scheme(s));
  }
  if (!o.epsilons.empty()) config.epsilons = o.epsilons;
  if (!o.taus.empty()) config.taus = o.taus;
  config.n_points = o.modes;
  config.dealias = o.dealias;
  config.final_time = o.time;
  config.norm_r = o.norm_r;
  config.datum = bbm::parse_datum(o.datum);
  config.polynomial = polynomial(o);
  config.threads = o.threads;
  config.record_timing = o.timings;
  config.seed = o.seed;
  const auto format = bbm::parse_format(o.format.empty() ? "csv" : o.format);
  config.validate();

  const auto records = bbm::convergence_study(config);
  std::string text;
  switch (format) {
    case bbm::ReportFormat::csv:
      text = bbm::render_csv(records);
      break;
    case bbm::ReportFormat::json:
      text = bbm::render_json(records, config);
      break;
    case bbm::ReportFormat::plotdata:
      text = bbm::render_plotdata(records);
      break;
  }
  emit(o, text);

  bool failed = false;
  for (const auto& r : records) failed = failed || r.flag == bbm::CellFlag::numerical_failure;
  for (auto s : config.schemes) {
    for (double e : config.epsilons) {
      std::cerr << "eoc " << bbm::scheme_name(s) << " eps=" << fmt(e) << ": ";
      try {
        std::cerr << fmt(bbm::estimate_order(records, s, e)) << '\n';
      } catch (const bbm::InsufficientDataError&) {
        std::cerr << "n/a\n";
      }
    }
  }
  return failed ? kExitNumerical : 0;
}

int run_kdv_limit(const Options& o) {
  bbm::KdvLimitConfig config;
  if (!o.epsilons.empty()) config.epsilons = o.epsilons;
  if (o.taus.size() > 1) throw std::invalid_argument("kdv-limit takes a single --tau");
  if (!o.taus.empty()) config.tau = o.taus.front();
  config.final_time = o.time;
  config.n_points = o.modes;
  config.dealias = o.dealias;
  config.datum = bbm::parse_datum(o.datum);
  config.polynomial = polynomial(o);
  config.threads = o.threads;
  config.record_timing = o.timings;
  const std::string format = o.format.empty() ? "csv" : o.format;
  if (format != "csv" && format != "json") throw std::invalid_argument("kdv-limit supports csv and json");

  const auto records = bbm::kdv_limit_study(config);
  emit(o, format == "csv" ? bbm::render_kdv_csv(records) : bbm::render_kdv_json(records, config));
  try {
    std::cerr << "kdv-limit slope: " << fmt(bbm::kdv_limit_slope(records)) << '\n';
  } catch (const bbm::InsufficientDataError&) {
    std::cerr << "kdv-limit slope: n/a\n";
  }
  return 0;
}

int run_lemmas(const Options& o) {
  const auto grid = bbm::make_grid(o.modes, o.dealias);
  bbm::LemmaBatteryOptions opts;
  opts.trials = o.trials;
  if (o.seed != 0) opts.seed = o.seed;
  opts.polynomial = polynomial(o);
  if (o.weight == "bracket") {
    opts.weight = bbm::NormWeight::bracket;
  } else if (o.weight == "shifted") {
    opts.weight = bbm::NormWeight::shifted;
  } else {
    throw std::invalid_argument("unknown norm weight '" + o.weight + "'");
  }
  std::vector<bbm::LemmaResult> results;
  if (o.epsilons.empty() && o.sigmas.empty()) {
    results = bbm::lemma_battery(grid, bbm::default_lemma_settings(), opts);
  } else {
    const std::vector<double> eps = o.epsilons.empty() ? std::vector<double>{0.1, 1.0} : o.epsilons;
    const std::vector<double> sig = o.sigmas.empty() ? std::vector<double>{0.0, 0.5, 1.0} : o.sigmas;
    results = bbm::lemma_battery(grid, eps, sig, o.norm_r, o.lemma_t, opts);
  }
  emit(o, bbm::render_lemma_json(results));
  int violations = 0;
  for (const auto& r : results) violations += r.pass ? 0 : 1;
  std::cerr << "lemmas: " << results.size() << " checks, " << violations << " violated\n";
  return violations == 0 ? 0 : kExitNumerical;
}

int run_local_order(const Options& o) {
  const auto grid = bbm::make_grid(o.modes, o.dealias);
  const bbm::Field w0 = bbm::initial_datum(grid, bbm::parse_datum(o.datum));
  const std::vector<double> eps = o.epsilons.empty() ? std::vector<double>{0.1, 1.0} : o.epsilons;
  const std::vector<int> orders = o.orders.empty() ? std::vector<int>{1, 2, 3, 4} : o.orders;
  std::vector<double> taus = o.taus;
  if (taus.empty()) {
    for (int i = 0; i <= 5; ++i) taus.push_back(0.2 * std::pow(10.0, -i / 5.0));
  }
  const bbm::ToleranceSpec oracle_tol{1e-14, 1e-14, 2'000'000};

  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  bool ok = true;
  for (double e : eps) {
    const auto b = bbm::symbol_L_eps(grid, e).scaled(e);
    const bbm::SubflowOracle oracle = [&](const bbm::Field& w, double t) {
      return bbm::subproblem_oracle(b, w, t, oracle_tol);
    };
    for (int p : orders) {
      const auto res = bbm::local_order_check(bbm::NonlinearFlow(b, p), w0, taus, oracle);
      const bool pass = std::abs(res.slope - (p + 1)) <= 0.2;
      ok = ok && pass;
      rows.push_back({{"epsilon", e},
                      {"order", p},
                      {"slope", res.slope},
                      {"expected", p + 1},
                      {"pass", pass},
                      {"taus", res.taus},
                      {"errors", res.errors}});
      std::cerr << "local-order eps=" << fmt(e) << " p=" << p << ": slope " << fmt(res.slope) << '\n';
    }
  }
  emit(o, rows.dump(2) + '\n');
  return ok ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Splitting solvers for the BBM equation"};
  app.set_version_flag("--version", std::string(bbm::version()));
  app.set_config("--config", "", "flat key = value file; command-line flags take precedence");
  app.require_subcommand(1);
  Options o;

  app.add_option("--scheme", o.schemes, "lie, strang, ruth3, yoshida4 (comma separated)")->delimiter(',');
  app.add_option("--epsilon", o.epsilons, "epsilon value(s) in [0, 1]")->delimiter(',');
  app.add_option("--tau", o.taus, "step size(s); each must divide --time")->delimiter(',');
  app.add_option("--modes", o.modes, "number of grid points")->capture_default_str();
  app.add_option("--time", o.time, "final time")->capture_default_str();
  app.add_option("--norm-r", o.norm_r, "Sobolev index for error norms and lemma checks")->capture_default_str();
  app.add_option("--out", o.out, "output file (stdout when absent)");
  app.add_option("--format", o.format, "csv, json or plotdata");
  app.add_option("--seed", o.seed, "random seed for generated fields")->capture_default_str();
  app.add_flag("--dealias", o.dealias, "zero modes above n/3 after products");
  app.add_option("--datum", o.datum, "initial datum: standard or sine")->capture_default_str();
  app.add_option("--dispersion", o.dispersion, "odd coefficients a0,a1,... of P")->delimiter(',');
  app.add_option("--threads", o.threads, "worker threads (0: all cores)")->capture_default_str();
  app.add_flag("--timings", o.timings, "record wall-clock runtimes (reports become non-reproducible)");
  app.add_option("--stride", o.stride, "snapshot stride in steps (simulate)");
  app.add_option("--trials", o.trials, "random fields per lemma setting")->capture_default_str();
  app.add_option("--sigma", o.sigmas, "sigma values for the lemma battery")->delimiter(',');
  app.add_option("--lemma-t", o.lemma_t, "propagator time for the lemma battery")->capture_default_str();
  app.add_option("--weight", o.weight, "Sobolev weight for lemmas: bracket or shifted")->capture_default_str();
  app.add_option("--order", o.orders, "Taylor orders for local-order")->delimiter(',');

  auto* simulate = app.add_subcommand("simulate", "integrate one trajectory and export snapshots as CSV");
  auto* convergence = app.add_subcommand("convergence", "error versus tau over schemes and epsilons");
  auto* kdv = app.add_subcommand("kdv-limit", "distance between BBM and KdV solutions versus epsilon");
  auto* lemmas = app.add_subcommand("lemmas", "randomized operator inequality battery");
  auto* local = app.add_subcommand("local-order", "local order of the nonlinear Taylor flows");
  for (auto* sub : {simulate, convergence, kdv, lemmas, local}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*simulate) return run_simulate(o);
    if (*convergence) return run_convergence(o);
    if (*kdv) return run_kdv_limit(o);
    if (*lemmas) return run_lemmas(o);
    return run_local_order(o);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const bbm::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const bbm::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
