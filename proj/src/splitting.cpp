#include "bbm/splitting.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "bbm/errors.hpp"

namespace bbm {

std::string_view scheme_name(SchemeName name) {
  switch (name) {
    case SchemeName::lie:
      return "lie";
    case SchemeName::strang:
      return "strang";
    case SchemeName::ruth3:
      return "ruth3";
    case SchemeName::yoshida4:
      return "yoshida4";
  }
  return "unknown";
}

SchemeName parse_scheme(std::string_view text) {
  for (SchemeName s : all_schemes()) {
    if (scheme_name(s) == text) return s;
  }
  throw std::invalid_argument("unknown scheme '" + std::string(text) + "'");
}

const std::array<SchemeName, 4>& all_schemes() {
  static constexpr std::array<SchemeName, 4> list{SchemeName::lie, SchemeName::strang, SchemeName::ruth3,
                                                  SchemeName::yoshida4};
  return list;
}

SchemeSpec scheme_coefficients(SchemeName name) {
  switch (name) {
    case SchemeName::lie:
      return {name, {{1.0, 1.0}}, 1, 1};
    case SchemeName::strang:
      // Psi2^{tau/2} o Psi1^{tau} o Psi2^{tau/2}
      return {name, {{0.0, 0.5}, {1.0, 0.5}}, 2, 2};
    case SchemeName::ruth3:
      return {name, {{7.0 / 24.0, 2.0 / 3.0}, {3.0 / 4.0, -2.0 / 3.0}, {-1.0 / 24.0, 1.0}}, 3, 3};
    case SchemeName::yoshida4: {
      const double cbrt2 = std::cbrt(2.0);
      const double s1 = 1.0 / (2.0 - cbrt2);
      const double s2 = -cbrt2 / (2.0 - cbrt2);
      return {name, {{0.0, s1 / 2.0}, {s1, (s1 + s2) / 2.0}, {s2, (s1 + s2) / 2.0}, {s1, s1 / 2.0}}, 4, 4};
    }
  }
  throw std::invalid_argument("unknown scheme");
}

SchemeSpec scheme_coefficients(std::string_view name) { return scheme_coefficients(parse_scheme(name)); }

std::size_t checked_step_count(double tau, double final_time) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be positive and finite");
  if (!(final_time > 0.0) || !std::isfinite(final_time)) throw std::invalid_argument("final time must be positive");
  if (tau > final_time * (1.0 + 1e-12)) throw std::invalid_argument("tau must not exceed the final time");
  const double n = std::round(final_time / tau);
  if (std::abs(n * tau - final_time) > 1e-12 * final_time) {
    throw std::invalid_argument("tau = " + std::to_string(tau) + " does not divide T = " + std::to_string(final_time));
  }
  return static_cast<std::size_t>(n);
}

std::size_t TrajectoryConfig::step_count() const { return checked_step_count(tau, final_time); }

SplittingStepper::SplittingStepper(const SchemeSpec& spec, OperatorSymbol nonlinear_multiplier,
                                   const OperatorSymbol& linear_generator, double tau)
    : flow_(std::move(nonlinear_multiplier), spec.nonlinear_order), tau_(tau) {
  require_same_grid(flow_.multiplier().grid(), linear_generator.grid(), "SplittingStepper");
  for (const Stage& s : spec.stages) {
    StagePlan p{s.c * tau, std::nullopt};
    if (s.d != 0.0) p.propagator = linear_propagator(linear_generator, s.d * tau);
    plan_.push_back(std::move(p));
  }
}

SplittingStepper SplittingStepper::for_bbm(const SchemeSpec& spec, const GridPtr& grid, double epsilon,
                                           const DispersionPolynomial& p, double tau) {
  return SplittingStepper(spec, symbol_L_eps(grid, epsilon).scaled(epsilon), symbol_L_eps_lambda(grid, epsilon, p),
                          tau);
}

Field SplittingStepper::step(const Field& u) const {
  Field state = u;
  for (const StagePlan& p : plan_) {
    if (p.nonlinear_time != 0.0) state = flow_.step(state, p.nonlinear_time);
    if (p.propagator) apply_in_place(*p.propagator, state);
  }
  return state;
}

Field step(const SchemeSpec& spec, const TrajectoryConfig& config, const Field& u) {
  return SplittingStepper::for_bbm(spec, u.grid_ptr(), config.epsilon, config.polynomial, config.tau).step(u);
}

Trajectory integrate(const SplittingStepper& stepper, const Field& u0, std::size_t steps,
                     const IntegrateOptions& options) {
  if (options.store_trajectory && options.snapshot_stride == 0) {
    throw std::invalid_argument("snapshot stride must be positive");
  }
  Trajectory traj{u0, {}};
  if (options.store_trajectory) traj.snapshots.push_back({0, 0.0, u0});
  for (std::size_t n = 1; n <= steps; ++n) {
    traj.final_state = stepper.step(traj.final_state);
    if (!traj.final_state.is_finite()) throw BlowUpError(n, "splitting step");
    if (options.store_trajectory && (n % options.snapshot_stride == 0 || n == steps)) {
      traj.snapshots.push_back({n, static_cast<double>(n) * stepper.tau(), traj.final_state});
    }
  }
  return traj;
}

Trajectory integrate(const SchemeSpec& spec, const TrajectoryConfig& config, const IntegrateOptions& options) {
  const std::size_t steps = config.step_count();
  const auto stepper =
      SplittingStepper::for_bbm(spec, config.u0.grid_ptr(), config.epsilon, config.polynomial, config.tau);
  return integrate(stepper, config.u0, steps, options);
}

void write_snapshots_csv(std::ostream& os, const SchemeSpec& spec, double epsilon, double tau,
                         const std::vector<Snapshot>& snapshots) {
  char buf[96];
  bool first = true;
  for (const Snapshot& s : snapshots) {
    if (!first) os << '\n';
    first = false;
    os << "# scheme=" << scheme_name(spec.name) << '\n';
    std::snprintf(buf, sizeof buf, "# epsilon=%.17g\n# tau=%.17g\n# t=%.17g\n", epsilon, tau, s.time);
    os << buf << "x,u\n";
    const auto u = s.state.samples();
    const auto& grid = s.state.grid();
    for (int j = 0; j < grid.n_points(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", grid.x(j), u[static_cast<std::size_t>(j)]);
      os << buf;
    }
  }
}

}  // namespace bbm
