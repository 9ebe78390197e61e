#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bbm/errors.hpp"
#include "bbm/reference.hpp"
#include "bbm/splitting.hpp"
#include "doctest.h"

using namespace bbm;

namespace {

Field standard_datum(const GridPtr& g) {
  return Field::from_function(g, [](double x) { return 3.0 * std::sin(2.0 * x) / (2.0 - std::cos(x)); });
}

TrajectoryConfig make_config(const GridPtr& g, double eps, double tau, double T) {
  return {eps, DispersionPolynomial::classical(), tau, T, standard_datum(g)};
}

}  // namespace

TEST_CASE("scheme tables") {
  const auto ruth = scheme_coefficients("ruth3");
  REQUIRE(ruth.stages.size() == 3);
  CHECK(ruth.stages[0].c == 7.0 / 24.0);
  CHECK(ruth.stages[1].c == 3.0 / 4.0);
  CHECK(ruth.stages[2].c == -1.0 / 24.0);
  CHECK(ruth.stages[0].d == 2.0 / 3.0);
  CHECK(ruth.stages[1].d == -2.0 / 3.0);
  CHECK(ruth.stages[2].d == 1.0);
  CHECK(ruth.nonlinear_order == 3);

  const auto y = scheme_coefficients(SchemeName::yoshida4);
  REQUIRE(y.stages.size() == 4);
  const double s1 = y.stages[1].c, s2 = y.stages[2].c;
  CHECK(s1 == doctest::Approx(1.3512071919596578).epsilon(1e-15));
  CHECK(s2 == doctest::Approx(-1.7024143839193155).epsilon(1e-15));
  CHECK(y.stages[0].c == 0.0);
  CHECK(y.stages[3].c == s1);
  // Palindromic d sequence.
  CHECK(y.stages[0].d == y.stages[3].d);
  CHECK(y.stages[1].d == y.stages[2].d);

  const auto strang = scheme_coefficients("strang");
  CHECK(strang.stages.size() == 2);
  CHECK(strang.stages[0].c == 0.0);
  CHECK(strang.stages[0].d == 0.5);

  for (SchemeName n : all_schemes()) {
    const auto spec = scheme_coefficients(n);
    double sc = 0.0, sd = 0.0;
    for (const auto& st : spec.stages) {
      sc += st.c;
      sd += st.d;
    }
    CHECK(std::abs(sc - 1.0) <= 1e-15);
    CHECK(std::abs(sd - 1.0) <= 1e-15);
    CHECK(spec.nonlinear_order >= spec.formal_order);
    CHECK(parse_scheme(scheme_name(n)) == n);
  }
  CHECK_THROWS_AS(scheme_coefficients("rk4"), std::invalid_argument);
  CHECK_THROWS_AS(parse_scheme(""), std::invalid_argument);
}

TEST_CASE("lie step matches its closed form") {
  const auto g = make_grid(128);
  const double eps = 0.4, tau = 0.03;
  const auto cfg = make_config(g, eps, tau, 1.2);
  const Field u1 = step(scheme_coefficients(SchemeName::lie), cfg, cfg.u0);
  const auto gen = symbol_L_eps_lambda(g, eps, cfg.polynomial);
  const Field inner = cfg.u0 - (tau * eps) * apply(symbol_L_eps(g, eps), pointwise_square(cfg.u0));
  CHECK(l2_distance(u1, apply(linear_propagator(gen, tau), inner)) < 1e-14);
}

TEST_CASE("strang step matches the expanded composed form") {
  const auto g = make_grid(200);
  for (double eps : {0.1, 1.0}) {
    const double tau = 0.05;
    const auto cfg = make_config(g, eps, tau, 1.0);
    const Field u1 = step(scheme_coefficients(SchemeName::strang), cfg, cfg.u0);

    const auto gen = symbol_L_eps_lambda(g, eps, cfg.polynomial);
    const auto half = linear_propagator(gen, tau / 2.0);
    const auto full = linear_propagator(gen, tau);
    const auto L = symbol_L_eps(g, eps);
    const Field v = apply(half, cfg.u0);
    const Field lv2 = apply(L, pointwise_square(v));
    Field expected = apply(full, cfg.u0);
    expected -= (tau * eps) * apply(half, lv2);
    expected += (tau * tau * eps * eps) * apply(half, apply(L, pointwise_product(v, lv2)));
    CHECK(l2_distance(u1, expected) < 1e-13);
  }
}

TEST_CASE("zero step is the identity") {
  const auto g = make_grid(64);
  const auto cfg = make_config(g, 0.5, 0.0, 1.0);
  for (SchemeName n : all_schemes()) {
    CHECK(l2_distance(step(scheme_coefficients(n), cfg, cfg.u0), cfg.u0) < 1e-15);
  }
}

TEST_CASE("step counts require tau to divide T") {
  CHECK(checked_step_count(0.01, 5.0) == 500);
  CHECK(checked_step_count(5.0 / 3000.0, 5.0) == 3000);
  CHECK(checked_step_count(1.0, 1.0) == 1);
  CHECK_THROWS_AS(checked_step_count(0.3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(checked_step_count(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(checked_step_count(-0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(checked_step_count(2.0, 1.0), std::invalid_argument);
}

TEST_CASE("mode 0 is conserved over a full trajectory") {
  const auto g = make_grid(200);
  const Field shift = Field::from_function(g, [](double) { return 0.25; });
  for (SchemeName n : all_schemes()) {
    TrajectoryConfig cfg = make_config(g, 1.0, 1e-2, 5.0);
    cfg.u0 = cfg.u0 + shift;
    IntegrateOptions opts;
    opts.store_trajectory = true;
    opts.snapshot_stride = 50;
    const auto traj = integrate(scheme_coefficients(n), cfg, opts);
    CHECK(traj.snapshots.size() == 11);
    for (const auto& s : traj.snapshots) CHECK(std::abs(s.state.coeff(0) - cfg.u0.coeff(0)) <= 1e-12);
    CHECK(std::abs(traj.final_state.coeff(-100).imag()) <= 1e-10);
  }
}

TEST_CASE("lie conserves mode 0 at tau = 1e-3 over T = 5") {
  const auto g = make_grid(200);
  const auto cfg = make_config(g, 1.0, 1e-3, 5.0);
  const auto traj = integrate(scheme_coefficients(SchemeName::lie), cfg);
  CHECK(std::abs(traj.final_state.coeff(0) - cfg.u0.coeff(0)) <= 1e-12);
}

TEST_CASE("one-step trajectory equals a single step") {
  const auto g = make_grid(64);
  for (SchemeName n : all_schemes()) {
    const auto cfg = make_config(g, 0.7, 0.1, 0.1);
    const auto spec = scheme_coefficients(n);
    CHECK(l2_distance(integrate(spec, cfg).final_state, step(spec, cfg, cfg.u0)) == 0.0);
  }
}

TEST_CASE("strang is closer to the reference than lie") {
  const auto g = make_grid(200);
  const auto cfg = make_config(g, 1.0, 1e-2, 5.0);
  const Field ref = adaptive_reference(bbm_system(g, 1.0, cfg.polynomial), cfg.u0, 5.0);
  const double lie = l2_distance(integrate(scheme_coefficients(SchemeName::lie), cfg).final_state, ref);
  const double strang = l2_distance(integrate(scheme_coefficients(SchemeName::strang), cfg).final_state, ref);
  CHECK(lie < 1e-1);
  CHECK(strang < 1e-1);
  CHECK(strang < lie);
}

TEST_CASE("blow-up is reported with the failing step") {
  const auto g = make_grid(32);
  TrajectoryConfig cfg{1.0, DispersionPolynomial::classical(), 0.5, 5.0,
                       Field::from_function(g, [](double x) { return 1e200 * std::sin(x); })};
  try {
    integrate(scheme_coefficients(SchemeName::lie), cfg);
    FAIL("expected a blow-up");
  } catch (const BlowUpError& e) {
    CHECK(e.step() == 1);
    CHECK(std::string(e.what()).find("step 1") != std::string::npos);
  }
  CHECK_THROWS_AS(integrate(scheme_coefficients(SchemeName::lie), cfg), NumericalFailure);
}

TEST_CASE("stepper shares precomputed propagators") {
  const auto g = make_grid(64);
  const auto cfg = make_config(g, 0.3, 0.05, 1.0);
  const auto spec = scheme_coefficients(SchemeName::ruth3);
  const auto stepper = SplittingStepper::for_bbm(spec, g, 0.3, cfg.polynomial, 0.05);
  CHECK(stepper.tau() == 0.05);
  CHECK(l2_distance(stepper.step(cfg.u0), step(spec, cfg, cfg.u0)) == 0.0);
}

TEST_CASE("snapshot CSV layout") {
  const auto g = make_grid(4);
  const auto cfg = TrajectoryConfig{0.5, DispersionPolynomial::classical(), 0.5, 1.0,
                                    Field::from_function(g, [](double x) { return std::cos(x); })};
  IntegrateOptions opts;
  opts.store_trajectory = true;
  const auto spec = scheme_coefficients(SchemeName::lie);
  const auto traj = integrate(spec, cfg, opts);
  REQUIRE(traj.snapshots.size() == 3);
  std::ostringstream os;
  write_snapshots_csv(os, spec, 0.5, 0.5, traj.snapshots);
  std::istringstream is(os.str());
  std::vector<std::string> lines;
  for (std::string line; std::getline(is, line);) lines.push_back(line);
  // Three blocks of 4 header lines, "x,u", 4 rows, plus 2 separators.
  CHECK(lines.size() == 3 * 9 + 2);
  CHECK(lines[0] == "# scheme=lie");
  CHECK(lines[1] == "# epsilon=0.5");
  CHECK(lines[2] == "# tau=0.5");
  CHECK(lines[3] == "# t=0");
  CHECK(lines[4] == "x,u");
  CHECK(lines[5].rfind("-3.1415926535897931,", 0) == 0);
  CHECK(lines[9].empty());
  CHECK(lines[13] == "# t=0.5");
}
