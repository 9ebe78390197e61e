#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "bbm/errors.hpp"
#include "bbm/nonlinear_flow.hpp"
#include "bbm/reference.hpp"
#include "doctest.h"

using namespace bbm;

namespace {

Field standard_datum(const GridPtr& g) {
  return Field::from_function(g, [](double x) { return 3.0 * std::sin(2.0 * x) / (2.0 - std::cos(x)); });
}

OperatorSymbol bbm_multiplier(const GridPtr& g, double eps) { return symbol_L_eps(g, eps).scaled(eps); }

}  // namespace

TEST_CASE("order one on sin x") {
  const auto g = make_grid(32);
  const double eps = 0.3, tau = 0.05;
  const Field w = Field::from_function(g, [](double x) { return std::sin(x); });
  const Field out = NonlinearFlow(bbm_multiplier(g, eps), 1).step(w, tau);
  const Field expected = Field::from_function(
      g, [&](double x) { return std::sin(x) - tau * eps * std::sin(2.0 * x) / (1.0 + 4.0 * eps); });
  CHECK(l2_distance(out, expected) < 1e-15);
}

TEST_CASE("trivial inputs") {
  const auto g = make_grid(64);
  const Field w = standard_datum(g);
  const Field c = Field::from_function(g, [](double) { return -1.7; });
  for (int p = 1; p <= 4; ++p) {
    const NonlinearFlow flow(bbm_multiplier(g, 0.5), p);
    CHECK(l2_distance(flow.step(w, 0.0), w) == 0.0);
    CHECK(l2_distance(flow.step(c, 0.3), c) == 0.0);
    CHECK(sobolev_norm(flow.step(Field::zero(g), 0.3), 0.0) == 0.0);
    CHECK(l2_distance(taylor_step(flow, w, 0.1), flow.step(w, 0.1)) == 0.0);
  }
  CHECK_THROWS_AS(NonlinearFlow(bbm_multiplier(g, 0.5), 0), std::invalid_argument);
  CHECK_THROWS_AS(NonlinearFlow(bbm_multiplier(g, 0.5), 5), std::invalid_argument);
  const NonlinearFlow other(bbm_multiplier(make_grid(32), 0.5), 2);
  CHECK_THROWS_AS(other.step(w, 0.1), std::invalid_argument);
}

TEST_CASE("mode 0 and reality are preserved") {
  const auto g = make_grid(200);
  const Field w = standard_datum(g) + Field::from_function(g, [](double) { return 0.4; });
  for (int p = 1; p <= 4; ++p) {
    const Field out = NonlinearFlow(bbm_multiplier(g, 1.0), p).step(w, -0.37);
    CHECK(out.coeff(0) == w.coeff(0));
    CHECK(std::abs(out.coeff(-100).imag()) <= 1e-12);
    // Real samples reproduce the same coefficients.
    const Field again = Field::from_samples(g, out.samples());
    CHECK(l2_distance(again, out) < 1e-12);
  }
}

TEST_CASE("each order adds exactly its tau^p term") {
  const auto g = make_grid(128);
  const auto b = bbm_multiplier(g, 0.7);
  const Field w = standard_datum(g);
  const double tau = 0.13;
  const auto B = [&](const Field& f) { return apply(b, f); };
  const auto mul = [](const Field& x, const Field& y) { return pointwise_product(x, y); };

  const Field a1 = B(mul(w, w));
  const Field b1 = B(mul(w, a1));
  const Field c1 = B(mul(a1, a1));
  const Field c2 = B(mul(w, b1));
  const Field d1 = B(mul(a1, b1));
  const Field d2 = B(mul(w, c1));
  const Field d3 = B(mul(w, c2));

  std::vector<Field> term{-tau * a1, tau * tau * b1,
                          std::pow(tau, 3) * (-1.0 / 3.0 * c1 + (-2.0 / 3.0) * c2),
                          std::pow(tau, 4) * (0.5 * d1 + (1.0 / 6.0) * d2 + (1.0 / 3.0) * d3)};
  Field prev = w;
  for (int p = 1; p <= 4; ++p) {
    const Field cur = NonlinearFlow(b, p).step(w, tau);
    CHECK(l2_distance(cur - prev, term[static_cast<std::size_t>(p - 1)]) < 1e-14);
    prev = cur;
  }
}

TEST_CASE("local order against the adaptive subproblem oracle") {
  const auto g = make_grid(200);
  const Field w0 = standard_datum(g);
  std::vector<double> taus;
  for (int i = 0; i <= 5; ++i) taus.push_back(0.2 * std::pow(10.0, -i / 5.0));
  const ToleranceSpec tol{1e-14, 1e-14, 2'000'000};
  for (double eps : {0.1, 1.0}) {
    const auto b = bbm_multiplier(g, eps);
    const SubflowOracle oracle = [&](const Field& w, double t) { return subproblem_oracle(b, w, t, tol); };
    for (int p = 1; p <= 4; ++p) {
      CAPTURE(eps);
      CAPTURE(p);
      const auto res = local_order_check(NonlinearFlow(b, p), w0, taus, oracle);
      CHECK(res.taus.size() == taus.size());
      CHECK(std::abs(res.slope - (p + 1)) <= 0.2);
    }
  }
}

TEST_CASE("a third-order flow with coefficient 1/6 at tau^3 loses an order") {
  const auto g = make_grid(200);
  const Field w0 = standard_datum(g);
  const auto b = bbm_multiplier(g, 1.0);
  const NonlinearFlow exact3(b, 3);
  std::vector<double> taus;
  for (int i = 0; i <= 5; ++i) taus.push_back(0.2 * std::pow(10.0, -i / 5.0));
  const ToleranceSpec tol{1e-14, 1e-14, 2'000'000};
  const SubflowOracle oracle = [&](const Field& w, double t) { return subproblem_oracle(b, w, t, tol); };

  // Same flow with -tau^3/6 B(a1^2) instead of -tau^3/3 B(a1^2).
  std::vector<double> errors;
  for (double t : taus) {
    const Field a1 = apply(b, pointwise_square(w0));
    const Field c1 = apply(b, pointwise_square(a1));
    const Field misprint = exact3.step(w0, t) + (std::pow(t, 3) / 6.0) * c1;
    errors.push_back(l2_distance(misprint, oracle(w0, t)));
  }
  CHECK(std::abs(loglog_slope(taus, errors) - 3.0) <= 0.2);
}

TEST_CASE("zero initial state gives zero local error") {
  const auto g = make_grid(64);
  const auto b = bbm_multiplier(g, 1.0);
  const std::vector<double> taus{0.1, 0.05, 0.02};
  const SubflowOracle oracle = [&](const Field& w, double t) { return subproblem_oracle(b, w, t); };
  const auto res = local_order_check(NonlinearFlow(b, 4), Field::zero(g), taus, oracle);
  for (double e : res.errors) CHECK(e == 0.0);
  CHECK(res.slope == 0.0);
  const std::vector<double> one{0.1};
  CHECK_THROWS_AS(local_order_check(NonlinearFlow(b, 4), Field::zero(g), one, oracle), InsufficientDataError);
}

TEST_CASE("loglog slope") {
  const std::vector<double> x{1.0, 2.0, 4.0, 8.0};
  const std::vector<double> y{3.0, 12.0, 48.0, 192.0};
  CHECK(loglog_slope(x, y) == doctest::Approx(2.0));
  const std::vector<double> bad{1.0, 0.0, 1.0, 1.0};
  CHECK_THROWS_AS(loglog_slope(x, bad), std::invalid_argument);
  const std::vector<double> same{2.0, 2.0, 2.0, 2.0};
  CHECK_THROWS_AS(loglog_slope(same, y), InsufficientDataError);
}
