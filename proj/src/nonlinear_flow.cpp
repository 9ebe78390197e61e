#include "bbm/nonlinear_flow.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bbm/errors.hpp"

namespace bbm {

NonlinearFlow::NonlinearFlow(OperatorSymbol b, int order) : b_(std::move(b)), order_(order) {
  if (order < 1 || order > 4) {
    throw std::invalid_argument("NonlinearFlow: order must be 1..4, got " + std::to_string(order));
  }
}

Field NonlinearFlow::step(const Field& w, double tau) const {
  require_same_grid(b_.grid(), w.grid(), "NonlinearFlow::step");
  if (tau == 0.0) return w;

  const GridPtr& grid = w.grid_ptr();
  const auto B = [&](Field f) {
    apply_in_place(b_, f);
    return f;
  };

  const auto w_s = w.samples();
  const Field a1 = B(product_of_samples(grid, w_s, w_s));
  Field out = w;
  out.axpy(-tau, a1);
  if (order_ == 1) return out;

  const auto a1_s = a1.samples();
  const Field b1 = B(product_of_samples(grid, w_s, a1_s));
  const double tau2 = tau * tau;
  out.axpy(tau2, b1);
  if (order_ == 2) return out;

  const auto b1_s = b1.samples();
  const Field c1 = B(product_of_samples(grid, a1_s, a1_s));
  const Field c2 = B(product_of_samples(grid, w_s, b1_s));
  const double tau3 = tau2 * tau;
  out.axpy(-tau3 / 3.0, c1);
  out.axpy(-2.0 * tau3 / 3.0, c2);
  if (order_ == 3) return out;

  const Field d1 = B(product_of_samples(grid, a1_s, b1_s));
  const Field d2 = B(product_of_samples(grid, w_s, c1.samples()));
  const Field d3 = B(product_of_samples(grid, w_s, c2.samples()));
  const double tau4 = tau3 * tau;
  out.axpy(tau4 / 2.0, d1);
  out.axpy(tau4 / 6.0, d2);
  out.axpy(tau4 / 3.0, d3);
  return out;
}

Field taylor_step(const NonlinearFlow& flow, const Field& w, double tau) { return flow.step(w, tau); }

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("loglog_slope: length mismatch");
  if (x.size() < 2) throw InsufficientDataError("loglog_slope: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("loglog_slope: values must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw InsufficientDataError("loglog_slope: x values are not distinct");
  return sxy / sxx;
}

LocalOrderResult local_order_check(const NonlinearFlow& flow, const Field& w0, std::span<const double> taus,
                                   const SubflowOracle& oracle) {
  if (taus.size() < 2) throw InsufficientDataError("local_order_check: need at least two step sizes");
  LocalOrderResult result;
  for (double tau : taus) {
    if (!(tau > 0.0)) throw std::invalid_argument("local_order_check: step sizes must be positive");
    result.taus.push_back(tau);
    result.errors.push_back(l2_distance(flow.step(w0, tau), oracle(w0, tau)));
  }
  bool all_zero = true;
  for (double e : result.errors) all_zero = all_zero && e == 0.0;
  result.slope = all_zero ? 0.0 : loglog_slope(result.taus, result.errors);
  return result;
}

}  // namespace bbm
