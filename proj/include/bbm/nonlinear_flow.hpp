#pragma once

// Truncated Taylor flows for the quadratic subproblem
//     d/dt w = -B(w^2),
// generic in the Fourier multiplier B (eps L_eps for BBM, eps d/dx for KdV).
// With a1 = B(w^2) the step of order p is
//     p=1: w - tau a1
//     p=2: + tau^2 B(w a1)
//     p=3: - tau^3/3 B(a1^2) - 2 tau^3/3 B(w B(w a1))
//     p=4: + tau^4/2 B(a1 B(w a1)) + tau^4/6 B(w B(a1^2)) + tau^4/3 B(w B(w B(w a1)))
// which is the Taylor expansion of the Duhamel form w(tau) = w - B int_0^tau w^2.

#include <functional>
#include <span>

#include "bbm/dispersion.hpp"
#include "bbm/spectral.hpp"

namespace bbm {

class NonlinearFlow {
 public:
  NonlinearFlow(OperatorSymbol b, int order);

  const OperatorSymbol& multiplier() const noexcept { return b_; }
  int order() const noexcept { return order_; }

  // tau may be negative.
  Field step(const Field& w, double tau) const;

 private:
  OperatorSymbol b_;
  int order_;
};

Field taylor_step(const NonlinearFlow& flow, const Field& w, double tau);

// Exact (to tolerance) solution of the subproblem over [0, tau] from w0.
using SubflowOracle = std::function<Field(const Field& w0, double tau)>;

struct LocalOrderResult {
  double slope;
  std::vector<double> taus;
  std::vector<double> errors;  // L2 distance to the oracle per tau
};

// Least-squares slope of log error vs log tau. An identically zero error
// (e.g. w0 = 0) gives slope 0 with all-zero errors.
LocalOrderResult local_order_check(const NonlinearFlow& flow, const Field& w0, std::span<const double> taus,
                                   const SubflowOracle& oracle);

// Least-squares slope of log(y) vs log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace bbm
