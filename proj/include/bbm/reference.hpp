#pragma once

// High-accuracy oracles: Dormand-Prince 5(4) on the Fourier coefficient
// vector, optionally in integrating-factor form when a stiff linear part is
// supplied, plus the KdV-limit splitting solver.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>

#include "bbm/dispersion.hpp"
#include "bbm/spectral.hpp"

namespace bbm {

// du/dt = rhs(u)                          when linear_generator is empty
// du/dt = -linear_generator u + rhs(u)    otherwise; the linear part is
//                                         then propagated exactly.
struct OdeSystem {
  GridPtr grid;
  std::function<Field(const Field&)> rhs;
  std::optional<OperatorSymbol> linear_generator;
  std::string description;
};

struct ToleranceSpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  std::size_t max_steps = 2'000'000;
};

struct ControllerConstants {
  double safety = 0.9;
  double min_factor = 0.2;
  double max_factor = 5.0;
};

struct AdaptiveStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
  ControllerConstants controller;
};

// -L_eps,lambda u - eps L_eps (u^2)
Field bbm_rhs(double epsilon, const DispersionPolynomial& p, const Field& u);

OdeSystem bbm_system(const GridPtr& grid, double epsilon, const DispersionPolynomial& p,
                     bool integrating_factor = false);

// d/dt w = -B(w^2)
OdeSystem subproblem_system(const OperatorSymbol& b);

// KdV: u_t + u_x + eps (u^2)_x + eps u_xxx = 0, linear part exact.
OdeSystem kdv_system(const GridPtr& grid, double epsilon);

// Symbols of the KdV splitting: generator ik + eps (ik)^3 and multiplier eps ik.
OperatorSymbol kdv_linear_generator(const GridPtr& grid, double epsilon);
OperatorSymbol kdv_nonlinear_multiplier(const GridPtr& grid, double epsilon);

// u(T) by error-per-unit-step control: every accepted step has local error
// below tol * h / T (max norm, per coefficient), hence below tol. Throws
// ConvergenceFailure when max_steps is exceeded.
Field adaptive_reference(const OdeSystem& system, const Field& u0, double final_time, const ToleranceSpec& tol = {},
                         AdaptiveStats* stats = nullptr, const ControllerConstants& controller = {});

Field subproblem_oracle(const OperatorSymbol& b, const Field& w0, double tau, const ToleranceSpec& tol = {});

// yoshida4 splitting of KdV with an order-4 Taylor flow; tau must divide T.
Field kdv_solve(const Field& u0, double final_time, double tau, double epsilon);

}  // namespace bbm
