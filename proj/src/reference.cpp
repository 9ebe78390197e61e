#include "bbm/reference.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "bbm/errors.hpp"
#include "bbm/splitting.hpp"

namespace bbm {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC{0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5.0},
    {3.0 / 40.0, 9.0 / 40.0},
    {44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0},
    {19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0},
    {9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0},
    {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0},
};
constexpr std::array<double, 7> kB{35.0 / 384.0,     0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
                                   11.0 / 84.0,      0.0};
constexpr std::array<double, 7> kBhat{5179.0 / 57600.0,  0.0,           7571.0 / 16695.0, 393.0 / 640.0,
                                      -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0};

// Evaluates the right-hand side in the frame of the current step: with an
// integrating factor, v(s) = exp(s G) u(t_n + s) and
// dv/ds = exp(s G) N(exp(-s G) v).
class StageEvaluator {
 public:
  StageEvaluator(const OdeSystem& system, AdaptiveStats& stats) : system_(system), stats_(stats) {}

  Field operator()(const Field& v, double s) const {
    ++stats_.rhs_evaluations;
    if (!system_.linear_generator || s == 0.0) return system_.rhs(v);
    const auto& g = *system_.linear_generator;
    Field u = apply(linear_propagator(g, s), v);
    return apply(linear_propagator(g, -s), system_.rhs(u));
  }

 private:
  const OdeSystem& system_;
  AdaptiveStats& stats_;
};

double scaled_error(const Field& err, const Field& y0, const Field& y1, const ToleranceSpec& tol) {
  const auto e = err.half_spectrum();
  const auto a = y0.half_spectrum();
  const auto b = y1.half_spectrum();
  double worst = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double scale = tol.abs_tol + tol.rel_tol * std::max(std::abs(a[i]), std::abs(b[i]));
    worst = std::max(worst, std::abs(e[i]) / scale);
  }
  return worst;
}

void check_tolerance(const ToleranceSpec& tol) {
  if (!(tol.abs_tol > 0.0) || !(tol.rel_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
  if (tol.max_steps == 0) throw std::invalid_argument("max_steps must be positive");
}

}  // namespace

Field bbm_rhs(double epsilon, const DispersionPolynomial& p, const Field& u) {
  return bbm_system(u.grid_ptr(), epsilon, p).rhs(u);
}

OdeSystem bbm_system(const GridPtr& grid, double epsilon, const DispersionPolynomial& p, bool integrating_factor) {
  auto linear = symbol_L_eps_lambda(grid, epsilon, p);
  auto nonlinear = symbol_L_eps(grid, epsilon).scaled(epsilon);
  OdeSystem sys{grid, {}, std::nullopt, "BBM"};
  if (integrating_factor) {
    sys.rhs = [nonlinear](const Field& u) { return -1.0 * apply(nonlinear, pointwise_square(u)); };
    sys.linear_generator = std::move(linear);
    sys.description = "BBM (integrating factor)";
  } else {
    sys.rhs = [linear, nonlinear](const Field& u) {
      Field out = apply(linear, u);
      out += apply(nonlinear, pointwise_square(u));
      return -1.0 * std::move(out);
    };
  }
  return sys;
}

OdeSystem subproblem_system(const OperatorSymbol& b) {
  return {b.grid_ptr(), [b](const Field& w) { return -1.0 * apply(b, pointwise_square(w)); }, std::nullopt,
          "quadratic subproblem"};
}

OperatorSymbol kdv_linear_generator(const GridPtr& grid, double epsilon) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("kdv: epsilon must be >= 0");
  return symbol_L_eps_lambda(grid, 0.0, DispersionPolynomial({1.0, epsilon}));
}

OperatorSymbol kdv_nonlinear_multiplier(const GridPtr& grid, double epsilon) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("kdv: epsilon must be >= 0");
  return symbol_L_eps(grid, 0.0).scaled(epsilon);
}

OdeSystem kdv_system(const GridPtr& grid, double epsilon) {
  auto b = kdv_nonlinear_multiplier(grid, epsilon);
  return {grid, [b](const Field& u) { return -1.0 * apply(b, pointwise_square(u)); },
          kdv_linear_generator(grid, epsilon), "KdV (integrating factor)"};
}

Field adaptive_reference(const OdeSystem& system, const Field& u0, double final_time, const ToleranceSpec& tol,
                         AdaptiveStats* stats, const ControllerConstants& controller) {
  check_tolerance(tol);
  if (!(final_time >= 0.0) || !std::isfinite(final_time)) throw std::invalid_argument("final time must be >= 0");
  AdaptiveStats local;
  AdaptiveStats& st = stats ? *stats : local;
  st = AdaptiveStats{};
  st.controller = controller;
  if (final_time == 0.0) return u0;

  const StageEvaluator f(system, st);
  Field y = u0;

  // Starting step from the size of the state and of its derivative.
  double h;
  {
    const double d0 = sobolev_norm(y, 0.0);
    const double d1 = sobolev_norm(f(y, 0.0), 0.0);
    h = (d0 > 1e-5 && d1 > 1e-5) ? 0.01 * d0 / d1 : 1e-6;
    h = std::clamp(h, 1e-12 * final_time, final_time);
  }

  double t = 0.0;
  std::vector<Field> k;
  k.reserve(7);
  std::size_t attempts = 0;
  while (t < final_time) {
    if (++attempts > tol.max_steps) {
      throw ConvergenceFailure("adaptive_reference: exceeded " + std::to_string(tol.max_steps) + " steps");
    }
    const bool last = t + h >= final_time * (1.0 - 1e-14);
    if (last) h = final_time - t;

    k.clear();
    for (int i = 0; i < 7; ++i) {
      Field stage = y;
      for (int j = 0; j < i; ++j) {
        if (kA[i][j] != 0.0) stage.axpy(h * kA[i][j], k[static_cast<std::size_t>(j)]);
      }
      k.push_back(f(stage, kC[static_cast<std::size_t>(i)] * h));
    }
    Field y_new = y;
    Field err = Field::zero(y.grid_ptr());
    for (std::size_t i = 0; i < 7; ++i) {
      if (kB[i] != 0.0) y_new.axpy(h * kB[i], k[i]);
      err.axpy(h * (kB[i] - kBhat[i]), k[i]);
    }

    // Error per unit step: the local budget is tol * h / T, so the
    // accumulated error over [0, T] stays at the requested tolerance.
    const double e = scaled_error(err, y, y_new, tol) * final_time / h;
    if (!std::isfinite(e)) throw ConvergenceFailure("adaptive_reference: non-finite state");
    if (e <= 1.0) {
      t = last ? final_time : t + h;
      y = system.linear_generator ? apply(linear_propagator(*system.linear_generator, h), y_new) : std::move(y_new);
      ++st.accepted;
    } else {
      ++st.rejected;
    }
    const double factor = e == 0.0 ? controller.max_factor
                                   : std::clamp(controller.safety * std::pow(e, -0.25), controller.min_factor,
                                                controller.max_factor);
    h *= factor;
    if (h < 1e-14 * final_time && t < final_time) throw ConvergenceFailure("adaptive_reference: step size underflow");
  }
  return y;
}

Field subproblem_oracle(const OperatorSymbol& b, const Field& w0, double tau, const ToleranceSpec& tol) {
  require_same_grid(b.grid(), w0.grid(), "subproblem_oracle");
  return adaptive_reference(subproblem_system(b), w0, tau, tol);
}

Field kdv_solve(const Field& u0, double final_time, double tau, double epsilon) {
  const GridPtr& grid = u0.grid_ptr();
  const std::size_t steps = checked_step_count(tau, final_time);
  const SplittingStepper stepper(scheme_coefficients(SchemeName::yoshida4), kdv_nonlinear_multiplier(grid, epsilon),
                                 kdv_linear_generator(grid, epsilon), tau);
  return integrate(stepper, u0, steps).final_state;
}

}  // namespace bbm
