#pragma once

// Composition engine for splitting schemes
//     u^{n+1} = (Psi2^{d_N tau} o Psi1^{c_N tau} o ... o Psi2^{d_1 tau} o Psi1^{c_1 tau})(u^n)
// where Psi2 is the exact linear flow and Psi1 a Taylor flow of the
// quadratic subproblem.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "bbm/dispersion.hpp"
#include "bbm/nonlinear_flow.hpp"
#include "bbm/spectral.hpp"

namespace bbm {

enum class SchemeName { lie, strang, ruth3, yoshida4 };

std::string_view scheme_name(SchemeName name);
SchemeName parse_scheme(std::string_view text);
const std::array<SchemeName, 4>& all_schemes();

struct Stage {
  double c;  // nonlinear weight, applied first
  double d;  // linear weight
};

struct SchemeSpec {
  SchemeName name;
  std::vector<Stage> stages;
  int nonlinear_order;
  int formal_order;
};

SchemeSpec scheme_coefficients(SchemeName name);
SchemeSpec scheme_coefficients(std::string_view name);

struct TrajectoryConfig {
  double epsilon;
  DispersionPolynomial polynomial;
  double tau;
  double final_time;
  Field u0;

  // round(T / tau); throws std::invalid_argument unless tau divides T to 1e-12 relative.
  std::size_t step_count() const;
};

std::size_t checked_step_count(double tau, double final_time);

// One full step of a scheme for fixed multipliers and tau. Propagators are
// precomputed, so a stepper can be shared read-only between threads.
class SplittingStepper {
 public:
  SplittingStepper(const SchemeSpec& spec, OperatorSymbol nonlinear_multiplier, const OperatorSymbol& linear_generator,
                   double tau);

  // BBM: nonlinear multiplier eps L_eps, linear generator L_eps,lambda.
  static SplittingStepper for_bbm(const SchemeSpec& spec, const GridPtr& grid, double epsilon,
                                  const DispersionPolynomial& p, double tau);

  Field step(const Field& u) const;
  double tau() const noexcept { return tau_; }

 private:
  struct StagePlan {
    double nonlinear_time;
    std::optional<OperatorSymbol> propagator;
  };
  NonlinearFlow flow_;
  std::vector<StagePlan> plan_;
  double tau_;
};

Field step(const SchemeSpec& spec, const TrajectoryConfig& config, const Field& u);

struct Snapshot {
  std::size_t step;
  double time;
  Field state;
};

struct IntegrateOptions {
  bool store_trajectory = false;
  std::size_t snapshot_stride = 1;  // in steps; the initial and final states are always kept
};

struct Trajectory {
  Field final_state;
  std::vector<Snapshot> snapshots;
};

// Throws BlowUpError naming the first step whose state is not finite.
Trajectory integrate(const SchemeSpec& spec, const TrajectoryConfig& config, const IntegrateOptions& options = {});
Trajectory integrate(const SplittingStepper& stepper, const Field& u0, std::size_t steps,
                     const IntegrateOptions& options = {});

// One block per snapshot: '#' metadata lines (scheme, epsilon, tau, t), an
// "x,u" header, then one row per grid point. Blocks are separated by a blank line.
void write_snapshots_csv(std::ostream& os, const SchemeSpec& spec, double epsilon, double tau,
                         const std::vector<Snapshot>& snapshots);

}  // namespace bbm
