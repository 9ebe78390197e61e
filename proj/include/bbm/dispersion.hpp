#pragma once

// Fourier multipliers for the BBM operators
//     L_eps        = d/dx / (1 - eps d^2/dx^2),        symbol ik / (1 + eps k^2)
//     L_eps,lambda = P(d/dx) / (1 - eps d^2/dx^2),     symbol P(ik) / (1 + eps k^2)
// and the exact linear flow exp(-t L_eps,lambda).

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "bbm/spectral.hpp"

namespace bbm {

// P(d/dx) = sum_m a_m d^(2m+1)/dx^(2m+1). Odd derivatives with real
// coefficients only, so P(ik) is purely imaginary and P(0) = 0.
class DispersionPolynomial {
 public:
  explicit DispersionPolynomial(std::vector<double> odd_coefficients);

  static DispersionPolynomial classical() { return DispersionPolynomial({1.0}); }

  const std::vector<double>& odd_coefficients() const noexcept { return coeffs_; }
  int degree() const noexcept { return 2 * static_cast<int>(coeffs_.size()) - 1; }
  bool is_classical() const noexcept { return coeffs_.size() == 1 && coeffs_[0] == 1.0; }

  // P(ik)
  Complex symbol(double k) const noexcept;

 private:
  std::vector<double> coeffs_;  // trailing zeros stripped
};

// Symbol of a real Fourier multiplier, stored on the half spectrum. value(-k)
// is conj(value(k)); the last slot holds value(-n/2).
class OperatorSymbol {
 public:
  OperatorSymbol(GridPtr grid, std::vector<Complex> half_values, double epsilon);

  const SpectralGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  double epsilon() const noexcept { return epsilon_; }

  Complex value(int k) const;
  std::span<const Complex> half_values() const noexcept { return values_; }
  // Full layout, k = -n/2 .. n/2 - 1.
  std::vector<Complex> values() const;

  OperatorSymbol scaled(double s) const;

 private:
  GridPtr grid_;
  std::vector<Complex> values_;
  double epsilon_;
};

OperatorSymbol symbol_L_eps(GridPtr grid, double epsilon);
OperatorSymbol symbol_L_eps_lambda(GridPtr grid, double epsilon, const DispersionPolynomial& p);

// exp(-t * generator); t may be negative.
OperatorSymbol linear_propagator(const OperatorSymbol& generator, double t);

// coeff'(k) = value(k) coeff(k). The unpaired -n/2 mode is a real cosine on
// the grid, so it is scaled by Re value(-n/2).
Field apply(const OperatorSymbol& symbol, const Field& field);
void apply_in_place(const OperatorSymbol& symbol, Field& field);

// Real field with i.i.d. uniform coefficients on |k| <= band and zero above.
Field random_band_limited(const GridPtr& grid, int band, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Operator inequality battery
//   smoothing:            ||eps L_eps f||_r <= eps^(1-sigma) ||f||_(r+1-2 sigma)
//   min_bound:            ||L_eps f||_r <= min{ ||f||_(r-1) / eps, ||f||_(r+1) }
//   propagator_increment: ||(exp(t L_eps,lambda) - 1) f||_r <= |t| ||f||_(r+lambda)

enum class Inequality { smoothing, min_bound, propagator_increment };
std::string_view inequality_name(Inequality which);

struct LemmaSetting {
  double epsilon;
  double sigma;
  double r;
  double t;
};

struct LemmaResult {
  Inequality inequality;
  LemmaSetting setting;
  int trials;
  double worst_ratio;  // max over trials of lhs / rhs
  bool pass;
};

struct LemmaBatteryOptions {
  int trials = 100;
  std::uint64_t seed = 20240601;
  int band = 24;
  NormWeight weight = NormWeight::bracket;
  DispersionPolynomial polynomial = DispersionPolynomial::classical();
  double rounding_slack = 1e-12;
};

std::vector<LemmaSetting> default_lemma_settings();

std::vector<LemmaResult> lemma_battery(const GridPtr& grid, std::span<const LemmaSetting> settings,
                                       const LemmaBatteryOptions& options = {});

// Cross product of epsilon and sigma lists at fixed r and t.
std::vector<LemmaResult> lemma_battery(const GridPtr& grid, std::span<const double> epsilons,
                                       std::span<const double> sigmas, double r, double t,
                                       const LemmaBatteryOptions& options = {});

}  // namespace bbm
