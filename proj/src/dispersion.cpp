#include "bbm/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bbm/simd/kernels.hpp"

namespace bbm {
namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must lie in [0, 1], got " + std::to_string(epsilon));
  }
}

}  // namespace

DispersionPolynomial::DispersionPolynomial(std::vector<double> odd_coefficients) : coeffs_(std::move(odd_coefficients)) {
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
  if (coeffs_.empty()) throw std::invalid_argument("DispersionPolynomial: needs a nonzero coefficient");
  for (double a : coeffs_) {
    if (!std::isfinite(a)) throw std::invalid_argument("DispersionPolynomial: non-finite coefficient");
  }
}

// (ik)^(2m+1) = i (-1)^m k^(2m+1)
Complex DispersionPolynomial::symbol(double k) const noexcept {
  double im = 0.0;
  double power = k;
  const double k2 = k * k;
  for (std::size_t m = 0; m < coeffs_.size(); ++m) {
    im += (m % 2 == 0 ? 1.0 : -1.0) * coeffs_[m] * power;
    power *= k2;
  }
  return {0.0, im};
}

OperatorSymbol::OperatorSymbol(GridPtr grid, std::vector<Complex> half_values, double epsilon)
    : grid_(std::move(grid)), values_(std::move(half_values)), epsilon_(epsilon) {
  if (!grid_) throw std::invalid_argument("OperatorSymbol: null grid");
  if (values_.size() != grid_->half_size()) throw std::invalid_argument("OperatorSymbol: wrong number of values");
}

Complex OperatorSymbol::value(int k) const {
  const int n = grid_->n_points();
  if (k < -n / 2 || k >= n / 2) throw std::out_of_range("OperatorSymbol::value: wavenumber outside grid layout");
  if (k == -n / 2) return values_.back();
  if (k >= 0) return values_[static_cast<std::size_t>(k)];
  return std::conj(values_[static_cast<std::size_t>(-k)]);
}

std::vector<Complex> OperatorSymbol::values() const {
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(grid_->n_points()));
  for (int k : grid_->wavenumbers()) out.push_back(value(k));
  return out;
}

OperatorSymbol OperatorSymbol::scaled(double s) const {
  std::vector<Complex> v(values_);
  for (auto& z : v) z *= s;
  return OperatorSymbol(grid_, std::move(v), epsilon_);
}

OperatorSymbol symbol_L_eps(GridPtr grid, double epsilon) {
  check_epsilon(epsilon);
  std::vector<Complex> v(grid->half_size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double k = grid->wavenumber_at(i);
    v[i] = Complex(0.0, k / (1.0 + epsilon * k * k));
  }
  return OperatorSymbol(std::move(grid), std::move(v), epsilon);
}

OperatorSymbol symbol_L_eps_lambda(GridPtr grid, double epsilon, const DispersionPolynomial& p) {
  check_epsilon(epsilon);
  std::vector<Complex> v(grid->half_size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double k = grid->wavenumber_at(i);
    v[i] = p.symbol(k) / (1.0 + epsilon * k * k);
  }
  return OperatorSymbol(std::move(grid), std::move(v), epsilon);
}

OperatorSymbol linear_propagator(const OperatorSymbol& generator, double t) {
  std::vector<Complex> v(generator.half_values().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-t * generator.half_values()[i]);
  return OperatorSymbol(generator.grid_ptr(), std::move(v), generator.epsilon());
}

void apply_in_place(const OperatorSymbol& symbol, Field& field) {
  require_same_grid(symbol.grid(), field.grid(), "apply");
  auto z = field.half_spectrum();
  const double nyquist = z.back().real();
  const auto sv = symbol.half_values();
  simd::active().complex_mul(reinterpret_cast<const double*>(sv.data()), reinterpret_cast<const double*>(z.data()),
                             reinterpret_cast<double*>(z.data()), z.size());
  z.back() = Complex(sv.back().real() * nyquist, 0.0);
}

Field apply(const OperatorSymbol& symbol, const Field& field) {
  Field out = field;
  apply_in_place(symbol, out);
  return out;
}

Field random_band_limited(const GridPtr& grid, int band, std::mt19937_64& rng) {
  if (band < 0 || band >= grid->nyquist()) throw std::invalid_argument("random_band_limited: band outside grid");
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Complex> half(grid->half_size());
  half[0] = u(rng);
  for (int k = 1; k <= band; ++k) {
    const double re = u(rng);
    const double im = u(rng);
    half[static_cast<std::size_t>(k)] = Complex(re, im);
  }
  return Field(grid, std::move(half));
}

std::string_view inequality_name(Inequality which) {
  switch (which) {
    case Inequality::smoothing:
      return "smoothing";
    case Inequality::min_bound:
      return "min_bound";
    case Inequality::propagator_increment:
      return "propagator_increment";
  }
  return "unknown";
}

std::vector<LemmaSetting> default_lemma_settings() {
  return {
      {1.0, 0.0, 0.6, 1.0},   {1.0, 0.5, 1.0, -1.0}, {1.0, 1.0, 2.0, 5.0},  {0.5, 0.25, 1.0, -5.0},
      {0.5, 0.75, 0.6, 0.1},  {0.1, 0.0, 1.0, 1.0},  {0.1, 1.0, 1.0, -1.0}, {0.1, 0.5, 2.0, 2.5},
      {0.01, 1.0, 0.6, 0.5},  {0.01, 0.3, 1.5, -0.01},
  };
}

std::vector<LemmaResult> lemma_battery(const GridPtr& grid, std::span<const LemmaSetting> settings,
                                       const LemmaBatteryOptions& options) {
  if (options.trials < 1) throw std::invalid_argument("lemma_battery: trials must be >= 1");
  for (const auto& s : settings) {
    if (!(s.sigma >= 0.0 && s.sigma <= 1.0)) throw std::invalid_argument("lemma_battery: sigma must lie in [0, 1]");
    if (!(s.epsilon > 0.0 && s.epsilon <= 1.0)) throw std::invalid_argument("lemma_battery: epsilon must lie in (0, 1]");
    if (!std::isfinite(s.r) || !std::isfinite(s.t)) throw std::invalid_argument("lemma_battery: non-finite r or t");
  }

  const auto norm = [&](const Field& f, double r) { return sobolev_norm_extended(f, r, options.weight); };
  const double lambda = options.polynomial.degree();

  std::vector<LemmaResult> results;
  std::mt19937_64 rng(options.seed);
  for (const auto& s : settings) {
    const auto l_eps = symbol_L_eps(grid, s.epsilon);
    const auto eps_l_eps = l_eps.scaled(s.epsilon);
    // exp(t L) - 1 is the propagator of -L at time t, minus identity.
    const auto flow = linear_propagator(symbol_L_eps_lambda(grid, s.epsilon, options.polynomial), -s.t);

    double worst[3] = {0.0, 0.0, 0.0};
    for (int trial = 0; trial < options.trials; ++trial) {
      const Field f = random_band_limited(grid, options.band, rng);

      const double lhs1 = norm(apply(eps_l_eps, f), s.r);
      const double rhs1 = std::pow(s.epsilon, 1.0 - s.sigma) * norm(f, s.r + 1.0 - 2.0 * s.sigma);
      worst[0] = std::max(worst[0], lhs1 / rhs1);

      const double lhs2 = norm(apply(l_eps, f), s.r);
      const double rhs2 = std::min(norm(f, s.r - 1.0) / s.epsilon, norm(f, s.r + 1.0));
      worst[1] = std::max(worst[1], lhs2 / rhs2);

      const double lhs3 = norm(apply(flow, f) - f, s.r);
      const double rhs3 = std::abs(s.t) * norm(f, s.r + lambda);
      worst[2] = std::max(worst[2], rhs3 > 0.0 ? lhs3 / rhs3 : (lhs3 > 0.0 ? INFINITY : 0.0));
    }

    const Inequality order[3] = {Inequality::smoothing, Inequality::min_bound, Inequality::propagator_increment};
    for (int i = 0; i < 3; ++i) {
      results.push_back({order[i], s, options.trials, worst[i], worst[i] <= 1.0 + options.rounding_slack});
    }
  }
  return results;
}

std::vector<LemmaResult> lemma_battery(const GridPtr& grid, std::span<const double> epsilons,
                                       std::span<const double> sigmas, double r, double t,
                                       const LemmaBatteryOptions& options) {
  std::vector<LemmaSetting> settings;
  for (double e : epsilons) {
    for (double s : sigmas) settings.push_back({e, s, r, t});
  }
  return lemma_battery(grid, settings, options);
}

}  // namespace bbm
