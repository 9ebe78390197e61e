#include "bbm/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "bbm/simd/kernels.hpp"

namespace bbm {
namespace {

// The FFTW planner is not reentrant; execution with the new-array API is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double* as_doubles(std::span<Complex> z) { return reinterpret_cast<double*>(z.data()); }
const double* as_doubles(std::span<const Complex> z) { return reinterpret_cast<const double*>(z.data()); }

}  // namespace

struct SpectralGrid::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }
};

SpectralGrid::SpectralGrid(int n_points, bool dealias)
    : n_(n_points), dealias_(dealias), plans_(std::make_unique<Plans>()) {
  std::vector<double> real(static_cast<std::size_t>(n_));
  std::vector<Complex> half(half_size());
  auto* hc = reinterpret_cast<fftw_complex*>(half.data());
  std::lock_guard lock(planner_mutex());
  plans_->r2c = fftw_plan_dft_r2c_1d(n_, real.data(), hc, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans_->c2r = fftw_plan_dft_c2r_1d(n_, hc, real.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plans_->r2c || !plans_->c2r) throw std::runtime_error("FFTW plan creation failed");
}

SpectralGrid::~SpectralGrid() = default;

double SpectralGrid::domain_length() const noexcept { return 2.0 * std::numbers::pi; }
double SpectralGrid::dx() const noexcept { return domain_length() / n_; }
double SpectralGrid::x(int j) const noexcept { return -std::numbers::pi + j * dx(); }

std::vector<int> SpectralGrid::wavenumbers() const {
  std::vector<int> k(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) k[static_cast<std::size_t>(i)] = i - n_ / 2;
  return k;
}

std::vector<double> SpectralGrid::points() const {
  std::vector<double> p(static_cast<std::size_t>(n_));
  for (int j = 0; j < n_; ++j) p[static_cast<std::size_t>(j)] = x(j);
  return p;
}

// Samples sit at x_j = -pi + j dx, so the DFT picks up a (-1)^k phase
// relative to the continuous coefficient.
void SpectralGrid::forward(std::span<const double> samples, std::span<Complex> half) const {
  if (samples.size() != static_cast<std::size_t>(n_) || half.size() != half_size()) {
    throw std::invalid_argument("forward transform: buffer length does not match grid");
  }
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(samples.data()),
                       reinterpret_cast<fftw_complex*>(half.data()));
  const double scale = 1.0 / n_;
  for (std::size_t k = 0; k < half.size(); ++k) half[k] *= (k % 2 == 0) ? scale : -scale;
}

void SpectralGrid::inverse(std::span<const Complex> half, std::span<double> samples) const {
  if (samples.size() != static_cast<std::size_t>(n_) || half.size() != half_size()) {
    throw std::invalid_argument("inverse transform: buffer length does not match grid");
  }
  std::vector<Complex> work(half.begin(), half.end());
  for (std::size_t k = 1; k < work.size(); k += 2) work[k] = -work[k];
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(work.data()), samples.data());
}

GridPtr make_grid(int n_points, bool dealias) {
  if (n_points < 4 || n_points % 2 != 0) {
    throw std::invalid_argument("make_grid: n_points must be even and >= 4, got " + std::to_string(n_points));
  }
  return GridPtr(new SpectralGrid(n_points, dealias));
}

void require_same_grid(const SpectralGrid& a, const SpectralGrid& b, const char* what) {
  if (!a.compatible(b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

Field::Field(GridPtr grid, std::vector<Complex> half_spectrum)
    : grid_(std::move(grid)), coeffs_(std::move(half_spectrum)) {
  if (!grid_) throw std::invalid_argument("Field: null grid");
  if (coeffs_.size() != grid_->half_size()) {
    throw std::invalid_argument("Field: expected " + std::to_string(grid_->half_size()) + " coefficients, got " +
                                std::to_string(coeffs_.size()));
  }
}

Field Field::zero(GridPtr grid) {
  const auto m = grid->half_size();
  return Field(std::move(grid), std::vector<Complex>(m));
}

Field Field::from_samples(GridPtr grid, std::span<const double> samples) {
  if (!grid) throw std::invalid_argument("transform: null grid");
  if (samples.size() != static_cast<std::size_t>(grid->n_points())) {
    throw std::invalid_argument("transform: expected " + std::to_string(grid->n_points()) + " samples, got " +
                                std::to_string(samples.size()));
  }
  std::vector<Complex> half(grid->half_size());
  grid->forward(samples, half);
  return Field(std::move(grid), std::move(half));
}

Complex Field::coeff(int k) const {
  const int n = grid_->n_points();
  if (k < -n / 2 || k >= n / 2) throw std::out_of_range("Field::coeff: wavenumber outside grid layout");
  if (k == -n / 2) return coeffs_.back();
  if (k >= 0) return coeffs_[static_cast<std::size_t>(k)];
  return std::conj(coeffs_[static_cast<std::size_t>(-k)]);
}

std::vector<double> Field::samples() const {
  std::vector<double> s(static_cast<std::size_t>(grid_->n_points()));
  grid_->inverse(coeffs_, s);
  return s;
}

bool Field::is_finite() const noexcept {
  return simd::active().all_finite(as_doubles(std::span<const Complex>(coeffs_)), 2 * coeffs_.size());
}

Field& Field::axpy(double alpha, const Field& x) {
  require_same_grid(*grid_, *x.grid_, "Field arithmetic");
  simd::active().axpy(alpha, as_doubles(std::span<const Complex>(x.coeffs_)), as_doubles(std::span<Complex>(coeffs_)),
                      2 * coeffs_.size());
  return *this;
}

Field& Field::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

Field transform(std::span<const double> samples, GridPtr grid) { return Field::from_samples(std::move(grid), samples); }

std::vector<double> inverse_transform(const Field& field) { return field.samples(); }

std::vector<double> sobolev_weights(const SpectralGrid& grid, double r, NormWeight weight) {
  std::vector<double> w(grid.half_size());
  const auto last = w.size() - 1;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double k = std::abs(static_cast<double>(grid.wavenumber_at(i)));
    const double base = weight == NormWeight::shifted ? std::pow(1.0 + k, 2.0 * r) : std::pow(1.0 + k * k, r);
    w[i] = (i == 0 || i == last) ? base : 2.0 * base;
  }
  return w;
}

double sobolev_norm_extended(const Field& field, double r, NormWeight weight) {
  const auto w = sobolev_weights(field.grid(), r, weight);
  const auto z = field.half_spectrum();
  return std::sqrt(simd::active().weighted_norm2(w.data(), as_doubles(z), z.size()));
}

double sobolev_norm(const Field& field, double r, NormWeight weight) {
  if (!(r >= 0.0)) throw std::invalid_argument("sobolev_norm: r must be >= 0");
  return sobolev_norm_extended(field, r, weight);
}

double l2_distance(const Field& a, const Field& b) { return sobolev_norm(a - b, 0.0); }

Field product_of_samples(const GridPtr& grid, std::span<const double> a, std::span<const double> b) {
  const auto n = static_cast<std::size_t>(grid->n_points());
  if (a.size() != n || b.size() != n) throw std::invalid_argument("pointwise product: sample length mismatch");
  std::vector<double> prod(n);
  simd::active().real_mul(a.data(), b.data(), prod.data(), n);
  Field out = Field::from_samples(grid, prod);
  if (grid->dealias()) {
    auto z = out.half_spectrum();
    for (std::size_t i = static_cast<std::size_t>(grid->dealias_cutoff()) + 1; i < z.size(); ++i) z[i] = 0.0;
  }
  return out;
}

Field pointwise_square(const Field& field) {
  const auto s = field.samples();
  return product_of_samples(field.grid_ptr(), s, s);
}

Field pointwise_product(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid(), "pointwise_product");
  return product_of_samples(a.grid_ptr(), a.samples(), b.samples());
}

}  // namespace bbm
