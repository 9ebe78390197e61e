#pragma once

// Periodic Fourier discretization on the torus [-pi, pi).
//
// Coefficients follow the continuous convention
//     coeff(k) ~ (1 / 2pi) * integral_{-pi}^{pi} u(x) exp(-i k x) dx,
// so multiplier symbols act on them verbatim. Fields are real-valued, so
// only the half spectrum k = 0 .. n/2 is stored; the last slot holds the
// unpaired wavenumber -n/2 (it is its own partner and stays real).

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace bbm {

using Complex = std::complex<double>;

// Sobolev weights: shifted = (1 + |k|)^(2r), bracket = (1 + k^2)^r.
enum class NormWeight { shifted, bracket };

class SpectralGrid {
 public:
  ~SpectralGrid();
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  int n_points() const noexcept { return n_; }
  double domain_length() const noexcept;
  double dx() const noexcept;
  std::size_t half_size() const noexcept { return static_cast<std::size_t>(n_ / 2 + 1); }
  int nyquist() const noexcept { return n_ / 2; }

  bool dealias() const noexcept { return dealias_; }
  // Highest |k| kept after a product when dealiasing is on.
  int dealias_cutoff() const noexcept { return n_ / 3; }

  // k = -n/2, ..., n/2 - 1
  std::vector<int> wavenumbers() const;
  // Signed wavenumber housed in half-spectrum slot i.
  int wavenumber_at(std::size_t slot) const noexcept {
    return slot == static_cast<std::size_t>(n_ / 2) ? -n_ / 2 : static_cast<int>(slot);
  }

  double x(int j) const noexcept;
  std::vector<double> points() const;

  // Raw transforms in the coefficient convention above.
  void forward(std::span<const double> samples, std::span<Complex> half) const;
  void inverse(std::span<const Complex> half, std::span<double> samples) const;

  bool compatible(const SpectralGrid& other) const noexcept {
    return n_ == other.n_ && dealias_ == other.dealias_;
  }

 private:
  struct Plans;
  SpectralGrid(int n_points, bool dealias);
  friend std::shared_ptr<const SpectralGrid> make_grid(int, bool);

  int n_;
  bool dealias_;
  std::unique_ptr<Plans> plans_;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

// n_points must be even and >= 4.
GridPtr make_grid(int n_points, bool dealias = false);

class Field {
 public:
  Field(GridPtr grid, std::vector<Complex> half_spectrum);

  static Field zero(GridPtr grid);

  template <class F>
  static Field from_function(GridPtr grid, F&& f) {
    std::vector<double> s(static_cast<std::size_t>(grid->n_points()));
    for (int j = 0; j < grid->n_points(); ++j) s[static_cast<std::size_t>(j)] = f(grid->x(j));
    return from_samples(std::move(grid), s);
  }

  static Field from_samples(GridPtr grid, std::span<const double> samples);

  const SpectralGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }

  // Any k in the grid layout; negative k via Hermitian symmetry.
  Complex coeff(int k) const;

  std::span<const Complex> half_spectrum() const noexcept { return coeffs_; }
  std::span<Complex> half_spectrum() noexcept { return coeffs_; }

  std::vector<double> samples() const;

  bool is_finite() const noexcept;

  // this += alpha * x
  Field& axpy(double alpha, const Field& x);
  Field& operator+=(const Field& rhs) { return axpy(1.0, rhs); }
  Field& operator-=(const Field& rhs) { return axpy(-1.0, rhs); }
  Field& operator*=(double s);

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }

 private:
  GridPtr grid_;
  std::vector<Complex> coeffs_;
};

void require_same_grid(const SpectralGrid& a, const SpectralGrid& b, const char* what);

Field transform(std::span<const double> samples, GridPtr grid);
std::vector<double> inverse_transform(const Field& field);

// (sum_k weight_k(r) |coeff(k)|^2)^(1/2) over the full layout; r >= 0.
double sobolev_norm(const Field& field, double r, NormWeight weight = NormWeight::shifted);

// Same sum with any real r, negative orders included (dual spaces).
double sobolev_norm_extended(const Field& field, double r, NormWeight weight = NormWeight::shifted);

// Per half-spectrum slot weights, with the factor 2 for paired modes folded in.
std::vector<double> sobolev_weights(const SpectralGrid& grid, double r, NormWeight weight);

// Discrete L2 distance (r = 0 norm of the difference).
double l2_distance(const Field& a, const Field& b);

// Physical-space products, truncated to the 2/3 band when the grid dealiases.
Field pointwise_square(const Field& field);
Field pointwise_product(const Field& a, const Field& b);
Field product_of_samples(const GridPtr& grid, std::span<const double> a, std::span<const double> b);

}  // namespace bbm
