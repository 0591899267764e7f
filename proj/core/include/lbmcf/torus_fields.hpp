#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lbmcf/hermitian_core.hpp"

namespace lbmcf {

/// Uniform grid on the unit cell [0,1)^dims of the flat torus. With dims == 4
/// the complex coordinates are z1 = x1 + i x2, z2 = x3 + i x4; dims == 2 is the
/// one-complex-dimension sanity mode (z1 = x1 + i x2 only).
///
/// Storage is row-major with x1 the slowest index.
class GridSpec {
 public:
  GridSpec() = default;
  explicit GridSpec(int n_per_dim, int dims = 4);

  int n() const { return n_; }
  int dims() const { return dims_; }
  int complex_dims() const { return dims_ / 2; }
  std::size_t size() const { return size_; }
  double spacing() const { return 1.0 / n_; }

  /// Real coordinates of point `index` (entries past dims() are zero).
  std::array<double, 4> coordinates(std::size_t index) const;
  /// Integer lattice indices of point `index`.
  std::array<int, 4> lattice(std::size_t index) const;

  bool operator==(const GridSpec&) const = default;

 private:
  int n_ = 4;
  int dims_ = 4;
  std::size_t size_ = 256;
};

/// A real periodic function sampled on a GridSpec.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec& grid, double fill = 0.0);
  ScalarField(const GridSpec& grid, std::vector<double> values);

  /// Samples fn(x) at every grid point.
  static ScalarField sample(const GridSpec& grid,
                            const std::function<double(const std::array<double, 4>&)>& fn);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double mean() const;
  double max_abs() const;
  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);
  ScalarField& operator+=(double c);

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// a + s * b without temporaries.
ScalarField axpy(const ScalarField& a, double s, const ScalarField& b);

/// A complex-valued periodic field.
class ComplexField {
 public:
  ComplexField() = default;
  explicit ComplexField(const GridSpec& grid, Complex fill = {});

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  Complex& operator[](std::size_t i) { return values_[i]; }
  Complex operator[](std::size_t i) const { return values_[i]; }
  std::span<Complex> values() { return values_; }
  std::span<const Complex> values() const { return values_; }

 private:
  GridSpec grid_;
  std::vector<Complex> values_;
};

/// One 2x2 Hermitian matrix per grid point.
class HermitianField {
 public:
  HermitianField() = default;
  explicit HermitianField(const GridSpec& grid, const Mat2& fill = Mat2::Zero());

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  Mat2& operator[](std::size_t i) { return values_[i]; }
  const Mat2& operator[](std::size_t i) const { return values_[i]; }
  std::span<const Mat2> values() const { return values_; }

 private:
  GridSpec grid_;
  std::vector<Mat2> values_;
};

// ---------------------------------------------------------------------------
// Trigonometric potentials
// ---------------------------------------------------------------------------

/// One factor trig(2 pi k x_d) of a separable mode.
struct TrigFactor {
  bool is_sin = false;
  int k = 0;
};

/// Product over the real coordinates of TrigFactor, e.g. sin(2 pi x1) sin(2 pi x3)
/// is {s1, c0, s1, c0}.
struct TrigProduct {
  std::array<TrigFactor, 4> factors{};
};

/// Parses "s1:c0:s1:c0" (one token per real dimension).
TrigProduct parse_trig_product(const std::string& text);
std::string format_trig_product(const TrigProduct& mode);

/// amplitude * sum of the given modes.
ScalarField synthesize(const GridSpec& grid, double amplitude, std::span<const TrigProduct> modes);

/// Random band-limited field with |k_d| <= k_max in every direction, using
/// uniform coefficients from the seeded generator, rescaled so max|f| = amplitude.
ScalarField random_band_limited(const GridSpec& grid, int k_max, double amplitude,
                                std::uint64_t seed);

// ---------------------------------------------------------------------------
// Spectral calculus
// ---------------------------------------------------------------------------

/// H_{jk} = d^2 phi / dz_j dzbar_k by Fourier differentiation.
///
/// Built from the real Hessian: pure second derivatives keep the Nyquist mode,
/// mixed derivatives drop it whenever one of the two directions sits at
/// Nyquist. This keeps the output real/Hermitian and the constant-coefficient
/// Laplacian invertible on the zero-mean subspace.
HermitianField complex_hessian(const ScalarField& phi);

/// (d f/dz1, d f/dz2) with the Nyquist mode of every first derivative zeroed.
/// In the dims == 2 mode the second slot is identically zero.
std::array<ComplexField, 2> gradient_z(const ScalarField& f);

/// Density of alpha^n against dx_1 ... dx_{2n}: n! 2^n det(alpha).
double volume_density(const Mat2& alpha, int complex_dims = 2);

/// Integral of f against alpha^n over the unit cell (mean times volume_density).
double integrate(const ScalarField& f, const Mat2& alpha);
Complex integrate(const ComplexField& f, const Mat2& alpha);

/// Deterministic mean of an arbitrary pointwise term over the grid.
double grid_mean(const GridSpec& grid, const std::function<double(std::size_t)>& term);

/// Applies tr(coeff^{-1} H(u)), the constant-coefficient Laplacian of the
/// metric `coeff`.
ScalarField apply_constant_laplacian(const ScalarField& u, const Mat2& coeff);

/// Solves tr(coeff^{-1} H(u)) = rhs - mean(rhs) with mean(u) = 0.
ScalarField solve_constant_laplacian(const ScalarField& rhs, const Mat2& coeff);

/// Solves u - shift * tr(coeff^{-1} H(u)) = rhs (shift >= 0).
ScalarField solve_shifted_laplacian(const ScalarField& rhs, const Mat2& coeff, double shift);

// ---------------------------------------------------------------------------
// Snapshot files
// ---------------------------------------------------------------------------

/// Snapshot container (all integers and floats little-endian):
///   bytes  0..7   magic "LBMCFSNP"
///   bytes  8..11  uint32 format version (1)
///   bytes 12..15  uint32 dims (2 or 4)
///   bytes 16..19  uint32 n_per_dim
///   bytes 20..23  uint32 reserved (0)
///   bytes 24..31  float64 time stamp
///   bytes 32..    float64 values, n^dims of them, row-major (x1 slowest)
struct Snapshot {
  double time = 0.0;
  ScalarField field;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(const std::filesystem::path& path, const ScalarField& field, double time);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace lbmcf
