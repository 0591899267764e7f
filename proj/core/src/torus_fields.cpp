#include "lbmcf/torus_fields.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

#include "lbmcf/errors.hpp"
#include "lbmcf/parallel.hpp"

namespace lbmcf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------------------
// FFTW plumbing. Plans are created once per grid (planning is not thread-safe,
// execution is) and always executed in place on fftw_malloc'ed buffers so the
// alignment matches the planning buffer.

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class SpectralGrid {
 public:
  explicit SpectralGrid(const GridSpec& grid) : grid_(grid) {
    std::vector<int> shape(static_cast<std::size_t>(grid.dims()), grid.n());
    FftBuffer probe = buffer();
    std::lock_guard lock(planner_mutex());
    forward_ = fftw_plan_dft(grid.dims(), shape.data(), probe.get(), probe.get(), FFTW_FORWARD,
                             FFTW_ESTIMATE);
    backward_ = fftw_plan_dft(grid.dims(), shape.data(), probe.get(), probe.get(), FFTW_BACKWARD,
                              FFTW_ESTIMATE);
    if (forward_ == nullptr || backward_ == nullptr) {
      throw NumericalError("FFTW planning failed");
    }
  }
  ~SpectralGrid() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  static const SpectralGrid& get(const GridSpec& grid) {
    static std::mutex registry_mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<SpectralGrid>> registry;
    std::lock_guard lock(registry_mutex);
    auto& slot = registry[{grid.n(), grid.dims()}];
    if (!slot) slot = std::make_unique<SpectralGrid>(grid);
    return *slot;
  }

  FftBuffer buffer() const {
    auto* raw = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * grid_.size()));
    if (raw == nullptr) throw std::bad_alloc();
    return FftBuffer(raw);
  }

  /// Loads a real field and transforms it, normalized so that the inverse
  /// transform reproduces the field.
  FftBuffer forward_real(const ScalarField& f) const {
    FftBuffer buf = buffer();
    const std::size_t n = grid_.size();
    for (std::size_t i = 0; i < n; ++i) {
      buf[i][0] = f[i];
      buf[i][1] = 0.0;
    }
    fftw_execute_dft(forward_, buf.get(), buf.get());
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      buf[i][0] *= scale;
      buf[i][1] *= scale;
    }
    return buf;
  }

  void backward(fftw_complex* data) const { fftw_execute_dft(backward_, data, data); }

  const GridSpec& grid() const { return grid_; }

 private:
  GridSpec grid_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

Complex load(const fftw_complex& c) { return {c[0], c[1]}; }
void store(fftw_complex& c, Complex v) {
  c[0] = v.real();
  c[1] = v.imag();
}

/// Angular wavenumbers of one spectral index along every dimension, with a
/// flag for the Nyquist index.
struct Mode {
  std::array<double, 4> w{};
  std::array<bool, 4> nyquist{};
};

Mode mode_of(const GridSpec& grid, std::size_t index) {
  const auto lat = grid.lattice(index);
  const int n = grid.n();
  Mode m;
  for (int d = 0; d < grid.dims(); ++d) {
    const int i = lat[static_cast<std::size_t>(d)];
    const int k = (i <= n / 2) ? i : i - n;
    m.w[static_cast<std::size_t>(d)] = kTwoPi * k;
    m.nyquist[static_cast<std::size_t>(d)] = (i == n / 2);
  }
  return m;
}

/// Symbol of the real second derivative d_a d_b.
double second_symbol(const Mode& m, int a, int b) {
  const auto ua = static_cast<std::size_t>(a);
  const auto ub = static_cast<std::size_t>(b);
  if (a == b) return -m.w[ua] * m.w[ua];
  if (m.nyquist[ua] || m.nyquist[ub]) return 0.0;
  return -m.w[ua] * m.w[ub];
}

/// Symbol of the complex Hessian: s11, s22 (real) and s12.
struct HessianSymbol {
  double s11 = 0.0;
  double s22 = 0.0;
  Complex s12;
};

HessianSymbol hessian_symbol(const GridSpec& grid, const Mode& m) {
  HessianSymbol s;
  s.s11 = 0.25 * (second_symbol(m, 0, 0) + second_symbol(m, 1, 1));
  if (grid.dims() == 4) {
    s.s22 = 0.25 * (second_symbol(m, 2, 2) + second_symbol(m, 3, 3));
    s.s12 = 0.25 * Complex(second_symbol(m, 0, 2) + second_symbol(m, 1, 3),
                           second_symbol(m, 0, 3) - second_symbol(m, 1, 2));
  }
  return s;
}

/// Hessian symbols of every spectral index, cached per grid.
const std::vector<HessianSymbol>& hessian_symbols(const GridSpec& grid) {
  static std::mutex cache_mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<std::vector<HessianSymbol>>> cache;
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[{grid.n(), grid.dims()}];
  if (!slot) {
    slot = std::make_unique<std::vector<HessianSymbol>>(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) (*slot)[i] = hessian_symbol(grid, mode_of(grid, i));
  }
  return *slot;
}

/// tr(coeff^{-1} S(k)) for the Laplacian of the constant metric `coeff`.
struct LaplacianSymbol {
  Mat2 inv;
  bool one_dim = false;

  LaplacianSymbol(const GridSpec& grid, const Mat2& coeff) {
    one_dim = grid.dims() == 2;
    if (one_dim) {
      const double c = coeff(0, 0).real();
      if (!(c > 0.0)) throw PreconditionError("Laplacian coefficient must be positive definite");
      inv = Mat2::Zero();
      inv(0, 0) = 1.0 / c;
    } else {
      inv = AlphaFrame(coeff).alpha_inv();
    }
  }

  double operator()(const HessianSymbol& s) const {
    if (one_dim) return inv(0, 0).real() * s.s11;
    // G11 s11 + G22 s22 + G12 s21 + G21 s12 with s21 = conj(s12).
    return inv(0, 0).real() * s.s11 + inv(1, 1).real() * s.s22 +
           2.0 * (inv(0, 1) * std::conj(s.s12)).real();
  }
};

template <class Symbol>
ScalarField apply_symbol(const ScalarField& u, Symbol&& multiplier) {
  const GridSpec& grid = u.grid();
  const auto& spec = SpectralGrid::get(grid);
  FftBuffer buf = spec.forward_real(u);
  parallel_for(grid.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      store(buf[i], multiplier(i) * load(buf[i]));
    }
  });
  spec.backward(buf.get());
  ScalarField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = buf[i][0];
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// GridSpec and fields

GridSpec::GridSpec(int n_per_dim, int dims) : n_(n_per_dim), dims_(dims) {
  if (dims != 2 && dims != 4) throw PreconditionError("grid dims must be 2 or 4");
  if (n_per_dim < 4 || n_per_dim % 2 != 0) {
    throw PreconditionError("grid size per dimension must be even and >= 4");
  }
  size_ = 1;
  for (int d = 0; d < dims; ++d) size_ *= static_cast<std::size_t>(n_per_dim);
}

std::array<int, 4> GridSpec::lattice(std::size_t index) const {
  std::array<int, 4> out{};
  const auto n = static_cast<std::size_t>(n_);
  for (int d = dims_ - 1; d >= 0; --d) {
    out[static_cast<std::size_t>(d)] = static_cast<int>(index % n);
    index /= n;
  }
  return out;
}

std::array<double, 4> GridSpec::coordinates(std::size_t index) const {
  const auto lat = lattice(index);
  std::array<double, 4> x{};
  for (int d = 0; d < dims_; ++d) {
    x[static_cast<std::size_t>(d)] = lat[static_cast<std::size_t>(d)] * spacing();
  }
  return x;
}

ScalarField::ScalarField(const GridSpec& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid.size()) throw PreconditionError("field size does not match grid");
}

ScalarField ScalarField::sample(const GridSpec& grid,
                                const std::function<double(const std::array<double, 4>&)>& fn) {
  ScalarField out(grid);
  parallel_for(grid.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out[i] = fn(grid.coordinates(i));
  });
  return out;
}

double ScalarField::mean() const {
  return deterministic_sum(values_.size(), [this](std::size_t i) { return values_[i]; }) /
         static_cast<double>(values_.size());
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (const double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}
ScalarField& ScalarField::operator-=(const ScalarField& o) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}
ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}
ScalarField& ScalarField::operator+=(double c) {
  for (double& v : values_) v += c;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField axpy(const ScalarField& a, double s, const ScalarField& b) {
  ScalarField out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + s * b[i];
  return out;
}

ComplexField::ComplexField(const GridSpec& grid, Complex fill) : grid_(grid), values_(grid.size(), fill) {}

HermitianField::HermitianField(const GridSpec& grid, const Mat2& fill)
    : grid_(grid), values_(grid.size(), fill) {}

// ---------------------------------------------------------------------------
// Trigonometric potentials

TrigProduct parse_trig_product(const std::string& text) {
  TrigProduct mode;
  std::stringstream ss(text);
  std::string token;
  std::size_t d = 0;
  while (std::getline(ss, token, ':')) {
    if (d >= 4) throw PreconditionError("mode '" + text + "' has more than 4 factors");
    if (token.size() < 2 || (token[0] != 's' && token[0] != 'c')) {
      throw PreconditionError("bad mode factor '" + token + "' (expected s<k> or c<k>)");
    }
    std::size_t used = 0;
    int k = 0;
    try {
      k = std::stoi(token.substr(1), &used);
    } catch (const std::exception&) {
      throw PreconditionError("bad mode factor '" + token + "'");
    }
    if (used != token.size() - 1 || k < 0) {
      throw PreconditionError("bad mode factor '" + token + "'");
    }
    mode.factors[d++] = {token[0] == 's', k};
  }
  if (d != 4) throw PreconditionError("mode '" + text + "' needs exactly 4 factors");
  return mode;
}

std::string format_trig_product(const TrigProduct& mode) {
  std::string out;
  for (std::size_t d = 0; d < 4; ++d) {
    if (d) out += ':';
    out += mode.factors[d].is_sin ? 's' : 'c';
    out += std::to_string(mode.factors[d].k);
  }
  return out;
}

ScalarField synthesize(const GridSpec& grid, double amplitude, std::span<const TrigProduct> modes) {
  for (const auto& mode : modes) {
    for (int d = grid.dims(); d < 4; ++d) {
      const auto& f = mode.factors[static_cast<std::size_t>(d)];
      if (f.is_sin || f.k != 0) {
        throw PreconditionError("mode uses a dimension the grid does not have");
      }
    }
    for (const auto& f : mode.factors) {
      if (2 * f.k >= grid.n()) throw PreconditionError("mode frequency at or above Nyquist");
    }
  }
  return ScalarField::sample(grid, [&](const std::array<double, 4>& x) {
    double total = 0.0;
    for (const auto& mode : modes) {
      double term = 1.0;
      for (std::size_t d = 0; d < 4; ++d) {
        const auto& f = mode.factors[d];
        const double arg = kTwoPi * f.k * x[d];
        term *= f.is_sin ? std::sin(arg) : std::cos(arg);
      }
      total += term;
    }
    return amplitude * total;
  });
}

ScalarField random_band_limited(const GridSpec& grid, int k_max, double amplitude,
                                std::uint64_t seed) {
  if (k_max < 1 || 2 * k_max >= grid.n()) {
    throw PreconditionError("random field band must satisfy 1 <= k_max < n/2");
  }
  const auto& spec = SpectralGrid::get(grid);
  FftBuffer buf = spec.buffer();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto lat = grid.lattice(i);
    bool inside = true;
    bool zero_mode = true;
    for (int d = 0; d < grid.dims(); ++d) {
      const int li = lat[static_cast<std::size_t>(d)];
      const int k = (li <= grid.n() / 2) ? li : li - grid.n();
      inside = inside && std::abs(k) <= k_max;
      zero_mode = zero_mode && k == 0;
    }
    // Draw for every index so the stream does not depend on band membership.
    const double re = coeff(rng);
    const double im = coeff(rng);
    if (inside && !zero_mode) {
      buf[i][0] = re;
      buf[i][1] = im;
    } else {
      buf[i][0] = 0.0;
      buf[i][1] = 0.0;
    }
  }
  spec.backward(buf.get());
  ScalarField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = buf[i][0];
  const double peak = out.max_abs();
  if (peak > 0.0) out *= amplitude / peak;
  return out;
}

// ---------------------------------------------------------------------------
// Spectral calculus

HermitianField complex_hessian(const ScalarField& phi) {
  const GridSpec& grid = phi.grid();
  const auto& spec = SpectralGrid::get(grid);
  FftBuffer diag = spec.forward_real(phi);  // becomes H11 + i H22
  FftBuffer off = spec.buffer();            // becomes H12
  const auto& symbols = hessian_symbols(grid);
  parallel_for(grid.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const HessianSymbol& s = symbols[i];
      const Complex hat = load(diag[i]);
      store(off[i], s.s12 * hat);
      store(diag[i], Complex(s.s11, s.s22) * hat);
    }
  });
  spec.backward(diag.get());
  spec.backward(off.get());

  HermitianField out(grid);
  parallel_for(grid.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Complex h12 = load(off[i]);
      out[i] = hermitian(diag[i][0], diag[i][1], h12);
    }
  });
  return out;
}

std::array<ComplexField, 2> gradient_z(const ScalarField& f) {
  const GridSpec& grid = f.grid();
  const auto& spec = SpectralGrid::get(grid);
  FftBuffer first = spec.forward_real(f);
  FftBuffer second = spec.buffer();
  const bool two = grid.dims() == 4;
  parallel_for(grid.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Mode m = mode_of(grid, i);
      for (std::size_t d = 0; d < 4; ++d) {
        if (m.nyquist[d]) m.w[d] = 0.0;
      }
      const Complex hat = load(first[i]);
      // d/dz_j = (d/dx_{2j-1} - i d/dx_{2j}) / 2
      store(first[i], 0.5 * Complex(m.w[1], m.w[0]) * hat);
      store(second[i], two ? 0.5 * Complex(m.w[3], m.w[2]) * hat : Complex{});
    }
  });
  spec.backward(first.get());
  spec.backward(second.get());
  std::array<ComplexField, 2> out{ComplexField(grid), ComplexField(grid)};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out[0][i] = load(first[i]);
    out[1][i] = load(second[i]);
  }
  return out;
}

double volume_density(const Mat2& alpha, int complex_dims) {
  if (complex_dims == 1) return 2.0 * alpha(0, 0).real();
  return 8.0 * AlphaFrame(alpha).det_alpha();
}

double grid_mean(const GridSpec& grid, const std::function<double(std::size_t)>& term) {
  return deterministic_sum(grid.size(), term) / static_cast<double>(grid.size());
}

double integrate(const ScalarField& f, const Mat2& alpha) {
  return f.mean() * volume_density(alpha, f.grid().complex_dims());
}

Complex integrate(const ComplexField& f, const Mat2& alpha) {
  const double re = grid_mean(f.grid(), [&](std::size_t i) { return f[i].real(); });
  const double im = grid_mean(f.grid(), [&](std::size_t i) { return f[i].imag(); });
  return Complex(re, im) * volume_density(alpha, f.grid().complex_dims());
}

ScalarField apply_constant_laplacian(const ScalarField& u, const Mat2& coeff) {
  const GridSpec& grid = u.grid();
  const LaplacianSymbol lap(grid, coeff);
  const auto& symbols = hessian_symbols(grid);
  return apply_symbol(u, [&](std::size_t i) { return lap(symbols[i]); });
}

ScalarField solve_constant_laplacian(const ScalarField& rhs, const Mat2& coeff) {
  const GridSpec& grid = rhs.grid();
  const LaplacianSymbol lap(grid, coeff);
  const auto& symbols = hessian_symbols(grid);
  return apply_symbol(rhs, [&](std::size_t i) {
    const double sigma = lap(symbols[i]);
    return sigma == 0.0 ? 0.0 : 1.0 / sigma;
  });
}

ScalarField solve_shifted_laplacian(const ScalarField& rhs, const Mat2& coeff, double shift) {
  if (!(shift >= 0.0)) throw PreconditionError("shifted Laplacian needs a non-negative shift");
  const GridSpec& grid = rhs.grid();
  const LaplacianSymbol lap(grid, coeff);
  const auto& symbols = hessian_symbols(grid);
  return apply_symbol(rhs, [&](std::size_t i) {
    return 1.0 / (1.0 - shift * lap(symbols[i]));
  });
}

}  // namespace lbmcf
