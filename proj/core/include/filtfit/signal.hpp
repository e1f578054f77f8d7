#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace filtfit {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Finite-support complex time-domain sequence. Values outside
/// [support_start, support_start + length - 1] are implicitly zero.
struct ComplexSignal {
  ComplexVector values;
  long support_start = 0;

  ComplexSignal() = default;
  ComplexSignal(ComplexVector v, long start) : values(std::move(v)), support_start(start) {}

  /// Signal supported on [0, L-1].
  static ComplexSignal causal(ComplexVector v) { return {std::move(v), 0}; }
  /// Signal supported on [-n, n]; v must have 2n+1 entries.
  static ComplexSignal two_sided(ComplexVector v, long n);

  long length() const { return static_cast<long>(values.size()); }
  long support_end() const { return support_start + length() - 1; }

  /// Value at absolute time index tau (zero outside the support).
  Complex at(long tau) const {
    const long i = tau - support_start;
    if (i < 0 || i >= length()) return {0.0, 0.0};
    return values[static_cast<std::size_t>(i)];
  }
};

/// Real vector of interleaved (Re, Im) pairs: complex coordinate j lives at
/// entries (2j, 2j+1).
class SpectralVector {
 public:
  SpectralVector() = default;
  explicit SpectralVector(std::size_t complex_dim) : e_(2 * complex_dim, 0.0) {}

  /// Wraps an even-dimensional entry vector; throws invalid_argument otherwise.
  static SpectralVector from_entries(std::vector<double> entries);

  std::size_t dim() const { return e_.size(); }
  std::size_t complex_dim() const { return e_.size() / 2; }
  bool empty() const { return e_.empty(); }

  double& operator[](std::size_t i) { return e_[i]; }
  double operator[](std::size_t i) const { return e_[i]; }

  Complex pair(std::size_t j) const { return {e_[2 * j], e_[2 * j + 1]}; }
  void set_pair(std::size_t j, Complex z) {
    e_[2 * j] = z.real();
    e_[2 * j + 1] = z.imag();
  }

  double* data() { return e_.data(); }
  const double* data() const { return e_.data(); }
  const std::vector<double>& entries() const { return e_; }

  void fill(double v) { std::fill(e_.begin(), e_.end(), v); }

 private:
  std::vector<double> e_;
};

// ---- unitary DFT (exponent +2*pi*i*k*t/L, factor 1/sqrt(L)) ----

ComplexVector dft(std::span<const Complex> x);
ComplexVector idft(std::span<const Complex> x);
inline ComplexVector dft(const ComplexSignal& s) { return dft(std::span<const Complex>(s.values)); }

// ---- vectorization and its adjoint (exact round trip) ----

SpectralVector vec(std::span<const Complex> z);
ComplexVector vec_adjoint(const SpectralVector& u);

// ---- restriction / zero-padding adjoint pair ----

/// Keeps coordinates 0..m-1.
ComplexVector restrict_head(std::span<const Complex> v, std::size_t m);
/// Appends zeros up to target length.
ComplexVector zero_pad(std::span<const Complex> v, std::size_t target);

// ---- norms ----

/// ((1/(n+1)) sum_{tau=0..n} |s_tau|^p)^(1/p); p = infinity gives the max.
double scaled_lp_seminorm(const ComplexSignal& s, long n, double p);

/// l_p norm over the complex pairs of a spectral vector (p in {1, 2, inf}).
double complex_lp_norm(const SpectralVector& u, double p);

// ---- reference convolution ----

/// [filter * y]_t for 0 <= t <= n by direct O(n^2) summation. filter must be
/// supported on [0, n] and y on [-n, n]. Verification oracle for the FFT path.
ComplexVector convolve_oracle(const ComplexSignal& filter, const ComplexSignal& y, long n);

// ---- small vector helpers shared by the solver stack ----

double dot(const SpectralVector& a, const SpectralVector& b);
double norm2(const SpectralVector& a);
/// y += alpha * x
void axpy(double alpha, const SpectralVector& x, SpectralVector& y);
void scale(double alpha, SpectralVector& x);
/// out = a*x + b*y
SpectralVector lincomb(double a, const SpectralVector& x, double b, const SpectralVector& y);

}  // namespace filtfit
