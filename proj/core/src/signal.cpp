#include "filtfit/signal.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

namespace filtfit {

namespace {

// FFTW plan creation is not thread-safe; execution on distinct buffers is.
// Plans are cached per (length, sign) and created with FFTW_UNALIGNED so they
// can run on any caller buffer.
class PlanCache {
 public:
  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<Complex> in(n), out(n);
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n),
                                   reinterpret_cast<fftw_complex*>(in.data()),
                                   reinterpret_cast<fftw_complex*>(out.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  std::mutex mu_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

// Unitary transform with the +2*pi*i*k*t/L exponent for sign = FFTW_BACKWARD
// (FFTW's BACKWARD is the positive-exponent direction).
ComplexVector unitary_transform(std::span<const Complex> x, int sign) {
  if (x.empty()) throw std::invalid_argument("dft: empty input");
  const std::size_t n = x.size();
  ComplexVector out(n);
  fftw_plan p = plan_cache().get(n, sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(x.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : out) v *= s;
  return out;
}

}  // namespace

ComplexSignal ComplexSignal::two_sided(ComplexVector v, long n) {
  if (static_cast<long>(v.size()) != 2 * n + 1)
    throw std::invalid_argument("two_sided: need 2n+1 values");
  return {std::move(v), -n};
}

SpectralVector SpectralVector::from_entries(std::vector<double> entries) {
  if (entries.size() % 2 != 0)
    throw std::invalid_argument("SpectralVector: odd entry count");
  SpectralVector u;
  u.e_ = std::move(entries);
  return u;
}

ComplexVector dft(std::span<const Complex> x) { return unitary_transform(x, FFTW_BACKWARD); }

ComplexVector idft(std::span<const Complex> x) { return unitary_transform(x, FFTW_FORWARD); }

SpectralVector vec(std::span<const Complex> z) {
  SpectralVector u(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) u.set_pair(j, z[j]);
  return u;
}

ComplexVector vec_adjoint(const SpectralVector& u) {
  ComplexVector z(u.complex_dim());
  for (std::size_t j = 0; j < z.size(); ++j) z[j] = u.pair(j);
  return z;
}

ComplexVector restrict_head(std::span<const Complex> v, std::size_t m) {
  if (m > v.size()) throw std::invalid_argument("restrict_head: m exceeds input length");
  return ComplexVector(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m));
}

ComplexVector zero_pad(std::span<const Complex> v, std::size_t target) {
  if (target < v.size()) throw std::invalid_argument("zero_pad: target shorter than input");
  ComplexVector out(v.begin(), v.end());
  out.resize(target, Complex{0.0, 0.0});
  return out;
}

double scaled_lp_seminorm(const ComplexSignal& s, long n, double p) {
  if (n < 0) throw std::invalid_argument("scaled_lp_seminorm: n < 0");
  if (p < 1.0) throw std::invalid_argument("scaled_lp_seminorm: p < 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (long tau = 0; tau <= n; ++tau) m = std::max(m, std::abs(s.at(tau)));
    return m;
  }
  double acc = 0.0;
  for (long tau = 0; tau <= n; ++tau) acc += std::pow(std::abs(s.at(tau)), p);
  return std::pow(acc / static_cast<double>(n + 1), 1.0 / p);
}

double complex_lp_norm(const SpectralVector& u, double p) {
  const std::size_t m = u.complex_dim();
  if (std::isinf(p)) {
    double mx = 0.0;
    for (std::size_t j = 0; j < m; ++j) mx = std::max(mx, std::abs(u.pair(j)));
    return mx;
  }
  if (p == 1.0) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) acc += std::abs(u.pair(j));
    return acc;
  }
  if (p == 2.0) return norm2(u);
  throw std::invalid_argument("complex_lp_norm: p must be 1, 2 or inf");
}

ComplexVector convolve_oracle(const ComplexSignal& filter, const ComplexSignal& y, long n) {
  if (n < 0) throw std::invalid_argument("convolve_oracle: n < 0");
  if (filter.support_start != 0 || filter.length() != n + 1)
    throw std::invalid_argument("convolve_oracle: filter must be supported on [0, n]");
  if (y.support_start != -n || y.length() != 2 * n + 1)
    throw std::invalid_argument("convolve_oracle: y must be supported on [-n, n]");
  ComplexVector out(static_cast<std::size_t>(n + 1), Complex{0.0, 0.0});
  for (long t = 0; t <= n; ++t) {
    Complex acc{0.0, 0.0};
    for (long tau = 0; tau <= n; ++tau) acc += filter.at(tau) * y.at(t - tau);
    out[static_cast<std::size_t>(t)] = acc;
  }
  return out;
}

double dot(const SpectralVector& a, const SpectralVector& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dot: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(const SpectralVector& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) acc += a[i] * a[i];
  return std::sqrt(acc);
}

void axpy(double alpha, const SpectralVector& x, SpectralVector& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("axpy: dimension mismatch");
  for (std::size_t i = 0; i < x.dim(); ++i) y[i] += alpha * x[i];
}

void scale(double alpha, SpectralVector& x) {
  for (std::size_t i = 0; i < x.dim(); ++i) x[i] *= alpha;
}

SpectralVector lincomb(double a, const SpectralVector& x, double b, const SpectralVector& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("lincomb: dimension mismatch");
  SpectralVector out(x.complex_dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = a * x[i] + b * y[i];
  return out;
}

}  // namespace filtfit
