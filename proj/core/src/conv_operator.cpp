#include "filtfit/conv_operator.hpp"

#include <cmath>
#include <stdexcept>

namespace filtfit {

ConvolutionOperator ConvolutionOperator::build(const ComplexSignal& y) {
  const long n = (y.length() - 1) / 2;
  if (y.support_start != -n || y.length() != 2 * n + 1)
    throw std::invalid_argument("ConvolutionOperator: y must be supported on [-n, n]");

  ConvolutionOperator op;
  op.n_ = static_cast<std::size_t>(n);

  // Circular layout with tau = 0 first: (y_0, ..., y_n, y_{-n}, ..., y_{-1}).
  ComplexVector circ(static_cast<std::size_t>(2 * n + 1));
  for (long j = 0; j < 2 * n + 1; ++j) {
    const long tau = j <= n ? j : j - (2 * n + 1);
    circ[static_cast<std::size_t>(j)] = y.at(tau);
  }
  op.diag_ = dft(circ);

  ComplexVector head(static_cast<std::size_t>(n + 1));
  for (long t = 0; t <= n; ++t) head[static_cast<std::size_t>(t)] = y.at(t);
  op.b_ = vec(dft(head));

  for (const auto& d : op.diag_) op.diag_max_ = std::max(op.diag_max_, std::abs(d));
  op.norm_bound_ = std::sqrt(static_cast<double>(2 * n + 1)) * op.diag_max_;
  return op;
}

SpectralVector ConvolutionOperator::apply_chain(const SpectralVector& x, bool conjugate_diag) const {
  if (x.dim() != spectral_dim())
    throw std::invalid_argument("ConvolutionOperator: spectral dimension mismatch");
  const std::size_t L = 2 * n_ + 1;

  ComplexVector zeta = vec_adjoint(x);
  ComplexVector phi = idft(zeta);                 // F_n^H
  ComplexVector padded = zero_pad(phi, L);        // P_n^H
  ComplexVector spec = dft(padded);               // F_2n
  if (conjugate_diag) {
    for (std::size_t k = 0; k < L; ++k) spec[k] *= std::conj(diag_[k]);
  } else {
    for (std::size_t k = 0; k < L; ++k) spec[k] *= diag_[k];
  }
  ComplexVector time = idft(spec);                // F_2n^H
  ComplexVector head = restrict_head(time, n_ + 1);  // P_n
  ComplexVector out = dft(head);                  // F_n
  const double s = std::sqrt(static_cast<double>(L));
  for (auto& v : out) v *= s;
  return vec(out);
}

SpectralVector ConvolutionOperator::apply(const SpectralVector& u) const {
  return apply_chain(u, /*conjugate_diag=*/false);
}

SpectralVector ConvolutionOperator::apply_adjoint(const SpectralVector& v) const {
  return apply_chain(v, /*conjugate_diag=*/true);
}

double ConvolutionOperator::norm_1_to_inf() const {
  double best = 0.0;
  SpectralVector e(n_ + 1);
  for (std::size_t j = 0; j <= n_; ++j) {
    e.fill(0.0);
    e.set_pair(j, Complex{1.0, 0.0});
    best = std::max(best, complex_lp_norm(apply(e), std::numeric_limits<double>::infinity()));
  }
  return best;
}

}  // namespace filtfit
