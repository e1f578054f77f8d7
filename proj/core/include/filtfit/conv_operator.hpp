#pragma once

#include "filtfit/signal.hpp"

namespace filtfit {

/// Linear map A on R^{2(n+1)} sending Fourier-domain filter coordinates u to
/// Vec F_n [y * F_n^H Vec^H u], evaluated in O(n log n) through the circular
/// convolution factorization A = sqrt(2n+1) Vec F_n P_n F_2n^H D_y F_2n P_n^H F_n^H Vec^H.
///
/// Immutable after build; apply/apply_adjoint allocate per call and may run
/// concurrently on a shared instance.
class ConvolutionOperator {
 public:
  /// y must be supported on [-n, n].
  static ConvolutionOperator build(const ComplexSignal& y);

  std::size_t n() const { return n_; }
  std::size_t spectral_dim() const { return 2 * (n_ + 1); }

  /// Diagonal of D_y: DFT of length 2n+1 of y in circular order (y_0..y_n,
  /// y_{-n}..y_{-1}), so that the first n+1 coordinates of the circular
  /// convolution reproduce [y * phi]_0^n.
  const ComplexVector& diag() const { return diag_; }

  /// Vec F_n [y]_0^n; equals A applied to the unit-impulse filter coordinates.
  const SpectralVector& b() const { return b_; }

  SpectralVector apply(const SpectralVector& u) const;
  SpectralVector apply_adjoint(const SpectralVector& v) const;

  /// sqrt(2n+1) * max |diag|; upper bound on the spectral norm (never below it).
  double norm_bound() const { return norm_bound_; }

  /// max |diag| = ||F_2n [y]||_inf, the Fourier-domain peak of the observations.
  double diag_max() const { return diag_max_; }

  /// Exact ||A||_{1->inf} over the complex l1/linf balls, computed by n+1
  /// operator applications. Testing aid, O(n^2 log n).
  double norm_1_to_inf() const;

 private:
  ConvolutionOperator() = default;

  SpectralVector apply_chain(const SpectralVector& x, bool conjugate_diag) const;

  std::size_t n_ = 0;
  ComplexVector diag_;
  SpectralVector b_;
  double norm_bound_ = 0.0;
  double diag_max_ = 0.0;
};

}  // namespace filtfit
