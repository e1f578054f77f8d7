#pragma once

#include "filtfit/solvers.hpp"

namespace filtfit {

/// Running weighted averages of saddle iterates, field values and penalty
/// subgradients. Weights lambda_tau = gamma_tau / sum gamma are implicit; all
/// sums update in O(N) with no stored history.
class CertificateState {
 public:
  CertificateState(std::size_t complex_dim_u, std::size_t complex_dim_v);

  void update(const SpectralVector& u, const SpectralVector& v, const SpectralVector& fu,
              const SpectralVector& fv, const SpectralVector& h, double gamma);

  double total_weight() const { return total_weight_; }
  const SpectralVector& u_avg() const { return u_avg_; }
  const SpectralVector& v_avg() const { return v_avg_; }
  const SpectralVector& fu_avg() const { return fu_avg_; }
  const SpectralVector& fv_avg() const { return fv_avg_; }
  const SpectralVector& h_avg() const { return h_avg_; }

 private:
  double total_weight_ = 0.0;
  SpectralVector u_avg_, v_avg_, fu_avg_, fv_avg_, h_avg_;
};

/// Upper bound on the duality gap of the averaged pair: linear maximization of
/// the averaged field over the ball domains plus the averaged inner terms.
/// Returns +inf for an unconstrained primal domain whenever the averaged dual
/// certificate is not lambda-feasible (no silent clamping).
double gap_bound(const CertificateState& state, const SaddleProblem& problem);

/// gap_bound / phi_underbar(v_avg) when the dual value is strictly positive,
/// +inf otherwise.
double relative_accuracy(const CertificateState& state, const SaddleProblem& problem);

}  // namespace filtfit
