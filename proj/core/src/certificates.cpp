#include "filtfit/certificates.hpp"

#include <cmath>
#include <stdexcept>

namespace filtfit {

CertificateState::CertificateState(std::size_t complex_dim_u, std::size_t complex_dim_v)
    : u_avg_(complex_dim_u),
      v_avg_(complex_dim_v),
      fu_avg_(complex_dim_u),
      fv_avg_(complex_dim_v),
      h_avg_(complex_dim_u) {}

namespace {

void blend_into(SpectralVector& avg, const SpectralVector& x, double w) {
  if (avg.dim() != x.dim()) throw std::invalid_argument("CertificateState: dimension mismatch");
  for (std::size_t i = 0; i < avg.dim(); ++i) avg[i] += w * (x[i] - avg[i]);
}

}  // namespace

void CertificateState::update(const SpectralVector& u, const SpectralVector& v,
                              const SpectralVector& fu, const SpectralVector& fv,
                              const SpectralVector& h, double gamma) {
  if (gamma <= 0.0) throw std::invalid_argument("CertificateState: gamma must be positive");
  const double w = gamma / (total_weight_ + gamma);
  blend_into(u_avg_, u, w);
  blend_into(v_avg_, v, w);
  blend_into(fu_avg_, fu, w);
  blend_into(fv_avg_, fv, w);
  blend_into(h_avg_, h, w);
  total_weight_ += gamma;
}

double gap_bound(const CertificateState& state, const SaddleProblem& problem) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (state.total_weight() <= 0.0) return 0.0;

  // Dual side: max over { ||v||_{C,q} <= 1 } of <-Fv_avg, v> plus <Fv_avg, v_avg>.
  const double dual_norm = problem.dual_q == 1 ? kInf : 2.0;
  double bound = complex_lp_norm(state.fv_avg(), dual_norm) + dot(state.fv_avg(), state.v_avg());

  const Penalty& pen = problem.primal_penalty;
  if (problem.primal_bounded()) {
    // max over the l1 ball of <-(Fu_avg + h_avg), u> = R ||Fu_avg + h_avg||_{C,inf}.
    SpectralVector a = lincomb(1.0, state.fu_avg(), 1.0, state.h_avg());
    const double inf_norm = complex_lp_norm(a, kInf);
    bound += problem.primal_radius * inf_norm + dot(a, state.u_avg());
  } else if (pen.type == Penalty::Type::L1Pen && pen.power == 1) {
    // Psi kept intact: sup_u <-Fu_avg, u> - lambda ||u||_1 is 0 iff the
    // averaged dual certificate is lambda-feasible.
    if (complex_lp_norm(state.fu_avg(), kInf) > pen.lambda) return kInf;
    bound += dot(state.fu_avg(), state.u_avg()) + pen.value(state.u_avg());
  } else if (pen.type == Penalty::Type::L1Pen && pen.power == 2) {
    // Conjugate of lambda ||.||_1^2 is ||.||_inf^2 / (4 lambda): always finite.
    const double inf_norm = complex_lp_norm(state.fu_avg(), kInf);
    bound += inf_norm * inf_norm / (4.0 * pen.lambda);
    bound += dot(state.fu_avg(), state.u_avg()) + pen.value(state.u_avg());
  } else {
    return kInf;  // unbounded primal domain without a coercive penalty
  }
  return std::max(bound, 0.0);
}

double relative_accuracy(const CertificateState& state, const SaddleProblem& problem) {
  const double dual =
      saddle_dual_value_from_field(problem, state.v_avg(), state.fu_avg());
  if (!(dual > 0.0)) return std::numeric_limits<double>::infinity();
  return gap_bound(state, problem) / dual;
}

}  // namespace filtfit
