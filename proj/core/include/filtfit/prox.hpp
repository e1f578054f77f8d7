#pragma once

#include "filtfit/signal.hpp"

namespace filtfit {

enum class SetupKind { ComplexL1, L2 };

/// Blockwise proximal setup: the norm sum_j ||u^j||_2 over m+1 blocks of size
/// k, with the power d.-g.f.
///   omega(u) = (m+1)^{(q-1)(2-q)/q} / (2c) * [ sum_j ||u^j||_2^q ]^{2/q},
///   (q, c) = (2, 1/(m+1)) for m <= 1, (1 + 1/log(m+1), 1/(e log(m+1))) for m >= 2.
/// ComplexL1 uses m = n, k = 2 (blocks are complex pairs); L2 uses m = 0, k = N.
struct ProximalSetup {
  SetupKind kind = SetupKind::L2;
  std::size_t block_count = 1;  // m + 1
  std::size_t block_size = 0;   // k
  double q_tilde = 2.0;
  double c_tilde = 1.0;

  static ProximalSetup complex_l1(std::size_t complex_dim);
  static ProximalSetup l2(std::size_t real_dim);

  std::size_t dim() const { return block_count * block_size; }

  /// C(m, q, c) = (1/c) (m+1)^{(q-1)(2-q)/q}; the complex-variable d.-g.f. is
  /// C/2 * ||zeta||_q^2 over pair magnitudes. Computed once by the factories.
  double big_c() const { return big_c_value; }

  double big_c_value = 1.0;

  double dgf(const SpectralVector& u) const;
  SpectralVector dgf_grad(const SpectralVector& u) const;
};

/// omega-radius sqrt(2 max_{||u|| <= R} omega(u)) of the R-ball; the maximum is
/// attained at a single-block point, giving sqrt(C) * R in closed form.
double omega_radius_bound(const ProximalSetup& setup, double R);

/// Iterate plus its d.-g.f. value and subgradient selection (zero on
/// zero-norm blocks), cached so repeated prox calls from one point reuse them.
struct BregmanPoint {
  SpectralVector point;
  double dgf_value = 0.0;
  SpectralVector dgf_grad;

  BregmanPoint() = default;
  BregmanPoint(const ProximalSetup& setup, SpectralVector p)
      : point(std::move(p)), dgf_value(setup.dgf(point)), dgf_grad(setup.dgf_grad(point)) {}
};

/// Composite term Psi attached to a prox-mapping. Lambda values are expected
/// pre-scaled by the solver stepsize where applicable.
struct Penalty {
  enum class Type { None, L1Ball, L2Ball, L1Pen };
  Type type = Type::None;
  double radius = 0.0;
  double lambda = 0.0;
  int power = 1;  // exponent on the l1 penalty, 1 or 2

  static Penalty none() { return {}; }
  static Penalty l1_ball(double R) { return {Type::L1Ball, R, 0.0, 1}; }
  static Penalty l2_ball(double R) { return {Type::L2Ball, R, 0.0, 1}; }
  static Penalty l1_pen(double lambda, int power = 1) { return {Type::L1Pen, 0.0, lambda, power}; }

  Penalty scaled(double eta) const;
  double value(const SpectralVector& u) const;
  bool feasible(const SpectralVector& u, double tol = 1e-10) const;
};

/// argmin_xi { <g, xi> + D_u(xi) + Psi(xi) }: dispatcher over the explicit
/// cases below. Throws invalid_argument on unsupported (setup, penalty) pairs.
SpectralVector prox_composite(const ProximalSetup& setup, const BregmanPoint& u,
                              const SpectralVector& g, const Penalty& penalty);

/// Explicit solution of min <zeta, z> + C/2 ||zeta||_q^2 + thr * ||zeta||_1 in
/// the complex variable: phases opposite to z, magnitudes from the
/// soft-threshold formula.
ComplexVector prox_pen_q1(const ProximalSetup& setup, const ComplexVector& z, double threshold);

/// Squared-l1-penalty variant, min <zeta, z> + C/2 ||zeta||_q^2 + lam ||zeta||_1^2,
/// solved by bisection on t = ||zeta*||_1.
ComplexVector prox_pen_q2(const ProximalSetup& setup, const ComplexVector& z, double lam);

/// Euclidean projection onto { ||zeta||_1 <= R }: phases preserved, magnitudes
/// through the sort-and-threshold simplex-ball projection.
ComplexVector project_l1_ball_complex(const ComplexVector& z, double R);

/// Radial projection onto the Euclidean ball of radius R.
SpectralVector project_l2_ball(const SpectralVector& z, double R);
ComplexVector project_l2_ball(const ComplexVector& z, double R);

/// Constrained prox under the complex-l1 setup, min <zeta, z> + C/2 ||zeta||_q^2
/// over ||zeta||_1 <= R, via bisection on the Lagrange multiplier.
ComplexVector prox_con_l1setup(const ProximalSetup& setup, const ComplexVector& z, double R);

}  // namespace filtfit
