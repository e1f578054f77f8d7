#pragma once

// Small hand-checkable problem instances shared by the solver, certificate
// and estimator tests.

#include <memory>

#include "filtfit/estimators.hpp"
#include "filtfit/scenarios.hpp"
#include "filtfit/solvers.hpp"

namespace filtfit::testing {

// f(u) = 1/2 ||u - c||_2^2 under the l2 setup.
inline CompositeProblem quadratic_problem(const SpectralVector& c) {
  CompositeProblem p;
  p.smooth_value = [c](const SpectralVector& u) {
    SpectralVector d = lincomb(1.0, u, -1.0, c);
    return 0.5 * dot(d, d);
  };
  p.smooth_grad = [c](const SpectralVector& u) { return lincomb(1.0, u, -1.0, c); };
  p.setup = ProximalSetup::l2(c.dim());
  p.lipschitz = 1.0;
  p.omega_star = 2.0 * norm2(c) + 1.0;
  return p;
}

// min_{|u| <= 1} max_{|v| <= 1} Re<v, u - 3>; saddle point u* = 1, v* = -1,
// value 2.
inline SaddleProblem scalar_saddle_constrained() {
  SaddleProblem p;
  p.b = SpectralVector(1);
  p.b[0] = 3.0;
  p.field = [](const SpectralVector& u, const SpectralVector& v, SpectralVector& fu,
               SpectralVector& fv) {
    fu = v;
    fv = SpectralVector(1);
    fv[0] = 3.0 - u[0];
    fv[1] = -u[1];
  };
  p.primal_radius = 1.0;
  p.dual_q = 1;
  p.setup_u = ProximalSetup::l2(2);
  p.setup_v = ProximalSetup::l2(2);
  p.omega_v = 1.0;
  p.omega_star_u = 1.0;
  p.lipschitz = 1.0;
  p.apriori_rate = 3.0;
  return p;
}

// min_u max_{|v| <= 1} Re<v, u - 3> + |u|; optimal value 3 (any u in [0, 3]).
inline SaddleProblem scalar_saddle_penalized() {
  SaddleProblem p = scalar_saddle_constrained();
  p.primal_radius = std::numeric_limits<double>::infinity();
  p.primal_penalty = Penalty::l1_pen(1.0);
  p.omega_star_u = 3.0;  // level bound ||u*||_1 <= phi(0)/lambda = 3
  return p;
}

struct DenoiseInstance {
  ComplexSignal x, y;
  std::shared_ptr<const ConvolutionOperator> op;
  double sigma = 0.0;
  double r_bar = 0.0;
};

inline DenoiseInstance denoise_instance(long n, int s, double snr, std::uint64_t seed) {
  DenoiseInstance inst;
  Rng rng(seed);
  inst.x = generate_ransin(s, n, rng);
  inst.sigma = 1.0 / (snr * std::sqrt(static_cast<double>(n)));
  inst.y = add_noise(inst.x, inst.sigma, rng);
  inst.op = std::make_shared<const ConvolutionOperator>(ConvolutionOperator::build(inst.y));
  inst.r_bar = default_r_bar(static_cast<std::size_t>(s));
  return inst;
}

// Plain projected/proximal gradient descent: the long-run reference for FGM.
inline SpectralVector proximal_gradient_reference(const CompositeProblem& problem, int iters) {
  const std::size_t cdim = problem.setup.dim() / 2;
  SpectralVector u(cdim);
  const double eta = 1.0 / problem.lipschitz;
  const auto l2 = ProximalSetup::l2(problem.setup.dim());
  for (int t = 0; t < iters; ++t) {
    SpectralVector g = problem.smooth_grad(u);
    scale(eta, g);
    u = prox_composite(l2, BregmanPoint(l2, u), g, problem.penalty.scaled(eta));
  }
  return u;
}

}  // namespace filtfit::testing
