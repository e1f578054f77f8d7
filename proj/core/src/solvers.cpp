#include "filtfit/solvers.hpp"

#include <chrono>
#include <cmath>

#include "filtfit/certificates.hpp"

namespace filtfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool all_finite(const SpectralVector& v) {
  for (std::size_t i = 0; i < v.dim(); ++i)
    if (!std::isfinite(v[i])) return false;
  return true;
}

SpectralVector negated(const SpectralVector& v) {
  SpectralVector out = v;
  scale(-1.0, out);
  return out;
}

SpectralVector scaled_copy(double a, const SpectralVector& v) {
  SpectralVector out = v;
  scale(a, out);
  return out;
}

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double bregman(const ProximalSetup& setup, const BregmanPoint& from, const SpectralVector& to) {
  return setup.dgf(to) - from.dgf_value - (dot(from.dgf_grad, to) - dot(from.dgf_grad, from.point));
}

}  // namespace

SpectralVector penalty_subgradient(const Penalty& penalty, const SpectralVector& u) {
  SpectralVector h(u.complex_dim());
  if (penalty.type != Penalty::Type::L1Pen || penalty.lambda == 0.0) return h;
  double w = penalty.lambda;
  if (penalty.power == 2) w = 2.0 * penalty.lambda * complex_lp_norm(u, 1.0);
  for (std::size_t j = 0; j < u.complex_dim(); ++j) {
    const Complex z = u.pair(j);
    const double a = std::abs(z);
    if (a > 0.0) h.set_pair(j, (w / a) * z);
  }
  return h;
}

double saddle_primal_value_from_residual(const SaddleProblem& problem,
                                         const SpectralVector& residual,
                                         const SpectralVector& u) {
  return complex_lp_norm(residual, problem.dual_norm_p()) + problem.primal_penalty.value(u);
}

double saddle_primal_value(const SaddleProblem& problem, const SpectralVector& u) {
  SpectralVector fu(u.complex_dim()), fv(problem.b.complex_dim());
  SpectralVector zero_v(problem.b.complex_dim());
  problem.field(u, zero_v, fu, fv);
  return saddle_primal_value_from_residual(problem, negated(fv), u);
}

double saddle_dual_value_from_field(const SaddleProblem& problem, const SpectralVector& v,
                                    const SpectralVector& atv) {
  const double base = -dot(v, problem.b);
  const double inf_norm = complex_lp_norm(atv, kInf);
  if (problem.primal_bounded()) return base - problem.primal_radius * inf_norm;
  const Penalty& pen = problem.primal_penalty;
  if (pen.type == Penalty::Type::L1Pen && pen.power == 1)
    return inf_norm <= pen.lambda ? base : -kInf;
  if (pen.type == Penalty::Type::L1Pen && pen.power == 2)
    return base - inf_norm * inf_norm / (4.0 * pen.lambda);
  return -kInf;
}

double saddle_dual_value(const SaddleProblem& problem, const SpectralVector& v) {
  SpectralVector fu(problem.setup_u.dim() / 2), fv(problem.b.complex_dim());
  SpectralVector zero_u(problem.setup_u.dim() / 2);
  problem.field(zero_u, v, fu, fv);
  return saddle_dual_value_from_field(problem, v, fu);
}

// ---------------------------------------------------------------------------
// Fast Gradient Method
// ---------------------------------------------------------------------------

SolveTrace fgm_run(const CompositeProblem& problem, const SolveOptions& options) {
  const double eta = options.stepsize.value_or(1.0 / problem.lipschitz);
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw std::invalid_argument("fgm_run: stepsize must be positive and finite");
  if (options.max_iter < 0) throw std::invalid_argument("fgm_run: negative iteration budget");

  // Theory bound eps(T) = 2 L_f Omega_*^2 / T^2 inverted for T; drives both
  // the statistical and the threshold rule (FGM has no online certificate).
  long stop_at = -1;
  if (options.stop.kind != StoppingRule::Kind::Budget && options.stop.epsilon > 0.0 &&
      std::isfinite(problem.omega_star)) {
    const double t_needed = std::sqrt(2.0 * problem.lipschitz * problem.omega_star *
                                      problem.omega_star / options.stop.epsilon);
    stop_at = std::max(1L, static_cast<long>(std::ceil(t_needed)));
  }

  const std::size_t cdim = problem.setup.dim() / 2;
  SpectralVector u_interp(cdim);  // u^t, starts at the omega-center
  SpectralVector g_accum(cdim);
  double weight_accum = 0.0;  // sum of the gradient weights inside g_accum
  const BregmanPoint center(problem.setup, SpectralVector(cdim));

  SolveTrace trace;
  trace.stop_reason = options.max_iter == 0 ? StopReason::Trivial : StopReason::Budget;
  const auto t0 = std::chrono::steady_clock::now();

  for (int t = 0; t < options.max_iter; ++t) {
    // The composite term rides along with the linearizations: each prox
    // weights Psi by the same aggregate as its (weighted) gradient argument,
    // which keeps the fixed point at the composite optimum. For indicator
    // penalties this is the algorithm exactly as displayed.
    SpectralVector u_t = prox_composite(problem.setup, center, scaled_copy(eta, g_accum),
                                        problem.penalty.scaled(eta * weight_accum));
    const double tau = 2.0 * (t + 2.0) / ((t + 1.0) * (t + 4.0));
    const SpectralVector u_mid = lincomb(tau, u_t, 1.0 - tau, u_interp);
    SpectralVector g_t = problem.smooth_grad(u_mid);
    if (!all_finite(g_t)) throw DivergedError("fgm_run: non-finite gradient", t);
    const double a_t = (t + 2.0) / 2.0;
    scale(a_t, g_t);
    const BregmanPoint at_u_t(problem.setup, std::move(u_t));
    const SpectralVector u_next = prox_composite(problem.setup, at_u_t, scaled_copy(eta, g_t),
                                                 problem.penalty.scaled(eta * a_t));
    u_interp = lincomb(tau, u_next, 1.0 - tau, u_interp);
    axpy(1.0, g_t, g_accum);
    weight_accum += a_t;

    const bool want_row = options.record_trace || options.observer;
    SpectralVector res;
    double obj = kNaN;
    if (want_row) {
      if (problem.residual_at) {
        res = problem.residual_at(u_interp);
        obj = 0.5 * dot(res, res) + problem.penalty.value(u_interp);
      } else {
        obj = problem.smooth_value(u_interp) + problem.penalty.value(u_interp);
      }
    }
    if (options.record_trace)
      trace.rows.push_back({t + 1, obj, kNaN, kNaN, elapsed_seconds(t0)});
    if (options.observer) {
      IterationRecord rec;
      rec.iteration = t + 1;
      rec.objective = obj;
      rec.iterate = &u_interp;
      rec.residual = problem.residual_at ? &res : nullptr;
      options.observer(rec);
    }

    trace.iterations = t + 1;
    if (stop_at > 0 && t + 1 >= stop_at) {
      trace.stop_reason = options.stop.kind == StoppingRule::Kind::Statistical
                              ? StopReason::Statistical
                              : StopReason::GapThreshold;
      break;
    }
  }

  trace.final_u = std::move(u_interp);
  return trace;
}

// ---------------------------------------------------------------------------
// Composite Mirror Prox
// ---------------------------------------------------------------------------

namespace {

struct CmpWork {
  SpectralVector u_half, v_half, u_next, v_next, fu2, fv2;
};

// One extragradient round from (bu, bv) at stepsizes (eta_u, eta_v).
void cmp_step(const SaddleProblem& problem, const Penalty& pen_u, const Penalty& pen_v,
              const BregmanPoint& bu, const BregmanPoint& bv, const SpectralVector& fu,
              const SpectralVector& fv, double eta_u, double eta_v, int iteration, CmpWork& w) {
  w.u_half = prox_composite(problem.setup_u, bu, scaled_copy(eta_u, fu), pen_u.scaled(eta_u));
  w.v_half = prox_composite(problem.setup_v, bv, scaled_copy(eta_v, fv), pen_v);
  problem.field(w.u_half, w.v_half, w.fu2, w.fv2);
  if (!all_finite(w.fu2) || !all_finite(w.fv2))
    throw DivergedError("cmp: non-finite field value", iteration);
  w.u_next = prox_composite(problem.setup_u, bu, scaled_copy(eta_u, w.fu2), pen_u.scaled(eta_u));
  w.v_next = prox_composite(problem.setup_v, bv, scaled_copy(eta_v, w.fv2), pen_v);
}

SolveTrace cmp_run_impl(const SaddleProblem& problem, const SolveOptions& options, bool adaptive) {
  if (options.max_iter < 0) throw std::invalid_argument("cmp: negative iteration budget");
  if (problem.primal_bounded() && problem.primal_penalty.type == Penalty::Type::L1Pen &&
      problem.primal_penalty.lambda > 0.0)
    throw std::invalid_argument("cmp: combined ball constraint and l1 penalty is unsupported");

  double eta = options.stepsize.value_or(problem.omega_v /
                                         (problem.omega_star_u * problem.lipschitz));
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw std::invalid_argument("cmp: stepsize must be positive and finite (supply one)");
  // Joint setup: the v-block runs at eta, the u-block at eta / s_u with the
  // radius-balanced weight s_u = (Omega[V]/Omega_*[U])^2.
  const double s_u = (problem.omega_v / problem.omega_star_u) * (problem.omega_v / problem.omega_star_u);

  const std::size_t cdim_u = problem.setup_u.dim() / 2;
  const std::size_t cdim_v = problem.setup_v.dim() / 2;
  const Penalty pen_u = problem.primal_bounded() ? Penalty::l1_ball(problem.primal_radius)
                                                 : problem.primal_penalty;
  const Penalty pen_v =
      problem.dual_q == 1 ? Penalty::l1_ball(1.0) : Penalty::l2_ball(1.0);

  BregmanPoint bu(problem.setup_u, SpectralVector(cdim_u));
  BregmanPoint bv(problem.setup_v, SpectralVector(cdim_v));
  CertificateState cert(cdim_u, cdim_v);

  // Suffix averaging restarts the running averages once, at the boundary of
  // the kept trailing window of the iteration budget.
  long restart_at = -1;
  if (options.suffix_fraction < 1.0) {
    if (options.suffix_fraction <= 0.0)
      throw std::invalid_argument("cmp: suffix fraction must be in (0, 1]");
    restart_at = static_cast<long>(
        std::floor((1.0 - options.suffix_fraction) * options.max_iter));
  }

  SolveTrace trace;
  trace.stop_reason = options.max_iter == 0 ? StopReason::Trivial : StopReason::Budget;
  const auto t0 = std::chrono::steady_clock::now();

  SpectralVector fu(cdim_u), fv(cdim_v);
  CmpWork w;
  for (int t = 0; t < options.max_iter; ++t) {
    problem.field(bu.point, bv.point, fu, fv);
    if (!all_finite(fu) || !all_finite(fv)) throw DivergedError("cmp: non-finite field value", t);

    if (!adaptive) {
      cmp_step(problem, pen_u, pen_v, bu, bv, fu, fv, eta / s_u, eta, t, w);
    } else {
      int retries = 0;
      for (;;) {
        cmp_step(problem, pen_u, pen_v, bu, bv, fu, fv, eta / s_u, eta, t, w);
        const double lin = dot(w.fu2, lincomb(1.0, w.u_half, -1.0, w.u_next)) +
                           dot(w.fv2, lincomb(1.0, w.v_half, -1.0, w.v_next));
        const double breg = s_u * bregman(problem.setup_u, bu, w.u_next) +
                            bregman(problem.setup_v, bv, w.v_next);
        const double delta = eta * lin - breg;
        if (delta <= 1e-12) break;
        eta *= 0.5;
        ++trace.backtracks;
        if (++retries > 50) throw DivergedError("cmp_run_adaptive: retry cap exceeded", t);
      }
    }

    if (t == restart_at) cert = CertificateState(cdim_u, cdim_v);
    cert.update(w.u_half, w.v_half, w.fu2, w.fv2,
                penalty_subgradient(problem.primal_penalty, w.u_half), eta);
    if (adaptive) eta *= 1.2;

    bu = BregmanPoint(problem.setup_u, std::move(w.u_next));
    bv = BregmanPoint(problem.setup_v, std::move(w.v_next));

    const bool want_row = options.record_trace || options.observer ||
                          options.stop.kind != StoppingRule::Kind::Budget;
    double obj = kNaN, dualv = kNaN, bound = kNaN;
    SpectralVector residual_avg;
    if (want_row) {
      residual_avg = negated(cert.fv_avg());  // A u_avg - b, exact for matching weights
      obj = saddle_primal_value_from_residual(problem, residual_avg, cert.u_avg());
      dualv = saddle_dual_value_from_field(problem, cert.v_avg(), cert.fu_avg());
      bound = gap_bound(cert, problem);
    }
    if (options.record_trace)
      trace.rows.push_back({t + 1, obj, dualv, bound, elapsed_seconds(t0)});
    if (options.observer) {
      IterationRecord rec;
      rec.iteration = t + 1;
      rec.objective = obj;
      rec.dual = dualv;
      rec.certificate = bound;
      rec.iterate = &cert.u_avg();
      rec.residual = &residual_avg;
      options.observer(rec);
    }

    trace.iterations = t + 1;
    if (options.stop.kind == StoppingRule::Kind::GapThreshold && bound <= options.stop.epsilon) {
      trace.stop_reason = StopReason::GapThreshold;
      break;
    }
    if (options.stop.kind == StoppingRule::Kind::Statistical) {
      if (bound <= options.stop.epsilon) {
        trace.stop_reason = StopReason::Statistical;
        break;
      }
      if (std::isinf(bound) && std::isfinite(problem.apriori_rate) &&
          problem.apriori_rate / (t + 1.0) <= options.stop.epsilon) {
        trace.stop_reason = StopReason::Statistical;
        break;
      }
    }
  }

  trace.final_u = cert.total_weight() > 0.0 ? cert.u_avg() : SpectralVector(cdim_u);
  trace.final_v = cert.total_weight() > 0.0 ? cert.v_avg() : SpectralVector(cdim_v);
  return trace;
}

}  // namespace

SolveTrace cmp_run(const SaddleProblem& problem, const SolveOptions& options) {
  return cmp_run_impl(problem, options, /*adaptive=*/false);
}

SolveTrace cmp_run_adaptive(const SaddleProblem& problem, const SolveOptions& options) {
  return cmp_run_impl(problem, options, /*adaptive=*/true);
}

}  // namespace filtfit
