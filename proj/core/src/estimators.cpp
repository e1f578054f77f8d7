#include "filtfit/estimators.hpp"

#include <cmath>
#include <stdexcept>

namespace filtfit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::ConUF: return "con-uf";
    case EstimatorKind::ConLS: return "con-ls";
    case EstimatorKind::PenUF: return "pen-uf";
    case EstimatorKind::PenLS: return "pen-ls";
    case EstimatorKind::ConLSStar: return "con-ls-star";
    case EstimatorKind::PenLSStar: return "pen-ls-star";
  }
  return "?";
}

EstimatorKind estimator_kind_from_string(std::string_view name) {
  if (name == "con-uf") return EstimatorKind::ConUF;
  if (name == "con-ls") return EstimatorKind::ConLS;
  if (name == "pen-uf") return EstimatorKind::PenUF;
  if (name == "pen-ls") return EstimatorKind::PenLS;
  if (name == "con-ls-star") return EstimatorKind::ConLSStar;
  if (name == "pen-ls-star") return EstimatorKind::PenLSStar;
  throw std::invalid_argument("unknown estimator kind: " + std::string(name));
}

bool is_constrained(EstimatorKind kind) {
  return kind == EstimatorKind::ConUF || kind == EstimatorKind::ConLS ||
         kind == EstimatorKind::ConLSStar;
}

bool is_least_squares(EstimatorKind kind) {
  return kind != EstimatorKind::ConUF && kind != EstimatorKind::PenUF;
}

bool is_saddle(EstimatorKind kind) {
  return kind != EstimatorKind::ConLS && kind != EstimatorKind::PenLS;
}

double residual(const ConvolutionOperator& op, const SpectralVector& u, double p) {
  if (!(p == 2.0 || std::isinf(p))) throw std::invalid_argument("residual: p must be 2 or inf");
  SpectralVector r = op.apply(u);
  axpy(-1.0, op.b(), r);
  return complex_lp_norm(r, p);
}

double default_lambda_uf(double sigma, long n, double delta) {
  if (!(sigma > 0.0)) throw std::invalid_argument("default_lambda_uf: sigma must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("default_lambda_uf: delta out of (0,1)");
  const double n1 = static_cast<double>(n + 1);
  return 16.0 * sigma * std::sqrt(n1 * (1.0 + std::log(n1 / delta)));
}

double default_lambda_ls(double sigma, long n, double delta) {
  if (!(sigma > 0.0)) throw std::invalid_argument("default_lambda_ls: sigma must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("default_lambda_ls: delta out of (0,1)");
  const double n1 = static_cast<double>(n + 1);
  return 8.0 * std::sqrt(2.0) * sigma * sigma * std::sqrt(n1) * (2.0 + std::log(8.0 * n1 / delta));
}

double statistical_accuracy(EstimatorKind kind, double sigma, double r, double c) {
  return is_least_squares(kind) ? c * sigma * sigma * r * r : c * sigma * r;
}

std::pair<double, double> predicted_iterations(const ConvolutionOperator& op, double sigma,
                                               double r, double res2) {
  const double peak = op.diag_max();
  const double t_star = sigma > 0.0 ? peak / sigma : kInf;
  const double t_fast = res2 > 0.0 ? r * peak / res2 : kInf;
  return {t_star, t_fast};
}

double default_r_bar(std::size_t subspace_dim) { return 2.0 * static_cast<double>(subspace_dim); }

namespace {

struct ResolvedConfig {
  double radius = kInf;      // R = r_bar / sqrt(n+1), inf for penalized kinds
  double lambda = 0.0;       // 0 for constrained kinds
  double r_for_rate = 0.0;   // scaled-norm level entering the a-priori rate
  double residual_p = 2.0;
  int dual_q = 2;
};

ResolvedConfig resolve(const ConvolutionOperator& op, const EstimatorConfig& config) {
  const long n = static_cast<long>(op.n());
  const double sqrt_n1 = std::sqrt(static_cast<double>(n + 1));
  ResolvedConfig r;

  const bool uf = !is_least_squares(config.kind);
  r.residual_p = uf ? kInf : 2.0;
  r.dual_q = uf ? 1 : 2;

  if (is_constrained(config.kind)) {
    if (!(config.r_bar >= 0.0) || !std::isfinite(config.r_bar))
      throw std::invalid_argument("estimator config: constrained kinds require r_bar >= 0");
    r.radius = config.r_bar / sqrt_n1;
    r.r_for_rate = config.r_bar;
  } else {
    double lambda = config.lambda;
    if (std::isnan(lambda)) {
      // Auto lambda per the theory; pen-ls-star shares the uniform-fit formula
      // (non-squared residual has the same scaling).
      if (config.kind == EstimatorKind::PenLS)
        lambda = default_lambda_ls(config.sigma, n, config.delta);
      else
        lambda = default_lambda_uf(config.sigma, n, config.delta);
    }
    if (!(lambda >= 0.0)) throw std::invalid_argument("estimator config: lambda must be >= 0");
    r.lambda = lambda;
    // Level-set bound ||u*||_1 <= phi(0)/lambda stands in for the unknown
    // optimal-solution norm.
    if (lambda > 0.0) {
      const double phi0 = complex_lp_norm(op.b(), r.residual_p);
      double level = config.kind == EstimatorKind::PenLS
                         ? 0.5 * complex_lp_norm(op.b(), 2.0) * complex_lp_norm(op.b(), 2.0) / lambda
                         : phi0 / lambda;
      r.radius = kInf;
      r.r_for_rate = sqrt_n1 * level;
    } else {
      r.radius = kInf;
      r.r_for_rate = kInf;
    }
  }
  return r;
}

double omega_star_for(const ConvolutionOperator& op, const EstimatorConfig& config,
                      const ResolvedConfig& rc, const ProximalSetup& setup_u) {
  const double sqrt_n1 = std::sqrt(static_cast<double>(op.n() + 1));
  const double level = std::isfinite(rc.radius) ? rc.radius : rc.r_for_rate / sqrt_n1;
  return std::isfinite(level) ? omega_radius_bound(setup_u, level) : kInf;
}

}  // namespace

SaddleProblem make_saddle_problem(std::shared_ptr<const ConvolutionOperator> op,
                                  const EstimatorConfig& config) {
  if (!is_saddle(config.kind))
    throw std::invalid_argument("make_saddle_problem: kind is solved by FGM");
  const ResolvedConfig rc = resolve(*op, config);
  if (rc.dual_q == 2 && config.setup_v != SetupKind::L2)
    throw std::invalid_argument("make_saddle_problem: l2 dual ball requires the l2 setup");

  const std::size_t cdim = op->n() + 1;
  SaddleProblem p;
  p.b = op->b();
  p.field = [op](const SpectralVector& u, const SpectralVector& v, SpectralVector& fu,
                 SpectralVector& fv) {
    fu = op->apply_adjoint(v);
    fv = op->apply(u);
    scale(-1.0, fv);
    axpy(1.0, op->b(), fv);  // fv = -(Au - b)
  };
  p.primal_radius = rc.radius;
  p.primal_penalty = rc.lambda > 0.0 ? Penalty::l1_pen(rc.lambda) : Penalty::none();
  p.dual_q = rc.dual_q;
  p.setup_u = config.setup_u == SetupKind::ComplexL1 ? ProximalSetup::complex_l1(cdim)
                                                     : ProximalSetup::l2(2 * cdim);
  p.setup_v = config.setup_v == SetupKind::ComplexL1 ? ProximalSetup::complex_l1(cdim)
                                                     : ProximalSetup::l2(2 * cdim);
  p.omega_v = omega_radius_bound(p.setup_v, 1.0);
  p.omega_star_u = omega_star_for(*op, config, rc, p.setup_u);
  p.lipschitz = op->norm_bound();
  p.apriori_rate = rc.r_for_rate * op->diag_max();
  return p;
}

CompositeProblem make_composite_problem(std::shared_ptr<const ConvolutionOperator> op,
                                        const EstimatorConfig& config) {
  if (is_saddle(config.kind))
    throw std::invalid_argument("make_composite_problem: kind is solved by CMP");
  const ResolvedConfig rc = resolve(*op, config);

  const std::size_t cdim = op->n() + 1;
  CompositeProblem p;
  p.residual_at = [op](const SpectralVector& u) {
    SpectralVector r = op->apply(u);
    axpy(-1.0, op->b(), r);
    return r;
  };
  p.smooth_value = [op](const SpectralVector& u) {
    SpectralVector r = op->apply(u);
    axpy(-1.0, op->b(), r);
    return 0.5 * dot(r, r);
  };
  p.smooth_grad = [op](const SpectralVector& u) {
    SpectralVector r = op->apply(u);
    axpy(-1.0, op->b(), r);
    return op->apply_adjoint(r);
  };
  p.penalty = is_constrained(config.kind) ? Penalty::l1_ball(rc.radius)
                                          : Penalty::l1_pen(rc.lambda);
  p.setup = config.setup_u == SetupKind::ComplexL1 ? ProximalSetup::complex_l1(cdim)
                                                   : ProximalSetup::l2(2 * cdim);
  p.lipschitz = op->norm_bound() * op->norm_bound();
  p.omega_star = omega_star_for(*op, config, rc, p.setup);
  return p;
}

double primal_value(const SaddleProblem& problem, const SpectralVector& u) {
  return saddle_primal_value(problem, u);
}

double dual_value(const SaddleProblem& problem, const SpectralVector& v) {
  return saddle_dual_value(problem, v);
}

EstimatorSolution solve(const ComplexSignal& y, const EstimatorConfig& config,
                        const IterationObserver& observer) {
  auto op = std::make_shared<const ConvolutionOperator>(ConvolutionOperator::build(y));
  const std::size_t cdim = op->n() + 1;
  const double sqrt_n1 = std::sqrt(static_cast<double>(cdim));

  const ResolvedConfig rc = resolve(*op, config);

  EstimatorSolution sol;
  sol.op = op;
  sol.lambda_used = rc.lambda;
  if (config.sigma > 0.0 && std::isfinite(rc.r_for_rate))
    sol.eps_star = statistical_accuracy(config.kind, config.sigma, rc.r_for_rate,
                                        config.stat_constant);

  SolveOptions options;
  options.stepsize = config.stepsize;
  options.max_iter = config.max_iter;
  options.stop = config.stopping;
  options.suffix_fraction = config.suffix_fraction;
  options.observer = observer;
  if (config.stopping.kind == StoppingRule::Kind::Statistical && config.stopping.epsilon <= 0.0) {
    if (!(config.sigma > 0.0))
      throw std::invalid_argument("estimator config: statistical stopping requires sigma > 0");
    options.stop.epsilon = sol.eps_star;
  }

  if (op->norm_bound() == 0.0) {
    // Zero observations: the zero filter is optimal for every kind.
    sol.filter_spectral = SpectralVector(cdim);
    sol.trace.final_u = sol.filter_spectral;
    sol.trace.stop_reason = StopReason::Trivial;
  } else if (is_saddle(config.kind)) {
    SaddleProblem problem = make_saddle_problem(op, config);
    sol.trace = config.adaptive_stepsize ? cmp_run_adaptive(problem, options)
                                         : cmp_run(problem, options);
    sol.filter_spectral = sol.trace.final_u;
  } else {
    CompositeProblem problem = make_composite_problem(op, config);
    sol.trace = fgm_run(problem, options);
    sol.filter_spectral = sol.trace.final_u;
  }

  sol.filter_time = ComplexSignal::causal(idft(vec_adjoint(sol.filter_spectral)));
  sol.denoised = idft(vec_adjoint(op->apply(sol.filter_spectral)));
  sol.r_realized = sqrt_n1 * complex_lp_norm(sol.filter_spectral, 1.0);
  return sol;
}

}  // namespace filtfit
