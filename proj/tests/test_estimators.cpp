#include "doctest.h"

#include <cmath>
#include <numbers>

#include "filtfit/estimators.hpp"
#include "filtfit/scenarios.hpp"
#include "support/oracles.hpp"
#include "support/toys.hpp"

using namespace filtfit;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// On-grid complex exponential on [-n, n]: periodic with period n+1, so a
// one-tap spectral filter reproduces it exactly.
ComplexSignal grid_exponential(long n, long k) {
  const double omega = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n + 1);
  ComplexVector v(static_cast<std::size_t>(2 * n + 1));
  for (long t = -n; t <= n; ++t)
    v[static_cast<std::size_t>(t + n)] = std::polar(1.0, omega * static_cast<double>(t));
  return ComplexSignal::two_sided(std::move(v), n);
}

}  // namespace

TEST_SUITE_BEGIN("estimators");

TEST_CASE("kind names round-trip") {
  for (const auto kind : {EstimatorKind::ConUF, EstimatorKind::ConLS, EstimatorKind::PenUF,
                          EstimatorKind::PenLS, EstimatorKind::ConLSStar, EstimatorKind::PenLSStar})
    CHECK(estimator_kind_from_string(to_string(kind)) == kind);
  CHECK_THROWS_AS(estimator_kind_from_string("nope"), std::invalid_argument);
}

TEST_CASE("residual values") {
  const auto inst = testing::denoise_instance(12, 2, 4.0, 3);
  const auto& op = *inst.op;

  SpectralVector zero(op.n() + 1);
  CHECK(residual(op, zero, 2.0) == doctest::Approx(norm2(op.b())).epsilon(1e-12));
  CHECK(residual(op, zero, kInf) == doctest::Approx(complex_lp_norm(op.b(), kInf)).epsilon(1e-12));

  // impulse observation: A = I, so u = b fits exactly
  ComplexVector imp(9, Complex{0.0, 0.0});
  imp[4] = 1.0;  // tau = 0 at index n = 4
  const auto id_op = ConvolutionOperator::build(ComplexSignal::two_sided(imp, 4));
  CHECK(residual(id_op, id_op.b(), 2.0) < 1e-12);

  // time-domain oracle: ||F_n[y - phi*y]||_p
  Rng rng(5);
  SpectralVector u(op.n() + 1);
  for (std::size_t i = 0; i < u.dim(); ++i) u[i] = rng.uniform() - 0.5;
  const ComplexVector phi = idft(vec_adjoint(u));
  const ComplexVector conv = convolve_oracle(ComplexSignal::causal(phi), inst.y, 12);
  ComplexVector diff(conv.size());
  for (long t = 0; t <= 12; ++t)
    diff[static_cast<std::size_t>(t)] = inst.y.at(t) - conv[static_cast<std::size_t>(t)];
  const ComplexVector spec = dft(diff);
  double l2 = 0.0, linf = 0.0;
  for (const auto& c : spec) {
    l2 += std::norm(c);
    linf = std::max(linf, std::abs(c));
  }
  CHECK(residual(op, u, 2.0) == doctest::Approx(std::sqrt(l2)).epsilon(1e-10));
  CHECK(residual(op, u, kInf) == doctest::Approx(linf).epsilon(1e-10));

  CHECK_THROWS_AS((void)residual(op, u, 3.0), std::invalid_argument);
}

TEST_CASE("primal and dual values obey duality") {
  SaddleProblem toy = testing::scalar_saddle_constrained();
  SpectralVector u_star(1), v_star(1);
  u_star[0] = 1.0;
  v_star[0] = -1.0;
  CHECK(primal_value(toy, u_star) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(dual_value(toy, v_star) == doctest::Approx(2.0).epsilon(1e-12));

  // weak duality on random feasible pairs of a real instance
  const auto inst = testing::denoise_instance(10, 2, 4.0, 7);
  EstimatorConfig cfg;
  cfg.kind = EstimatorKind::ConUF;
  cfg.r_bar = inst.r_bar;
  cfg.sigma = inst.sigma;
  SaddleProblem p = make_saddle_problem(inst.op, cfg);
  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    SpectralVector u(11), v(11);
    for (std::size_t i = 0; i < u.dim(); ++i) {
      u[i] = rng.uniform() - 0.5;
      v[i] = rng.uniform() - 0.5;
    }
    // scale into the feasible sets
    const double un = complex_lp_norm(u, 1.0);
    if (un > p.primal_radius) scale(p.primal_radius / un, u);
    const double vn = complex_lp_norm(v, 1.0);
    if (vn > 1.0) scale(1.0 / vn, v);
    CHECK(primal_value(p, u) >= dual_value(p, v) - 1e-10);
  }
}

TEST_CASE("default lambda formulas") {
  CHECK(default_lambda_uf(0.1, 99, 0.05) == doctest::Approx(46.93).epsilon(2e-4));
  CHECK(default_lambda_ls(0.1, 99, 0.05) == doctest::Approx(13.22).epsilon(2e-3));
  CHECK(default_lambda_uf(0.2, 99, 0.05) ==
        doctest::Approx(2.0 * default_lambda_uf(0.1, 99, 0.05)).epsilon(1e-12));
  CHECK(default_lambda_ls(0.2, 99, 0.05) ==
        doctest::Approx(4.0 * default_lambda_ls(0.1, 99, 0.05)).epsilon(1e-12));
  CHECK_THROWS_AS(default_lambda_uf(0.1, 99, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(default_lambda_ls(0.1, 99, 0.0), std::invalid_argument);
}

TEST_CASE("statistical accuracy formulas") {
  CHECK(statistical_accuracy(EstimatorKind::ConUF, 0.1, 8.0) == doctest::Approx(0.8));
  CHECK(statistical_accuracy(EstimatorKind::ConLS, 0.1, 8.0) == doctest::Approx(0.64));
  CHECK(statistical_accuracy(EstimatorKind::PenLS, 0.2, 8.0) ==
        doctest::Approx(4.0 * statistical_accuracy(EstimatorKind::PenLS, 0.1, 8.0)));
  CHECK(statistical_accuracy(EstimatorKind::ConLSStar, 0.1, 8.0) == doctest::Approx(0.64));
}

TEST_CASE("predicted iteration counts") {
  const auto inst = testing::denoise_instance(16, 2, 4.0, 13);
  const auto [t1, f1] = predicted_iterations(*inst.op, 0.1, 8.0, 0.5);
  const auto [t2, f2] = predicted_iterations(*inst.op, 0.2, 8.0, 0.5);
  CHECK(t2 < t1);  // monotone decreasing in sigma
  const auto [t3, f3] = predicted_iterations(*inst.op, 0.1, 16.0, 0.5);
  CHECK(f3 == doctest::Approx(2.0 * f1));
  CHECK(default_r_bar(4) == 8.0);
}

TEST_CASE("zero observations give the zero filter for every kind") {
  const long n = 6;
  const ComplexSignal y =
      ComplexSignal::two_sided(ComplexVector(static_cast<std::size_t>(2 * n + 1)), n);
  for (const auto kind : {EstimatorKind::ConUF, EstimatorKind::ConLS, EstimatorKind::PenUF,
                          EstimatorKind::PenLS, EstimatorKind::ConLSStar, EstimatorKind::PenLSStar}) {
    EstimatorConfig cfg;
    cfg.kind = kind;
    cfg.r_bar = 4.0;
    cfg.lambda = 0.5;
    const EstimatorSolution sol = solve(y, cfg);
    CHECK(norm2(sol.filter_spectral) <= 1e-10);
    CHECK(sol.trace.stop_reason == StopReason::Trivial);
  }
}

TEST_CASE("noiseless grid exponential is reproduced by con-ls") {
  const long n = 16;
  const ComplexSignal y = grid_exponential(n, 3);
  EstimatorConfig cfg;
  cfg.kind = EstimatorKind::ConLS;
  cfg.r_bar = 2.0;
  cfg.max_iter = 3000;

  // the hand-built one-tap filter certifies the optimum is zero residual
  const auto op = ConvolutionOperator::build(y);
  ComplexVector phi(static_cast<std::size_t>(n + 1));
  const double omega = 2.0 * std::numbers::pi * 3.0 / static_cast<double>(n + 1);
  for (long t = 0; t <= n; ++t)
    phi[static_cast<std::size_t>(t)] =
        std::polar(1.0 / static_cast<double>(n + 1), omega * static_cast<double>(t));
  const SpectralVector u_hand = vec(dft(phi));
  CHECK(residual(op, u_hand, 2.0) < 1e-10);
  CHECK(std::sqrt(static_cast<double>(n + 1)) * complex_lp_norm(u_hand, 1.0) <=
        2.0 + 1e-9);  // feasible at r_bar = 2

  const EstimatorSolution sol = solve(y, cfg);
  CHECK(residual(*sol.op, sol.filter_spectral, 2.0) <= 1e-6);
  CHECK(sol.r_realized <= 2.0 + 1e-8);
}

TEST_CASE("con-ls and con-ls-star produce matching residuals") {
  const auto inst = testing::denoise_instance(24, 2, 4.0, 17);
  EstimatorConfig cfg;
  cfg.kind = EstimatorKind::ConLS;
  cfg.r_bar = inst.r_bar;
  cfg.sigma = inst.sigma;
  cfg.max_iter = 4000;
  const EstimatorSolution ls = solve(inst.y, cfg);

  cfg.kind = EstimatorKind::ConLSStar;
  cfg.max_iter = 20000;
  const EstimatorSolution star = solve(inst.y, cfg);

  const double r1 = residual(*ls.op, ls.filter_spectral, 2.0);
  const double r2 = residual(*star.op, star.filter_spectral, 2.0);
  CHECK(std::abs(r1 - r2) <= 5e-3 * std::max(1.0, std::max(r1, r2)));
}

TEST_CASE("pen-ls optimality structure on a tiny instance") {
  const auto inst = testing::denoise_instance(8, 1, 2.0, 19);
  EstimatorConfig cfg;
  cfg.kind = EstimatorKind::PenLS;
  cfg.sigma = inst.sigma;
  cfg.max_iter = 20000;
  const EstimatorSolution sol = solve(inst.y, cfg);

  SpectralVector res = inst.op->apply(sol.filter_spectral);
  axpy(-1.0, inst.op->b(), res);
  const SpectralVector grad = inst.op->apply_adjoint(res);
  for (std::size_t j = 0; j < grad.complex_dim(); ++j) {
    const Complex gj = grad.pair(j);
    const Complex uj = sol.filter_spectral.pair(j);
    if (std::abs(uj) < 1e-9) {
      CHECK(std::abs(gj) <= sol.lambda_used + 1e-6);
    } else {
      // on the support the gradient aligns with -lambda * phase(u)
      const Complex expect = -sol.lambda_used * uj / std::abs(uj);
      CHECK(std::abs(gj - expect) <= 1e-4 * std::max(1.0, sol.lambda_used));
    }
  }
}

TEST_CASE("denoised output equals the convolution oracle") {
  const auto inst = testing::denoise_instance(12, 2, 4.0, 23);
  EstimatorConfig cfg;
  cfg.kind = EstimatorKind::ConUF;
  cfg.r_bar = inst.r_bar;
  cfg.sigma = inst.sigma;
  cfg.max_iter = 200;
  const EstimatorSolution sol = solve(inst.y, cfg);
  const ComplexVector oracle = convolve_oracle(sol.filter_time, inst.y, 12);
  for (std::size_t t = 0; t < oracle.size(); ++t)
    CHECK(std::abs(sol.denoised[t] - oracle[t]) < 1e-8);
  CHECK(sol.r_realized <= inst.r_bar + 1e-8);

  // convolution step is linear in y for the fixed filter
  ComplexSignal y2 = inst.y;
  for (auto& v : y2.values) v *= 2.0;
  const ComplexVector doubled = convolve_oracle(sol.filter_time, y2, 12);
  for (std::size_t t = 0; t < oracle.size(); ++t)
    CHECK(std::abs(doubled[t] - 2.0 * oracle[t]) < 1e-10);
}

TEST_CASE("degenerate n = 0 instances run for every kind") {
  ComplexVector one{Complex{0.7, -0.2}};
  const ComplexSignal y = ComplexSignal::two_sided(one, 0);
  for (const auto kind : {EstimatorKind::ConUF, EstimatorKind::ConLS, EstimatorKind::PenUF,
                          EstimatorKind::PenLS, EstimatorKind::ConLSStar, EstimatorKind::PenLSStar}) {
    EstimatorConfig cfg;
    cfg.kind = kind;
    cfg.r_bar = 2.0;
    cfg.lambda = 0.1;
    cfg.max_iter = 200;
    const EstimatorSolution sol = solve(y, cfg);
    CHECK(std::isfinite(norm2(sol.filter_spectral)));
    CHECK(sol.denoised.size() == 1);
  }
}

TEST_CASE("config validation") {
  const auto inst = testing::denoise_instance(8, 1, 2.0, 29);
  EstimatorConfig cfg;
  cfg.kind = EstimatorKind::ConLS;  // r_bar missing
  CHECK_THROWS_AS((void)solve(inst.y, cfg), std::invalid_argument);

  cfg.kind = EstimatorKind::PenLS;  // lambda auto without sigma
  CHECK_THROWS_AS((void)solve(inst.y, cfg), std::invalid_argument);

  cfg.kind = EstimatorKind::ConLSStar;  // l1 setup on the l2 dual ball
  cfg.r_bar = 2.0;
  cfg.setup_v = SetupKind::ComplexL1;
  CHECK_THROWS_AS((void)solve(inst.y, cfg), std::invalid_argument);
}

TEST_CASE("con-uf approaches a long-run reference objective") {
  const auto inst = testing::denoise_instance(32, 2, 4.0, 31);
  EstimatorConfig cfg;
  cfg.kind = EstimatorKind::ConUF;
  cfg.r_bar = inst.r_bar;
  cfg.sigma = inst.sigma;
  SaddleProblem p = make_saddle_problem(inst.op, cfg);

  SolveOptions long_opt;
  long_opt.max_iter = 100000;
  long_opt.record_trace = false;
  const SolveTrace ref = cmp_run(p, long_opt);
  const double ref_obj = saddle_primal_value(p, ref.final_u);

  SolveOptions opt;
  opt.max_iter = 20000;
  const SolveTrace run = cmp_run(p, opt);
  CHECK(run.rows.back().objective <= ref_obj + 1e-4);
}

TEST_SUITE_END();
