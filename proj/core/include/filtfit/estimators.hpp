#pragma once

#include <memory>
#include <string_view>
#include <utility>

#include "filtfit/conv_operator.hpp"
#include "filtfit/solvers.hpp"

namespace filtfit {

/// The six filter-fitting programs: residual norm p in {2, inf}, squared or
/// not, with an l1-ball constraint or an l1 penalty on the filter spectrum.
enum class EstimatorKind { ConUF, ConLS, PenUF, PenLS, ConLSStar, PenLSStar };

std::string_view to_string(EstimatorKind kind);
EstimatorKind estimator_kind_from_string(std::string_view name);

bool is_constrained(EstimatorKind kind);
/// Least-squares family (p = 2): con-ls, pen-ls and their starred forms.
bool is_least_squares(EstimatorKind kind);
/// Kinds solved as saddle-point problems by CMP (uniform-fit and starred).
bool is_saddle(EstimatorKind kind);

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::ConLS;
  /// Constrained kinds: bound r on sqrt(n+1) ||F_n[phi]||_1 (feasible radius
  /// R = r_bar / sqrt(n+1)).
  double r_bar = std::numeric_limits<double>::quiet_NaN();
  /// Penalized kinds: explicit lambda, or NaN for the theory default (needs sigma).
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double sigma = 0.0;
  double delta = 0.05;
  SetupKind setup_u = SetupKind::L2;
  SetupKind setup_v = SetupKind::L2;
  StoppingRule stopping;
  int max_iter = 1000;
  std::optional<double> stepsize;
  double suffix_fraction = 1.0;
  bool adaptive_stepsize = false;
  /// Constant c in eps* = c sigma r (uniform fit) / c sigma^2 r^2 (least squares).
  double stat_constant = 1.0;
};

struct EstimatorSolution {
  SpectralVector filter_spectral;  // u_hat
  ComplexSignal filter_time;       // phi on [0, n]
  ComplexVector denoised;          // [phi * y]_0^n
  SolveTrace trace;
  double r_realized = 0.0;  // sqrt(n+1) ||F_n[phi]||_1
  double lambda_used = 0.0;
  double eps_star = std::numeric_limits<double>::quiet_NaN();
  std::shared_ptr<const ConvolutionOperator> op;
};

/// Builds the operator, assembles the program selected by config, solves it
/// (FGM for con-ls/pen-ls, CMP otherwise) and packages the filter.
EstimatorSolution solve(const ComplexSignal& y, const EstimatorConfig& config,
                        const IterationObserver& observer = nullptr);

/// ||A u - b||_{C,p}, p in {2, inf}.
double residual(const ConvolutionOperator& op, const SpectralVector& u, double p);

SaddleProblem make_saddle_problem(std::shared_ptr<const ConvolutionOperator> op,
                                  const EstimatorConfig& config);
CompositeProblem make_composite_problem(std::shared_ptr<const ConvolutionOperator> op,
                                        const EstimatorConfig& config);

double primal_value(const SaddleProblem& problem, const SpectralVector& u);
double dual_value(const SaddleProblem& problem, const SpectralVector& v);

/// lambda = 16 sigma sqrt((n+1)(1 + log((n+1)/delta)))
double default_lambda_uf(double sigma, long n, double delta);
/// lambda = 8 sqrt(2) sigma^2 sqrt(n+1) (2 + log(8(n+1)/delta))
double default_lambda_ls(double sigma, long n, double delta);

/// eps* = c sigma r for uniform-fit kinds, c sigma^2 r^2 for least-squares kinds.
double statistical_accuracy(EstimatorKind kind, double sigma, double r, double c = 1.0);

/// Diagnostic iteration-count predictions (constants set to 1):
/// T_star = ||F_2n[y]||_inf / sigma and T_fast = r ||F_2n[y]||_inf / res2.
std::pair<double, double> predicted_iterations(const ConvolutionOperator& op, double sigma,
                                               double r, double res2);

/// Suggested constraint level for a known subspace dimension: 2 dim(S).
double default_r_bar(std::size_t subspace_dim);

}  // namespace filtfit
