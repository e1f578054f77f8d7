#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "filtfit/prox.hpp"
#include "filtfit/signal.hpp"

namespace filtfit {

/// Raised when an iteration produces non-finite values or adaptive
/// backtracking exhausts its retry budget.
struct DivergedError : std::runtime_error {
  int iteration;
  DivergedError(const std::string& what, int iter)
      : std::runtime_error(what + " (iteration " + std::to_string(iter) + ")"), iteration(iter) {}
};

struct StoppingRule {
  enum class Kind { Budget, GapThreshold, Statistical };
  Kind kind = Kind::Budget;
  double epsilon = 0.0;

  static StoppingRule budget() { return {}; }
  static StoppingRule gap_threshold(double eps) { return {Kind::GapThreshold, eps}; }
  static StoppingRule statistical(double eps_star) { return {Kind::Statistical, eps_star}; }
};

enum class StopReason { Budget, GapThreshold, Statistical, Trivial };

struct TraceRow {
  int iteration = 0;
  double objective = std::numeric_limits<double>::quiet_NaN();
  /// Closed-form dual value at the averaged dual iterate (CMP only; may be -inf).
  double dual = std::numeric_limits<double>::quiet_NaN();
  /// Online certificate gap bound (CMP only; +inf when the certificate is unavailable).
  double certificate = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
};

struct SolveTrace {
  std::vector<TraceRow> rows;
  SpectralVector final_u;
  SpectralVector final_v;  // CMP averaged dual; empty for FGM
  int iterations = 0;
  int backtracks = 0;  // adaptive CMP stepsize rejections
  StopReason stop_reason = StopReason::Budget;
};

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double dual = std::numeric_limits<double>::quiet_NaN();
  double certificate = std::numeric_limits<double>::quiet_NaN();
  const SpectralVector* iterate = nullptr;
  /// A u - b at the reported iterate when the problem exposes it, else null.
  const SpectralVector* residual = nullptr;
};
using IterationObserver = std::function<void(const IterationRecord&)>;

/// min_u f(u) + Psi(u) with smooth convex f.
struct CompositeProblem {
  std::function<double(const SpectralVector&)> smooth_value;
  std::function<SpectralVector(const SpectralVector&)> smooth_grad;
  /// Optional: residual A u - b when f(u) = 1/2 ||Au - b||^2; lets the trace
  /// and observers reuse one operator application per iteration.
  std::function<SpectralVector(const SpectralVector&)> residual_at;
  Penalty penalty;
  ProximalSetup setup;
  double lipschitz = 1.0;  // L_f
  /// Omega_*[U]; feeds the a-priori stopping bound 2 L_f Omega_*^2 / T^2.
  double omega_star = std::numeric_limits<double>::infinity();
};

/// min_u max_{||v||_{C,q} <= 1} <v, Au - b> + Psi(u), accessed through the
/// monotone field F(w) = [A^T v; -(Au - b)].
struct SaddleProblem {
  std::function<void(const SpectralVector& u, const SpectralVector& v, SpectralVector& fu,
                     SpectralVector& fv)>
      field;
  SpectralVector b;
  Penalty primal_penalty;  // None (plus ball radius via primal_radius) or L1Pen
  double primal_radius = std::numeric_limits<double>::infinity();  // ||u||_{C,1} bound
  int dual_q = 1;
  ProximalSetup setup_u, setup_v;
  double omega_v = 1.0;       // Omega[V]
  double omega_star_u = 1.0;  // Omega_*[U]
  double lipschitz = 1.0;     // L_F, operator-norm bound
  /// r * ||F_2n[y]||_inf; a-priori fallback gap bound apriori_rate / T used by
  /// statistical stopping when the certificate is the +inf sentinel.
  double apriori_rate = std::numeric_limits<double>::quiet_NaN();

  double dual_norm_p() const { return dual_q == 1 ? std::numeric_limits<double>::infinity() : 2.0; }
  bool primal_bounded() const { return std::isfinite(primal_radius); }
};

/// phi_bar(u) = ||Au - b||_{C,p} + Psi(u), evaluating the field at (u, 0).
double saddle_primal_value(const SaddleProblem& problem, const SpectralVector& u);
double saddle_primal_value_from_residual(const SaddleProblem& problem,
                                         const SpectralVector& residual, const SpectralVector& u);

/// Closed-form phi_underbar(v): constrained case -<v,b> - R ||A^T v||_{C,inf};
/// penalized case -<v,b> when ||A^T v||_{C,inf} <= lambda, else -inf.
double saddle_dual_value(const SaddleProblem& problem, const SpectralVector& v);
double saddle_dual_value_from_field(const SaddleProblem& problem, const SpectralVector& v,
                                    const SpectralVector& atv);

/// Subgradient of the primal penalty at u (phase vector scaled by lambda on
/// nonzero pairs, zero elsewhere).
SpectralVector penalty_subgradient(const Penalty& penalty, const SpectralVector& u);

struct SolveOptions {
  std::optional<double> stepsize;  // default: 1/L_f (FGM), Omega[V]/(Omega_*[U] L_F) (CMP)
  int max_iter = 1000;
  StoppingRule stop;
  /// CMP averaging: keep this trailing fraction of iterates (1.0 = uniform).
  double suffix_fraction = 1.0;
  IterationObserver observer;
  bool record_trace = true;
};

SolveTrace fgm_run(const CompositeProblem& problem, const SolveOptions& options);

SolveTrace cmp_run(const SaddleProblem& problem, const SolveOptions& options);

/// Backtracking stepsize: halve on a violated per-step inequality (50 retries
/// cap), grow by 1.2 on acceptance.
SolveTrace cmp_run_adaptive(const SaddleProblem& problem, const SolveOptions& options);

}  // namespace filtfit
