// filtfit: adaptive convolution-type signal denoising.
//
// Subcommands:
//   generate  emit a synthetic scenario signal (and optionally noisy
//             observations) as tau,re,im CSV
//   denoise   fit a filter to one observation file and write the denoised
//             head, the filter, a JSON report and an optional iteration trace
//   bench     run a full multi-trial experiment from a JSON config
//   certify   re-run a denoise and verify a stored trace's certificate claims

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "filtfit/experiment.hpp"
#include "filtfit/io.hpp"
#include "json.hpp"

using namespace filtfit;

namespace {

struct DenoiseArgs {
  std::string input;
  std::string estimator = "con-ls";
  double sigma = 0.0;
  double r_bar = std::numeric_limits<double>::quiet_NaN();
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double delta = 0.05;
  std::string setup_u = "l2";
  std::string setup_v = "l2";
  std::string stopping = "budget";
  double epsilon = 0.0;
  int max_iter = 1000;
  double stepsize = 0.0;
  double suffix = 1.0;
  bool adaptive = false;
  std::string out;
  std::string filter_out;
  std::string report_out;
  std::string trace_out;
};

SetupKind parse_setup(const std::string& name) {
  if (name == "l1") return SetupKind::ComplexL1;
  if (name == "l2") return SetupKind::L2;
  throw CLI::ValidationError("setup must be l1 or l2");
}

EstimatorConfig to_config(const DenoiseArgs& args) {
  EstimatorConfig cfg;
  cfg.kind = estimator_kind_from_string(args.estimator);
  cfg.sigma = args.sigma;
  cfg.r_bar = args.r_bar;
  cfg.lambda = args.lambda;
  cfg.delta = args.delta;
  cfg.setup_u = parse_setup(args.setup_u);
  cfg.setup_v = parse_setup(args.setup_v);
  if (args.stopping == "budget")
    cfg.stopping = StoppingRule::budget();
  else if (args.stopping == "certificate")
    cfg.stopping = StoppingRule::gap_threshold(args.epsilon);
  else if (args.stopping == "statistical")
    cfg.stopping = StoppingRule::statistical(args.epsilon);
  else
    throw CLI::ValidationError("stopping must be budget, certificate or statistical");
  cfg.max_iter = args.max_iter;
  if (args.stepsize > 0.0) cfg.stepsize = args.stepsize;
  cfg.suffix_fraction = args.suffix;
  cfg.adaptive_stepsize = args.adaptive;
  return cfg;
}

void add_denoise_flags(CLI::App* cmd, DenoiseArgs& args) {
  cmd->add_option("--in", args.input, "observations CSV (tau,re,im on [-n,n])")->required();
  cmd->add_option("--estimator", args.estimator,
                  "con-uf | con-ls | pen-uf | pen-ls | con-ls-star | pen-ls-star");
  cmd->add_option("--sigma", args.sigma, "noise level (needed for auto lambda / statistical stop)");
  cmd->add_option("--rbar", args.r_bar, "constraint level for constrained kinds");
  cmd->add_option("--lambda", args.lambda, "penalty weight; omit for the theory default");
  cmd->add_option("--delta", args.delta, "confidence level for the lambda defaults");
  cmd->add_option("--setup-u", args.setup_u, "primal proximal setup: l1 | l2");
  cmd->add_option("--setup-v", args.setup_v, "dual proximal setup: l1 | l2");
  cmd->add_option("--stop", args.stopping, "budget | certificate | statistical");
  cmd->add_option("--epsilon", args.epsilon, "threshold for certificate/statistical stopping");
  cmd->add_option("--max-iter", args.max_iter, "iteration budget");
  cmd->add_option("--stepsize", args.stepsize, "override the default stepsize");
  cmd->add_option("--suffix", args.suffix, "suffix-averaging fraction (CMP kinds)");
  cmd->add_flag("--adaptive", args.adaptive, "backtracking stepsize (CMP kinds)");
}

void write_trace_csv(const std::string& path, const SolveTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "iteration,objective,dual,certificate\n";
  for (const auto& row : trace.rows) {
    out << row.iteration << ',' << format_double(row.objective) << ',' << format_double(row.dual)
        << ',' << format_double(row.certificate) << '\n';
  }
}

const char* stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::Budget: return "budget";
    case StopReason::GapThreshold: return "certificate";
    case StopReason::Statistical: return "statistical";
    case StopReason::Trivial: return "trivial";
  }
  return "?";
}

int run_generate(const Scenario& scenario, const std::string& out, const std::string& noisy_out) {
  Rng rng = Rng::for_trial(scenario.seed, 0);
  const ComplexSignal x = generate(scenario, rng);
  write_signal_csv(out, x);
  std::cout << "wrote " << out << " (" << scenario.label() << ", n=" << scenario.n
            << ", dim(S)=" << scenario.subspace_dim() << ")\n";
  if (!noisy_out.empty()) {
    const ComplexSignal y = add_noise(x, scenario.sigma(), rng);
    write_signal_csv(noisy_out, y);
    std::cout << "wrote " << noisy_out << " (sigma=" << format_double(scenario.sigma()) << ")\n";
  }
  return 0;
}

int run_denoise(const DenoiseArgs& args) {
  const ComplexSignal y = read_signal_csv(args.input);
  const EstimatorConfig cfg = to_config(args);
  const EstimatorSolution sol = solve(y, cfg);

  const long n = static_cast<long>(sol.op->n());
  if (!args.out.empty()) {
    write_signal_csv(args.out, ComplexSignal::causal(sol.denoised));
    std::cout << "wrote " << args.out << "\n";
  }
  if (!args.filter_out.empty()) {
    write_signal_csv(args.filter_out, sol.filter_time);
    std::cout << "wrote " << args.filter_out << "\n";
  }
  if (!args.trace_out.empty()) {
    write_trace_csv(args.trace_out, sol.trace);
    std::cout << "wrote " << args.trace_out << "\n";
  }

  nlohmann::json report;
  report["estimator"] = std::string(to_string(cfg.kind));
  report["n"] = n;
  report["iterations"] = sol.trace.iterations;
  report["stop_reason"] = stop_reason_name(sol.trace.stop_reason);
  report["r_realized"] = sol.r_realized;
  report["lambda_used"] = sol.lambda_used;
  if (std::isfinite(sol.eps_star)) report["eps_star"] = sol.eps_star;
  if (!sol.trace.rows.empty()) {
    report["objective"] = sol.trace.rows.back().objective;
    report["solver_seconds"] = sol.trace.rows.back().seconds;
  }
  if (!args.report_out.empty()) {
    std::ofstream rep(args.report_out);
    if (!rep) throw std::runtime_error("cannot write " + args.report_out);
    rep << report.dump(2) << '\n';
    std::cout << "wrote " << args.report_out << "\n";
  } else {
    std::cout << report.dump(2) << '\n';
  }
  return 0;
}

int run_certify(const DenoiseArgs& args, const std::string& trace_path, double tol) {
  const ComplexSignal y = read_signal_csv(args.input);
  const EstimatorConfig cfg = to_config(args);
  const EstimatorSolution sol = solve(y, cfg);

  std::ifstream in(trace_path);
  if (!in) throw std::runtime_error("cannot open trace: " + trace_path);
  std::string line;
  std::getline(in, line);
  if (line != "iteration,objective,dual,certificate")
    throw std::runtime_error(trace_path + ": expected a denoise --trace file");

  std::size_t row_idx = 0;
  int bad_match = 0, unsound = 0;
  double worst_mismatch = 0.0, worst_violation = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 4 || row_idx >= sol.trace.rows.size())
      throw std::runtime_error(trace_path + ": trace shape does not match the re-run");
    const double stored_obj = std::strtod(fields[1].c_str(), nullptr);
    const double stored_dual = std::strtod(fields[2].c_str(), nullptr);
    const double stored_cert = std::strtod(fields[3].c_str(), nullptr);
    const TraceRow& rerun = sol.trace.rows[row_idx];

    auto mismatch = [&](double a, double b) {
      if (std::isnan(a) && std::isnan(b)) return 0.0;
      if (std::isinf(a) && std::isinf(b) && a * b > 0) return 0.0;
      return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
    };
    const double m = std::max({mismatch(stored_obj, rerun.objective),
                               mismatch(stored_dual, rerun.dual),
                               mismatch(stored_cert, rerun.certificate)});
    worst_mismatch = std::max(worst_mismatch, m);
    if (m > tol) ++bad_match;

    // soundness of the stored claim: certificate >= objective - dual
    if (std::isfinite(stored_obj) && std::isfinite(stored_dual)) {
      const double gap = stored_obj - stored_dual;
      const double violation = gap - stored_cert;
      worst_violation = std::max(worst_violation, violation);
      if (violation > 1e-10) ++unsound;
    }
    ++row_idx;
  }
  if (row_idx != sol.trace.rows.size())
    throw std::runtime_error(trace_path + ": trace length does not match the re-run");

  std::cout << (bad_match == 0 ? "PASS" : "FAIL") << " reproduction: " << row_idx
            << " rows, max relative mismatch " << format_double(worst_mismatch) << "\n";
  std::cout << (unsound == 0 ? "PASS" : "FAIL")
            << " soundness: certificate >= duality gap on every row (worst violation "
            << format_double(worst_violation) << ")\n";
  return (bad_match == 0 && unsound == 0) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive convolution-type signal denoising"};
  app.require_subcommand(1);

  // generate
  Scenario scenario;
  std::string scenario_kind = "ransin";
  std::string gen_out = "signal.csv", gen_noisy;
  auto* gen = app.add_subcommand("generate", "emit a scenario signal to file");
  gen->add_option("--scenario", scenario_kind, "ransin | cohsin | modsin");
  gen->add_option("--s", scenario.s, "number of frequencies / pairs");
  gen->add_option("--m", scenario.m, "polynomial degree (modsin)");
  gen->add_option("--n", scenario.n, "signal half-length");
  gen->add_option("--snr", scenario.snr, "signal-to-noise ratio");
  gen->add_option("--seed", scenario.seed, "RNG seed");
  gen->add_option("--out", gen_out, "output CSV for the clean signal");
  gen->add_option("--noisy", gen_noisy, "also write noisy observations here");

  // denoise
  DenoiseArgs dn;
  auto* den = app.add_subcommand("denoise", "fit a filter to one observation file");
  add_denoise_flags(den, dn);
  den->add_option("--out", dn.out, "denoised head [0,n] CSV");
  den->add_option("--filter", dn.filter_out, "filter taps CSV");
  den->add_option("--report", dn.report_out, "JSON report path (stdout if omitted)");
  den->add_option("--trace", dn.trace_out, "per-iteration trace CSV");

  // bench
  std::string bench_config;
  std::string bench_out_dir;
  int bench_threads = 0;
  auto* bench = app.add_subcommand("bench", "run a full experiment from a JSON config");
  bench->add_option("--config", bench_config, "experiment config JSON")->required();
  bench->add_option("--out-dir", bench_out_dir, "override output.dir");
  bench->add_option("--threads", bench_threads, "override trial parallelism");
  bench->allow_extras();  // --key=value config overrides

  // certify
  DenoiseArgs ct;
  std::string certify_trace;
  double certify_tol = 1e-9;
  auto* cert = app.add_subcommand("certify", "re-verify a trace's certificate claims");
  add_denoise_flags(cert, ct);
  cert->add_option("--trace", certify_trace, "trace CSV written by denoise")->required();
  cert->add_option("--tol", certify_tol, "relative reproduction tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      scenario.kind = scenario_kind_from_string(scenario_kind);
      return run_generate(scenario, gen_out, gen_noisy);
    }
    if (den->parsed()) return run_denoise(dn);
    if (bench->parsed()) {
      std::ifstream in(bench_config);
      if (!in) throw std::runtime_error("cannot open config file: " + bench_config);
      std::stringstream ss;
      ss << in.rdbuf();
      std::string text = ss.str();
      std::vector<std::string> overrides = bench->remaining();
      if (!bench_out_dir.empty()) overrides.push_back("output.dir=" + bench_out_dir);
      if (bench_threads > 0) overrides.push_back("threads=" + std::to_string(bench_threads));
      text = apply_config_overrides(text, overrides, bench_config);
      const ExperimentConfig cfg = ExperimentConfig::from_json_text(text, bench_config);
      const ExperimentResult result = run_experiment(cfg);
      int failed = 0;
      for (const auto& c : result.curves) failed += c.failed ? 1 : 0;
      std::cout << "wrote " << result.csv_path << "\n";
      std::cout << "wrote " << result.summary_path << "\n";
      if (failed > 0) std::cout << failed << " cell(s) failed; see summary\n";
      return failed == 0 ? 0 : 1;
    }
    if (cert->parsed()) return run_certify(ct, certify_trace, certify_tol);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
