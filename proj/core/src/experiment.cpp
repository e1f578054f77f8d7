#include "filtfit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "filtfit/io.hpp"
#include "json.hpp"

namespace filtfit {

namespace {

using nlohmann::json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void config_error(const std::string& origin, const std::string& msg) {
  throw std::runtime_error(origin + ": " + msg);
}

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    auto [line, col] = line_col(text, byte);
    config_error(origin, "parse error at line " + std::to_string(line) + ", column " +
                             std::to_string(col) + ": " + e.what());
  }
}

double number_or_auto(const json& j, const std::string& field, const std::string& origin) {
  if (j.is_string() && j.get<std::string>() == "auto") return kNaN;
  if (j.is_number()) return j.get<double>();
  config_error(origin, "field '" + field + "' must be a number or \"auto\"");
}

template <typename T>
T get_field(const json& j, const std::string& field, T fallback, const std::string& origin) {
  if (!j.contains(field)) return fallback;
  try {
    return j.at(field).get<T>();
  } catch (const json::exception& e) {
    config_error(origin, "field '" + field + "': " + e.what());
  }
}

StoppingRule parse_stopping(const json& solver, const std::string& origin) {
  const std::string name = get_field<std::string>(solver, "stopping", "budget", origin);
  const double eps = get_field<double>(solver, "epsilon", 0.0, origin);
  if (name == "budget") return StoppingRule::budget();
  if (name == "certificate") return StoppingRule::gap_threshold(eps);
  if (name == "statistical") return StoppingRule::statistical(eps);
  config_error(origin, "solver.stopping must be budget, certificate or statistical");
}

SetupKind setup_from_string(const std::string& name, const std::string& origin) {
  if (name == "l1") return SetupKind::ComplexL1;
  if (name == "l2") return SetupKind::L2;
  config_error(origin, "setup must be 'l1' or 'l2', got '" + name + "'");
}

std::string setup_label(SetupKind kind) { return kind == SetupKind::ComplexL1 ? "l1" : "l2"; }

EstimatorConfig make_estimator_config(const ExperimentConfig& cfg, EstimatorKind kind,
                                      SetupKind preset) {
  EstimatorConfig e;
  e.kind = kind;
  e.sigma = cfg.scenario.sigma();
  e.delta = cfg.delta;
  e.r_bar = (std::isnan(cfg.r_bar) && is_constrained(kind))
                ? default_r_bar(cfg.scenario.subspace_dim())
                : cfg.r_bar;
  e.lambda = cfg.lambda;
  e.setup_u = preset;
  // The dual ball is l1 for uniform-fit kinds (setup follows the preset) and
  // l2 for the starred kinds (l2 setup required).
  e.setup_v = (is_saddle(kind) && !is_least_squares(kind)) ? preset : SetupKind::L2;
  e.stopping = cfg.stopping;
  e.max_iter = cfg.max_iter;
  e.stepsize = cfg.stepsize;
  e.suffix_fraction = cfg.suffix_fraction;
  e.adaptive_stepsize = cfg.adaptive;
  e.stat_constant = cfg.stat_constant;
  return e;
}

struct CsvRow {
  std::string estimator, setup, trial;
  int iteration = 0;
  double objective = kNaN, certificate = kNaN, rel_accuracy = kNaN, l2 = kNaN, linf = kNaN;
};

void append_row(std::string& out, const std::string& scenario_label, const CsvRow& r) {
  out += scenario_label;
  out += ',';
  out += r.estimator;
  out += ',';
  out += r.setup;
  out += ',';
  out += r.trial;
  out += ',';
  out += std::to_string(r.iteration);
  out += ',';
  out += format_double(r.objective);
  out += ',';
  out += format_double(r.certificate);
  out += ',';
  out += format_double(r.rel_accuracy);
  out += ',';
  out += format_double(r.l2);
  out += ',';
  out += format_double(r.linf);
  out += '\n';
}

}  // namespace

double empirical_quantile(std::vector<double> values, double p) {
  values.erase(std::remove_if(values.begin(), values.end(),
                              [](double v) { return std::isnan(v); }),
               values.end());
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const auto idx = static_cast<std::size_t>(std::max(
      0.0, std::ceil(p * static_cast<double>(values.size())) - 1.0));
  return values[std::min(idx, values.size() - 1)];
}

std::string apply_config_overrides(const std::string& json_text,
                                   const std::vector<std::string>& overrides,
                                   const std::string& origin) {
  json j = parse_json(json_text, origin);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      config_error(origin, "override '" + kv + "' is not of the form key=value");
    std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    while (key.rfind("-", 0) == 0) key.erase(0, 1);
    std::string pointer = "/" + key;
    std::replace(pointer.begin(), pointer.end(), '.', '/');
    json parsed;
    try {
      parsed = json::parse(value);
    } catch (const json::parse_error&) {
      parsed = value;  // bare strings are fine
    }
    try {
      j[json::json_pointer(pointer)] = parsed;
    } catch (const json::exception& e) {
      config_error(origin, "cannot apply override '" + kv + "': " + e.what());
    }
  }
  return j.dump();
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str(), path);
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text,
                                                  const std::string& origin) {
  const json j = parse_json(text, origin);
  ExperimentConfig cfg;

  if (!j.contains("scenario")) config_error(origin, "missing required object 'scenario'");
  const json& sc = j.at("scenario");
  cfg.scenario.kind =
      scenario_kind_from_string(get_field<std::string>(sc, "kind", "ransin", origin));
  cfg.scenario.s = get_field<int>(sc, "s", 1, origin);
  cfg.scenario.m = get_field<int>(sc, "m", 0, origin);
  cfg.scenario.n = get_field<long>(sc, "n", 100, origin);
  cfg.scenario.snr = get_field<double>(sc, "snr", 1.0, origin);
  cfg.scenario.trials = get_field<int>(sc, "trials", 1, origin);
  cfg.scenario.seed = get_field<std::uint64_t>(sc, "seed", 0, origin);
  if (cfg.scenario.s < 1) config_error(origin, "scenario.s must be >= 1");
  if (cfg.scenario.n < 0) config_error(origin, "scenario.n must be >= 0");
  if (cfg.scenario.snr <= 0) config_error(origin, "scenario.snr must be positive");
  if (cfg.scenario.trials < 1) config_error(origin, "scenario.trials must be >= 1");

  if (j.contains("estimators")) {
    cfg.estimators.clear();
    for (const auto& name : j.at("estimators"))
      cfg.estimators.push_back(estimator_kind_from_string(name.get<std::string>()));
    if (cfg.estimators.empty()) config_error(origin, "estimators list is empty");
  }
  if (j.contains("setups")) {
    cfg.setups.clear();
    for (const auto& name : j.at("setups"))
      cfg.setups.push_back(setup_from_string(name.get<std::string>(), origin));
    if (cfg.setups.empty()) config_error(origin, "setups list is empty");
  }

  if (j.contains("estimator")) {
    const json& est = j.at("estimator");
    if (est.contains("r_bar")) cfg.r_bar = number_or_auto(est.at("r_bar"), "estimator.r_bar", origin);
    if (est.contains("lambda"))
      cfg.lambda = number_or_auto(est.at("lambda"), "estimator.lambda", origin);
    cfg.delta = get_field<double>(est, "delta", cfg.delta, origin);
    cfg.stat_constant = get_field<double>(est, "stat_constant", cfg.stat_constant, origin);
  }

  if (j.contains("solver")) {
    const json& sol = j.at("solver");
    cfg.stopping = parse_stopping(sol, origin);
    cfg.max_iter = get_field<int>(sol, "max_iter", cfg.max_iter, origin);
    if (sol.contains("stepsize") && !sol.at("stepsize").is_null())
      cfg.stepsize = sol.at("stepsize").get<double>();
    cfg.suffix_fraction = get_field<double>(sol, "suffix_fraction", cfg.suffix_fraction, origin);
    cfg.adaptive = get_field<bool>(sol, "adaptive", cfg.adaptive, origin);
    if (cfg.max_iter < 0) config_error(origin, "solver.max_iter must be >= 0");
  }

  if (j.contains("output")) {
    const json& out = j.at("output");
    cfg.out_dir = get_field<std::string>(out, "dir", cfg.out_dir, origin);
    cfg.prefix = get_field<std::string>(out, "prefix", cfg.prefix, origin);
  }
  cfg.threads = get_field<int>(j, "threads", cfg.threads, origin);
  if (cfg.threads < 1) config_error(origin, "threads must be >= 1");
  return cfg;
}

namespace {

TrialCurve run_cell(const ExperimentConfig& cfg, EstimatorKind kind, SetupKind preset, int trial,
                    const ComplexSignal& x, const ComplexSignal& y) {
  const long n = cfg.scenario.n;
  TrialCurve curve;
  curve.estimator = std::string(to_string(kind));
  curve.setup = setup_label(preset);
  curve.trial = trial;

  try {
    EstimatorConfig est = make_estimator_config(cfg, kind, preset);

    // Spectral-domain loss bookkeeping: F_n[x - phi*y] = (F_n[x] - F_n[y]) - (Au - b).
    ComplexVector fx(static_cast<std::size_t>(n + 1));
    ComplexVector fy(static_cast<std::size_t>(n + 1));
    for (long t = 0; t <= n; ++t) {
      fx[static_cast<std::size_t>(t)] = x.at(t);
      fy[static_cast<std::size_t>(t)] = y.at(t);
    }
    fx = dft(fx);
    fy = dft(fy);
    ComplexVector head_diff(fx.size());
    for (std::size_t k = 0; k < fx.size(); ++k) head_diff[k] = fx[k] - fy[k];

    auto observer = [&](const IterationRecord& rec) {
      IterPoint p;
      p.iteration = rec.iteration;
      p.objective = rec.objective;
      p.certificate = rec.certificate;
      p.rel_accuracy =
          (std::isfinite(rec.dual) && rec.dual > 0.0)
              ? rec.certificate / rec.dual
              : (std::isnan(rec.certificate) ? kNaN : std::numeric_limits<double>::infinity());
      if (rec.residual != nullptr && rec.residual->complex_dim() == head_diff.size()) {
        double l2 = 0.0, linf = 0.0;
        for (std::size_t k = 0; k < head_diff.size(); ++k) {
          const Complex d = head_diff[k] - rec.residual->pair(k);
          l2 += std::norm(d);
          linf = std::max(linf, std::abs(d));
        }
        p.l2_loss = std::sqrt(l2 / static_cast<double>(n + 1));
        p.linf_fourier_loss = linf;
      } else {
        p.l2_loss = kNaN;
        p.linf_fourier_loss = kNaN;
      }
      curve.points.push_back(p);
    };

    EstimatorSolution sol = solve(y, est, observer);
    curve.stop_iteration = sol.trace.iterations;
    curve.solver_seconds = sol.trace.rows.empty() ? 0.0 : sol.trace.rows.back().seconds;
    curve.final_losses = metrics(x, sol.filter_time, y, n);
    curve.eps_star = sol.eps_star;
  } catch (const std::exception& e) {
    curve.failed = true;
    curve.error = e.what();
  }
  return curve;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const int trials = cfg.scenario.trials;
  const std::size_t cells_per_trial = cfg.estimators.size() * cfg.setups.size();
  std::vector<TrialCurve> curves(static_cast<std::size_t>(trials) * cells_per_trial);

  auto run_trial = [&](int trial) {
    Rng rng = Rng::for_trial(cfg.scenario.seed, static_cast<std::uint64_t>(trial));
    const ComplexSignal x = generate(cfg.scenario, rng);
    const ComplexSignal y = add_noise(x, cfg.scenario.sigma(), rng);
    std::size_t cell = 0;
    for (const auto kind : cfg.estimators) {
      for (const auto preset : cfg.setups) {
        curves[static_cast<std::size_t>(trial) * cells_per_trial + cell] =
            run_cell(cfg, kind, preset, trial, x, y);
        ++cell;
      }
    }
  };

  if (cfg.threads <= 1 || trials == 1) {
    for (int trial = 0; trial < trials; ++trial) run_trial(trial);
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) run_trial(t);
    };
    std::vector<std::thread> pool;
    const int nthreads = std::min(cfg.threads, trials);
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  ExperimentResult result;
  result.csv_path = (fs::path(cfg.out_dir) / (cfg.prefix + "_curves.csv")).string();
  result.summary_path = (fs::path(cfg.out_dir) / (cfg.prefix + "_summary.json")).string();

  const std::string scenario_label = cfg.scenario.label();
  std::string csv = "scenario,estimator,setup,trial,iteration,objective,certificate,"
                    "rel_accuracy,l2_loss,linf_fourier_loss\n";

  nlohmann::json summary = nlohmann::json::array();

  for (const auto kind : cfg.estimators) {
    for (const auto preset : cfg.setups) {
      const std::string est_name(to_string(kind));
      const std::string setup_name = setup_label(preset);
      std::vector<const TrialCurve*> cell_curves;
      for (const auto& c : curves)
        if (c.estimator == est_name && c.setup == setup_name) cell_curves.push_back(&c);

      std::size_t max_len = 0;
      for (const auto* c : cell_curves) {
        if (c->failed) continue;
        max_len = std::max(max_len, c->points.size());
        for (const auto& p : c->points) {
          CsvRow row{est_name, setup_name, std::to_string(c->trial), p.iteration,
                     p.objective,  p.certificate, p.rel_accuracy, p.l2_loss, p.linf_fourier_loss};
          append_row(csv, scenario_label, row);
        }
      }

      // Aggregate curves: empirical 95th percentile and median per iteration.
      for (const std::string agg : {"agg95", "median"}) {
        const double q = agg == "agg95" ? 0.95 : 0.5;
        for (std::size_t i = 0; i < max_len; ++i) {
          std::vector<double> obj, cert, rel, l2, linf;
          int iteration = 0;
          for (const auto* c : cell_curves) {
            if (c->failed || i >= c->points.size()) continue;
            const auto& p = c->points[i];
            iteration = p.iteration;
            obj.push_back(p.objective);
            cert.push_back(p.certificate);
            rel.push_back(p.rel_accuracy);
            l2.push_back(p.l2_loss);
            linf.push_back(p.linf_fourier_loss);
          }
          if (obj.empty()) continue;
          CsvRow row{est_name,
                     setup_name,
                     agg,
                     iteration,
                     empirical_quantile(obj, q),
                     empirical_quantile(cert, q),
                     empirical_quantile(rel, q),
                     empirical_quantile(l2, q),
                     empirical_quantile(linf, q)};
          append_row(csv, scenario_label, row);
        }
      }

      // Summary entry.
      std::vector<double> final_l2, stop_iters, seconds;
      int failed = 0;
      for (const auto* c : cell_curves) {
        if (c->failed) {
          ++failed;
          continue;
        }
        final_l2.push_back(c->final_losses.l2_loss);
        stop_iters.push_back(static_cast<double>(c->stop_iteration));
        seconds.push_back(c->solver_seconds);
      }
      auto mean = [](const std::vector<double>& v) {
        if (v.empty()) return kNaN;
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
      };
      nlohmann::json entry;
      entry["scenario"] = scenario_label;
      entry["estimator"] = est_name;
      entry["setup"] = setup_name;
      entry["n"] = cfg.scenario.n;
      entry["snr"] = cfg.scenario.snr;
      entry["sigma"] = cfg.scenario.sigma();
      entry["trials"] = trials;
      entry["mean_l2_loss"] = mean(final_l2);
      entry["p95_l2_loss"] = empirical_quantile(final_l2, 0.95);
      entry["mean_stop_iter"] = mean(stop_iters);
      entry["mean_solver_seconds"] = mean(seconds);
      if (failed > 0) {
        entry["failed_trials"] = failed;
        nlohmann::json errs = nlohmann::json::array();
        for (const auto* c : cell_curves)
          if (c->failed) errs.push_back({{"trial", c->trial}, {"error", c->error}});
        entry["failures"] = errs;
      }
      summary.push_back(entry);
    }
  }

  {
    std::ofstream out(result.csv_path);
    if (!out) throw std::runtime_error("cannot write " + result.csv_path);
    out << csv;
  }
  {
    std::ofstream out(result.summary_path);
    if (!out) throw std::runtime_error("cannot write " + result.summary_path);
    out << summary.dump(2) << '\n';
  }

  result.curves = std::move(curves);
  return result;
}

}  // namespace filtfit
