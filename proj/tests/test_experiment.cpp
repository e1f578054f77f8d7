#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "filtfit/experiment.hpp"
#include "filtfit/io.hpp"
#include "json.hpp"

using namespace filtfit;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kTinyConfig = R"({
  "scenario": {"kind": "ransin", "s": 1, "n": 8, "snr": 4.0, "trials": 3, "seed": 9},
  "estimators": ["con-uf"],
  "setups": ["l2"],
  "solver": {"max_iter": 25},
  "output": {"dir": "%OUT%", "prefix": "tiny"}
})";

std::string tiny_config(const std::string& out_dir) {
  std::string text = kTinyConfig;
  const auto pos = text.find("%OUT%");
  text.replace(pos, 5, out_dir);
  return text;
}

}  // namespace

TEST_SUITE_BEGIN("experiment");

TEST_CASE("config parse errors carry line and field diagnostics") {
  CHECK_THROWS_WITH_AS(
      (void)ExperimentConfig::from_json_text("{\n  \"scenario\": {\n", "cfg.json"),
      doctest::Contains("line"), std::runtime_error);
  CHECK_THROWS_WITH_AS(
      (void)ExperimentConfig::from_json_text(R"({"scenario": {"kind": "bogus"}})", "cfg.json"),
      doctest::Contains("bogus"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      (void)ExperimentConfig::from_json_text(R"({"scenario": {"snr": -1}})", "cfg.json"),
      doctest::Contains("snr"), std::runtime_error);
  CHECK_THROWS_WITH_AS((void)ExperimentConfig::from_json_text(R"({})", "cfg.json"),
                       doctest::Contains("scenario"), std::runtime_error);
}

TEST_CASE("overrides rewrite nested keys") {
  const std::string text = R"({"scenario": {"kind": "ransin", "snr": 4.0}})";
  const std::string patched = apply_config_overrides(text, {"scenario.snr=16", "threads=2"});
  const ExperimentConfig cfg = ExperimentConfig::from_json_text(patched);
  CHECK(cfg.scenario.snr == 16.0);
  CHECK(cfg.threads == 2);
  CHECK_THROWS_AS((void)apply_config_overrides(text, {"no-equals-sign"}), std::runtime_error);
}

TEST_CASE("empirical quantile is the deterministic order statistic") {
  CHECK(empirical_quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
  CHECK(empirical_quantile({3.0, 1.0, 2.0}, 0.95) == 3.0);
  CHECK(empirical_quantile({1.0, std::numeric_limits<double>::quiet_NaN()}, 0.95) == 1.0);
  CHECK(std::isnan(empirical_quantile({}, 0.5)));
}

TEST_CASE("tiny experiment emits the CSV schema and summary keys") {
  const std::string out_dir = (std::filesystem::temp_directory_path() / "filtfit_exp1").string();
  std::filesystem::remove_all(out_dir);
  const ExperimentConfig cfg = ExperimentConfig::from_json_text(tiny_config(out_dir));
  const ExperimentResult result = run_experiment(cfg);

  const std::string csv = slurp(result.csv_path);
  CHECK(csv.rfind("scenario,estimator,setup,trial,iteration,objective,certificate,"
                  "rel_accuracy,l2_loss,linf_fourier_loss\n",
                  0) == 0);
  // 3 trials x 25 iterations + 2 x 25 aggregate rows + header
  std::size_t lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == 1 + 3 * 25 + 2 * 25);
  CHECK(csv.find(",agg95,") != std::string::npos);
  CHECK(csv.find(",median,") != std::string::npos);

  const std::string summary = slurp(result.summary_path);
  for (const char* key : {"\"scenario\"", "\"estimator\"", "\"n\"", "\"snr\"", "\"trials\"",
                          "\"mean_l2_loss\"", "\"p95_l2_loss\"", "\"mean_stop_iter\"",
                          "\"mean_solver_seconds\""})
    CHECK(summary.find(key) != std::string::npos);

  // SNR is recoverable from the emitted sigma and n
  const auto parsed = nlohmann::json::parse(summary);
  const double sigma = parsed.at(0).at("sigma").get<double>();
  const double n = parsed.at(0).at("n").get<double>();
  const double snr = parsed.at(0).at("snr").get<double>();
  CHECK(1.0 / (sigma * std::sqrt(n)) == doctest::Approx(snr).epsilon(1e-12));
}

TEST_CASE("the 95th percentile curve dominates the median curve") {
  const std::string out_dir = (std::filesystem::temp_directory_path() / "filtfit_exp2").string();
  std::filesystem::remove_all(out_dir);
  ExperimentConfig cfg = ExperimentConfig::from_json_text(tiny_config(out_dir));
  cfg.scenario.trials = 5;
  const ExperimentResult result = run_experiment(cfg);

  std::ifstream in(result.csv_path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> agg95, median;
  while (std::getline(in, line)) {
    std::stringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields[3] == "agg95") agg95.push_back(std::stod(fields[8]));
    if (fields[3] == "median") median.push_back(std::stod(fields[8]));
  }
  REQUIRE(!agg95.empty());
  REQUIRE(agg95.size() == median.size());
  for (std::size_t i = 0; i < agg95.size(); ++i) CHECK(agg95[i] >= median[i] - 1e-15);
}

TEST_CASE("experiments are byte-identical across runs and thread counts") {
  const std::string out1 = (std::filesystem::temp_directory_path() / "filtfit_exp3a").string();
  const std::string out2 = (std::filesystem::temp_directory_path() / "filtfit_exp3b").string();
  std::filesystem::remove_all(out1);
  std::filesystem::remove_all(out2);
  ExperimentConfig a = ExperimentConfig::from_json_text(tiny_config(out1));
  ExperimentConfig b = ExperimentConfig::from_json_text(tiny_config(out2));
  b.threads = 2;
  const ExperimentResult ra = run_experiment(a);
  const ExperimentResult rb = run_experiment(b);
  CHECK(slurp(ra.csv_path) == slurp(rb.csv_path));
}

TEST_CASE("partial trial failures are recorded and the run continues") {
  const std::string out_dir = (std::filesystem::temp_directory_path() / "filtfit_exp4").string();
  std::filesystem::remove_all(out_dir);
  ExperimentConfig cfg = ExperimentConfig::from_json_text(tiny_config(out_dir));
  cfg.estimators = {EstimatorKind::PenLS};
  cfg.lambda = -1.0;  // rejected per-cell by config validation
  const ExperimentResult result = run_experiment(cfg);
  int failed = 0;
  for (const auto& c : result.curves) failed += c.failed ? 1 : 0;
  CHECK(failed == 3);
  const std::string summary = slurp(result.summary_path);
  CHECK(summary.find("failed_trials") != std::string::npos);
}

TEST_CASE("signal CSV round trip") {
  const std::string path = (std::filesystem::temp_directory_path() / "sig.csv").string();
  ComplexVector v{{1.5, -0.25}, {0.0, 2.0}, {3.0, 0.0}};
  const ComplexSignal s = ComplexSignal::two_sided(v, 1);
  write_signal_csv(path, s);
  const ComplexSignal back = read_signal_csv(path);
  CHECK(back.support_start == -1);
  REQUIRE(back.length() == 3);
  for (long i = 0; i < 3; ++i)
    CHECK(back.values[static_cast<std::size_t>(i)] == s.values[static_cast<std::size_t>(i)]);

  std::ofstream bad(path);
  bad << "wrong,header\n";
  bad.close();
  CHECK_THROWS_AS((void)read_signal_csv(path), std::runtime_error);
}

TEST_SUITE_END();
