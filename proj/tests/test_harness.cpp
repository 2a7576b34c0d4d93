#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "smoothltf/harness.hpp"

using namespace smoothltf;
using nlohmann::json;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = "/tmp/" + name;
  std::ofstream out(path);
  out << text;
  return path;
}

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.n = 6;
  cfg.d = 1;
  cfg.N = 200;
  cfg.r = 2;
  cfg.V = 200;
  cfg.test_N = 500;
  cfg.seed = 42;
  cfg.sigma = 0.05;
  cfg.label_noise = "rcn";
  cfg.eta = 0.1;
  return cfg;
}

}  // namespace

TEST_CASE("check rows serialize with the schema header") {
  CheckRow row{"noise-sensitivity", "{\"delta\":0.1}", 0.3, 0.5, true};
  const json j = json::parse(row.to_jsonl());
  CHECK(j.at("schema_version") == kResultsSchemaVersion);
  CHECK(j.at("kind") == "check");
  CHECK(j.at("check_id") == "noise-sensitivity");
  CHECK(j.at("measured") == 0.3);
  CHECK(j.at("bound") == 0.5);
  CHECK(j.at("pass") == true);
  CHECK(j.at("params").at("delta") == 0.1);
}

TEST_CASE("budget profile parsing") {
  CHECK(parse_budget_profile("smoke") == BudgetProfile::Smoke);
  CHECK(parse_budget_profile("standard") == BudgetProfile::Standard);
  CHECK(parse_budget_profile("thorough") == BudgetProfile::Thorough);
  CHECK_THROWS_AS(parse_budget_profile("extreme"), std::invalid_argument);
}

TEST_CASE("lemma check selectors") {
  const auto rows = lemma_check_suite({"rerandomization", "tilting"}, BudgetProfile::Smoke);
  CHECK(!rows.empty());
  // Some checks report auxiliary rows whose ids extend the selector.
  for (const auto& r : rows)
    CHECK((r.check_id.rfind("rerandomization", 0) == 0 || r.check_id.rfind("tilting", 0) == 0));
  CHECK(std::any_of(rows.begin(), rows.end(),
                    [](const CheckRow& r) { return r.check_id == "tilting"; }));

  CHECK_THROWS_AS(lemma_check_suite({"no-such-check"}, BudgetProfile::Smoke),
                  std::invalid_argument);

  const auto all = lemma_check_suite({"all"}, BudgetProfile::Smoke);
  std::vector<std::string> seen;
  for (const auto& r : all)
    if (std::find(seen.begin(), seen.end(), r.check_id) == seen.end()) seen.push_back(r.check_id);
  CHECK(seen.size() == 15);  // 12 checks, three of which emit a second row id
}

TEST_CASE("the full smoke suite passes and a halved bound is a negative control") {
  const auto rows = lemma_check_suite({"all"}, BudgetProfile::Smoke);
  for (const auto& r : rows) {
    INFO(r.check_id << " measured=" << r.measured << " bound=" << r.bound);
    CHECK(r.pass);
  }
  const auto scaled = lemma_check_suite({"all"}, BudgetProfile::Smoke, 0.05);
  CHECK(std::any_of(scaled.begin(), scaled.end(), [](const CheckRow& r) { return !r.pass; }));
}

TEST_CASE("lemma checks are deterministic in the seed") {
  const auto a = lemma_check_suite({"noise-sensitivity"}, BudgetProfile::Smoke, 1.0, 7);
  const auto b = lemma_check_suite({"noise-sensitivity"}, BudgetProfile::Smoke, 1.0, 7);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].to_jsonl() == b[i].to_jsonl());
}

TEST_CASE("config files parse with comments and strict keys") {
  const std::string path = write_temp("smoothltf_cfg_ok.cfg",
                                      "# experiment setup\n"
                                      "n = 8\n"
                                      "d = 2\n"
                                      "epsilon = 0.2\n"
                                      "N = 400\n"
                                      "seed = 9\n"
                                      "label_noise = boundary\n"
                                      "band = 0.5\n"
                                      "planted_weights = 2, 1, 1, 1, 1, 1, 1, 1\n"
                                      "\n");
  const ExperimentConfig cfg = ExperimentConfig::from_file(path);
  CHECK(cfg.n == 8);
  CHECK(cfg.d == 2);
  CHECK(cfg.epsilon == 0.2);
  CHECK(cfg.N == 400);
  CHECK(cfg.seed == 9);
  CHECK(cfg.label_noise == "boundary");
  CHECK(cfg.band == 0.5);
  CHECK(cfg.planted_weights == std::vector<double>{2, 1, 1, 1, 1, 1, 1, 1});
  CHECK(cfg.delta == 0.1);  // untouched keys keep their defaults
  std::remove(path.c_str());

  const std::string bad_key = write_temp("smoothltf_cfg_badkey.cfg", "frobnicate = 3\n");
  CHECK_THROWS_AS(ExperimentConfig::from_file(bad_key), std::runtime_error);
  std::remove(bad_key.c_str());

  const std::string bad_line = write_temp("smoothltf_cfg_badline.cfg", "n 8\n");
  CHECK_THROWS_WITH_AS(ExperimentConfig::from_file(bad_line),
                       doctest::Contains(":1: expected key = value"), std::runtime_error);
  std::remove(bad_line.c_str());

  CHECK_THROWS_AS(ExperimentConfig::from_file("/tmp/smoothltf_no_such.cfg"), std::runtime_error);
}

TEST_CASE("experiments are deterministic and round-trip through JSONL") {
  const ExperimentConfig cfg = tiny_config();
  const ExperimentRecord a = run_experiment(cfg);
  const ExperimentRecord b = run_experiment(cfg);
  CHECK(a.to_jsonl() == b.to_jsonl());  // byte-identical for equal seeds

  CHECK(a.rep_seeds.size() == cfg.r);
  CHECK(a.train_errors.size() == cfg.r);
  CHECK(a.chosen < cfg.r);
  CHECK(a.test_error >= 0.0);
  CHECK(a.test_error <= 1.0);
  CHECK(a.benchmark.method == EvalMode::Exact);  // n=6 is under the enumeration cap

  const ExperimentRecord back = ExperimentRecord::from_jsonl(a.to_jsonl());
  CHECK(back.to_jsonl() == a.to_jsonl());

  ExperimentConfig other = cfg;
  other.seed = 43;
  CHECK(run_experiment(other).to_jsonl() != a.to_jsonl());
}

TEST_CASE("an experiment whose batches cannot cover the basis is rejected") {
  ExperimentConfig cfg = tiny_config();
  cfg.d = 2;
  cfg.N = 10;  // basis size 22 at n=6, d=2
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("record files round-trip and reject unknown schema versions") {
  const ExperimentRecord rec = run_experiment(tiny_config());
  const std::string path = "/tmp/smoothltf_records_test.jsonl";
  std::remove(path.c_str());
  append_record(path, rec);
  append_record(path, rec);
  const auto recs = read_records(path);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].to_jsonl() == rec.to_jsonl());
  CHECK(recs[1].to_jsonl() == rec.to_jsonl());

  json j = json::parse(rec.to_jsonl());
  j["schema_version"] = kResultsSchemaVersion + 1;
  std::ofstream(path, std::ios::app) << j.dump() << "\n";
  CHECK_THROWS_AS(read_records(path), std::runtime_error);
  std::remove(path.c_str());

  CHECK_THROWS_AS(ExperimentRecord::from_jsonl(j.dump()), std::runtime_error);
}

TEST_CASE("emit_plots writes one CSV row per parameter value") {
  const ExperimentRecord rec = run_experiment(tiny_config());
  const std::string dir = "/tmp/smoothltf_plots_test";
  std::filesystem::remove_all(dir);
  emit_plots({rec}, dir);
  for (const char* name : {"error_vs_N.csv", "error_vs_d.csv", "error_vs_sigma.csv", "plots.gp"})
    CHECK(std::filesystem::exists(dir + "/" + name));

  std::ifstream csv(dir + "/error_vs_N.csv");
  std::string header, row, extra;
  REQUIRE(std::getline(csv, header));
  CHECK(header == "N,records,test_error_mean,test_error_ci99,benchmark_mean");
  REQUIRE(std::getline(csv, row));
  CHECK(!std::getline(csv, extra));
  std::stringstream ss(row);
  std::string field;
  std::getline(ss, field, ',');
  CHECK(std::stod(field) == double(rec.config.N));
  std::getline(ss, field, ',');
  CHECK(field == "1");
  std::getline(ss, field, ',');
  CHECK(std::stod(field) == doctest::Approx(rec.test_error));
  std::getline(ss, field, ',');  // CI over one record
  std::getline(ss, field, ',');
  CHECK(std::stod(field) == doctest::Approx(rec.benchmark.value));
  std::filesystem::remove_all(dir);

  CHECK_THROWS_AS(emit_plots({}, dir), std::invalid_argument);
}

TEST_CASE("more smoothing makes the planted benchmark worse") {
  ExperimentConfig cfg = tiny_config();
  cfg.label_noise = "none";
  double prev = -1.0;
  for (double sigma : {0.0, 0.05, 0.15}) {
    cfg.sigma = sigma;
    const ExperimentRecord rec = run_experiment(cfg);
    CHECK(rec.benchmark.value >= prev - 1e-12);
    prev = rec.benchmark.value;
  }
}
