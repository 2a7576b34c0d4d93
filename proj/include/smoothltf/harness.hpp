#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "smoothltf/analysis.hpp"
#include "smoothltf/core.hpp"
#include "smoothltf/regression.hpp"

namespace smoothltf {

inline constexpr int kResultsSchemaVersion = 1;

// One row of the lemma-check table; serialized as a JSONL record.
struct CheckRow {
  std::string check_id;
  std::string params;   // JSON object with the parameters of this row
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;

  std::string to_jsonl() const;
};

enum class BudgetProfile { Smoke, Standard, Thorough };
BudgetProfile parse_budget_profile(const std::string& name);

// Known check ids: noise-sensitivity, operator-gap, rerandomization,
// exp-approx, tilting, berry-esseen, critical-index, head-agreement,
// subsample, tail-concentration, moment-bound, mgf-bound. Selector "all"
// expands to every id. bound_scale multiplies every bound (negative-control
// hook); unknown ids throw.
std::vector<CheckRow> lemma_check_suite(const std::vector<std::string>& selectors,
                                        BudgetProfile profile, double bound_scale = 1.0,
                                        std::uint64_t seed = 20240817);

void append_results(const std::string& path, const std::vector<CheckRow>& rows);

// ---- Experiments ----

struct ExperimentConfig {
  std::size_t n = 10;
  std::size_t d = 3;
  double epsilon = 0.1;
  double delta = 0.1;
  std::size_t N = 5000;
  std::size_t r = 0;  // 0 = derive from (epsilon, delta)
  std::size_t V = 0;
  std::uint64_t seed = 1;
  double sigma = 0.02;                // smoothing rate for the benchmark
  std::string label_noise = "rcn";    // none | rcn | boundary
  double eta = 0.1;                   // RCN rate
  double band = 0.0;                  // boundary band half-width
  std::size_t test_N = 20000;
  double marginal_bias = 0.5;         // P[x_i = -1]
  std::vector<double> planted_weights;  // empty = all-ones majority
  double planted_theta = 0.0;

  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_entries(const std::map<std::string, std::string>& kv);
  LearnConfig learn_config() const;
  PlantedDataConfig data_config() const;
};

struct ExperimentRecord {
  ExperimentConfig config;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> rep_seeds;
  std::vector<double> train_errors;
  std::vector<double> validation_errors;
  std::size_t chosen = 0;
  double test_error = 0.0;
  EstimateWithCI benchmark;  // smoothed error of the planted function
  PolynomialHypothesis hypothesis;

  std::string to_jsonl() const;
  static ExperimentRecord from_jsonl(const std::string& line);
};

// Wall-clock is printed, not persisted: records with equal seeds are
// byte-identical.
ExperimentRecord run_experiment(const ExperimentConfig& cfg);
void append_record(const std::string& path, const ExperimentRecord& rec);
std::vector<ExperimentRecord> read_records(const std::string& path);

// CSV series (error vs N, d, sigma) plus a gnuplot script, into out_dir.
void emit_plots(const std::vector<ExperimentRecord>& records, const std::string& out_dir);

}  // namespace smoothltf
