#include "smoothltf/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "smoothltf/approx.hpp"
#include "smoothltf/stats.hpp"
#include "smoothltf/structure.hpp"

namespace smoothltf {

using nlohmann::json;

std::string CheckRow::to_jsonl() const {
  json j;
  j["schema_version"] = kResultsSchemaVersion;
  j["kind"] = "check";
  j["check_id"] = check_id;
  j["params"] = params.empty() ? json::object() : json::parse(params);
  j["measured"] = measured;
  j["bound"] = bound;
  j["pass"] = pass;
  return j.dump();
}

BudgetProfile parse_budget_profile(const std::string& name) {
  if (name == "smoke") return BudgetProfile::Smoke;
  if (name == "standard") return BudgetProfile::Standard;
  if (name == "thorough") return BudgetProfile::Thorough;
  throw std::invalid_argument("unknown budget profile: " + name);
}

namespace {

std::size_t profile_mult(BudgetProfile p) {
  switch (p) {
    case BudgetProfile::Smoke: return 1;
    case BudgetProfile::Standard: return 10;
    case BudgetProfile::Thorough: return 100;
  }
  return 1;
}

CheckRow make_row(const std::string& id, json params, double measured, double bound,
                  double scale) {
  CheckRow r;
  r.check_id = id;
  r.params = params.dump();
  r.measured = measured;
  r.bound = bound * scale;
  r.pass = measured <= r.bound;
  return r;
}

LinearThresholdFunction random_ltf(std::size_t n, RngStream& rng) {
  std::vector<double> w(n);
  bool any = false;
  for (double& v : w) {
    v = rng.next_gaussian();
    any = any || v != 0.0;
  }
  if (!any) w[0] = 1.0;
  return LinearThresholdFunction(w, 0.5 * rng.next_gaussian());
}

void check_noise_sensitivity(std::vector<CheckRow>& rows, std::size_t mult, double scale,
                             RngStream rng) {
  const std::size_t n = 10, count = 20 * mult;
  const std::vector<double> deltas{0.25, 0.10, 0.04, 0.01};
  double worst = 0.0;
  for (std::size_t c = 0; c < count; ++c) {
    const LinearThresholdFunction f = random_ltf(n, rng);
    std::vector<double> biases(n);
    for (double& b : biases) b = 0.1 + 0.8 * rng.next_double();
    const ProductDistribution mu(biases);
    for (double d : deltas)
      worst = std::max(worst,
                       noise_sensitivity(f, d, mu, EvalMode::Exact).value / std::sqrt(d));
  }
  rows.push_back(make_row("noise-sensitivity", {{"n", n}, {"ltfs", count}}, worst, 1.25, scale));
}

void check_operator_gap(std::vector<CheckRow>& rows, std::size_t mult, double scale,
                        RngStream rng) {
  const std::size_t n = 10, count = 10 * mult;
  double worst = 0.0;
  for (std::size_t c = 0; c < count; ++c) {
    const LinearThresholdFunction f = random_ltf(n, rng);
    for (double sigma : {0.05, 0.25})
      for (double rho : {0.01, 0.04, 0.25})
        worst = std::max(
            worst, smoothing_l1_gap(f, rho, sigma, EvalMode::Exact).value / std::sqrt(rho));
  }
  rows.push_back(make_row("operator-gap", {{"n", n}, {"ltfs", count}}, worst, 2.5, scale));
}

void check_rerandomization(std::vector<CheckRow>& rows, double scale) {
  double worst = 0.0;
  for (std::uint64_t idx = 0; idx < 8; ++idx) {
    const BitVector z = BitVector::from_index(idx, 3);
    for (double rho : {0.2, 0.5})
      for (double sigma : {0.1, 0.3})
        worst = std::max(worst, total_variation(rerandomize_law(z, rho, sigma),
                                                resample_channel_law(z, rho, sigma)));
  }
  rows.push_back(make_row("rerandomization", {{"n", 3}}, worst, 1e-12, scale));
}

void check_exp_approx(std::vector<CheckRow>& rows, double scale) {
  double worst_ratio = 0.0;
  for (double T : {10.0, 25.0, 50.0})
    for (double eps : {1e-2, 1e-3})
      worst_ratio = std::max(worst_ratio, exp_neg_approx(T, eps).sup_error / eps);
  rows.push_back(make_row("exp-approx", {{"grid", "T in {10,25,50}, eps in {1e-2,1e-3}"}},
                          worst_ratio, 1.0, scale));
  const double d50 = double(exp_neg_approx(50.0, 1e-3).degree);
  const double d125 = double(exp_neg_approx(12.5, 1e-3).degree);
  rows.push_back(
      make_row("exp-approx-degree", {{"eps", 1e-3}}, d50 / d125, 2.5, scale));
}

void check_tilting(std::vector<CheckRow>& rows, double scale) {
  double worst_diff = 0.0;
  for (double b = -10.0; b <= 10.0 + 1e-9; b += 0.5)
    worst_diff = std::max(worst_diff, tilting_second_moment(b).abs_diff);
  rows.push_back(make_row("tilting", {{"b_range", "[-10,10]"}}, worst_diff, 1e-8, scale));
  const double C = 2.0 * std::exp(0.25) / std::sqrt(M_PI);
  double worst_ratio = 0.0;
  for (double b : {0.0, 1.0, -1.0, 3.0, -3.0, 5.0, -5.0})
    worst_ratio = std::max(
        worst_ratio, tilting_second_moment(b).closed_form / (C * std::exp(std::abs(b))));
  // ratio is exactly 1 at b=0; tiny slack keeps last-ulp noise out.
  rows.push_back(make_row("tilting-bound", {{"C", C}}, worst_ratio, 1.0 + 1e-9, scale));
}

void check_berry_esseen(std::vector<CheckRow>& rows, double scale) {
  const BerryEsseenResult ones = berry_esseen_gap(std::vector<double>(20, 1.0), EvalMode::Exact);
  rows.push_back(make_row("berry-esseen", {{"u", "all-ones"}, {"n", 20}}, ones.ratio, 1.0, scale));
  const BerryEsseenResult atom = berry_esseen_gap({1.0}, EvalMode::Exact);
  const double target = normal_cdf(1.0) - 0.5;
  rows.push_back(make_row("berry-esseen-two-atom", {{"target", target}},
                          std::abs(atom.gap - target), 1e-4, scale));
}

void check_critical_index(std::vector<CheckRow>& rows, std::size_t mult, double scale,
                          RngStream rng) {
  const std::size_t count = 100 * mult;
  std::size_t mismatches = 0;
  for (std::size_t c = 0; c < count; ++c) {
    const std::size_t n = 2 + rng.next_below(63);
    std::vector<double> u(n);
    bool any = false;
    for (double& v : u) {
      v = rng.next_gaussian();
      any = any || v != 0.0;
    }
    if (!any) u[0] = 1.0;
    for (int a = 1; a <= 9; ++a) {
      const double alpha = 0.1 * a;
      const CriticalIndexReport rep = critical_index(u, alpha);
      // Direct definition scan, independent of the library's suffix pass.
      std::vector<double> s(n);
      for (std::size_t i = 0; i < n; ++i) s[i] = std::abs(u[i]);
      std::sort(s.begin(), s.end(), std::greater<>());
      std::size_t ell = 0;
      for (std::size_t i = 0; i < n && !ell; ++i) {
        double tail = 0.0;
        for (std::size_t j = i; j < n; ++j) tail += s[j] * s[j];
        if (s[i] <= alpha * std::sqrt(tail)) ell = i + 1;
      }
      const std::size_t got = rep.ell ? *rep.ell : 0;
      if (got != ell) ++mismatches;
    }
  }
  rows.push_back(make_row("critical-index", {{"vectors", count}}, double(mismatches), 0.5, scale));
}

void check_head_agreement(std::vector<CheckRow>& rows, std::size_t mult, double scale,
                          RngStream rng) {
  // Dominated-head instance: geometric head dwarfing a flat tail.
  const std::size_t n = 10, H = 3;
  std::vector<double> u{64.0, 32.0, 16.0, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1};
  const double rho = 0.5, sigma = 0.1, eps = 0.1;
  const std::size_t draws = 20 * mult;
  std::size_t bad = 0;
  const ProductDistribution uniform = ProductDistribution::uniform(n);
  for (std::size_t c = 0; c < draws; ++c) {
    const BitVector z = uniform.sample(rng);
    const double p = case2_sign_agreement(u, 0.0, H, rho, sigma, z, EvalMode::Exact).value;
    if (p > eps) ++bad;
  }
  rows.push_back(make_row("head-agreement", {{"n", n}, {"H", H}, {"draws", draws}},
                          double(bad) / double(draws), 0.1, scale));
}

void check_subsample(std::vector<CheckRow>& rows, std::size_t mult, double scale,
                     std::uint64_t seed) {
  const std::size_t trials = 1000 * mult;
  const double delta = 0.01;
  const SubsampleCheckReport rep = regular_subsample_check(
      std::vector<double>(400, 1.0), 1.0 / 20.0, 0.5, delta, trials, seed);
  rows.push_back(make_row("subsample", {{"n", 400}, {"trials", trials}},
                          1.0 - rep.pass_frequency, delta + 3.0 * rep.binomial_se, scale));
}

void check_tail_concentration(std::vector<CheckRow>& rows, std::size_t mult, double scale,
                              RngStream rng) {
  const std::size_t n = 10;
  std::vector<double> w(n);
  for (double& v : w) v = rng.next_gaussian();
  std::vector<std::size_t> tail{4, 5, 6, 7, 8, 9};
  const ProductDistribution uniform = ProductDistribution::uniform(n);
  const BitVector z = uniform.sample(rng);
  const double eps = 0.1;
  const std::size_t x_trials = 50 * mult, y_trials = 200;
  // Rademacher sums are sub-gaussian: survival <= 2 e^{-(t/lambda)^2} at
  // lambda = sqrt(2).
  const TailConcentrationReport rep =
      tail_concentration_check(w, tail, z, 0.5, 0.1, MixtureDistribution(uniform), std::sqrt(2.0),
                               1.0, eps, x_trials, y_trials, rng.next_u64());
  rows.push_back(make_row("tail-concentration", {{"n", n}, {"x_trials", x_trials}},
                          1.0 - rep.x_pass_frequency, 1.0 - rep.required, scale));
}

// Symmetric Weibull-type proxy: P[|X| > t] = e^{-(t/lambda)^{1+alpha}}.
std::vector<double> subexp_proxy_samples(const TailProfile& prof, std::size_t count,
                                         RngStream& rng) {
  std::vector<double> s(count);
  for (double& v : s) {
    double u = rng.next_double();
    while (u <= 0.0) u = rng.next_double();
    v = rng.rademacher() * prof.lambda * std::pow(-std::log(u), 1.0 / (1.0 + prof.alpha_tail));
  }
  return s;
}

void check_moment_bound(std::vector<CheckRow>& rows, std::size_t mult, double scale,
                        RngStream rng) {
  const TailProfile prof(1.0, 0.5);
  const auto samples = subexp_proxy_samples(prof, 20000 * mult, rng);
  double worst = 0.0;
  for (std::size_t k = 1; k <= 4; ++k) {
    const MomentCheckResult m = subexp_moment_check(samples, k, prof);
    worst = std::max(worst, (m.empirical - m.half_width) / m.bound);
  }
  rows.push_back(
      make_row("moment-bound", {{"k", "1..4"}, {"samples", samples.size()}}, worst, 1.0, scale));
}

void check_mgf_bound(std::vector<CheckRow>& rows, std::size_t mult, double scale, RngStream rng) {
  const TailProfile prof(1.0, 0.5);
  const auto samples = subexp_proxy_samples(prof, 20000 * mult, rng);
  double worst = 0.0;
  for (double a : {0.5, 1.0}) {
    const MomentCheckResult m = subexp_mgf_check(samples, a, prof);
    worst = std::max(worst, (m.empirical - m.half_width) / m.bound);
  }
  rows.push_back(
      make_row("mgf-bound", {{"a", "{0.5,1}"}, {"samples", samples.size()}}, worst, 1.0, scale));
}

}  // namespace

std::vector<CheckRow> lemma_check_suite(const std::vector<std::string>& selectors,
                                        BudgetProfile profile, double bound_scale,
                                        std::uint64_t seed) {
  static const std::vector<std::string> all_ids{
      "noise-sensitivity", "operator-gap",   "rerandomization",    "exp-approx",
      "tilting",           "berry-esseen",   "critical-index",     "head-agreement",
      "subsample",         "tail-concentration", "moment-bound",   "mgf-bound"};
  std::vector<std::string> ids;
  for (const std::string& s : selectors) {
    if (s == "all") {
      ids = all_ids;
      break;
    }
    if (std::find(all_ids.begin(), all_ids.end(), s) == all_ids.end())
      throw std::invalid_argument("unknown check id: " + s);
    ids.push_back(s);
  }
  if (ids.empty()) ids = all_ids;

  const std::size_t mult = profile_mult(profile);
  std::vector<CheckRow> rows;
  std::uint64_t stream = 0;
  for (const std::string& id : ids) {
    RngStream rng(seed, ++stream);
    if (id == "noise-sensitivity") check_noise_sensitivity(rows, mult, bound_scale, rng);
    else if (id == "operator-gap") check_operator_gap(rows, mult, bound_scale, rng);
    else if (id == "rerandomization") check_rerandomization(rows, bound_scale);
    else if (id == "exp-approx") check_exp_approx(rows, bound_scale);
    else if (id == "tilting") check_tilting(rows, bound_scale);
    else if (id == "berry-esseen") check_berry_esseen(rows, bound_scale);
    else if (id == "critical-index") check_critical_index(rows, mult, bound_scale, rng);
    else if (id == "head-agreement") check_head_agreement(rows, mult, bound_scale, rng);
    else if (id == "subsample") check_subsample(rows, mult, bound_scale, rng.next_u64());
    else if (id == "tail-concentration") check_tail_concentration(rows, mult, bound_scale, rng);
    else if (id == "moment-bound") check_moment_bound(rows, mult, bound_scale, rng);
    else if (id == "mgf-bound") check_mgf_bound(rows, mult, bound_scale, rng);
  }
  return rows;
}

void append_results(const std::string& path, const std::vector<CheckRow>& rows) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open " + path + " for appending");
  for (const CheckRow& r : rows) out << r.to_jsonl() << "\n";
}

// ---- Experiments ----

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string key, eq, value;
    std::istringstream ls(line);
    if (!(ls >> key)) continue;
    const std::size_t pos = line.find('=');
    if (pos == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
    key = line.substr(0, pos);
    value = line.substr(pos + 1);
    auto trim = [](std::string& s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
    };
    trim(key);
    trim(value);
    if (key.empty() || value.empty())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
    kv[key] = value;
  }
  return from_entries(kv);
}

ExperimentConfig ExperimentConfig::from_entries(const std::map<std::string, std::string>& kv) {
  ExperimentConfig cfg;
  for (const auto& [key, value] : kv) {
    std::istringstream vs(value);
    bool ok = true;
    if (key == "n") ok = bool(vs >> cfg.n);
    else if (key == "d" || key == "degree") ok = bool(vs >> cfg.d);
    else if (key == "epsilon") ok = bool(vs >> cfg.epsilon);
    else if (key == "delta") ok = bool(vs >> cfg.delta);
    else if (key == "N") ok = bool(vs >> cfg.N);
    else if (key == "r") ok = bool(vs >> cfg.r);
    else if (key == "V") ok = bool(vs >> cfg.V);
    else if (key == "seed") ok = bool(vs >> cfg.seed);
    else if (key == "sigma") ok = bool(vs >> cfg.sigma);
    else if (key == "label_noise") cfg.label_noise = value;
    else if (key == "eta") ok = bool(vs >> cfg.eta);
    else if (key == "band") ok = bool(vs >> cfg.band);
    else if (key == "test_N") ok = bool(vs >> cfg.test_N);
    else if (key == "marginal_bias") ok = bool(vs >> cfg.marginal_bias);
    else if (key == "planted_theta") ok = bool(vs >> cfg.planted_theta);
    else if (key == "planted_weights") {
      cfg.planted_weights.clear();
      std::string item;
      std::istringstream ws(value);
      while (std::getline(ws, item, ',')) cfg.planted_weights.push_back(std::stod(item));
    } else {
      throw std::runtime_error("unknown config key: " + key);
    }
    if (!ok) throw std::runtime_error("bad value for config key " + key + ": " + value);
  }
  return cfg;
}

LearnConfig ExperimentConfig::learn_config() const {
  LearnConfig lc = LearnConfig::from_targets(d, epsilon, delta, N);
  if (r > 0) lc.r = r;
  if (V > 0) lc.V = V;
  return lc;
}

PlantedDataConfig ExperimentConfig::data_config() const {
  std::vector<double> w = planted_weights;
  if (w.empty()) w.assign(n, 1.0);
  if (w.size() != n) throw std::runtime_error("planted_weights length differs from n");
  LabelNoise noise = LabelNoise::none();
  if (label_noise == "rcn") noise = LabelNoise::rcn(eta);
  else if (label_noise == "boundary") noise = LabelNoise::boundary(band);
  else if (label_noise != "none") throw std::runtime_error("unknown label_noise: " + label_noise);
  return PlantedDataConfig(n, MixtureDistribution(ProductDistribution::biased(n, marginal_bias)),
                           LinearThresholdFunction(w, planted_theta), noise);
}

namespace {

json config_to_json(const ExperimentConfig& c) {
  return json{{"n", c.n},
              {"d", c.d},
              {"epsilon", c.epsilon},
              {"delta", c.delta},
              {"N", c.N},
              {"r", c.r},
              {"V", c.V},
              {"seed", c.seed},
              {"sigma", c.sigma},
              {"label_noise", c.label_noise},
              {"eta", c.eta},
              {"band", c.band},
              {"test_N", c.test_N},
              {"marginal_bias", c.marginal_bias},
              {"planted_weights", c.planted_weights},
              {"planted_theta", c.planted_theta}};
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.n = j.at("n");
  c.d = j.at("d");
  c.epsilon = j.at("epsilon");
  c.delta = j.at("delta");
  c.N = j.at("N");
  c.r = j.at("r");
  c.V = j.at("V");
  c.seed = j.at("seed");
  c.sigma = j.at("sigma");
  c.label_noise = j.at("label_noise");
  c.eta = j.at("eta");
  c.band = j.at("band");
  c.test_N = j.at("test_N");
  c.marginal_bias = j.at("marginal_bias");
  c.planted_weights = j.at("planted_weights").get<std::vector<double>>();
  c.planted_theta = j.at("planted_theta");
  return c;
}

}  // namespace

std::string ExperimentRecord::to_jsonl() const {
  json j;
  j["schema_version"] = kResultsSchemaVersion;
  j["kind"] = "experiment";
  j["config"] = config_to_json(config);
  j["master_seed"] = master_seed;
  j["rep_seeds"] = rep_seeds;
  j["train_errors"] = train_errors;
  j["validation_errors"] = validation_errors;
  j["chosen"] = chosen;
  j["test_error"] = test_error;
  j["benchmark"] = {{"value", benchmark.value},
                    {"half_width", benchmark.half_width},
                    {"exact", benchmark.method == EvalMode::Exact},
                    {"n_samples", benchmark.n_samples}};
  j["hypothesis"] = json::parse(hypothesis.to_json());
  return j.dump();
}

ExperimentRecord ExperimentRecord::from_jsonl(const std::string& line) {
  const json j = json::parse(line);
  if (j.value("schema_version", -1) != kResultsSchemaVersion)
    throw std::runtime_error("unsupported results schema version");
  if (j.value("kind", "") != "experiment") throw std::runtime_error("not an experiment record");
  ExperimentRecord rec;
  rec.config = config_from_json(j.at("config"));
  rec.master_seed = j.at("master_seed");
  rec.rep_seeds = j.at("rep_seeds").get<std::vector<std::uint64_t>>();
  rec.train_errors = j.at("train_errors").get<std::vector<double>>();
  rec.validation_errors = j.at("validation_errors").get<std::vector<double>>();
  rec.chosen = j.at("chosen");
  rec.test_error = j.at("test_error");
  rec.benchmark.value = j.at("benchmark").at("value");
  rec.benchmark.half_width = j.at("benchmark").at("half_width");
  rec.benchmark.method =
      j.at("benchmark").at("exact").get<bool>() ? EvalMode::Exact : EvalMode::MonteCarlo;
  rec.benchmark.n_samples = j.at("benchmark").at("n_samples");
  rec.hypothesis = PolynomialHypothesis::from_json(j.at("hypothesis").dump());
  return rec;
}

ExperimentRecord run_experiment(const ExperimentConfig& cfg) {
  const PlantedDataConfig data_cfg = cfg.data_config();
  const LearnConfig lc = cfg.learn_config();
  const MonomialBasis basis(cfg.n, lc.d);
  lc.validate(basis.size());

  ExperimentRecord rec;
  rec.config = cfg;
  rec.master_seed = cfg.seed;

  // Stream b feeds batch b; streams r, r+1, r+2 feed validation, test, and
  // the benchmark estimate.
  for (std::size_t b = 0; b < lc.r; ++b) rec.rep_seeds.push_back(b);

  std::size_t served = 0, batch = 0;
  std::vector<LabeledSample> buffer;
  auto provider = [&]() -> LabeledSample {
    if (served == buffer.size()) {
      const std::size_t want = batch < lc.r ? lc.N : lc.V;
      RngStream rng(cfg.seed, batch);
      buffer = generate_dataset(data_cfg, want, rng);
      served = 0;
      ++batch;
    }
    return buffer[served++];
  };

  const LearnReport report = learn_with_report(provider, cfg.n, lc, cfg.seed);
  rec.train_errors = report.train_errors;
  rec.validation_errors = report.validation_errors;
  rec.chosen = report.chosen;
  rec.hypothesis = report.best;

  RngStream test_rng(cfg.seed, lc.r + 1);
  const std::vector<LabeledSample> test = generate_dataset(data_cfg, cfg.test_N, test_rng);
  rec.test_error = evaluate(report.best, test);

  if (cfg.n <= kSingleEnumCap) {
    rec.benchmark = smoothed_error(data_cfg.planted, test, cfg.sigma, EvalMode::Exact);
  } else {
    RngStream bench_rng(cfg.seed, lc.r + 2);
    rec.benchmark = smoothed_error(data_cfg.planted, test, cfg.sigma, EvalMode::MonteCarlo,
                                   cfg.test_N, bench_rng.next_u64());
  }
  return rec;
}

void append_record(const std::string& path, const ExperimentRecord& rec) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open " + path + " for appending");
  out << rec.to_jsonl() << "\n";
}

std::vector<ExperimentRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<ExperimentRecord> recs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    if (j.value("schema_version", -1) != kResultsSchemaVersion)
      throw std::runtime_error("unsupported results schema version");
    if (j.value("kind", "") != "experiment") continue;
    recs.push_back(ExperimentRecord::from_jsonl(line));
  }
  return recs;
}

namespace {

void emit_series(const std::vector<ExperimentRecord>& records, const std::string& path,
                 const std::string& param_name,
                 const std::function<double(const ExperimentRecord&)>& param) {
  // Group by parameter value; mean +- normal 99% CI across records (seeds).
  std::map<double, std::vector<const ExperimentRecord*>> groups;
  for (const auto& r : records) groups[param(r)].push_back(&r);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << param_name << ",records,test_error_mean,test_error_ci99,benchmark_mean\n";
  out.precision(17);
  for (const auto& [value, rs] : groups) {
    double mean = 0.0, bench = 0.0;
    for (const auto* r : rs) {
      mean += r->test_error;
      bench += r->benchmark.value;
    }
    mean /= double(rs.size());
    bench /= double(rs.size());
    double var = 0.0;
    for (const auto* r : rs) var += (r->test_error - mean) * (r->test_error - mean);
    var /= double(rs.size() > 1 ? rs.size() - 1 : 1);
    const double ci = normal_quantile(0.995) * std::sqrt(var / double(rs.size()));
    out << value << "," << rs.size() << "," << mean << "," << ci << "," << bench << "\n";
  }
}

}  // namespace

void emit_plots(const std::vector<ExperimentRecord>& records, const std::string& out_dir) {
  if (records.empty()) throw std::invalid_argument("emit_plots: no records");
  std::filesystem::create_directories(out_dir);
  emit_series(records, out_dir + "/error_vs_N.csv", "N",
              [](const ExperimentRecord& r) { return double(r.config.N); });
  emit_series(records, out_dir + "/error_vs_d.csv", "d",
              [](const ExperimentRecord& r) { return double(r.config.d); });
  emit_series(records, out_dir + "/error_vs_sigma.csv", "sigma",
              [](const ExperimentRecord& r) { return r.config.sigma; });
  std::ofstream gp(out_dir + "/plots.gp");
  if (!gp) throw std::runtime_error("cannot write gnuplot script");
  gp << "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set style data yerrorlines\n"
        "set terminal pngcairo size 900,600\n"
        "set output 'error_vs_N.png'\n"
        "plot 'error_vs_N.csv' using 1:3:4 with yerrorlines title 'test error', \\\n"
        "     '' using 1:5 with lines title 'smoothed benchmark'\n"
        "set output 'error_vs_d.png'\n"
        "plot 'error_vs_d.csv' using 1:3:4 with yerrorlines title 'test error', \\\n"
        "     '' using 1:5 with lines title 'smoothed benchmark'\n"
        "set output 'error_vs_sigma.png'\n"
        "plot 'error_vs_sigma.csv' using 1:3:4 with yerrorlines title 'test error', \\\n"
        "     '' using 1:5 with lines title 'smoothed benchmark'\n";
}

}  // namespace smoothltf
