// Command-line front end: data generation, learning, evaluation, lemma
// checks, experiments, and plot-data emission.
//
// Exit codes: 0 all invoked checks pass, 1 check failure, 2 usage error,
// 3 internal error.

#include <cstdio>
#include <chrono>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smoothltf/core.hpp"
#include "smoothltf/harness.hpp"
#include "smoothltf/regression.hpp"

using namespace smoothltf;

namespace {

struct CheckFailure {};  // invoked checks ran but did not all pass

void cmd_gen_data(CLI::App& app) {
  auto* sub = app.add_subcommand("gen-data", "Generate a planted-LTF dataset file");
  auto n = std::make_shared<std::size_t>(10);
  auto count = std::make_shared<std::size_t>(1000);
  auto seed = std::make_shared<std::uint64_t>(1);
  auto bias = std::make_shared<double>(0.5);
  auto noise = std::make_shared<std::string>("none");
  auto eta = std::make_shared<double>(0.1);
  auto band = std::make_shared<double>(0.0);
  auto theta = std::make_shared<double>(0.0);
  auto weights = std::make_shared<std::vector<double>>();
  auto out = std::make_shared<std::string>();
  sub->add_option("--n", *n, "Dimension")->capture_default_str();
  sub->add_option("--count", *count, "Number of samples")->capture_default_str();
  sub->add_option("--seed", *seed, "Master seed")->capture_default_str();
  sub->add_option("--bias", *bias, "P[x_i = -1] of the product marginal")->capture_default_str();
  sub->add_option("--label-noise", *noise, "none | rcn | boundary")->capture_default_str();
  sub->add_option("--eta", *eta, "RCN flip rate")->capture_default_str();
  sub->add_option("--band", *band, "Boundary band half-width")->capture_default_str();
  sub->add_option("--theta", *theta, "Planted threshold")->capture_default_str();
  sub->add_option("--weights", *weights, "Planted weights (default: all ones)");
  sub->add_option("--out", *out, "Output dataset path")->required();
  sub->callback([=]() {
    std::vector<double> w = *weights;
    if (w.empty()) w.assign(*n, 1.0);
    LabelNoise ln = LabelNoise::none();
    if (*noise == "rcn") ln = LabelNoise::rcn(*eta);
    else if (*noise == "boundary") ln = LabelNoise::boundary(*band);
    else if (*noise != "none") throw CLI::ValidationError("--label-noise", "unknown kind");
    PlantedDataConfig cfg(*n, MixtureDistribution(ProductDistribution::biased(*n, *bias)),
                          LinearThresholdFunction(w, *theta), ln);
    write_dataset(*out, generate_dataset(cfg, *count, *seed));
    std::cout << "wrote " << *count << " samples to " << *out << "\n";
  });
}

void cmd_learn(CLI::App& app) {
  auto* sub = app.add_subcommand("learn", "Fit a polynomial threshold hypothesis to a dataset");
  auto data = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto degree = std::make_shared<std::size_t>(1);
  auto epsilon = std::make_shared<double>(0.1);
  auto delta = std::make_shared<double>(0.1);
  auto seed = std::make_shared<std::uint64_t>(1);
  auto reps = std::make_shared<std::size_t>(0);
  sub->add_option("--data", *data, "Training dataset path")->required();
  sub->add_option("--degree", *degree, "Monomial degree bound")->capture_default_str();
  sub->add_option("--epsilon", *epsilon, "Target excess error")->capture_default_str();
  sub->add_option("--delta", *delta, "Failure probability")->capture_default_str();
  sub->add_option("--seed", *seed, "Seed")->capture_default_str();
  sub->add_option("--reps", *reps, "Repetition count override (0 = derive)")
      ->capture_default_str();
  sub->add_option("--out", *out, "Output model path")->required();
  sub->callback([=]() {
    const std::vector<LabeledSample> samples = read_dataset(*data);
    if (samples.empty()) throw CLI::ValidationError("--data", "empty dataset");
    const std::size_t n = samples[0].x.size();
    // The file is a fixed pool: batches are carved out of it in order, so the
    // derived (r, V) are shrunk to what the pool can support.
    LearnConfig cfg = LearnConfig::from_targets(*degree, *epsilon, *delta, 0);
    if (*reps > 0) cfg.r = *reps;
    const MonomialBasis basis(n, *degree);
    const std::size_t per_batch = std::max(basis.size(), samples.size() / (cfg.r + 1));
    cfg.N = per_batch;
    cfg.r = std::max<std::size_t>(1, std::min(cfg.r, samples.size() / per_batch));
    if (cfg.r * per_batch >= samples.size()) cfg.r = std::max<std::size_t>(1, cfg.r - 1);
    cfg.V = samples.size() - cfg.r * per_batch;
    if (cfg.V == 0) throw CLI::ValidationError("--data", "dataset too small to hold out validation");
    std::size_t cursor = 0;
    auto provider = [&]() { return samples[cursor++ % samples.size()]; };
    const PolynomialHypothesis h = learn(provider, n, cfg, *seed);
    h.save(*out);
    std::cout << "model written to " << *out << " (r=" << cfg.r << ", N=" << cfg.N
              << ", V=" << cfg.V << ")\n";
  });
}

void cmd_eval(CLI::App& app) {
  auto* sub = app.add_subcommand("eval", "Evaluate a saved model on a dataset");
  auto model = std::make_shared<std::string>();
  auto data = std::make_shared<std::string>();
  sub->add_option("--model", *model, "Model path")->required();
  sub->add_option("--data", *data, "Dataset path")->required();
  sub->callback([=]() {
    const PolynomialHypothesis h = PolynomialHypothesis::load(*model);
    const double err = evaluate(h, read_dataset(*data));
    std::cout << "error " << err << "\n";
  });
}

void cmd_lemma_check(CLI::App& app, bool& any_check_failed) {
  auto* sub = app.add_subcommand("lemma-check", "Run structural-bound checks");
  auto selectors = std::make_shared<std::vector<std::string>>(std::vector<std::string>{"all"});
  auto profile = std::make_shared<std::string>("smoke");
  auto scale = std::make_shared<double>(1.0);
  auto seed = std::make_shared<std::uint64_t>(20240817);
  auto out = std::make_shared<std::string>();
  sub->add_option("--check", *selectors, "Check ids, or 'all'")->capture_default_str();
  sub->add_option("--budget", *profile, "smoke | standard | thorough")->capture_default_str();
  sub->add_option("--bound-scale", *scale, "Multiplier on every bound (negative control)")
      ->capture_default_str();
  sub->add_option("--seed", *seed, "Seed")->capture_default_str();
  sub->add_option("--out", *out, "Append rows to this results file");
  sub->callback([=, &any_check_failed]() {
    const auto rows = lemma_check_suite(*selectors, parse_budget_profile(*profile), *scale, *seed);
    std::printf("%-22s %14s %14s  %s\n", "check", "measured", "bound", "status");
    for (const CheckRow& r : rows) {
      std::printf("%-22s %14.6g %14.6g  %s\n", r.check_id.c_str(), r.measured, r.bound,
                  r.pass ? "PASS" : "FAIL");
      if (!r.pass) any_check_failed = true;
    }
    if (!out->empty()) append_results(*out, rows);
  });
}

void cmd_experiment(CLI::App& app) {
  auto* sub = app.add_subcommand("experiment", "Run a learning experiment from a config file");
  auto config = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  sub->add_option("--config", *config, "Key-value config file")->required();
  sub->add_option("--out", *out, "Append the record to this results file")->required();
  sub->callback([=]() {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentRecord rec = run_experiment(ExperimentConfig::from_file(*config));
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    append_record(*out, rec);
    std::cout << "test error " << rec.test_error << ", smoothed benchmark "
              << rec.benchmark.value << " (" << secs << " s)\n";
  });
}

void cmd_emit_plots(CLI::App& app) {
  auto* sub = app.add_subcommand("emit-plots", "Write CSV series and a gnuplot script");
  auto records = std::make_shared<std::string>();
  auto out_dir = std::make_shared<std::string>("plots");
  sub->add_option("--records", *records, "Results file with experiment records")->required();
  sub->add_option("--out-dir", *out_dir, "Output directory")->capture_default_str();
  sub->callback([=]() {
    emit_plots(read_records(*records), *out_dir);
    std::cout << "plot data written to " << *out_dir << "\n";
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smoothed halfspace learning laboratory"};
  app.require_subcommand(1);
  bool any_check_failed = false;
  cmd_gen_data(app);
  cmd_learn(app);
  cmd_eval(app);
  cmd_lemma_check(app, any_check_failed);
  cmd_experiment(app);
  cmd_emit_plots(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return any_check_failed ? 1 : 0;
}
