// End-to-end acceptance gate: one pass/fail line per criterion, nonzero exit
// on any failure.
#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "smoothltf/approx.hpp"
#include "smoothltf/harness.hpp"
#include "smoothltf/regression.hpp"
#include "smoothltf/structure.hpp"

using namespace smoothltf;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%2d] %-28s %s  (%s)\n", idx, name.c_str(), pass ? "PASS" : "FAIL",
              detail.c_str());
  if (!pass) ++g_failures;
}

LinearThresholdFunction random_ltf(std::size_t n, RngStream& rng) {
  std::vector<double> w(n);
  for (double& v : w) v = rng.next_gaussian();
  if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) w[0] = 1.0;
  return LinearThresholdFunction(w, 0.5 * rng.next_gaussian());
}

ProductDistribution random_biased(std::size_t n, RngStream& rng) {
  std::vector<double> p(n);
  for (double& v : p) v = 0.1 + 0.8 * rng.next_double();
  return ProductDistribution(p);
}

std::string ratio_detail(const char* what, double worst) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "worst %s = %.6f", what, worst);
  return buf;
}

void criterion_noise_sensitivity() {
  RngStream rng(101);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const LinearThresholdFunction f = random_ltf(10, rng);
    const ProductDistribution mu = random_biased(10, rng);
    for (double delta : {0.25, 0.10, 0.04, 0.01}) {
      const double ns = noise_sensitivity(f, delta, mu, EvalMode::Exact).value;
      worst = std::max(worst, ns / (1.25 * std::sqrt(delta)));
    }
  }
  report(1, "noise-sensitivity bound", worst <= 1.0, ratio_detail("NS / 1.25 sqrt(delta)", worst));
}

void criterion_operator_gap() {
  RngStream rng(102);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const LinearThresholdFunction f = random_ltf(10, rng);
    for (double sigma : {0.05, 0.25})
      for (double rho : {0.01, 0.04, 0.25}) {
        const double gap = smoothing_l1_gap(f, rho, sigma, EvalMode::Exact).value;
        worst = std::max(worst, gap / (2.5 * std::sqrt(rho)));
      }
  }
  report(2, "operator gap", worst <= 1.0, ratio_detail("gap / 2.5 sqrt(rho)", worst));
}

void criterion_rerandomization() {
  double worst = 0.0;
  for (std::uint64_t zi = 0; zi < 8; ++zi) {
    const BitVector z = BitVector::from_index(zi, 3);
    for (double rho : {0.2, 0.5})
      for (double sigma : {0.1, 0.3})
        worst = std::max(worst, total_variation(rerandomize_law(z, rho, sigma),
                                                resample_channel_law(z, rho, sigma)));
  }
  report(3, "rerandomization identity", worst <= 1e-12, ratio_detail("TV distance", worst));
}

void criterion_l1_oracle() {
  RngStream rng(104);
  double worst = 0.0;
  bool ok = true;
  for (int t = 0; t < 100; ++t) {
    const std::size_t M = 1 + rng.next_below(3);
    const std::size_t N = M + rng.next_below(7 - M);
    Eigen::MatrixXd X(N, M);
    Eigen::VectorXd y(N);
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < M; ++j) X(Eigen::Index(i), Eigen::Index(j)) = rng.next_gaussian();
      y[Eigen::Index(i)] = rng.next_gaussian();
    }
    // An optimal basic solution interpolates M rows; enumerate all subsets.
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> pick(M);
    std::vector<bool> mask(N, false);
    std::fill(mask.begin(), mask.begin() + long(M), true);
    do {
      std::size_t k = 0;
      for (std::size_t i = 0; i < N; ++i)
        if (mask[i]) pick[k++] = i;
      Eigen::MatrixXd S(M, M);
      Eigen::VectorXd ty(M);
      for (std::size_t r = 0; r < M; ++r) {
        S.row(Eigen::Index(r)) = X.row(Eigen::Index(pick[r]));
        ty[Eigen::Index(r)] = y[Eigen::Index(pick[r])];
      }
      const Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
      if (!lu.isInvertible()) continue;
      best = std::min(best, (X * lu.solve(ty) - y).cwiseAbs().sum());
    } while (std::prev_permutation(mask.begin(), mask.end()));
    const double obj = l1_fit(X, y).objective;
    worst = std::max(worst, std::abs(obj - best));
    ok = ok && std::abs(obj - best) <= 1e-6;
  }

  // Degree-0: the fit is a weighted median of the labels.
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(7, 1);
  Eigen::VectorXd labels(7);
  labels << -1, 1, 1, -1, 1, 1, -1;
  std::vector<double> sorted(labels.data(), labels.data() + 7);
  std::nth_element(sorted.begin(), sorted.begin() + 3, sorted.end());
  const double median = sorted[3];
  // The minimizer is the unique label median; solve to near machine precision.
  const L1FitResult deg0 = l1_fit(ones, labels, 1e-13, 200);
  ok = ok && std::abs(deg0.coeffs[0] - median) <= 1e-10;
  report(4, "l1 vertex oracle", ok, ratio_detail("objective deviation", worst));
}

void criterion_end_to_end() {
  ExperimentConfig cfg;  // defaults: n=10 d=3 N=5000 eps=delta=0.1 sigma=0.02 rcn eta=0.1
  int wins = 0;
  double worst_excess = -1.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    cfg.seed = seed;
    const ExperimentRecord rec = run_experiment(cfg);
    const double excess = rec.test_error - rec.benchmark.value;
    worst_excess = std::max(worst_excess, excess);
    if (excess <= 0.1) ++wins;
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%d/20 seeds within +0.1, worst excess %.4f", wins,
                worst_excess);
  report(5, "end-to-end smoothed learning", wins >= 18, buf);
}

void criterion_exp_approx() {
  bool ok = true;
  double worst = 0.0;
  for (double T : {10.0, 25.0, 50.0})
    for (double eps : {1e-2, 1e-3}) {
      const double sup = exp_neg_approx(T, eps).sup_error;
      worst = std::max(worst, sup / eps);
      ok = ok && sup <= eps;
    }
  const double ratio =
      double(exp_neg_approx(50.0, 1e-3).degree) / double(exp_neg_approx(12.5, 1e-3).degree);
  ok = ok && ratio <= 2.5;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "worst sup/eps %.3f, degree ratio %.3f", worst, ratio);
  report(6, "exp approximation", ok, buf);
}

void criterion_tilting() {
  const double C = 2.0 * std::exp(0.25) / std::sqrt(M_PI);
  double worst_diff = 0.0, worst_ratio = 0.0;
  for (double b = -10.0; b <= 10.0 + 1e-9; b += 0.25)
    worst_diff = std::max(worst_diff, tilting_second_moment(b).abs_diff);
  for (double b : {0.0, 1.0, -1.0, 3.0, -3.0, 5.0, -5.0})
    worst_ratio = std::max(worst_ratio, tilting_second_moment(b).closed_form /
                                            (C * std::exp(std::abs(b))));
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max |closed - quad| %.2e, max value/bound %.9f", worst_diff,
                worst_ratio);
  report(7, "tilting moment", worst_diff <= 1e-8 && worst_ratio <= 1.0 + 1e-9, buf);
}

void criterion_berry_esseen() {
  const BerryEsseenResult ones = berry_esseen_gap(std::vector<double>(20, 1.0), EvalMode::Exact);
  const BerryEsseenResult two = berry_esseen_gap({1.0}, EvalMode::Exact);
  const bool ok = ones.ratio <= 1.0 && std::abs(two.gap - 0.3413) <= 1e-4;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "n=20 ratio %.4f, two-atom gap %.6f", ones.ratio, two.gap);
  report(8, "berry-esseen gap", ok, buf);
}

void criterion_critical_index() {
  RngStream rng(109);
  std::size_t mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + rng.next_below(63);
    std::vector<double> u(n);
    for (double& v : u) v = rng.next_gaussian() * (rng.bernoulli(0.25) ? 8.0 : 1.0);
    if (std::all_of(u.begin(), u.end(), [](double v) { return v == 0.0; })) u[0] = 1.0;
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = std::abs(u[i]);
    std::sort(s.begin(), s.end(), std::greater<>());
    for (int a = 1; a <= 9; ++a) {
      const double alpha = 0.1 * a;
      // Definition scan: first sorted position whose suffix is alpha-regular.
      std::size_t expect = 0;
      for (std::size_t i = 0; i < n && !expect; ++i) {
        double tail = 0.0;
        for (std::size_t j = i; j < n; ++j) tail += s[j] * s[j];
        if (s[i] <= alpha * std::sqrt(tail)) expect = i + 1;
      }
      const CriticalIndexReport rep = critical_index(u, alpha);
      if ((rep.ell ? *rep.ell : 0) != expect) ++mismatches;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%zu mismatches over 9000 scans", mismatches);
  report(9, "critical index oracle", mismatches == 0, buf);
}

void criterion_subsample() {
  const SubsampleCheckReport rep =
      regular_subsample_check(std::vector<double>(400, 1.0), 1.0 / 20.0, 0.5, 0.01, 10000, 110);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "pass frequency %.4f, threshold %.4f", rep.pass_frequency,
                0.99 - 3.0 * rep.binomial_se);
  report(10, "regular subsample", rep.pass_frequency >= 0.99 - 3.0 * rep.binomial_se, buf);
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion_noise_sensitivity();
  criterion_operator_gap();
  criterion_rerandomization();
  criterion_l1_oracle();
  criterion_end_to_end();
  criterion_exp_approx();
  criterion_tilting();
  criterion_berry_esseen();
  criterion_critical_index();
  criterion_subsample();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d/10 criteria passed in %.1f s\n", 10 - g_failures, secs);
  return g_failures == 0 ? 0 : 1;
}
