#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "smoothltf/analysis.hpp"

using namespace smoothltf;

namespace {

LinearThresholdFunction random_ltf(std::size_t n, RngStream& rng) {
  std::vector<double> w(n);
  for (double& v : w) v = rng.next_gaussian();
  if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) w[0] = 1.0;
  return LinearThresholdFunction(w, 0.3 * rng.next_gaussian());
}

}  // namespace

TEST_CASE("tabulate agrees between the margin and generic paths") {
  RngStream rng(1);
  const LinearThresholdFunction f = random_ltf(6, rng);
  const auto fast = tabulate(f);
  const auto slow = tabulate([&f](const BitVector& x) { return double(f.eval(x)); }, 6);
  CHECK(fast == slow);
}

TEST_CASE("t_rho at the extremes") {
  RngStream rng(2);
  const std::size_t n = 5;
  const LinearThresholdFunction f = random_ltf(n, rng);
  auto fn = [&f](const BitVector& x) { return double(f.eval(x)); };
  const ProductDistribution mu = ProductDistribution::biased(n, 0.3);
  const BitVector z = mu.sample(rng);

  CHECK(t_rho(fn, n, 1.0, mu, z, EvalMode::Exact).value == doctest::Approx(f.eval(z)));

  const double at_z = t_rho(fn, n, 0.0, mu, z, EvalMode::Exact).value;
  const double at_other = t_rho(fn, n, 0.0, mu, mu.sample(rng), EvalMode::Exact).value;
  CHECK(at_z == doctest::Approx(at_other).epsilon(1e-12));
  CHECK(at_z == doctest::Approx(expect_under_product(tabulate(fn, n), mu)).epsilon(1e-12));
}

TEST_CASE("t_rho of a dictator has the one-coordinate closed form") {
  const std::size_t n = 4;
  auto dictator = [](const BitVector& x) { return double(x[0]); };
  for (double sigma : {0.1, 0.4})
    for (double rho : {0.0, 0.3, 0.9}) {
      const ProductDistribution mu = ProductDistribution::biased(n, sigma);
      for (std::uint64_t zi : {0ull, 5ull, 15ull}) {
        const BitVector z = BitVector::from_index(zi, n);
        const double expected = rho * z[0] + (1.0 - rho) * (1.0 - 2.0 * sigma);
        CHECK(t_rho(dictator, n, rho, mu, z, EvalMode::Exact).value ==
              doctest::Approx(expected).epsilon(1e-12));
      }
    }
}

TEST_CASE("t_rho Monte Carlo tracks the exact value") {
  RngStream rng(3);
  const std::size_t n = 8;
  const LinearThresholdFunction f = random_ltf(n, rng);
  auto fn = [&f](const BitVector& x) { return double(f.eval(x)); };
  const ProductDistribution mu = ProductDistribution::biased(n, 0.2);
  const BitVector z = mu.sample(rng);
  const double exact = t_rho(fn, n, 0.6, mu, z, EvalMode::Exact).value;
  const EstimateWithCI mc = t_rho(fn, n, 0.6, mu, z, EvalMode::MonteCarlo, 40000, 7);
  CHECK(mc.method == EvalMode::MonteCarlo);
  CHECK(std::abs(mc.value - exact) < 1.5 * mc.half_width + 1e-3);
}

TEST_CASE("noise sensitivity basics") {
  RngStream rng(4);
  const std::size_t n = 7;
  const LinearThresholdFunction f = random_ltf(n, rng);
  const ProductDistribution mu = ProductDistribution::uniform(n);

  CHECK(noise_sensitivity(f, 0.0, mu, EvalMode::Exact).value == doctest::Approx(0.0));

  // Dictator: the coordinate is resampled w.p. delta and then flips w.p. 1/2.
  const LinearThresholdFunction dict(std::vector<double>{1, 0, 0, 0, 0, 0, 0}, 0.0);
  for (double d : {0.1, 0.25, 0.7})
    CHECK(noise_sensitivity(dict, d, mu, EvalMode::Exact).value ==
          doctest::Approx(d / 2.0).epsilon(1e-12));

  // Monotone in delta.
  double prev = -1.0;
  for (double d = 0.0; d <= 1.0 + 1e-9; d += 0.1) {
    const double ns = noise_sensitivity(f, d, mu, EvalMode::Exact).value;
    CHECK(ns >= prev - 1e-12);
    prev = ns;
  }
}

TEST_CASE("noise sensitivity rejects non-Boolean functions") {
  auto not_boolean = [](const BitVector& x) { return 0.5 * x[0]; };
  CHECK_THROWS_AS(
      noise_sensitivity(not_boolean, 3, 0.1, ProductDistribution::uniform(3), EvalMode::Exact),
      std::invalid_argument);
}

TEST_CASE("noise sensitivity MC path agrees with exact") {
  RngStream rng(5);
  const std::size_t n = 9;
  const LinearThresholdFunction f = random_ltf(n, rng);
  const ProductDistribution mu = ProductDistribution::biased(n, 0.35);
  const double exact = noise_sensitivity(f, 0.15, mu, EvalMode::Exact).value;
  const EstimateWithCI mc = noise_sensitivity(f, 0.15, mu, EvalMode::MonteCarlo, 60000, 11);
  CHECK(std::abs(mc.value - exact) < 1.5 * mc.half_width + 1e-3);
}

TEST_CASE("smoothing gap: zero at rho=0 and the dictator closed form") {
  RngStream rng(6);
  const LinearThresholdFunction f = random_ltf(8, rng);
  CHECK(smoothing_l1_gap(f, 0.0, 0.2, EvalMode::Exact).value == doctest::Approx(0.0));

  // Dictator at sigma=1/2: T_{1-rho} f(z) = (1-rho) z_1, so the gap is rho.
  const LinearThresholdFunction dict(std::vector<double>{1, 0, 0}, 0.0);
  for (double rho : {0.2, 0.5})
    CHECK(smoothing_l1_gap(dict, rho, 0.5, EvalMode::Exact).value ==
          doctest::Approx(rho).epsilon(1e-12));
}

TEST_CASE("smoothing gap is at most twice the noise sensitivity at rho") {
  RngStream rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 8;
    const LinearThresholdFunction f = random_ltf(n, rng);
    const double sigma = 0.05 + 0.4 * rng.next_double();
    const double rho = 0.05 + 0.4 * rng.next_double();
    const double gap = smoothing_l1_gap(f, rho, sigma, EvalMode::Exact).value;
    const double ns =
        noise_sensitivity(f, rho, ProductDistribution::biased(n, sigma), EvalMode::Exact).value;
    CHECK(gap <= 2.0 * ns + 1e-10);
  }
}

TEST_CASE("smoothed error: sigma=0 reduces to the empirical error") {
  RngStream rng(8);
  const std::size_t n = 6;
  const LinearThresholdFunction f = random_ltf(n, rng);
  const ProductDistribution mu = ProductDistribution::uniform(n);
  std::vector<LabeledSample> data;
  for (int i = 0; i < 200; ++i) data.push_back({mu.sample(rng), rng.rademacher()});
  double plain = 0.0;
  for (const auto& s : data) plain += f.eval(s.x) != s.y ? 1.0 : 0.0;
  plain /= data.size();
  CHECK(smoothed_error(f, data, 0.0, EvalMode::Exact).value == doctest::Approx(plain));

  std::vector<LabeledSample> self;
  for (int i = 0; i < 100; ++i) {
    const BitVector x = mu.sample(rng);
    self.push_back({x, f.eval(x)});
  }
  CHECK(smoothed_error(f, self, 0.0, EvalMode::Exact).value == doctest::Approx(0.0));
}

TEST_CASE("smoothed error matches a brute-force flip-pattern oracle at n=5") {
  RngStream rng(9);
  const std::size_t n = 5;
  const LinearThresholdFunction f(std::vector<double>(n, 1.0), 0.0);
  const ProductDistribution mu = ProductDistribution::uniform(n);
  std::vector<LabeledSample> data;
  for (int i = 0; i < 60; ++i) {
    const BitVector x = mu.sample(rng);
    data.push_back({x, rng.bernoulli(0.1) ? -f.eval(x) : f.eval(x)});
  }
  const double sigma = 0.1;
  double oracle = 0.0;
  for (const auto& s : data) {
    for (std::uint64_t zi = 0; zi < 32; ++zi) {
      const BitVector z = BitVector::from_index(zi, n);
      double w = 1.0;
      BitVector xz(n, 1);
      for (std::size_t i = 0; i < n; ++i) {
        w *= z[i] < 0 ? sigma : 1.0 - sigma;
        xz.set(i, s.x[i] * z[i]);
      }
      if (f.eval(xz) != s.y) oracle += w;
    }
  }
  oracle /= data.size();
  CHECK(smoothed_error(f, data, sigma, EvalMode::Exact).value ==
        doctest::Approx(oracle).epsilon(1e-12));

  const EstimateWithCI mc = smoothed_error(f, data, sigma, EvalMode::MonteCarlo, 60000, 13);
  CHECK(std::abs(mc.value - oracle) < 1.5 * mc.half_width + 2e-3);
}

TEST_CASE("smoothed error is n-Lipschitz in sigma") {
  RngStream rng(10);
  const std::size_t n = 6;
  const LinearThresholdFunction f = random_ltf(n, rng);
  const ProductDistribution mu = ProductDistribution::uniform(n);
  std::vector<LabeledSample> data;
  for (int i = 0; i < 150; ++i) {
    const BitVector x = mu.sample(rng);
    data.push_back({x, rng.bernoulli(0.15) ? -f.eval(x) : f.eval(x)});
  }
  const std::vector<double> sigmas{0.0, 0.05, 0.1, 0.2, 0.35};
  for (std::size_t a = 0; a < sigmas.size(); ++a)
    for (std::size_t b = a + 1; b < sigmas.size(); ++b) {
      const double ea = smoothed_error(f, data, sigmas[a], EvalMode::Exact).value;
      const double eb = smoothed_error(f, data, sigmas[b], EvalMode::Exact).value;
      CHECK(std::abs(ea - eb) <= n * std::abs(sigmas[a] - sigmas[b]) + 1e-12);
    }
}

TEST_CASE("enumeration caps are enforced") {
  const ProductDistribution mu = ProductDistribution::uniform(13);
  const LinearThresholdFunction f(std::vector<double>(13, 1.0), 0.0);
  CHECK_THROWS_AS(noise_sensitivity(f, 0.1, mu, EvalMode::Exact), std::invalid_argument);
  auto fn = [](const BitVector& x) { return double(x[0]); };
  const ProductDistribution mu21 = ProductDistribution::uniform(21);
  CHECK_THROWS_AS(t_rho(fn, 21, 0.5, mu21, BitVector(21, 1), EvalMode::Exact),
                  std::invalid_argument);
}
