#include "smoothltf/analysis.hpp"

#include <cmath>

#include "smoothltf/stats.hpp"

namespace smoothltf {

namespace {

double ci_z(double level) { return normal_quantile(0.5 * (1.0 + level)); }

EstimateWithCI mc_mean(const std::vector<double>& vals, double level) {
  const std::size_t n = vals.size();
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n > 1 ? n - 1 : 1);
  EstimateWithCI e;
  e.value = mean;
  e.half_width = ci_z(level) * std::sqrt(var / static_cast<double>(n));
  e.method = EvalMode::MonteCarlo;
  e.n_samples = n;
  return e;
}

void require_cap(std::size_t n, std::size_t cap, const char* what) {
  if (n > cap) throw std::invalid_argument(std::string(what) + ": n exceeds exact enumeration cap");
}

std::size_t default_budget(std::size_t budget) { return budget ? budget : 100000; }

}  // namespace

std::vector<double> tabulate(const RealFunction& f, std::size_t n) {
  std::vector<double> t(std::size_t(1) << n);
  for (std::size_t idx = 0; idx < t.size(); ++idx)
    t[idx] = f(BitVector::from_index(idx, n));
  return t;
}

std::vector<double> tabulate(const LinearThresholdFunction& f) {
  const std::size_t n = f.dim();
  // Margins over all of {+-1}^n by incremental bit flips.
  std::vector<double> t(std::size_t(1) << n);
  t[0] = f.margin(BitVector(n, 1));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t half = std::size_t(1) << i;
    const double d = 2.0 * f.weights()[i];
    for (std::size_t idx = 0; idx < half; ++idx) t[half | idx] = t[idx] - d;
  }
  for (double& v : t) v = v >= 0.0 ? 1.0 : -1.0;
  return t;
}

std::vector<double> apply_noise_operator(std::vector<double> table, double rho,
                                         const ProductDistribution& mu) {
  const std::size_t n = mu.dim();
  if (table.size() != (std::size_t(1) << n)) throw std::invalid_argument("table size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    const double p = mu.flip_prob(i), q = 1.0 - p;
    const double mpp = rho + (1.0 - rho) * q;  // x_i=+1, y_i=+1
    const double mpm = (1.0 - rho) * p;        // x_i=+1, y_i=-1
    const double mmp = (1.0 - rho) * q;
    const double mmm = rho + (1.0 - rho) * p;
    const std::size_t bit = std::size_t(1) << i;
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
      if (idx & bit) continue;
      const double vp = table[idx], vm = table[idx | bit];
      table[idx] = mpp * vp + mpm * vm;
      table[idx | bit] = mmp * vp + mmm * vm;
    }
  }
  return table;
}

double expect_under_product(const std::vector<double>& table, const ProductDistribution& mu) {
  std::vector<double> t = table;
  // Fold the top bit first: bit i of the index is coordinate i.
  for (std::size_t i = mu.dim(); i-- > 0;) {
    const double p = mu.flip_prob(i), q = 1.0 - p;
    const std::size_t half = std::size_t(1) << i;
    for (std::size_t idx = 0; idx < half; ++idx) t[idx] = q * t[idx] + p * t[half | idx];
  }
  return t[0];
}

EstimateWithCI t_rho(const RealFunction& f, std::size_t n, double rho,
                     const ProductDistribution& mu, const BitVector& z, EvalMode mode,
                     std::size_t budget, std::uint64_t seed, double level) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho outside [0,1]");
  if (z.size() != n || mu.dim() != n) throw std::invalid_argument("dimension mismatch");
  if (mode == EvalMode::Exact) {
    require_cap(n, kSingleEnumCap, "t_rho");
    // Contract sum_y f(y) prod_i [rho 1{y_i=z_i} + (1-rho) mu_i(y_i)] one
    // coordinate at a time.
    std::vector<double> t = tabulate(f, n);
    for (std::size_t i = n; i-- > 0;) {  // fold bit i = coordinate i
      const double keep_p = (z[i] > 0 ? rho : 0.0) + (1.0 - rho) * mu.coord_prob(i, 1);
      const double keep_m = (z[i] < 0 ? rho : 0.0) + (1.0 - rho) * mu.coord_prob(i, -1);
      const std::size_t half = std::size_t(1) << i;
      for (std::size_t idx = 0; idx < half; ++idx)
        t[idx] = keep_p * t[idx] + keep_m * t[half | idx];
    }
    return {t[0], 0.0, EvalMode::Exact, std::size_t(1) << n};
  }
  const std::size_t m = default_budget(budget);
  RngStream rng(seed);
  std::vector<double> vals(m);
  for (std::size_t s = 0; s < m; ++s) vals[s] = f(noisy_copy(z, rho, mu, rng));
  return mc_mean(vals, level);
}

EstimateWithCI noise_sensitivity(const RealFunction& f, std::size_t n, double delta,
                                 const ProductDistribution& mu, EvalMode mode, std::size_t budget,
                                 std::uint64_t seed, double level) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta outside [0,1]");
  if (mu.dim() != n) throw std::invalid_argument("dimension mismatch");
  if (mode == EvalMode::Exact) {
    require_cap(n, kPairEnumCap, "noise_sensitivity");
    std::vector<double> table = tabulate(f, n);
    for (double v : table)
      if (v != 1.0 && v != -1.0)
        throw std::invalid_argument("noise_sensitivity requires a +-1 valued function");
    // NS_delta = E_x[(1 - f(x) T_{1-delta} f(x)) / 2].
    std::vector<double> tf = apply_noise_operator(table, 1.0 - delta, mu);
    for (std::size_t idx = 0; idx < table.size(); ++idx)
      tf[idx] = 0.5 * (1.0 - table[idx] * tf[idx]);
    return {expect_under_product(tf, mu), 0.0, EvalMode::Exact, table.size()};
  }
  const std::size_t m = default_budget(budget);
  RngStream rng(seed);
  std::vector<double> vals(m);
  for (std::size_t s = 0; s < m; ++s) {
    const BitVector x = mu.sample(rng);
    const BitVector y = noisy_copy(x, 1.0 - delta, mu, rng);
    const double fx = f(x), fy = f(y);
    if ((fx != 1.0 && fx != -1.0) || (fy != 1.0 && fy != -1.0))
      throw std::invalid_argument("noise_sensitivity requires a +-1 valued function");
    vals[s] = fx != fy ? 1.0 : 0.0;
  }
  return mc_mean(vals, level);
}

EstimateWithCI noise_sensitivity(const LinearThresholdFunction& f, double delta,
                                 const ProductDistribution& mu, EvalMode mode, std::size_t budget,
                                 std::uint64_t seed, double level) {
  if (mode == EvalMode::Exact) {
    require_cap(f.dim(), kPairEnumCap, "noise_sensitivity");
    std::vector<double> table = tabulate(f);
    std::vector<double> tf = apply_noise_operator(table, 1.0 - delta, mu);
    for (std::size_t idx = 0; idx < table.size(); ++idx)
      tf[idx] = 0.5 * (1.0 - table[idx] * tf[idx]);
    return {expect_under_product(tf, mu), 0.0, EvalMode::Exact, table.size()};
  }
  auto fn = [&f](const BitVector& x) { return double(f.eval(x)); };
  return noise_sensitivity(fn, f.dim(), delta, mu, mode, budget, seed, level);
}

EstimateWithCI smoothing_l1_gap(const LinearThresholdFunction& f, double rho, double sigma,
                                EvalMode mode, std::size_t budget, std::uint64_t seed,
                                double level) {
  if (!(rho >= 0.0 && rho <= 1.0) || !(sigma >= 0.0 && sigma <= 1.0))
    throw std::invalid_argument("noise parameters outside [0,1]");
  const std::size_t n = f.dim();
  const ProductDistribution mu = ProductDistribution::biased(n, sigma);
  if (mode == EvalMode::Exact) {
    require_cap(n, kPairEnumCap, "smoothing_l1_gap");
    std::vector<double> table = tabulate(f);
    std::vector<double> tf = apply_noise_operator(table, 1.0 - rho, mu);
    for (std::size_t idx = 0; idx < table.size(); ++idx)
      tf[idx] = std::abs(tf[idx] - table[idx]);
    return {expect_under_product(tf, mu), 0.0, EvalMode::Exact, table.size()};
  }
  // MC over z; T_{1-rho} f(z) computed exactly when n permits, else sampled.
  const std::size_t m = default_budget(budget);
  RngStream rng(seed);
  auto fn = [&f](const BitVector& x) { return double(f.eval(x)); };
  std::vector<double> vals(m);
  const bool inner_exact = n <= kSingleEnumCap;
  for (std::size_t s = 0; s < m; ++s) {
    const BitVector z = mu.sample(rng);
    double tval;
    if (inner_exact) {
      tval = t_rho(fn, n, 1.0 - rho, mu, z, EvalMode::Exact).value;
    } else {
      RngStream inner = rng.split(s + 1);
      tval = t_rho(fn, n, 1.0 - rho, mu, z, EvalMode::MonteCarlo, 256, inner.next_u64()).value;
    }
    vals[s] = std::abs(tval - double(f.eval(z)));
  }
  return mc_mean(vals, level);
}

EstimateWithCI smoothed_error(const LinearThresholdFunction& f,
                              const std::vector<LabeledSample>& data, double sigma, EvalMode mode,
                              std::size_t budget, std::uint64_t seed, double level) {
  if (data.empty()) throw std::invalid_argument("smoothed_error: empty data");
  if (!(sigma >= 0.0 && sigma <= 1.0)) throw std::invalid_argument("sigma outside [0,1]");
  const std::size_t n = f.dim();
  if (mode == EvalMode::Exact) {
    require_cap(n, kSingleEnumCap, "smoothed_error");
    // P_z[sign(<u,z> - theta) != y] with u = w (.) x, z ~ N_sigma. The z
    // measure is shared across samples.
    const std::size_t size = std::size_t(1) << n;
    std::vector<double> zprob(size);
    zprob[0] = 1.0;
    std::size_t filled = 1;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t idx = 0; idx < filled; ++idx) {
        zprob[filled | idx] = zprob[idx] * sigma;
        zprob[idx] *= 1.0 - sigma;
      }
      filled <<= 1;
    }
    std::vector<double> margin(size);
    double total = 0.0;
    for (const auto& s : data) {
      margin[0] = -f.theta();
      for (std::size_t i = 0; i < n; ++i) margin[0] += f.weights()[i] * s.x[i];
      std::size_t fill = 1;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = 2.0 * f.weights()[i] * s.x[i];
        for (std::size_t idx = 0; idx < fill; ++idx) margin[fill | idx] = margin[idx] - d;
        fill <<= 1;
      }
      double mis = 0.0;
      for (std::size_t idx = 0; idx < size; ++idx)
        if (sign_pm1(margin[idx]) != s.y) mis += zprob[idx];
      total += mis;
    }
    return {total / static_cast<double>(data.size()), 0.0, EvalMode::Exact, data.size() * size};
  }
  const std::size_t m = default_budget(budget);
  RngStream rng(seed);
  std::vector<double> vals(m);
  for (std::size_t s = 0; s < m; ++s) {
    const auto& sample = data[rng.next_below(data.size())];
    const BitVector xz = flip_noise(sample.x, sigma, rng);
    vals[s] = f.eval(xz) != sample.y ? 1.0 : 0.0;
  }
  return mc_mean(vals, level);
}

}  // namespace smoothltf
