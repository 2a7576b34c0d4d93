#include "smoothltf/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "smoothltf/stats.hpp"

namespace smoothltf {

double regularity(const std::vector<double>& w) {
  double linf = 0.0, l2sq = 0.0;
  for (double v : w) {
    linf = std::max(linf, std::abs(v));
    l2sq += v * v;
  }
  if (l2sq == 0.0) throw std::invalid_argument("regularity of the zero vector is undefined");
  return linf / std::sqrt(l2sq);
}

CriticalIndexReport critical_index(const std::vector<double>& u, double alpha_reg) {
  if (!(alpha_reg > 0.0 && alpha_reg <= 1.0)) throw std::invalid_argument("alpha outside (0,1]");
  const std::size_t n = u.size();
  CriticalIndexReport rep;
  rep.alpha_reg = alpha_reg;
  rep.perm.resize(n);
  std::iota(rep.perm.begin(), rep.perm.end(), std::size_t(0));
  std::stable_sort(rep.perm.begin(), rep.perm.end(), [&u](std::size_t a, std::size_t b) {
    return std::abs(u[a]) > std::abs(u[b]);
  });
  rep.sorted_abs.resize(n);
  for (std::size_t k = 0; k < n; ++k) rep.sorted_abs[k] = std::abs(u[rep.perm[k]]);
  if (n == 0 || rep.sorted_abs[0] == 0.0)
    throw std::invalid_argument("critical_index of the zero vector is undefined");

  rep.tail_norms.assign(n, 0.0);
  double acc = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    acc += rep.sorted_abs[k] * rep.sorted_abs[k];
    rep.tail_norms[k] = std::sqrt(acc);
  }

  for (std::size_t k = 0; k < n; ++k) {
    if (rep.sorted_abs[k] <= alpha_reg * rep.tail_norms[k]) {
      rep.ell = k + 1;
      break;
    }
  }
  rep.head_size = rep.ell ? *rep.ell - 1 : n;
  rep.decomposition = DecompositionCase::RegularTail;
  rep.tail_all_zero = rep.head_size >= n || rep.tail_norms[rep.head_size] == 0.0;
  return rep;
}

CriticalIndexReport decompose(const std::vector<double>& u, double alpha_reg,
                              const DecompositionBudget& budget) {
  if (budget.K < 1) throw std::invalid_argument("head budget K must be >= 1");
  CriticalIndexReport rep = critical_index(u, alpha_reg);
  if (rep.ell && *rep.ell < budget.K) {
    rep.head_size = *rep.ell - 1;
    rep.decomposition = DecompositionCase::RegularTail;
  } else {
    rep.head_size = std::min(budget.K, u.size());
    rep.decomposition = DecompositionCase::DominatedHead;
  }
  rep.tail_all_zero = rep.head_size >= u.size() || rep.tail_norms[rep.head_size] == 0.0;
  return rep;
}

std::size_t suggest_head_budget(double alpha_reg, double eps, double rho, double sigma,
                                double lambda) {
  if (!(alpha_reg > 0.0 && alpha_reg < 1.0) || !(eps > 0.0 && eps < 1.0) || !(rho > 0.0) ||
      !(sigma > 0.0))
    throw std::invalid_argument("invalid head-budget parameters");
  const double a2 = alpha_reg * alpha_reg;
  const double C = (1.0 - 2.0 * rho * sigma) * lambda *
                       std::pow(std::log(2.0 / eps), 1.0 / (1.0 + alpha_reg)) +
                   std::sqrt(2.0 * std::log(2.0 / eps));
  const double term1 = std::ceil(std::log(1.0 / eps) / (rho * sigma)) *
                       std::ceil(4.0 / a2 * std::log(1.0 / alpha_reg));
  const double term2 = 2.0 * std::log(std::max(C, 1.0) / alpha_reg) / a2;
  return static_cast<std::size_t>(std::ceil(term1 + term2));
}

EstimateWithCI case2_sign_agreement(const std::vector<double>& u, double theta, std::size_t H,
                                    double rho, double sigma, const BitVector& z, EvalMode mode,
                                    std::size_t budget, std::uint64_t seed, double level) {
  const std::size_t n = u.size();
  if (H < 1 || H > n) throw std::invalid_argument("head size H outside [1,n]");
  if (z.size() != n) throw std::invalid_argument("dimension mismatch");
  auto disagrees = [&](double full_margin, double head_margin) {
    return sign_pm1(full_margin) != sign_pm1(head_margin);
  };
  if (mode == EvalMode::Exact) {
    if (n > kSingleEnumCap)
      throw std::invalid_argument("case2_sign_agreement: n exceeds exact enumeration cap");
    const std::size_t size = std::size_t(1) << n;
    // Margins of <u,y> and <u_H,y_H> for every y, plus the channel weight.
    std::vector<double> full(size), head(size), weight(size);
    full[0] = head[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      full[0] += u[i];
      if (i < H) head[0] += u[i];
    }
    weight[0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double wp = (z[i] > 0 ? 1.0 - rho : 0.0) + rho * (1.0 - sigma);
      const double wm = (z[i] < 0 ? 1.0 - rho : 0.0) + rho * sigma;
      const std::size_t fill = std::size_t(1) << i;
      for (std::size_t idx = 0; idx < fill; ++idx) {
        full[fill | idx] = full[idx] - 2.0 * u[i];
        head[fill | idx] = head[idx] - (i < H ? 2.0 * u[i] : 0.0);
        weight[fill | idx] = weight[idx] * wm;
        weight[idx] *= wp;
      }
    }
    double p = 0.0;
    for (std::size_t idx = 0; idx < size; ++idx)
      if (disagrees(full[idx] - theta, head[idx] - theta)) p += weight[idx];
    return {p, 0.0, EvalMode::Exact, size};
  }
  const std::size_t m = budget ? budget : 100000;
  RngStream rng(seed);
  const ProductDistribution mu = ProductDistribution::biased(n, sigma);
  double hits = 0.0, mean = 0.0, ss = 0.0;
  std::vector<double> vals(m);
  for (std::size_t s = 0; s < m; ++s) {
    const BitVector y = noisy_copy(z, 1.0 - rho, mu, rng);
    double fm = -theta, hm = -theta;
    for (std::size_t i = 0; i < n; ++i) {
      fm += u[i] * y[i];
      if (i < H) hm += u[i] * y[i];
    }
    vals[s] = disagrees(fm, hm) ? 1.0 : 0.0;
    hits += vals[s];
  }
  mean = hits / m;
  for (double v : vals) ss += (v - mean) * (v - mean);
  EstimateWithCI e;
  e.value = mean;
  e.half_width =
      normal_quantile(0.5 * (1.0 + level)) * std::sqrt(ss / (m > 1 ? m - 1 : 1) / double(m));
  e.method = EvalMode::MonteCarlo;
  e.n_samples = m;
  return e;
}

SubsampleCheckReport regular_subsample_check(const std::vector<double>& w, double alpha_reg,
                                             double rho_eff, double delta, std::size_t trials,
                                             std::uint64_t seed) {
  if (!(delta > 0.0 && delta < 1.0) || !(rho_eff > 0.0 && rho_eff <= 1.0))
    throw std::invalid_argument("invalid parameters");
  const double slack = std::sqrt(std::log(1.0 / delta) / 2.0);
  if (!(alpha_reg <= rho_eff / slack))
    throw std::invalid_argument("regular_subsample_check: alpha exceeds rho/sqrt(log(1/delta)/2)");
  double l2sq = 0.0;
  for (double v : w) l2sq += v * v;
  if (l2sq == 0.0) throw std::invalid_argument("zero vector");
  const double thresh_sq = (rho_eff - slack * alpha_reg) * l2sq;

  RngStream rng(seed);
  std::size_t ok = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    double kept = 0.0;
    for (double v : w)
      if (rng.bernoulli(rho_eff)) kept += v * v;
    if (kept >= thresh_sq) ++ok;
  }
  SubsampleCheckReport rep;
  rep.trials = trials;
  rep.pass_frequency = static_cast<double>(ok) / static_cast<double>(trials);
  rep.required = 1.0 - delta;
  rep.binomial_se = std::sqrt(delta * (1.0 - delta) / static_cast<double>(trials));
  rep.pass = rep.pass_frequency >= rep.required - 3.0 * rep.binomial_se;
  return rep;
}

TailConcentrationReport tail_concentration_check(const std::vector<double>& w,
                                                 const std::vector<std::size_t>& tail_indices,
                                                 const BitVector& z, double rho, double sigma,
                                                 const MixtureDistribution& marginal,
                                                 double lambda, double alpha_tail, double eps,
                                                 std::size_t x_trials, std::size_t y_trials,
                                                 std::uint64_t seed) {
  const std::size_t n = w.size();
  if (z.size() != n || marginal.dim() != n) throw std::invalid_argument("dimension mismatch");
  TailConcentrationReport rep;
  rep.x_trials = x_trials;
  rep.y_trials = y_trials;
  rep.bound_constant = (1.0 - 2.0 * rho * sigma) * lambda *
                           std::pow(std::log(4.0 / eps), 1.0 / (1.0 + alpha_tail)) +
                       std::sqrt(2.0 * std::log(2.0 / eps));
  double tail_l2sq = 0.0;
  for (std::size_t i : tail_indices) tail_l2sq += w[i] * w[i];
  const double cutoff = rep.bound_constant * std::sqrt(tail_l2sq);

  if (tail_l2sq == 0.0) {
    rep.x_pass_frequency = 1.0;
    rep.required = 1.0 - eps;
    rep.pass = true;
    return rep;
  }

  RngStream rng(seed);
  const ProductDistribution mu = ProductDistribution::biased(n, sigma);
  // Inner one-sided 99% band: an x counts as passing if its empirical inner
  // frequency is not significantly below 1 - eps.
  const double inner_band =
      2.3263478740408408 * std::sqrt(eps * (1.0 - eps) / static_cast<double>(y_trials));
  std::size_t x_ok = 0;
  for (std::size_t xt = 0; xt < x_trials; ++xt) {
    const BitVector x = marginal.sample(rng);
    RngStream yrng = rng.split(xt + 1);
    std::size_t y_ok = 0;
    for (std::size_t yt = 0; yt < y_trials; ++yt) {
      const BitVector y = noisy_copy(z, 1.0 - rho, mu, yrng);
      double dot = 0.0;
      for (std::size_t i : tail_indices) dot += w[i] * x[i] * y[i];
      if (std::abs(dot) <= cutoff) ++y_ok;
    }
    const double yfreq = static_cast<double>(y_ok) / static_cast<double>(y_trials);
    if (yfreq >= 1.0 - eps - inner_band) ++x_ok;
  }
  rep.x_pass_frequency = static_cast<double>(x_ok) / static_cast<double>(x_trials);
  const double outer_se = std::sqrt(eps * (1.0 - eps) / static_cast<double>(x_trials));
  rep.required = 1.0 - eps - 3.0 * outer_se;
  rep.pass = rep.x_pass_frequency >= rep.required;
  return rep;
}

}  // namespace smoothltf
