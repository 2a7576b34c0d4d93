#include "smoothltf/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace smoothltf {

std::vector<BitVector> sample_marginal(const MixtureDistribution& dist, std::size_t count,
                                       std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  RngStream rng(seed);
  std::vector<BitVector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(dist.sample(rng));
  return out;
}

BitVector flip_noise(const BitVector& x, double sigma, RngStream& rng) {
  if (!(sigma >= 0.0 && sigma <= 1.0)) throw std::invalid_argument("sigma outside [0,1]");
  BitVector y = x;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (rng.bernoulli(sigma)) y.flip(i);
  return y;
}

BitVector flip_noise(const BitVector& x, double sigma, std::uint64_t seed) {
  RngStream rng(seed);
  return flip_noise(x, sigma, rng);
}

BitVector noisy_copy(const BitVector& z, double rho, const ProductDistribution& mu,
                     RngStream& rng) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho outside [0,1]");
  if (z.size() != mu.dim()) throw std::invalid_argument("dimension mismatch between z and mu");
  BitVector y = z;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!rng.bernoulli(rho)) y.set(i, rng.bernoulli(mu.flip_prob(i)) ? -1 : 1);
  }
  return y;
}

BitVector noisy_copy(const BitVector& z, double rho, const ProductDistribution& mu,
                     std::uint64_t seed) {
  RngStream rng(seed);
  return noisy_copy(z, rho, mu, rng);
}

std::vector<LabeledSample> generate_dataset(const PlantedDataConfig& cfg, std::size_t count,
                                            RngStream& rng) {
  std::vector<LabeledSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    LabeledSample s;
    s.x = cfg.marginal.sample(rng);
    s.y = cfg.planted.eval(s.x);
    switch (cfg.label_noise.kind) {
      case LabelNoise::Kind::None:
        break;
      case LabelNoise::Kind::Rcn:
        if (rng.bernoulli(cfg.label_noise.param)) s.y = -s.y;
        break;
      case LabelNoise::Kind::Boundary:
        if (std::abs(cfg.planted.margin(s.x)) <= cfg.label_noise.param) s.y = -s.y;
        break;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<LabeledSample> generate_dataset(const PlantedDataConfig& cfg, std::size_t count,
                                            std::uint64_t seed) {
  RngStream rng(seed);
  return generate_dataset(cfg, count, rng);
}

TailProbeReport subexp_tail_probe(const MixtureDistribution& dist, double lambda, double alpha_tail,
                                  std::size_t n_directions, std::size_t n_samples,
                                  std::uint64_t seed,
                                  const std::vector<std::vector<double>>& extra_directions) {
  if (!(lambda > 0.0) || !(alpha_tail > 0.0))
    throw std::invalid_argument("lambda and alpha must be positive");
  const std::size_t n = dist.dim();
  RngStream rng(seed);

  std::vector<std::vector<double>> dirs = extra_directions;
  for (std::size_t d = 0; d < n_directions; ++d) {
    std::vector<double> v(n);
    double norm2 = 0.0;
    for (double& vi : v) {
      vi = rng.next_gaussian();
      norm2 += vi * vi;
    }
    const double norm = std::sqrt(norm2);
    for (double& vi : v) vi /= norm;
    dirs.push_back(std::move(v));
  }
  for (auto& v : dirs) {
    double norm2 = 0.0;
    for (double vi : v) norm2 += vi * vi;
    const double norm = std::sqrt(norm2);
    if (!(norm > 0.0)) throw std::invalid_argument("zero direction");
    for (double& vi : v) vi /= norm;
  }

  std::vector<std::vector<double>> proj(dirs.size(), std::vector<double>(n_samples));
  RngStream sample_rng = rng.split(1);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const BitVector x = dist.sample(sample_rng);
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      double p = 0.0;
      for (std::size_t i = 0; i < n; ++i) p += dirs[d][i] * x[i];
      proj[d][s] = std::abs(p);
    }
  }

  // One-sided normal-approximation band at 99%; the empirical survival must
  // exceed bound + band to count as a violation.
  const double zq = 2.3263478740408408;
  TailProbeReport rep;
  rep.any_violation = false;
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    std::sort(proj[d].begin(), proj[d].end());
    TailDirectionReport dr;
    dr.direction = dirs[d];
    dr.worst_excess = -1e300;
    dr.worst_t = 0.0;
    const double tmax = std::sqrt(static_cast<double>(n));
    const int grid = 64;
    for (int g = 1; g <= grid; ++g) {
      const double t = tmax * g / grid;
      const auto it = std::upper_bound(proj[d].begin(), proj[d].end(), t);
      const double surv =
          static_cast<double>(proj[d].end() - it) / static_cast<double>(n_samples);
      const double band =
          zq * std::sqrt(std::max(surv * (1.0 - surv), 1.0 / n_samples) / n_samples);
      const double bound = 2.0 * std::exp(-std::pow(t / lambda, 1.0 + alpha_tail));
      const double excess = (surv - band) - bound;
      if (excess > dr.worst_excess) {
        dr.worst_excess = excess;
        dr.worst_t = t;
      }
    }
    dr.violated = dr.worst_excess > 0.0;
    rep.any_violation = rep.any_violation || dr.violated;
    rep.directions.push_back(std::move(dr));
  }
  return rep;
}

void write_dataset(const std::string& path, const std::vector<LabeledSample>& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (const auto& s : data) {
    for (std::size_t i = 0; i < s.x.size(); ++i) out << (i ? " " : "") << int(s.x[i]);
    out << " ; " << s.y << "\n";
  }
}

std::vector<LabeledSample> read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<LabeledSample> data;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto semi = line.find(';');
    if (semi == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": missing ';'");
    std::istringstream xs(line.substr(0, semi));
    std::vector<int> bits;
    int v;
    while (xs >> v) bits.push_back(v);
    std::istringstream ys(line.substr(semi + 1));
    int label;
    if (!(ys >> label) || (label != 1 && label != -1))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad label");
    LabeledSample s;
    s.x = BitVector(bits);
    s.y = label;
    if (!data.empty() && s.x.size() != data.front().x.size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": inconsistent dimension");
    data.push_back(std::move(s));
  }
  return data;
}

}  // namespace smoothltf
