#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smoothltf/rng.hpp"

namespace smoothltf {

// Element of {-1,+1}^n.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t n, int fill = 1) : bits_(n, check_bit(fill)) {}
  explicit BitVector(std::vector<int> bits) {
    bits_.reserve(bits.size());
    for (int b : bits) bits_.push_back(check_bit(b));
  }

  std::size_t size() const { return bits_.size(); }
  int operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, int v) { bits_[i] = check_bit(v); }
  void flip(std::size_t i) { bits_[i] = static_cast<std::int8_t>(-bits_[i]); }

  bool operator==(const BitVector& o) const { return bits_ == o.bits_; }

  // Index in [0, 2^n): bit i set iff coordinate i is -1.
  static BitVector from_index(std::uint64_t idx, std::size_t n) {
    BitVector x(n, 1);
    for (std::size_t i = 0; i < n; ++i)
      if (idx >> i & 1u) x.bits_[i] = -1;
    return x;
  }
  std::uint64_t to_index() const {
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i] < 0) idx |= std::uint64_t(1) << i;
    return idx;
  }

 private:
  static std::int8_t check_bit(int v) {
    if (v != 1 && v != -1) throw std::invalid_argument("BitVector entries must be +1 or -1");
    return static_cast<std::int8_t>(v);
  }
  std::vector<std::int8_t> bits_;
};

// Independent coordinates; flip_probs[i] = P[x_i = -1].
class ProductDistribution {
 public:
  explicit ProductDistribution(std::vector<double> flip_probs) : p_(std::move(flip_probs)) {
    for (double p : p_)
      if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("flip probability outside [0,1]");
  }

  static ProductDistribution uniform(std::size_t n) {
    return ProductDistribution(std::vector<double>(n, 0.5));
  }
  // The bit-flip channel marginal: each coordinate -1 with probability sigma.
  static ProductDistribution biased(std::size_t n, double sigma) {
    return ProductDistribution(std::vector<double>(n, sigma));
  }

  std::size_t dim() const { return p_.size(); }
  double flip_prob(std::size_t i) const { return p_[i]; }
  // P[x_i = b] for b in {-1,+1}.
  double coord_prob(std::size_t i, int b) const { return b < 0 ? p_[i] : 1.0 - p_[i]; }
  double coord_mean(std::size_t i) const { return 1.0 - 2.0 * p_[i]; }

  double prob(const BitVector& x) const {
    if (x.size() != dim()) throw std::invalid_argument("dimension mismatch");
    double w = 1.0;
    for (std::size_t i = 0; i < dim(); ++i) w *= coord_prob(i, x[i]);
    return w;
  }

  BitVector sample(RngStream& rng) const {
    BitVector x(dim(), 1);
    for (std::size_t i = 0; i < dim(); ++i)
      if (rng.bernoulli(p_[i])) x.set(i, -1);
    return x;
  }

 private:
  std::vector<double> p_;
};

// Finite mixture of product distributions; a single component behaves as a
// plain product measure.
class MixtureDistribution {
 public:
  MixtureDistribution(std::vector<double> weights, std::vector<ProductDistribution> components)
      : w_(std::move(weights)), comps_(std::move(components)) {
    if (comps_.empty()) throw std::invalid_argument("empty mixture");
    if (w_.size() != comps_.size()) throw std::invalid_argument("weights/components mismatch");
    double s = 0.0;
    for (double w : w_) {
      if (w < 0.0) throw std::invalid_argument("negative mixture weight");
      s += w;
    }
    if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("mixture weights must sum to 1");
    for (const auto& c : comps_)
      if (c.dim() != comps_.front().dim()) throw std::invalid_argument("component dims differ");
  }

  explicit MixtureDistribution(ProductDistribution p) : w_{1.0} { comps_.push_back(std::move(p)); }

  std::size_t dim() const { return comps_.front().dim(); }
  std::size_t n_components() const { return comps_.size(); }
  const ProductDistribution& component(std::size_t k) const { return comps_[k]; }
  double weight(std::size_t k) const { return w_[k]; }

  double prob(const BitVector& x) const {
    double p = 0.0;
    for (std::size_t k = 0; k < comps_.size(); ++k) p += w_[k] * comps_[k].prob(x);
    return p;
  }

  BitVector sample(RngStream& rng) const {
    std::size_t k = 0;
    if (comps_.size() > 1) {
      double u = rng.next_double();
      double acc = 0.0;
      for (; k + 1 < comps_.size(); ++k) {
        acc += w_[k];
        if (u < acc) break;
      }
    }
    return comps_[k].sample(rng);
  }

 private:
  std::vector<double> w_;
  std::vector<ProductDistribution> comps_;
};

// f(x) = sign(<w,x> - theta), with sign(0) := +1 throughout the library.
class LinearThresholdFunction {
 public:
  LinearThresholdFunction(std::vector<double> w, double theta)
      : w_(std::move(w)), theta_(theta) {
    bool any = false;
    for (double v : w_) any = any || v != 0.0;
    if (!any) throw std::invalid_argument("degenerate all-zero weight vector");
  }

  std::size_t dim() const { return w_.size(); }
  const std::vector<double>& weights() const { return w_; }
  double theta() const { return theta_; }

  double margin(const BitVector& x) const {
    if (x.size() != w_.size()) throw std::invalid_argument("dimension mismatch");
    double s = -theta_;
    for (std::size_t i = 0; i < w_.size(); ++i) s += w_[i] * x[i];
    return s;
  }

  int eval(const BitVector& x) const { return margin(x) >= 0.0 ? 1 : -1; }

 private:
  std::vector<double> w_;
  double theta_;
};

inline int sign_pm1(double v) { return v >= 0.0 ? 1 : -1; }

struct NoiseSpec {
  double sigma = 0.0;  // bit-flip rate
  double rho = 1.0;    // operator retention parameter

  NoiseSpec() = default;
  NoiseSpec(double sigma_, double rho_) : sigma(sigma_), rho(rho_) {
    if (!(sigma >= 0.0 && sigma <= 1.0) || !(rho >= 0.0 && rho <= 1.0))
      throw std::invalid_argument("noise parameters must lie in [0,1]");
  }
};

struct LabeledSample {
  BitVector x;
  int y = 1;  // +/-1
};

struct LabelNoise {
  enum class Kind { None, Rcn, Boundary };
  Kind kind = Kind::None;
  double param = 0.0;  // eta for Rcn, band half-width for Boundary

  static LabelNoise none() { return {}; }
  static LabelNoise rcn(double eta) {
    if (!(eta >= 0.0 && eta < 0.5)) throw std::invalid_argument("RCN rate must lie in [0, 1/2)");
    return {Kind::Rcn, eta};
  }
  static LabelNoise boundary(double band) {
    if (band < 0.0) throw std::invalid_argument("boundary band must be nonnegative");
    return {Kind::Boundary, band};
  }

 private:
  LabelNoise() = default;
  LabelNoise(Kind k, double p) : kind(k), param(p) {}
};

struct PlantedDataConfig {
  std::size_t n;
  MixtureDistribution marginal;
  LinearThresholdFunction planted;
  LabelNoise label_noise;

  PlantedDataConfig(std::size_t n_, MixtureDistribution marginal_, LinearThresholdFunction planted_,
                    LabelNoise noise = LabelNoise::none())
      : n(n_), marginal(std::move(marginal_)), planted(std::move(planted_)), label_noise(noise) {
    if (marginal.dim() != n || planted.dim() != n)
      throw std::invalid_argument("config dimensions disagree");
  }
};

// ---- Samplers and channels ----

std::vector<BitVector> sample_marginal(const MixtureDistribution& dist, std::size_t count,
                                       std::uint64_t seed);

// P_sigma(x) = x (.) z with z ~ N_sigma.
BitVector flip_noise(const BitVector& x, double sigma, RngStream& rng);
BitVector flip_noise(const BitVector& x, double sigma, std::uint64_t seed);

// Each coordinate kept with probability rho, else redrawn from mu.
BitVector noisy_copy(const BitVector& z, double rho, const ProductDistribution& mu, RngStream& rng);
BitVector noisy_copy(const BitVector& z, double rho, const ProductDistribution& mu,
                     std::uint64_t seed);

inline int ltf_eval(const LinearThresholdFunction& f, const BitVector& x) { return f.eval(x); }

std::vector<LabeledSample> generate_dataset(const PlantedDataConfig& cfg, std::size_t count,
                                            std::uint64_t seed);
std::vector<LabeledSample> generate_dataset(const PlantedDataConfig& cfg, std::size_t count,
                                            RngStream& rng);

// ---- Sub-exponential tail probe ----

struct TailDirectionReport {
  std::vector<double> direction;
  double worst_excess;  // max over the t-grid of (empirical survival - CI band) - bound
  double worst_t;
  bool violated;
};

struct TailProbeReport {
  std::vector<TailDirectionReport> directions;
  bool any_violation;
};

// Checks P[|<x,v>| > t] <= 2 exp(-(t/lambda)^{1+alpha}) on sampled unit
// directions, with a one-sided binomial confidence band at 99%.
TailProbeReport subexp_tail_probe(const MixtureDistribution& dist, double lambda, double alpha_tail,
                                  std::size_t n_directions, std::size_t n_samples,
                                  std::uint64_t seed,
                                  const std::vector<std::vector<double>>& extra_directions = {});

// ---- Dataset file format ----
// One sample per line: space-separated +/-1 entries, then ';', then the label.
// Lines starting with '#' are comments.

void write_dataset(const std::string& path, const std::vector<LabeledSample>& data);
std::vector<LabeledSample> read_dataset(const std::string& path);

}  // namespace smoothltf
