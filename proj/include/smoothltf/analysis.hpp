#pragma once

#include <functional>
#include <vector>

#include "smoothltf/core.hpp"

namespace smoothltf {

enum class EvalMode { Exact, MonteCarlo };

struct EstimateWithCI {
  double value = 0.0;
  double half_width = 0.0;  // zero for exact estimates
  EvalMode method = EvalMode::Exact;
  std::size_t n_samples = 0;
};

// Exact enumeration caps: single-sum operators walk 2^n states, the
// pair-probability path effectively costs another factor ~n on top.
inline constexpr std::size_t kSingleEnumCap = 20;
inline constexpr std::size_t kPairEnumCap = 12;
inline constexpr double kDefaultCiLevel = 0.99;

using RealFunction = std::function<double(const BitVector&)>;

// ---- Table utilities (index bit i set <=> coordinate i equals -1) ----

// Tabulates f over all of {+-1}^n.
std::vector<double> tabulate(const RealFunction& f, std::size_t n);
std::vector<double> tabulate(const LinearThresholdFunction& f);

// Applies T_rho coordinatewise: out(x) = E_{y ~ N_rho(x)}[ table(y) ].
std::vector<double> apply_noise_operator(std::vector<double> table, double rho,
                                         const ProductDistribution& mu);

double expect_under_product(const std::vector<double>& table, const ProductDistribution& mu);

// ---- Operators and functionals ----

// (T_rho f)(z).
EstimateWithCI t_rho(const RealFunction& f, std::size_t n, double rho,
                     const ProductDistribution& mu, const BitVector& z, EvalMode mode,
                     std::size_t budget = 0, std::uint64_t seed = 0,
                     double level = kDefaultCiLevel);

// NS_delta(f) = P_{x~mu, y~N_{1-delta}(x)}[f(x) != f(y)]; f must be +-1 valued.
EstimateWithCI noise_sensitivity(const RealFunction& f, std::size_t n, double delta,
                                 const ProductDistribution& mu, EvalMode mode,
                                 std::size_t budget = 0, std::uint64_t seed = 0,
                                 double level = kDefaultCiLevel);
EstimateWithCI noise_sensitivity(const LinearThresholdFunction& f, double delta,
                                 const ProductDistribution& mu, EvalMode mode,
                                 std::size_t budget = 0, std::uint64_t seed = 0,
                                 double level = kDefaultCiLevel);

// E_{z ~ N_sigma}[ |T_{1-rho} f(z) - f(z)| ].
EstimateWithCI smoothing_l1_gap(const LinearThresholdFunction& f, double rho, double sigma,
                                EvalMode mode, std::size_t budget = 0, std::uint64_t seed = 0,
                                double level = kDefaultCiLevel);

// P_{(x,y) in data, z ~ N_sigma}[ f(x (.) z) != y ]; exact mode enumerates z
// per sample.
EstimateWithCI smoothed_error(const LinearThresholdFunction& f,
                              const std::vector<LabeledSample>& data, double sigma, EvalMode mode,
                              std::size_t budget = 0, std::uint64_t seed = 0,
                              double level = kDefaultCiLevel);

}  // namespace smoothltf
