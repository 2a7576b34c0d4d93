#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "smoothltf/analysis.hpp"
#include "smoothltf/core.hpp"

namespace smoothltf {

enum class DecompositionCase { RegularTail, DominatedHead };

struct CriticalIndexReport {
  std::vector<std::size_t> perm;      // perm[k] = original index of k-th largest |u|
  std::vector<double> sorted_abs;     // |u| after sorting, non-increasing
  std::vector<double> tail_norms;     // sigma_i = sqrt(sum_{j>=i} u_j^2), post-sort, 0-based
  double alpha_reg = 0.0;
  std::optional<std::size_t> ell;     // 1-based critical index; nullopt = none
  std::size_t head_size = 0;          // indices 1..H of the sorted order
  DecompositionCase decomposition = DecompositionCase::RegularTail;
  bool tail_all_zero = false;
};

struct DecompositionBudget {
  std::size_t K = 1;  // head-size threshold
  double eps = 0.1;
  double rho = 0.5;
  double sigma = 0.1;
};

// Smallest alpha with ||w||_inf <= alpha ||w||_2, i.e. the ratio itself.
double regularity(const std::vector<double>& w);

// Sorts |u| non-increasing (stable, ties by original index), computes tail
// norms and the smallest sorted index i with |u_i| <= alpha * sigma_i.
CriticalIndexReport critical_index(const std::vector<double>& u, double alpha_reg);

// Head/tail split: ell(alpha) < K gives H = ell-1 (regular tail), otherwise
// H = K (dominated head).
CriticalIndexReport decompose(const std::vector<double>& u, double alpha_reg,
                              const DecompositionBudget& budget);

// The head-threshold formula of the decomposition lemma with all constants 1;
// a default suggestion only, K stays an explicit knob.
std::size_t suggest_head_budget(double alpha_reg, double eps, double rho, double sigma,
                                double lambda);

// P_{y ~ N_{1-rho}(z)}[ sign(<u_H,y_H> + <u_T,y_T> - theta) != sign(<u_H,y_H> - theta) ],
// with the resample measure N_sigma. u is taken in its given order; head =
// first H entries.
EstimateWithCI case2_sign_agreement(const std::vector<double>& u, double theta, std::size_t H,
                                    double rho, double sigma, const BitVector& z, EvalMode mode,
                                    std::size_t budget = 0, std::uint64_t seed = 0,
                                    double level = kDefaultCiLevel);

struct SubsampleCheckReport {
  double pass_frequency = 0.0;
  double required = 0.0;         // 1 - delta
  double binomial_se = 0.0;
  std::size_t trials = 0;
  bool pass = false;             // pass_frequency >= required - 3*binomial_se
};

// Draws coordinate-keep masks u ~ Bern(rho_eff)^n and measures how often
// ||w (.) u||_2 >= sqrt(rho_eff - sqrt(log(1/delta)/2) * alpha) * ||w||_2.
SubsampleCheckReport regular_subsample_check(const std::vector<double>& w, double alpha_reg,
                                             double rho_eff, double delta, std::size_t trials,
                                             std::uint64_t seed);

struct TailConcentrationReport {
  double bound_constant = 0.0;   // C = (1-2 rho sigma) lambda log^{1/(1+alpha)}(4/eps) + sqrt(2 log(2/eps))
  double x_pass_frequency = 0.0; // fraction of x draws whose inner y-frequency is >= 1 - eps
  double required = 0.0;         // 1 - eps, minus the binomial band
  std::size_t x_trials = 0;
  std::size_t y_trials = 0;
  bool pass = false;
};

// Two-level check of |<u_T, y_T>| <= C ||u_T||_2 with u = w (.) x, x from the
// marginal and y ~ N_{1-rho}(z) over the tail coordinates.
TailConcentrationReport tail_concentration_check(const std::vector<double>& w,
                                                 const std::vector<std::size_t>& tail_indices,
                                                 const BitVector& z, double rho, double sigma,
                                                 const MixtureDistribution& marginal,
                                                 double lambda, double alpha_tail, double eps,
                                                 std::size_t x_trials, std::size_t y_trials,
                                                 std::uint64_t seed);

}  // namespace smoothltf
