#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smoothltf/core.hpp"

namespace smoothltf {

inline constexpr std::size_t kBasisSizeCap = 200000;

// All subsets S of [n] with |S| <= d, ordered by (size, lexicographic).
class MonomialBasis {
 public:
  MonomialBasis(std::size_t n, std::size_t d);

  std::size_t dim() const { return n_; }
  std::size_t degree() const { return d_; }
  std::size_t size() const { return monomials_.size(); }
  const std::vector<std::vector<std::size_t>>& monomials() const { return monomials_; }

 private:
  std::size_t n_, d_;
  std::vector<std::vector<std::size_t>> monomials_;
};

Eigen::VectorXd expand_features(const BitVector& x, const MonomialBasis& basis);

struct PolynomialHypothesis {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<std::vector<std::size_t>> monomials;
  std::vector<double> coeffs;
  double t = 0.0;  // decision threshold in [-1,1]

  double predict(const BitVector& x) const;
  int classify(const BitVector& x) const { return sign_pm1(predict(x) - t); }

  std::string to_json() const;
  static PolynomialHypothesis from_json(const std::string& text);
  void save(const std::string& path) const;
  static PolynomialHypothesis load(const std::string& path);
};

struct L1FitResult {
  Eigen::VectorXd coeffs;
  double objective = 0.0;       // sum_j w_j |<c, x_j> - y_j|
  double dual_objective = 0.0;  // y' nu at the final dual iterate
  double gap = 0.0;             // objective - dual_objective
  double dual_infeasibility = 0.0;  // ||X' nu||_inf
  std::size_t iterations = 0;
  bool converged = false;
};

// Thrown when the interior-point solve hits the iteration cap; carries the
// best iterate seen.
struct L1FitFailure : std::runtime_error {
  L1FitFailure(std::string msg, L1FitResult incumbent_)
      : std::runtime_error(std::move(msg)), incumbent(std::move(incumbent_)) {}
  L1FitResult incumbent;
};

L1FitResult l1_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double tol = 1e-8,
                   std::size_t max_iter = 100);
L1FitResult l1_fit_weighted(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& weights, double tol = 1e-8,
                            std::size_t max_iter = 100);

double select_threshold(const std::vector<double>& predictions, const std::vector<int>& labels);
double select_threshold_weighted(const std::vector<double>& predictions,
                                 const std::vector<int>& labels,
                                 const std::vector<double>& weights);

struct LearnConfig {
  std::size_t d = 1;
  double epsilon = 0.1;
  double delta = 0.1;
  std::size_t N = 1000;  // samples per repetition
  std::size_t r = 1;     // repetitions
  std::size_t V = 1;     // validation-set size

  // r = ceil(4 ln(2/delta)/eps), V = ceil(8 ln(4r/delta)/eps^2).
  static LearnConfig from_targets(std::size_t d, double epsilon, double delta, std::size_t N);
  void validate(std::size_t basis_size) const;
};

using SampleProvider = std::function<LabeledSample()>;

struct LearnReport {
  PolynomialHypothesis best;
  std::size_t chosen = 0;              // index of the winning repetition
  std::vector<double> train_errors;    // per-repetition 0/1 error on its own batch
  std::vector<double> validation_errors;
};

LearnReport learn_with_report(const SampleProvider& provider, std::size_t n,
                              const LearnConfig& cfg, std::uint64_t seed);
PolynomialHypothesis learn(const SampleProvider& provider, std::size_t n, const LearnConfig& cfg,
                           std::uint64_t seed);

double evaluate(const PolynomialHypothesis& h, const std::vector<LabeledSample>& data);

}  // namespace smoothltf
