#pragma once

#include <cstdint>
#include <vector>

#include "smoothltf/analysis.hpp"
#include "smoothltf/core.hpp"

namespace smoothltf {

// Univariate polynomial in the monomial basis.
class DensePolynomial {
 public:
  DensePolynomial() : c_{0.0} {}
  explicit DensePolynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
    if (c_.empty()) c_.push_back(0.0);
  }

  std::size_t degree() const { return c_.size() - 1; }
  const std::vector<double>& coefficients() const { return c_; }

  double operator()(double x) const {
    double v = 0.0;
    for (std::size_t i = c_.size(); i-- > 0;) v = v * x + c_[i];
    return v;
  }

 private:
  std::vector<double> c_;  // c_[i] multiplies x^i
};

struct TailProfile {
  double lambda;
  double alpha_tail;
  TailProfile(double lambda_, double alpha_) : lambda(lambda_), alpha_tail(alpha_) {
    if (!(lambda > 0.0) || !(alpha_tail > 0.0))
      throw std::invalid_argument("tail profile parameters must be positive");
  }
};

// p_k(x) = 1 + sum_{i<k} x^i / i!, the degree k-1 Taylor truncation of e^x.
DensePolynomial taylor_exp(std::size_t k);

struct ExpNegApproxResult {
  DensePolynomial poly;              // monomial coefficients in x over [0, T]
  std::vector<double> cheb_coeffs;   // same polynomial in the Chebyshev basis of [0, T]
  std::size_t degree = 0;
  double sup_error = 0.0;            // measured on a dense grid plus endpoints
  double max_abs_coeff = 0.0;        // largest |monomial coefficient|
  double interval_end = 0.0;
};

// Truncated Chebyshev expansion of e^{-x} on [0, T]; the degree grows until
// the grid-measured sup error drops to eps. Evaluation for the error
// measurement uses the Chebyshev form (Clenshaw), which is the numerically
// stable route to the same polynomial.
ExpNegApproxResult exp_neg_approx(double T, double eps, std::size_t degree_cap = 400,
                                  std::size_t grid_points = 10000);

double eval_chebyshev(const std::vector<double>& cheb_coeffs, double interval_end, double x);

struct TiltingMomentResult {
  double closed_form = 0.0;   // (1/sqrt(pi)) (e^{b+1/4} + e^{-b+1/4})
  double quadrature = 0.0;    // adaptive quadrature of the defining integral
  double abs_diff = 0.0;
};

// Second moment of the Gaussian-to-Laplace density ratio under Q(s)=e^{-|s|}/2,
// in the symmetrized form whose closed-form evaluation is exact.
TiltingMomentResult tilting_second_moment(double b);

struct BerryEsseenResult {
  double gap = 0.0;         // sup_x |F(x) - Phi(x)| for S = <u,eps>/||u||_2
  double bound_term = 0.0;  // ||u||_3^3 / ||u||_2^3
  double ratio = 0.0;       // gap / bound_term
  EvalMode method = EvalMode::Exact;
  std::size_t n_samples = 0;
};

inline constexpr std::size_t kBerryEsseenEnumCap = 24;

BerryEsseenResult berry_esseen_gap(const std::vector<double>& u, EvalMode mode,
                                   std::size_t budget = 0, std::uint64_t seed = 0);

struct MomentCheckResult {
  double empirical = 0.0;
  double half_width = 0.0;
  double bound = 0.0;
  double slack_ratio = 0.0;  // bound / empirical (inf when empirical is 0)
  bool pass = false;         // empirical - half_width <= bound
};

// k-th absolute moment against 2 sqrt(2 pi) lambda^k (k/(1+a))^{k/(1+a)+1/2}
// e^{-k/(1+a) + (1+a)/(12k)}.
MomentCheckResult subexp_moment_check(const std::vector<double>& samples, std::size_t k,
                                      const TailProfile& profile,
                                      double level = kDefaultCiLevel);

// E[e^{a|x|}] against 3 e^{2^{1/alpha} (a lambda)^{1+1/alpha}}.
MomentCheckResult subexp_mgf_check(const std::vector<double>& samples, double a,
                                   const TailProfile& profile, double level = kDefaultCiLevel);

struct RerandomizedDraw {
  std::vector<int> l;    // 1 w.p. rho
  std::vector<int> m;    // 1 w.p. 2*sigma
  std::vector<int> eps;  // Rademacher
  BitVector y;
};

// y_i = (1 - l_i) z_i + l_i (1 - m_i) + l_i m_i eps_i; requires sigma <= 1/2.
RerandomizedDraw rerandomize(const BitVector& z, double rho, double sigma, RngStream& rng);
RerandomizedDraw rerandomize(const BitVector& z, double rho, double sigma, std::uint64_t seed);

// Exact output laws on {+-1}^n (indexed as BitVector::to_index), for the
// rerandomized decomposition and for the keep/resample channel.
std::vector<double> rerandomize_law(const BitVector& z, double rho, double sigma);
std::vector<double> resample_channel_law(const BitVector& z, double rho, double sigma);

double total_variation(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace smoothltf
