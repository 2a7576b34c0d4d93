#include "smoothltf/approx.hpp"

#include <algorithm>
#include <cmath>

#include "smoothltf/stats.hpp"

namespace smoothltf {

namespace {

// Chebyshev coefficients of e^{-x} on [0,T] at the given degree, via
// Chebyshev-Gauss quadrature on degree+1 nodes.
std::vector<double> cheb_fit_exp_neg(double T, std::size_t degree) {
  const std::size_t m = degree + 1;
  std::vector<double> fvals(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double theta = M_PI * (j + 0.5) / m;
    const double t = std::cos(theta);
    fvals[j] = std::exp(-T * (t + 1.0) * 0.5);
  }
  std::vector<double> a(m);
  for (std::size_t k = 0; k < m; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += fvals[j] * std::cos(k * M_PI * (j + 0.5) / m);
    a[k] = 2.0 * s / m;
  }
  a[0] *= 0.5;
  return a;
}

double cheb_sup_error(const std::vector<double>& a, double T, std::size_t grid_points) {
  double worst = 0.0;
  for (std::size_t g = 0; g <= grid_points; ++g) {
    const double x = T * g / grid_points;
    worst = std::max(worst, std::abs(eval_chebyshev(a, T, x) - std::exp(-x)));
  }
  return worst;
}

// Polynomial helpers in the monomial basis (coefficient vectors).
std::vector<double> poly_mul_linear(const std::vector<double>& p, double c0, double c1) {
  // p(x) * (c0 + c1 x)
  std::vector<double> r(p.size() + 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    r[i] += c0 * p[i];
    r[i + 1] += c1 * p[i];
  }
  return r;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fb, double fm, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) throw std::runtime_error("quadrature did not converge");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, fm, flm, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, fb, frm, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return adaptive_simpson(f, a, b, fa, fb, fm, tol, 60);
}

}  // namespace

DensePolynomial taylor_exp(std::size_t k) {
  if (k < 1) throw std::invalid_argument("taylor_exp requires k >= 1");
  std::vector<double> c(k);
  double fact = 1.0;
  c[0] = 1.0;
  for (std::size_t i = 1; i < k; ++i) {
    fact *= static_cast<double>(i);
    c[i] = 1.0 / fact;
  }
  return DensePolynomial(std::move(c));
}

double eval_chebyshev(const std::vector<double>& a, double T, double x) {
  const double t = 2.0 * x / T - 1.0;
  // Clenshaw recurrence.
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = a.size(); k-- > 1;) {
    const double b0 = 2.0 * t * b1 - b2 + a[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + a[0];
}

ExpNegApproxResult exp_neg_approx(double T, double eps, std::size_t degree_cap,
                                  std::size_t grid_points) {
  if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps outside (0,1)");
  std::vector<double> a;
  double err = 0.0;
  std::size_t degree = 0;
  bool found = false;
  for (degree = 1; degree <= degree_cap; ++degree) {
    a = cheb_fit_exp_neg(T, degree);
    err = cheb_sup_error(a, T, grid_points);
    if (err <= eps) {
      found = true;
      break;
    }
  }
  if (!found)
    throw std::runtime_error("exp_neg_approx: degree cap " + std::to_string(degree_cap) +
                             " exceeded on [0," + std::to_string(T) + "], best error " +
                             std::to_string(err));

  // Convert to the monomial basis: accumulate a_k T_k(t) with the Chebyshev
  // recurrence, then substitute t = 2x/T - 1.
  std::vector<double> tk_prev{1.0};        // T_0
  std::vector<double> tk_cur{0.0, 1.0};    // T_1
  std::vector<double> in_t{a[0]};
  auto add_scaled = [](std::vector<double>& acc, const std::vector<double>& p, double c) {
    if (acc.size() < p.size()) acc.resize(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) acc[i] += c * p[i];
  };
  if (a.size() > 1) add_scaled(in_t, tk_cur, a[1]);
  for (std::size_t k = 2; k < a.size(); ++k) {
    std::vector<double> tk_next = poly_mul_linear(tk_cur, 0.0, 2.0);
    for (std::size_t i = 0; i < tk_prev.size(); ++i) tk_next[i] -= tk_prev[i];
    add_scaled(in_t, tk_next, a[k]);
    tk_prev = std::move(tk_cur);
    tk_cur = std::move(tk_next);
  }
  // Compose with t(x) = (2/T) x - 1 by Horner on polynomials.
  std::vector<double> in_x{0.0};
  for (std::size_t i = in_t.size(); i-- > 0;) {
    in_x = poly_mul_linear(in_x, -1.0, 2.0 / T);
    in_x[0] += in_t[i];
  }

  ExpNegApproxResult res;
  res.cheb_coeffs = std::move(a);
  res.degree = degree;
  res.sup_error = err;
  res.interval_end = T;
  res.max_abs_coeff = 0.0;
  for (double c : in_x) res.max_abs_coeff = std::max(res.max_abs_coeff, std::abs(c));
  res.poly = DensePolynomial(std::move(in_x));
  return res;
}

TiltingMomentResult tilting_second_moment(double b) {
  TiltingMomentResult r;
  r.closed_form = (std::exp(b + 0.25) + std::exp(-b + 0.25)) / std::sqrt(M_PI);
  // (1/pi) integral of e^{-(s-b)^2} (e^s + e^{-s}) ds; two Gaussian bumps at
  // b +- 1/2.
  auto integrand = [b](double s) {
    const double d = s - b;
    return (std::exp(-d * d + s) + std::exp(-d * d - s)) / M_PI;
  };
  const double lo = b - 12.0 - 0.5, hi = b + 12.0 + 0.5;
  r.quadrature = integrate(integrand, lo, hi, 1e-12 * std::max(1.0, r.closed_form));
  r.abs_diff = std::abs(r.quadrature - r.closed_form);
  return r;
}

BerryEsseenResult berry_esseen_gap(const std::vector<double>& u, EvalMode mode,
                                   std::size_t budget, std::uint64_t seed) {
  const std::size_t n = u.size();
  double l2sq = 0.0, l3 = 0.0;
  for (double v : u) {
    l2sq += v * v;
    l3 += std::abs(v) * v * v;
  }
  if (l2sq == 0.0) throw std::invalid_argument("berry_esseen_gap: zero vector");
  const double l2 = std::sqrt(l2sq);

  BerryEsseenResult res;
  res.bound_term = l3 / (l2sq * l2);

  std::vector<double> sums;
  if (mode == EvalMode::Exact) {
    if (n > kBerryEsseenEnumCap)
      throw std::invalid_argument("berry_esseen_gap: n exceeds exact enumeration cap");
    sums.resize(std::size_t(1) << n);
    double base = 0.0;
    for (double v : u) base += v;
    sums[0] = base / l2;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t fill = std::size_t(1) << i;
      const double d = 2.0 * u[i] / l2;
      for (std::size_t idx = 0; idx < fill; ++idx) sums[fill | idx] = sums[idx] - d;
    }
    res.method = EvalMode::Exact;
    res.n_samples = sums.size();
  } else {
    const std::size_t m = budget ? budget : 200000;
    RngStream rng(seed);
    sums.resize(m);
    for (std::size_t s = 0; s < m; ++s) {
      double acc = 0.0;
      for (double v : u) acc += v * rng.rademacher();
      sums[s] = acc / l2;
    }
    res.method = EvalMode::MonteCarlo;
    res.n_samples = m;
  }
  std::sort(sums.begin(), sums.end());
  const double inv = 1.0 / static_cast<double>(sums.size());
  double gap = 0.0;
  std::size_t i = 0;
  while (i < sums.size()) {
    std::size_t j = i;
    while (j < sums.size() && sums[j] == sums[i]) ++j;
    const double phi = normal_cdf(sums[i]);
    const double f_before = static_cast<double>(i) * inv;
    const double f_after = static_cast<double>(j) * inv;
    gap = std::max({gap, std::abs(f_before - phi), std::abs(f_after - phi)});
    i = j;
  }
  res.gap = gap;
  res.ratio = gap / res.bound_term;
  return res;
}

namespace {

MomentCheckResult check_against_bound(const std::vector<double>& transformed, double bound,
                                      double level) {
  if (transformed.empty()) throw std::invalid_argument("empty samples");
  const std::size_t n = transformed.size();
  double mean = 0.0;
  for (double v : transformed) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : transformed) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n > 1 ? n - 1 : 1);
  MomentCheckResult r;
  r.empirical = mean;
  r.half_width = normal_quantile(0.5 * (1.0 + level)) * std::sqrt(var / static_cast<double>(n));
  r.bound = bound;
  r.slack_ratio = mean > 0.0 ? bound / mean : std::numeric_limits<double>::infinity();
  r.pass = mean - r.half_width <= bound;
  return r;
}

}  // namespace

MomentCheckResult subexp_moment_check(const std::vector<double>& samples, std::size_t k,
                                      const TailProfile& profile, double level) {
  if (k < 1) throw std::invalid_argument("moment order k must be >= 1");
  const double a1 = 1.0 + profile.alpha_tail;
  const double x = static_cast<double>(k) / a1;
  const double bound = 2.0 * std::sqrt(2.0 * M_PI) * std::pow(profile.lambda, double(k)) *
                       std::pow(x, x + 0.5) * std::exp(-x + a1 / (12.0 * k));
  std::vector<double> t(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) t[i] = std::pow(std::abs(samples[i]), double(k));
  return check_against_bound(t, bound, level);
}

MomentCheckResult subexp_mgf_check(const std::vector<double>& samples, double a,
                                   const TailProfile& profile, double level) {
  if (!(a > 0.0)) throw std::invalid_argument("mgf parameter a must be positive");
  const double inv_alpha = 1.0 / profile.alpha_tail;
  const double bound =
      3.0 * std::exp(std::pow(2.0, inv_alpha) * std::pow(a * profile.lambda, 1.0 + inv_alpha));
  std::vector<double> t(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) t[i] = std::exp(a * std::abs(samples[i]));
  return check_against_bound(t, bound, level);
}

RerandomizedDraw rerandomize(const BitVector& z, double rho, double sigma, RngStream& rng) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho outside [0,1]");
  if (!(sigma >= 0.0 && sigma <= 0.5))
    throw std::invalid_argument("rerandomize requires sigma <= 1/2");
  const std::size_t n = z.size();
  RerandomizedDraw d;
  d.l.resize(n);
  d.m.resize(n);
  d.eps.resize(n);
  d.y = BitVector(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    d.l[i] = rng.bernoulli(rho) ? 1 : 0;
    d.m[i] = rng.bernoulli(2.0 * sigma) ? 1 : 0;
    d.eps[i] = rng.rademacher();
    int yi;
    if (!d.l[i])
      yi = z[i];
    else if (!d.m[i])
      yi = 1;
    else
      yi = d.eps[i];
    d.y.set(i, yi);
  }
  return d;
}

RerandomizedDraw rerandomize(const BitVector& z, double rho, double sigma, std::uint64_t seed) {
  RngStream rng(seed);
  return rerandomize(z, rho, sigma, rng);
}

namespace {

std::vector<double> product_law(const std::vector<double>& p_minus, std::size_t n) {
  std::vector<double> law(std::size_t(1) << n, 0.0);
  law[0] = 1.0;
  std::size_t fill = 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t idx = 0; idx < fill; ++idx) {
      law[fill | idx] = law[idx] * p_minus[i];
      law[idx] *= 1.0 - p_minus[i];
    }
    fill <<= 1;
  }
  return law;
}

}  // namespace

std::vector<double> rerandomize_law(const BitVector& z, double rho, double sigma) {
  if (!(sigma >= 0.0 && sigma <= 0.5))
    throw std::invalid_argument("rerandomize requires sigma <= 1/2");
  const std::size_t n = z.size();
  std::vector<double> p_minus(n, 0.0);
  // Enumerate the (l, m, eps) combinations per coordinate.
  for (std::size_t i = 0; i < n; ++i) {
    for (int l = 0; l <= 1; ++l) {
      for (int m = 0; m <= 1; ++m) {
        for (int e = -1; e <= 1; e += 2) {
          const double w = (l ? rho : 1.0 - rho) * (m ? 2.0 * sigma : 1.0 - 2.0 * sigma) * 0.5;
          const int yi = !l ? z[i] : (!m ? 1 : e);
          if (yi < 0) p_minus[i] += w;
        }
      }
    }
  }
  return product_law(p_minus, n);
}

std::vector<double> resample_channel_law(const BitVector& z, double rho, double sigma) {
  const std::size_t n = z.size();
  std::vector<double> p_minus(n);
  for (std::size_t i = 0; i < n; ++i)
    p_minus[i] = (1.0 - rho) * (z[i] < 0 ? 1.0 : 0.0) + rho * sigma;
  return product_law(p_minus, n);
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("law size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

}  // namespace smoothltf
