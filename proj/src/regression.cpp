#include "smoothltf/regression.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_map>

#include "json.hpp"

namespace smoothltf {

MonomialBasis::MonomialBasis(std::size_t n, std::size_t d) : n_(n), d_(d) {
  if (n < 1) throw std::invalid_argument("basis dimension must be >= 1");
  monomials_.push_back({});
  std::vector<std::size_t> subset;
  for (std::size_t k = 1; k <= std::min(d, n); ++k) {
    // Subsets of size k in lexicographic order.
    subset.resize(k);
    for (std::size_t i = 0; i < k; ++i) subset[i] = i;
    while (true) {
      monomials_.push_back(subset);
      if (monomials_.size() > kBasisSizeCap)
        throw std::invalid_argument("monomial basis exceeds size cap");
      // Advance to the next k-subset.
      std::size_t i = k;
      while (i-- > 0) {
        if (subset[i] < n - (k - i)) {
          ++subset[i];
          for (std::size_t j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
          break;
        }
        if (i == 0) {
          i = std::numeric_limits<std::size_t>::max();
          break;
        }
      }
      if (i == std::numeric_limits<std::size_t>::max()) break;
    }
  }
}

Eigen::VectorXd expand_features(const BitVector& x, const MonomialBasis& basis) {
  if (x.size() != basis.dim()) throw std::invalid_argument("dimension mismatch");
  Eigen::VectorXd f(basis.size());
  for (std::size_t m = 0; m < basis.size(); ++m) {
    int v = 1;
    for (std::size_t i : basis.monomials()[m]) v *= x[i];
    f[m] = v;
  }
  return f;
}

double PolynomialHypothesis::predict(const BitVector& x) const {
  if (x.size() != n) throw std::invalid_argument("dimension mismatch");
  double p = 0.0;
  for (std::size_t m = 0; m < monomials.size(); ++m) {
    int v = 1;
    for (std::size_t i : monomials[m]) v *= x[i];
    p += coeffs[m] * v;
  }
  return p;
}

std::string PolynomialHypothesis::to_json() const {
  nlohmann::json j;
  j["format"] = "smoothltf-model";
  j["version"] = 1;
  j["n"] = n;
  j["degree"] = d;
  j["monomials"] = monomials;
  j["coeffs"] = coeffs;
  j["threshold"] = t;
  return j.dump(2);
}

PolynomialHypothesis PolynomialHypothesis::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("format", "") != "smoothltf-model" || j.value("version", 0) != 1)
    throw std::runtime_error("unrecognized model format");
  PolynomialHypothesis h;
  h.n = j.at("n").get<std::size_t>();
  h.d = j.at("degree").get<std::size_t>();
  h.monomials = j.at("monomials").get<std::vector<std::vector<std::size_t>>>();
  h.coeffs = j.at("coeffs").get<std::vector<double>>();
  h.t = j.at("threshold").get<double>();
  if (h.coeffs.size() != h.monomials.size())
    throw std::runtime_error("model coefficient count mismatch");
  if (!(h.t >= -1.0 && h.t <= 1.0)) throw std::runtime_error("model threshold outside [-1,1]");
  return h;
}

void PolynomialHypothesis::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << to_json() << "\n";
}

PolynomialHypothesis PolynomialHypothesis::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

L1FitResult l1_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double tol,
                   std::size_t max_iter) {
  return l1_fit_weighted(X, y, Eigen::VectorXd::Ones(X.rows()), tol, max_iter);
}

// Frisch-Newton interior point with Mehrotra predictor-corrector on
//   min_c sum_j w_j |x_j'c - y_j|
// via its dual   max y'nu  s.t.  X'nu = 0, |nu_j| <= w_j.
// Slacks z1 = w - nu, z2 = w + nu pair with the positive/negative residual
// parts u, v; each Newton step reduces to an MxM normal-equations solve.
L1FitResult l1_fit_weighted(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& w, double tol, std::size_t max_iter) {
  const Eigen::Index N = X.rows(), M = X.cols();
  if (N < 1 || M < 1) throw std::invalid_argument("l1_fit: empty problem");
  if (y.size() != N || w.size() != N) throw std::invalid_argument("l1_fit: size mismatch");
  if (!(tol > 0.0)) throw std::invalid_argument("l1_fit: tol must be positive");
  if ((w.array() <= 0.0).any()) throw std::invalid_argument("l1_fit: weights must be positive");

  // Start from weighted least squares; nu = 0 is strictly dual-feasible.
  Eigen::MatrixXd XtWX = Eigen::MatrixXd::Zero(M, M);
  XtWX.selfadjointView<Eigen::Lower>().rankUpdate((w.array().sqrt().matrix().asDiagonal() * X).transpose());
  Eigen::VectorXd c =
      Eigen::LDLT<Eigen::MatrixXd>(XtWX.selfadjointView<Eigen::Lower>()).solve(X.transpose() * (w.asDiagonal() * y));
  if (!c.allFinite()) c.setZero();

  Eigen::VectorXd r = y - X * c;
  Eigen::VectorXd u = r.cwiseMax(0.0).array() + 1.0;
  Eigen::VectorXd v = (-r).cwiseMax(0.0).array() + 1.0;
  Eigen::VectorXd nu = Eigen::VectorXd::Zero(N);

  auto objective = [&](const Eigen::VectorXd& cc) {
    return (w.array() * (y - X * cc).array().abs()).sum();
  };

  L1FitResult best;
  best.coeffs = c;
  best.objective = objective(c);
  best.dual_objective = 0.0;
  best.gap = best.objective;
  best.dual_infeasibility = 0.0;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
  for (std::size_t it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd z1 = w - nu, z2 = w + nu;
    const Eigen::VectorXd rp = y - X * c - u + v;
    const Eigen::VectorXd rd = -(X.transpose() * nu);
    const double mu = (u.dot(z1) + v.dot(z2)) / (2.0 * N);

    const Eigen::VectorXd winv = (u.array() / z1.array() + v.array() / z2.array()).matrix();
    const Eigen::VectorXd wdiag = winv.cwiseInverse();

    // One KKT solve for a given complementarity right-hand side g1, g2
    // (expressed as e1 = g1/z1, e2 = g2/z2).
    auto newton = [&](const Eigen::VectorXd& e1, const Eigen::VectorXd& e2, Eigen::VectorXd& dc,
                      Eigen::VectorXd& dnu, Eigen::VectorXd& du, Eigen::VectorXd& dv) {
      const Eigen::VectorXd rhat = rp - e1 + e2;
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M, M);
      A.selfadjointView<Eigen::Lower>().rankUpdate(
          (wdiag.array().sqrt().matrix().asDiagonal() * X).transpose());
      ldlt.compute(A.selfadjointView<Eigen::Lower>());
      dc = ldlt.solve(X.transpose() * (wdiag.asDiagonal() * rhat) - rd);
      dnu = wdiag.asDiagonal() * (rhat - X * dc);
      du = e1 + (u.array() / z1.array() * dnu.array()).matrix();
      dv = e2 - (v.array() / z2.array() * dnu.array()).matrix();
    };

    auto step_len = [&](const Eigen::VectorXd& du, const Eigen::VectorXd& dv,
                        const Eigen::VectorXd& dnu, double& ap, double& ad) {
      ap = ad = 1.0;
      for (Eigen::Index j = 0; j < N; ++j) {
        if (du[j] < 0.0) ap = std::min(ap, -u[j] / du[j]);
        if (dv[j] < 0.0) ap = std::min(ap, -v[j] / dv[j]);
        if (dnu[j] > 0.0) ad = std::min(ad, z1[j] / dnu[j]);   // z1 shrinks
        if (dnu[j] < 0.0) ad = std::min(ad, -z2[j] / dnu[j]);  // z2 shrinks
      }
    };

    // Affine (predictor) direction: pure Newton on complementarity = 0.
    Eigen::VectorXd dc_a, dnu_a, du_a, dv_a;
    newton(-u, -v, dc_a, dnu_a, du_a, dv_a);
    double ap_a, ad_a;
    step_len(du_a, dv_a, dnu_a, ap_a, ad_a);
    const double mu_aff = ((u + ap_a * du_a).dot(z1 - ad_a * dnu_a) +
                           (v + ap_a * dv_a).dot(z2 + ad_a * dnu_a)) /
                          (2.0 * N);
    const double ratio = mu > 0.0 ? mu_aff / mu : 0.0;
    const double mu_target = ratio * ratio * ratio * mu;

    // Corrector.
    const Eigen::VectorXd e1 =
        ((mu_target - du_a.array() * (-dnu_a.array())) / z1.array() - u.array()).matrix();
    const Eigen::VectorXd e2 =
        ((mu_target - dv_a.array() * dnu_a.array()) / z2.array() - v.array()).matrix();
    Eigen::VectorXd dc, dnu, du, dv;
    newton(e1, e2, dc, dnu, du, dv);
    double ap, ad;
    step_len(du, dv, dnu, ap, ad);
    const double damp = 0.9995;
    ap = std::min(1.0, damp * ap);
    ad = std::min(1.0, damp * ad);

    c += ap * dc;
    u += ap * du;
    v += ap * dv;
    nu += ad * dnu;

    const double primal = objective(c);
    const double dual = y.dot(nu);
    const double dinf = (X.transpose() * nu).cwiseAbs().maxCoeff();
    if (primal < best.objective) best.coeffs = c;
    best.objective = std::min(best.objective, primal);
    best.dual_objective = dual;
    best.gap = primal - dual;
    best.dual_infeasibility = dinf;
    best.iterations = it;
    if (std::abs(best.gap) <= tol * (1.0 + primal) && dinf <= tol * (1.0 + w.maxCoeff())) {
      best.converged = true;
      best.coeffs = c;
      best.objective = primal;
      return best;
    }
  }
  throw L1FitFailure("l1_fit: iteration cap reached (gap " + std::to_string(best.gap) + ")",
                     best);
}

double select_threshold(const std::vector<double>& predictions, const std::vector<int>& labels) {
  return select_threshold_weighted(predictions, labels,
                                   std::vector<double>(predictions.size(), 1.0));
}

double select_threshold_weighted(const std::vector<double>& predictions,
                                 const std::vector<int>& labels,
                                 const std::vector<double>& weights) {
  const std::size_t N = predictions.size();
  if (N == 0 || labels.size() != N || weights.size() != N)
    throw std::invalid_argument("select_threshold: empty or mismatched input");

  std::vector<std::size_t> order(N);
  for (std::size_t i = 0; i < N; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return predictions[a] < predictions[b]; });

  // prefix_plus[k] = weight of y=+1 among the k smallest predictions.
  std::vector<double> sorted_pred(N), prefix_plus(N + 1, 0.0), prefix_minus(N + 1, 0.0);
  for (std::size_t k = 0; k < N; ++k) {
    sorted_pred[k] = predictions[order[k]];
    prefix_plus[k + 1] = prefix_plus[k] + (labels[order[k]] > 0 ? weights[order[k]] : 0.0);
    prefix_minus[k + 1] = prefix_minus[k] + (labels[order[k]] < 0 ? weights[order[k]] : 0.0);
  }
  const double total_minus = prefix_minus[N];

  // Error of sign(p - t): +1 iff p >= t, so error(t) = (weight of y=+1 with
  // p < t) + (weight of y=-1 with p >= t).
  auto error_at = [&](double t) {
    const std::size_t below =
        std::lower_bound(sorted_pred.begin(), sorted_pred.end(), t) - sorted_pred.begin();
    return prefix_plus[below] + (total_minus - prefix_minus[below]);
  };

  std::vector<double> candidates{-1.0, 1.0};
  for (std::size_t k = 0; k + 1 < N; ++k) {
    if (sorted_pred[k] == sorted_pred[k + 1]) continue;
    candidates.push_back(std::clamp(0.5 * (sorted_pred[k] + sorted_pred[k + 1]), -1.0, 1.0));
  }
  std::sort(candidates.begin(), candidates.end());

  double best_t = candidates.front(), best_err = error_at(best_t);
  for (double t : candidates) {
    const double e = error_at(t);
    if (e < best_err) {  // ties keep the smallest t
      best_err = e;
      best_t = t;
    }
  }
  return best_t;
}

LearnConfig LearnConfig::from_targets(std::size_t d, double epsilon, double delta, std::size_t N) {
  if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("epsilon and delta must lie in (0,1)");
  LearnConfig cfg;
  cfg.d = d;
  cfg.epsilon = epsilon;
  cfg.delta = delta;
  cfg.N = N;
  cfg.r = static_cast<std::size_t>(std::ceil(4.0 * std::log(2.0 / delta) / epsilon));
  cfg.V = static_cast<std::size_t>(
      std::ceil(8.0 * std::log(4.0 * double(cfg.r) / delta) / (epsilon * epsilon)));
  return cfg;
}

void LearnConfig::validate(std::size_t basis_size) const {
  if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("epsilon and delta must lie in (0,1)");
  if (r < 1 || V < 1) throw std::invalid_argument("r and V must be >= 1");
  if (N < basis_size)
    throw std::invalid_argument("N (" + std::to_string(N) + ") below basis size (" +
                                std::to_string(basis_size) + ")");
}

namespace {

struct RowKey {
  std::string bytes;
  bool operator==(const RowKey& o) const { return bytes == o.bytes; }
};
struct RowKeyHash {
  std::size_t operator()(const RowKey& k) const { return std::hash<std::string>{}(k.bytes); }
};

}  // namespace

LearnReport learn_with_report(const SampleProvider& provider, std::size_t n,
                              const LearnConfig& cfg, std::uint64_t /*seed*/) {
  const MonomialBasis basis(n, cfg.d);
  cfg.validate(basis.size());

  LearnReport report;
  std::vector<PolynomialHypothesis> candidates;
  candidates.reserve(cfg.r);
  for (std::size_t rep = 0; rep < cfg.r; ++rep) {
    // Collapse duplicate (x,y) rows into weights; the weighted L1 objective
    // is identical and the LP shrinks accordingly.
    std::unordered_map<RowKey, std::size_t, RowKeyHash> seen;
    std::vector<BitVector> xs;
    std::vector<int> ys;
    std::vector<double> counts;
    for (std::size_t j = 0; j < cfg.N; ++j) {
      const LabeledSample s = provider();
      if (s.x.size() != n) throw std::invalid_argument("sample dimension mismatch");
      RowKey key;
      key.bytes.reserve(n + 1);
      for (std::size_t i = 0; i < n; ++i) key.bytes.push_back(s.x[i] > 0 ? '+' : '-');
      key.bytes.push_back(s.y > 0 ? '+' : '-');
      auto [it, inserted] = seen.emplace(key, xs.size());
      if (inserted) {
        xs.push_back(s.x);
        ys.push_back(s.y);
        counts.push_back(1.0);
      } else {
        counts[it->second] += 1.0;
      }
    }

    const std::size_t D = xs.size();
    Eigen::MatrixXd X(D, basis.size());
    Eigen::VectorXd y(D), wts(D);
    for (std::size_t j = 0; j < D; ++j) {
      X.row(j) = expand_features(xs[j], basis).transpose();
      y[j] = ys[j];
      wts[j] = counts[j];
    }

    Eigen::VectorXd coef;
    try {
      coef = l1_fit_weighted(X, y, wts).coeffs;
    } catch (const L1FitFailure& f) {
      coef = f.incumbent.coeffs;  // keep the best iterate and let validation judge it
    }

    std::vector<double> preds(D);
    for (std::size_t j = 0; j < D; ++j) preds[j] = X.row(j).dot(coef);

    PolynomialHypothesis h;
    h.n = n;
    h.d = cfg.d;
    h.monomials = basis.monomials();
    h.coeffs.assign(coef.data(), coef.data() + coef.size());
    h.t = select_threshold_weighted(preds, ys, counts);

    double train_wrong = 0.0;
    for (std::size_t j = 0; j < D; ++j)
      if (sign_pm1(preds[j] - h.t) != ys[j]) train_wrong += counts[j];
    report.train_errors.push_back(train_wrong / static_cast<double>(cfg.N));

    candidates.push_back(std::move(h));
  }

  std::vector<LabeledSample> validation;
  validation.reserve(cfg.V);
  for (std::size_t j = 0; j < cfg.V; ++j) validation.push_back(provider());

  std::size_t best = 0;
  report.validation_errors.resize(candidates.size());
  report.validation_errors[0] = evaluate(candidates[0], validation);
  for (std::size_t k = 1; k < candidates.size(); ++k) {
    report.validation_errors[k] = evaluate(candidates[k], validation);
    if (report.validation_errors[k] < report.validation_errors[best]) best = k;  // ties keep first
  }
  report.chosen = best;
  report.best = std::move(candidates[best]);
  return report;
}

PolynomialHypothesis learn(const SampleProvider& provider, std::size_t n, const LearnConfig& cfg,
                           std::uint64_t seed) {
  return learn_with_report(provider, n, cfg, seed).best;
}

double evaluate(const PolynomialHypothesis& h, const std::vector<LabeledSample>& data) {
  if (data.empty()) throw std::invalid_argument("evaluate: empty data");
  std::size_t wrong = 0;
  for (const auto& s : data)
    if (h.classify(s.x) != s.y) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

}  // namespace smoothltf
