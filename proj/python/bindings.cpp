#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "smoothltf/analysis.hpp"
#include "smoothltf/approx.hpp"
#include "smoothltf/core.hpp"
#include "smoothltf/harness.hpp"
#include "smoothltf/regression.hpp"
#include "smoothltf/structure.hpp"

namespace py = pybind11;
using namespace smoothltf;

namespace {

BitVector to_bitvector(const std::vector<int>& bits) { return BitVector(bits); }

std::vector<int> from_bitvector(const BitVector& x) {
  std::vector<int> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i];
  return out;
}

}  // namespace

PYBIND11_MODULE(_smoothltf, m) {
  m.doc() = "Smoothed halfspace learning laboratory";

  py::class_<EstimateWithCI>(m, "Estimate")
      .def_readonly("value", &EstimateWithCI::value)
      .def_readonly("half_width", &EstimateWithCI::half_width)
      .def_readonly("n_samples", &EstimateWithCI::n_samples)
      .def_property_readonly("exact",
                             [](const EstimateWithCI& e) { return e.method == EvalMode::Exact; });

  m.def(
      "ltf_eval",
      [](const std::vector<double>& w, double theta, const std::vector<int>& x) {
        return LinearThresholdFunction(w, theta).eval(to_bitvector(x));
      },
      py::arg("w"), py::arg("theta"), py::arg("x"));

  m.def(
      "noise_sensitivity",
      [](const std::vector<double>& w, double theta, double delta, double bias) {
        const LinearThresholdFunction f(w, theta);
        return noise_sensitivity(f, delta, ProductDistribution::biased(f.dim(), bias),
                                 EvalMode::Exact);
      },
      py::arg("w"), py::arg("theta"), py::arg("delta"), py::arg("bias") = 0.5,
      "Exact noise sensitivity of an LTF under an i.i.d.-biased marginal");

  m.def(
      "smoothing_l1_gap",
      [](const std::vector<double>& w, double theta, double rho, double sigma) {
        return smoothing_l1_gap(LinearThresholdFunction(w, theta), rho, sigma, EvalMode::Exact);
      },
      py::arg("w"), py::arg("theta"), py::arg("rho"), py::arg("sigma"));

  m.def(
      "critical_index",
      [](const std::vector<double>& u, double alpha) {
        const CriticalIndexReport rep = critical_index(u, alpha);
        py::dict d;
        d["ell"] = rep.ell ? py::cast(*rep.ell) : py::none();
        d["head_size"] = rep.head_size;
        d["sorted_abs"] = rep.sorted_abs;
        d["tail_norms"] = rep.tail_norms;
        return d;
      },
      py::arg("u"), py::arg("alpha"));

  m.def(
      "berry_esseen_gap",
      [](const std::vector<double>& u) {
        const BerryEsseenResult r = berry_esseen_gap(u, EvalMode::Exact);
        return py::make_tuple(r.gap, r.bound_term);
      },
      py::arg("u"));

  m.def("exp_neg_approx_degree",
        [](double T, double eps) { return exp_neg_approx(T, eps).degree; });
  m.def("exp_neg_approx_sup_error",
        [](double T, double eps) { return exp_neg_approx(T, eps).sup_error; });
  m.def("tilting_second_moment", [](double b) {
    const TiltingMomentResult r = tilting_second_moment(b);
    return py::make_tuple(r.closed_form, r.quadrature);
  });

  py::class_<PolynomialHypothesis>(m, "PolynomialHypothesis")
      .def_readonly("n", &PolynomialHypothesis::n)
      .def_readonly("degree", &PolynomialHypothesis::d)
      .def_readonly("coeffs", &PolynomialHypothesis::coeffs)
      .def_readonly("threshold", &PolynomialHypothesis::t)
      .def("predict",
           [](const PolynomialHypothesis& h, const std::vector<int>& x) {
             return h.predict(to_bitvector(x));
           })
      .def("classify",
           [](const PolynomialHypothesis& h, const std::vector<int>& x) {
             return h.classify(to_bitvector(x));
           })
      .def("to_json", &PolynomialHypothesis::to_json)
      .def_static("from_json", &PolynomialHypothesis::from_json);

  m.def(
      "generate_dataset",
      [](std::size_t n, std::size_t count, std::uint64_t seed, double bias, double eta) {
        PlantedDataConfig cfg(n, MixtureDistribution(ProductDistribution::biased(n, bias)),
                              LinearThresholdFunction(std::vector<double>(n, 1.0), 0.0),
                              eta > 0.0 ? LabelNoise::rcn(eta) : LabelNoise::none());
        py::list out;
        for (const LabeledSample& s : generate_dataset(cfg, count, seed))
          out.append(py::make_tuple(from_bitvector(s.x), s.y));
        return out;
      },
      py::arg("n"), py::arg("count"), py::arg("seed"), py::arg("bias") = 0.5,
      py::arg("eta") = 0.0, "Planted-majority dataset as (x, y) tuples");

  m.def(
      "learn",
      [](const std::vector<std::pair<std::vector<int>, int>>& data, std::size_t degree,
         double epsilon, double delta, std::uint64_t seed) {
        if (data.empty()) throw std::invalid_argument("empty dataset");
        const std::size_t n = data[0].first.size();
        LearnConfig cfg = LearnConfig::from_targets(degree, epsilon, delta, 0);
        cfg.r = 1;
        cfg.N = data.size() > 1 ? data.size() - std::max<std::size_t>(1, data.size() / 5)
                                : data.size();
        cfg.V = data.size() - cfg.N;
        if (cfg.V == 0) cfg.V = cfg.N;
        std::size_t cursor = 0;
        auto provider = [&]() {
          const auto& [x, y] = data[cursor++ % data.size()];
          return LabeledSample{to_bitvector(x), y};
        };
        return learn(provider, n, cfg, seed);
      },
      py::arg("data"), py::arg("degree"), py::arg("epsilon") = 0.1, py::arg("delta") = 0.1,
      py::arg("seed") = 1, "Single-repetition learner over an in-memory dataset");

  m.def(
      "evaluate",
      [](const PolynomialHypothesis& h, const std::vector<std::pair<std::vector<int>, int>>& data) {
        std::vector<LabeledSample> ds;
        ds.reserve(data.size());
        for (const auto& [x, y] : data) ds.push_back({to_bitvector(x), y});
        return evaluate(h, ds);
      },
      py::arg("hypothesis"), py::arg("data"));

  m.def(
      "smoothed_error",
      [](const std::vector<double>& w, double theta,
         const std::vector<std::pair<std::vector<int>, int>>& data, double sigma) {
        std::vector<LabeledSample> ds;
        ds.reserve(data.size());
        for (const auto& [x, y] : data) ds.push_back({to_bitvector(x), y});
        return smoothed_error(LinearThresholdFunction(w, theta), ds, sigma, EvalMode::Exact);
      },
      py::arg("w"), py::arg("theta"), py::arg("data"), py::arg("sigma"));

  m.def(
      "lemma_check",
      [](const std::vector<std::string>& selectors, const std::string& budget,
         double bound_scale, std::uint64_t seed) {
        py::list out;
        for (const CheckRow& r :
             lemma_check_suite(selectors, parse_budget_profile(budget), bound_scale, seed)) {
          py::dict d;
          d["check_id"] = r.check_id;
          d["measured"] = r.measured;
          d["bound"] = r.bound;
          d["pass"] = r.pass;
          out.append(d);
        }
        return out;
      },
      py::arg("selectors") = std::vector<std::string>{"all"}, py::arg("budget") = "smoke",
      py::arg("bound_scale") = 1.0, py::arg("seed") = 20240817);
}
