#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <stdexcept>
#include <string>

#include "degroot/block_model.hpp"
#include "degroot/graph.hpp"
#include "degroot/learning.hpp"
#include "degroot/spectral.hpp"
#include "degroot/version.hpp"
#include "degroot/weight_function.hpp"

namespace py = pybind11;

namespace {

degroot::Graph graph_from_dense(const Eigen::MatrixXd& w) {
  if (w.rows() != w.cols()) throw std::invalid_argument("adjacency must be square");
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 0.0)
    throw std::invalid_argument("adjacency must be symmetric");
  degroot::Graph g;
  g.n = static_cast<int>(w.rows());
  g.num_groups = 1;
  g.weights = w;
  g.group_of.assign(static_cast<size_t>(g.n), 0);
  g.kind = degroot::GraphKind::realized;
  return g;
}

degroot::EliteGrassrootsSpec spec_of(int n1, int n2, int m, double p, double q) {
  return degroot::elite_grassroots_spec(n1, n2, m, p, q);
}

degroot::NormKind norm_of(const std::string& name) {
  if (name == "euclidean") return degroot::NormKind::euclidean;
  if (name == "d_weighted") return degroot::NormKind::d_weighted;
  throw std::invalid_argument("norm must be 'euclidean' or 'd_weighted'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Degree-weighted DeGroot learning on stochastic block models";
  m.attr("__version__") = degroot::kVersion;

  py::class_<degroot::SpectralReport>(m, "SpectralReport")
      .def_readonly("eigenvalues", &degroot::SpectralReport::eigenvalues)
      .def_readonly("lambda2", &degroot::SpectralReport::lambda2)
      .def_readonly("abs_lambda2", &degroot::SpectralReport::abs_lambda2)
      .def_readonly("second_eigenvector", &degroot::SpectralReport::second_eigenvector)
      .def_readonly("method", &degroot::SpectralReport::method)
      .def_readonly("branch", &degroot::SpectralReport::branch)
      .def_readonly("case_id", &degroot::SpectralReport::case_id)
      .def_readonly("multiplicity", &degroot::SpectralReport::multiplicity)
      .def("__repr__", [](const degroot::SpectralReport& r) {
        return "SpectralReport(lambda2=" + std::to_string(r.lambda2) + ", method='" +
               r.method + "')";
      });

  py::class_<degroot::AlphaInterval>(m, "AlphaInterval")
      .def_readonly("lo", &degroot::AlphaInterval::lo)
      .def_readonly("hi", &degroot::AlphaInterval::hi)
      .def_readonly("lo_closed", &degroot::AlphaInterval::lo_closed)
      .def_readonly("hi_closed", &degroot::AlphaInterval::hi_closed)
      .def("contains", &degroot::AlphaInterval::contains, py::arg("alpha"));

  py::class_<degroot::RegimeClassification>(m, "RegimeClassification")
      .def_readonly("case_id", &degroot::RegimeClassification::case_id)
      .def_readonly("alpha_threshold", &degroot::RegimeClassification::alpha_threshold)
      .def_readonly("secondary_threshold",
                    &degroot::RegimeClassification::secondary_threshold)
      .def_readonly("decreasing_intervals",
                    &degroot::RegimeClassification::decreasing_intervals)
      .def("contains", &degroot::RegimeClassification::contains, py::arg("alpha"));

  py::class_<degroot::WorstBeliefs>(m, "WorstBeliefs")
      .def_readonly("degenerate", &degroot::WorstBeliefs::degenerate)
      .def_readonly("primary", &degroot::WorstBeliefs::primary)
      .def_readonly("lambda2", &degroot::WorstBeliefs::lambda2)
      .def_readonly("branch", &degroot::WorstBeliefs::branch)
      .def_readonly("multiplicity", &degroot::WorstBeliefs::multiplicity)
      .def_readonly("v21", &degroot::WorstBeliefs::v21)
      .def_readonly("v22", &degroot::WorstBeliefs::v22)
      .def_readonly("v_prime", &degroot::WorstBeliefs::v_prime)
      .def_readonly("metric", &degroot::WorstBeliefs::metric);

  m.def(
      "expected_adjacency",
      [](int n1, int n2, int m_, double p, double q) {
        return degroot::expected_adjacency(spec_of(n1, n2, m_, p, q).block).weights;
      },
      py::arg("n1"), py::arg("n2"), py::arg("m"), py::arg("p"), py::arg("q"),
      "Expected adjacency matrix of the two-type block model.");

  m.def(
      "sample_adjacency",
      [](int n1, int n2, int m_, double p, double q, std::uint64_t seed) {
        return degroot::sample_adjacency(spec_of(n1, n2, m_, p, q).block, seed).weights;
      },
      py::arg("n1"), py::arg("n2"), py::arg("m"), py::arg("p"), py::arg("q"),
      py::arg("seed"), "One Bernoulli draw of the block model (deterministic in seed).");

  m.def(
      "learning_matrix",
      [](const Eigen::MatrixXd& w, double alpha) {
        return degroot::build_learning_matrix(graph_from_dense(w),
                                              degroot::WeightFunction::power(alpha))
            .entries;
      },
      py::arg("adjacency"), py::arg("alpha"),
      "Row-stochastic update matrix with weights d^alpha.");

  m.def(
      "lambda2_numeric",
      [](const Eigen::MatrixXd& w, double alpha) {
        return degroot::lambda2_signed(degroot::build_learning_matrix(
            graph_from_dense(w), degroot::WeightFunction::power(alpha)));
      },
      py::arg("adjacency"), py::arg("alpha"),
      "Signed subdominant eigenvalue of the update matrix.");

  m.def(
      "lambda2_closed_form",
      [](int n1, int n2, int m_, double p, double q, double alpha) {
        return degroot::lambda2_closed_form(spec_of(n1, n2, m_, p, q),
                                            degroot::WeightFunction::power(alpha));
      },
      py::arg("n1"), py::arg("n2"), py::arg("m"), py::arg("p"), py::arg("q"),
      py::arg("alpha"), "Closed-form subdominant eigenvalue of the expected matrix.");

  m.def(
      "classify_regime",
      [](int n1, int n2, int m_, double p, double q) {
        return degroot::classify_regime(spec_of(n1, n2, m_, p, q),
                                        degroot::WeightFunction::power(0.0));
      },
      py::arg("n1"), py::arg("n2"), py::arg("m"), py::arg("p"), py::arg("q"),
      "Monotonicity regime of |lambda2| in alpha, with thresholds.");

  m.def(
      "worst_initial_beliefs",
      [](int n1, int n2, int m_, double p, double q, double alpha) {
        return degroot::worst_initial_beliefs(spec_of(n1, n2, m_, p, q),
                                              degroot::WeightFunction::power(alpha));
      },
      py::arg("n1"), py::arg("n2"), py::arg("m"), py::arg("p"), py::arg("q"),
      py::arg("alpha"), "Slowest-converging unit initial beliefs.");

  m.def(
      "consensus_weights",
      [](const Eigen::MatrixXd& w, double alpha) {
        return degroot::consensus_limit(graph_from_dense(w),
                                        degroot::WeightFunction::power(alpha));
      },
      py::arg("adjacency"), py::arg("alpha"),
      "Influence weights of the consensus limit (validates convergence).");

  m.def(
      "convergence_distance",
      [](const Eigen::MatrixXd& w, double alpha, int t, const std::string& norm) {
        return degroot::convergence_distance(
            degroot::build_learning_matrix(graph_from_dense(w),
                                           degroot::WeightFunction::power(alpha)),
            t, norm_of(norm));
      },
      py::arg("adjacency"), py::arg("alpha"), py::arg("t"),
      py::arg("norm") = "d_weighted",
      "Operator-norm distance of T^t from its consensus limit.");

  m.def(
      "iterate_beliefs",
      [](const Eigen::MatrixXd& w, double alpha, const Eigen::VectorXd& b0, int t) {
        return degroot::iterate_beliefs(
            degroot::build_learning_matrix(graph_from_dense(w),
                                           degroot::WeightFunction::power(alpha)),
            b0, t);
      },
      py::arg("adjacency"), py::arg("alpha"), py::arg("beliefs"), py::arg("t"),
      "Beliefs after t synchronous updates.");
}
