#include "doctest.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "degroot/block_model.hpp"
#include "degroot/learning.hpp"
#include "degroot/rng.hpp"
#include "degroot/weight_function.hpp"

using degroot::build_learning_matrix;
using degroot::Graph;
using degroot::LearningMatrix;
using degroot::NormKind;
using degroot::WeightFunction;

namespace {

Graph graph_from(const Eigen::MatrixXd& w) {
  Graph g;
  g.n = static_cast<int>(w.rows());
  g.num_groups = 1;
  g.weights = w;
  g.group_of.assign(g.n, 0);
  g.kind = degroot::GraphKind::realized;
  return g;
}

Graph path4() {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
  w(0, 1) = w(1, 0) = 1.0;
  w(1, 2) = w(2, 1) = 1.0;
  w(2, 3) = w(3, 2) = 1.0;
  return graph_from(w);
}

Graph star4() {  // center 0, leaves 1..3
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
  for (int leaf = 1; leaf < 4; ++leaf) w(0, leaf) = w(leaf, 0) = 1.0;
  return graph_from(w);
}

Graph triangle() {
  Eigen::MatrixXd w = Eigen::MatrixXd::Ones(3, 3);
  w.diagonal().setZero();
  return graph_from(w);
}

// Second-largest |eigenvalue| of T via its symmetrization, computed here
// independently of the library's spectral utilities.
double lambda2_magnitude_ref(const LearningMatrix& T) {
  const Eigen::VectorXd ws = (T.diag1.array() * T.diag2.array()).sqrt().matrix();
  Eigen::MatrixXd s = ws.asDiagonal() * T.entries * ws.cwiseInverse().asDiagonal();
  s = (0.5 * (s + s.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  std::vector<double> mags(es.eigenvalues().size());
  for (size_t i = 0; i < mags.size(); ++i) mags[i] = std::abs(es.eigenvalues()[i]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  return mags[1];
}

Eigen::VectorXd random_beliefs(int n, std::uint64_t key) {
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = degroot::rng::uniform01(key, i);
  return b;
}

}  // namespace

TEST_CASE("learning matrix rows on a path at alpha = 1") {
  auto T = build_learning_matrix(path4(), WeightFunction::power(1.0));
  CHECK(T.n == 4);
  // vertex 1 splits between degree-1 and degree-2 neighbors as 1:2
  CHECK(T.entries(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(T.entries(1, 1) == 0.0);
  CHECK(T.entries(1, 2) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(T.entries(1, 3) == 0.0);
  CHECK(T.entries(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
  for (int i = 0; i < 4; ++i)
    CHECK(T.entries.row(i).sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("learning matrix rows on a star at alpha = 1") {
  auto T = build_learning_matrix(star4(), WeightFunction::power(1.0));
  CHECK(T.entries(0, 0) == 0.0);
  for (int leaf = 1; leaf < 4; ++leaf) {
    CHECK(T.entries(0, leaf) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(T.entries(leaf, 0) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("alpha = 0 reduces to the simple random walk") {
  auto spec = degroot::elite_grassroots_spec(20, 40, 2, 0.5, 0.25);
  auto g = degroot::sample_adjacency(spec.block, 5);
  auto T = build_learning_matrix(g, WeightFunction::power(0.0));
  const Eigen::VectorXd d = degroot::degrees(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      CHECK(std::abs(T.entries(i, j) - g.weights(i, j) / d[i]) < 1e-14);
}

TEST_CASE("learning matrix rejects undefined rows") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
  w(0, 1) = w(1, 0) = 1.0;  // vertex 2 isolated
  CHECK_THROWS_AS(build_learning_matrix(graph_from(w), WeightFunction::power(1.0)),
                  std::domain_error);
  CHECK_THROWS_AS(build_learning_matrix(graph_from(w), WeightFunction::power(-1.0)),
                  std::domain_error);
  Eigen::MatrixXd neg = Eigen::MatrixXd::Zero(2, 2);
  neg(0, 1) = neg(1, 0) = -0.5;
  CHECK_THROWS_AS(build_learning_matrix(graph_from(neg), WeightFunction::power(1.0)),
                  std::invalid_argument);
}

TEST_CASE("belief iteration basics") {
  auto spec = degroot::elite_grassroots_spec(15, 30, 2, 0.6, 0.3);
  auto g = degroot::sample_adjacency(spec.block, 21);
  auto T = build_learning_matrix(g, WeightFunction::power(1.5));
  const Eigen::VectorXd b0 = random_beliefs(g.n, 99);

  CHECK((degroot::iterate_beliefs(T, b0, 0) - b0).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::VectorXd constant = Eigen::VectorXd::Constant(g.n, 0.37);
  CHECK((degroot::iterate_beliefs(T, constant, 50) - constant).cwiseAbs().maxCoeff() < 1e-12);

  // row-stochasticity does not drift over long products
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.n);
  CHECK((degroot::iterate_beliefs(T, ones, 100) - ones).cwiseAbs().maxCoeff() < 1e-10);

  auto traj = degroot::belief_trajectory(T, b0, 7);
  CHECK(traj.size() == 8);
  CHECK((traj[0] - b0).cwiseAbs().maxCoeff() == 0.0);
  CHECK((traj[3] - degroot::iterate_beliefs(T, b0, 3)).cwiseAbs().maxCoeff() < 1e-14);

  CHECK_THROWS_AS(degroot::iterate_beliefs(T, Eigen::VectorXd::Ones(3), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(degroot::iterate_beliefs(T, b0, -1), std::invalid_argument);
}

TEST_CASE("long-run beliefs match the consensus prediction") {
  auto spec = degroot::elite_grassroots_spec(200, 800, 2, 0.4, 0.2);
  auto g = degroot::sample_adjacency(spec.block, 42);
  auto phi = WeightFunction::power(1.0);
  auto T = build_learning_matrix(g, phi);
  const Eigen::VectorXd w = degroot::consensus_limit(g, phi);
  const Eigen::VectorXd b0 = random_beliefs(g.n, 7);
  const double limit = w.dot(b0);
  const Eigen::VectorXd b200 = degroot::iterate_beliefs(T, b0, 200);
  CHECK((b200.array() - limit).abs().maxCoeff() < 1e-6);
}

TEST_CASE("consensus weights on reference graphs") {
  const Eigen::VectorXd w_tri = degroot::consensus_limit(triangle(), WeightFunction::power(2.0));
  for (int i = 0; i < 3; ++i) CHECK(w_tri[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  // star and path are bipartite, so the validated entry point rejects them;
  // the weights themselves are still well-defined from the matrix.
  const Eigen::VectorXd w_star = degroot::consensus_from_matrix(
      build_learning_matrix(star4(), WeightFunction::power(1.0)));
  CHECK(w_star[0] == doctest::Approx(0.5).epsilon(1e-14));
  for (int leaf = 1; leaf < 4; ++leaf)
    CHECK(w_star[leaf] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

  // alpha = 0: plain degree proportions
  const Eigen::VectorXd w_path = degroot::consensus_from_matrix(
      build_learning_matrix(path4(), WeightFunction::power(0.0)));
  CHECK(w_path[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(w_path[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(w_path[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(w_path[3] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("consensus limit requires connectivity and aperiodicity") {
  Eigen::MatrixXd two_pairs = Eigen::MatrixXd::Zero(4, 4);
  two_pairs(0, 1) = two_pairs(1, 0) = 1.0;
  two_pairs(2, 3) = two_pairs(3, 2) = 1.0;
  CHECK_THROWS_AS(degroot::consensus_limit(graph_from(two_pairs), WeightFunction::power(1.0)),
                  std::domain_error);

  Eigen::MatrixXd edge = Eigen::MatrixXd::Zero(2, 2);
  edge(0, 1) = edge(1, 0) = 1.0;
  CHECK_THROWS_AS(degroot::consensus_limit(graph_from(edge), WeightFunction::power(1.0)),
                  std::domain_error);

  edge(0, 0) = 1.0;  // self-loop breaks periodicity
  const Eigen::VectorXd w = degroot::consensus_limit(graph_from(edge), WeightFunction::power(0.0));
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("consensus weights are the left fixed point of T") {
  auto spec = degroot::elite_grassroots_spec(20, 60, 2, 0.5, 0.2);
  auto g = degroot::sample_adjacency(spec.block, 11);
  auto T = build_learning_matrix(g, WeightFunction::power(1.5));
  const Eigen::VectorXd w = degroot::consensus_from_matrix(T);
  CHECK((w.transpose() * T.entries - w.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("weighted convergence distance decays exactly geometrically") {
  auto spec = degroot::elite_grassroots_spec(15, 45, 2, 0.5, 0.25);
  auto g = degroot::sample_adjacency(spec.block, 31);
  auto T = build_learning_matrix(g, WeightFunction::power(1.0));
  const double lam2 = lambda2_magnitude_ref(T);

  CHECK(std::abs(degroot::convergence_distance(T, 1, NormKind::d_weighted) - lam2) < 1e-8);
  for (int t = 1; t <= 20; ++t) {
    const double dist = degroot::convergence_distance(T, t, NormKind::d_weighted);
    CHECK(std::abs(dist - std::pow(lam2, t)) <= 1e-6 * std::pow(lam2, t));
  }
}

TEST_CASE("euclidean distance sits inside the conditioning sandwich") {
  auto spec = degroot::elite_grassroots_spec(15, 45, 2, 0.5, 0.25);
  auto g = degroot::sample_adjacency(spec.block, 31);
  auto T = build_learning_matrix(g, WeightFunction::power(1.0));
  const double lam2 = lambda2_magnitude_ref(T);
  const Eigen::VectorXd wvec = (T.diag1.array() * T.diag2.array()).matrix();
  const double kappa = std::sqrt(wvec.maxCoeff() / wvec.minCoeff());

  for (int t : {1, 2, 5, 10}) {
    const double dist = degroot::convergence_distance(T, t, NormKind::euclidean);
    const double decay = std::pow(lam2, t);
    CHECK(dist <= kappa * decay * (1.0 + 1e-9));
    CHECK(dist >= decay / kappa * (1.0 - 1e-9));
  }
}

TEST_CASE("direct and eigendecomposition distance paths agree at the switch") {
  // Two 5-cliques joined by one edge: slow mixing keeps lambda2^64 far above
  // the roundoff floor of the direct matrix-power path.
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(10, 10);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (i != j) {
        w(i, j) = 1.0;
        w(5 + i, 5 + j) = 1.0;
      }
  w(4, 5) = w(5, 4) = 1.0;
  auto T = build_learning_matrix(graph_from(w), WeightFunction::power(1.0));
  const double lam2 = lambda2_magnitude_ref(T);
  REQUIRE(lam2 > 0.8);

  const double d64 = degroot::convergence_distance(T, 64, NormKind::d_weighted);   // direct
  const double d65 = degroot::convergence_distance(T, 65, NormKind::d_weighted);   // eigen
  CHECK(std::abs(d64 - std::pow(lam2, 64)) <= 1e-6 * std::pow(lam2, 64));
  CHECK(std::abs(d65 - std::pow(lam2, 65)) <= 1e-6 * std::pow(lam2, 65));

  const double e64 = degroot::convergence_distance(T, 64, NormKind::euclidean);
  const double e65 = degroot::convergence_distance(T, 65, NormKind::euclidean);
  CHECK(e65 <= e64);
  CHECK(e65 >= e64 * lam2 * 0.1);  // same decay scale across the switch
}

TEST_CASE("max-degree consensus weight grows with alpha") {
  auto spec = degroot::elite_grassroots_spec(20, 80, 2, 0.5, 0.2);
  auto g = degroot::sample_adjacency(spec.block, 11);
  const Eigen::VectorXd d = degroot::degrees(g);
  Eigen::Index jmax = 0;
  d.maxCoeff(&jmax);
  double prev = -1.0;
  for (double alpha : {-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0}) {
    const double wj = degroot::consensus_limit(g, WeightFunction::power(alpha))[jmax];
    CHECK(wj > prev);
    prev = wj;
  }
}

TEST_CASE("belief trajectory CSV format") {
  auto T = build_learning_matrix(triangle(), WeightFunction::power(0.0));
  Eigen::VectorXd b0(3);
  b0 << 1.0, 0.0, 0.25;
  auto traj = degroot::belief_trajectory(T, b0, 1);
  std::ostringstream out;
  degroot::write_belief_csv(out, traj);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,vertex_id,belief");
  std::getline(in, line);
  CHECK(line == "0,0,1");
  std::getline(in, line);
  CHECK(line == "0,1,0");
  std::getline(in, line);
  CHECK(line == "0,2,0.25");
  std::getline(in, line);
  CHECK(line == "1,0,0.125");  // (0 + 0.25)/2
  int data_lines = 4;
  while (std::getline(in, line))
    if (!line.empty()) ++data_lines;
  CHECK(data_lines == 6);
}
