#include "degroot/learning.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace degroot {

namespace {

Eigen::MatrixXd matrix_power(Eigen::MatrixXd base, int t) {
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(base.rows(), base.cols());
  while (t > 0) {
    if (t & 1) result = (result * base).eval();
    t >>= 1;
    if (t > 0) base = (base * base).eval();
  }
  return result;
}

double spectral_norm(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.transpose() * m,
                                                    Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace

LearningMatrix build_learning_matrix(const Graph& graph, const WeightFunction& phi) {
  const int n = graph.n;
  if (n <= 0) throw std::invalid_argument("build_learning_matrix: empty graph");
  if (graph.weights.minCoeff() < 0.0)
    throw std::invalid_argument("build_learning_matrix: negative edge weight");

  const Eigen::VectorXd d = degrees(graph);
  Eigen::VectorXd phiv(n);
  for (int i = 0; i < n; ++i) {
    phiv[i] = phi.evaluate(d[i]);
    if (!std::isfinite(phiv[i]) || phiv[i] < 0.0)
      throw std::domain_error("build_learning_matrix: phi produced an invalid weight at d = " +
                              std::to_string(d[i]));
  }

  LearningMatrix T;
  T.n = n;
  T.source = graph.kind;
  T.alpha = phi.alpha();
  T.diag2 = phiv;
  T.diag1 = graph.weights * phiv;
  for (int i = 0; i < n; ++i)
    if (!(T.diag1[i] > 0.0))
      throw std::domain_error("build_learning_matrix: vertex " + std::to_string(i) +
                              " has zero total neighbor weight; its update row is undefined");
  T.entries = T.diag1.cwiseInverse().asDiagonal() * graph.weights * phiv.asDiagonal();
  return T;
}

Eigen::VectorXd iterate_beliefs(const LearningMatrix& T, const Eigen::VectorXd& b0, int t) {
  if (b0.size() != T.n) throw std::invalid_argument("iterate_beliefs: belief size mismatch");
  if (t < 0) throw std::invalid_argument("iterate_beliefs: t must be nonnegative");
  Eigen::VectorXd b = b0;
  for (int step = 0; step < t; ++step) b = T.entries * b;
  return b;
}

std::vector<Eigen::VectorXd> belief_trajectory(const LearningMatrix& T,
                                               const Eigen::VectorXd& b0, int t_max) {
  if (b0.size() != T.n) throw std::invalid_argument("belief_trajectory: belief size mismatch");
  if (t_max < 0) throw std::invalid_argument("belief_trajectory: t_max must be nonnegative");
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<size_t>(t_max) + 1);
  out.push_back(b0);
  for (int step = 0; step < t_max; ++step) out.push_back(T.entries * out.back());
  return out;
}

Eigen::VectorXd consensus_from_matrix(const LearningMatrix& T) {
  const Eigen::VectorXd w = (T.diag1.array() * T.diag2.array()).matrix();
  const double total = w.sum();
  if (!(total > 0.0))
    throw std::domain_error("consensus_from_matrix: nonpositive total weight");
  return w / total;
}

Eigen::VectorXd consensus_limit(const Graph& graph, const WeightFunction& phi) {
  if (!is_connected(graph))
    throw std::domain_error("consensus_limit: graph is disconnected; beliefs do not merge");
  if (!is_aperiodic(graph))
    throw std::domain_error("consensus_limit: graph is periodic (bipartite, no self-loops); "
                            "beliefs oscillate instead of converging");
  return consensus_from_matrix(build_learning_matrix(graph, phi));
}

double convergence_distance(const LearningMatrix& T, int t, NormKind norm) {
  if (t < 0) throw std::invalid_argument("convergence_distance: t must be nonnegative");
  const int n = T.n;
  const Eigen::VectorXd wvec = (T.diag1.array() * T.diag2.array()).matrix();
  const Eigen::VectorXd w = wvec / wvec.sum();
  const Eigen::VectorXd ws = wvec.array().sqrt();  // conjugation is scale-invariant

  if (t <= 64) {
    Eigen::MatrixXd m = matrix_power(T.entries, t);
    m.noalias() -= Eigen::VectorXd::Ones(n) * w.transpose();
    if (norm == NormKind::d_weighted)
      m = ws.asDiagonal() * m * ws.cwiseInverse().asDiagonal();
    return spectral_norm(m);
  }

  Eigen::MatrixXd s = ws.asDiagonal() * T.entries * ws.cwiseInverse().asDiagonal();
  s = (0.5 * (s + s.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  Eigen::Index top = 0;
  (es.eigenvalues().array() - 1.0).abs().minCoeff(&top);

  if (norm == NormKind::d_weighted) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (i != top)
        best = std::max(best, std::pow(std::abs(es.eigenvalues()[i]), static_cast<double>(t)));
    return best;
  }

  Eigen::MatrixXd st = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == top) continue;
    const double scale = std::pow(es.eigenvalues()[i], static_cast<double>(t));
    if (scale != 0.0)
      st.noalias() += scale * es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose();
  }
  const Eigen::MatrixXd m = ws.cwiseInverse().asDiagonal() * st * ws.asDiagonal();
  return spectral_norm(m);
}

void write_belief_csv(std::ostream& out, const std::vector<Eigen::VectorXd>& trajectory) {
  out << "t,vertex_id,belief\n";
  char buf[64];
  for (size_t t = 0; t < trajectory.size(); ++t) {
    for (Eigen::Index i = 0; i < trajectory[t].size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", trajectory[t][i]);
      out << t << ',' << i << ',' << buf << '\n';
    }
  }
}

}  // namespace degroot
