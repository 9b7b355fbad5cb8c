#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "degroot/graph.hpp"
#include "degroot/weight_function.hpp"

namespace degroot {

// Row-stochastic update matrix T = D1^{-1} A D2 for degree-weighted
// averaging: entry (i, j) is A_ij phi(alpha, d_j) normalized by row, i.e.
// (D1)_ii = sum_j A_ij phi(alpha, d_j) and (D2)_jj = phi(alpha, d_j). The
// diagonals are kept because W = D1 D2 defines the metric in which T is
// symmetrizable: S = W^{1/2} T W^{-1/2} is symmetric.
struct LearningMatrix {
  int n = 0;
  Eigen::MatrixXd entries;  // T itself, rows summing to one
  Eigen::VectorXd diag1;    // (D1)_ii
  Eigen::VectorXd diag2;    // (D2)_ii
  GraphKind source = GraphKind::realized;
  double alpha = 0.0;
};

// Throws if any vertex has zero total neighbor weight (row of T undefined)
// or the graph has negative weights; degree-0 vertices with negative alpha
// surface as the weight function's own domain error.
LearningMatrix build_learning_matrix(const Graph& graph, const WeightFunction& phi);

// b(t) = T^t b0 by repeated multiplication.
Eigen::VectorXd iterate_beliefs(const LearningMatrix& T, const Eigen::VectorXd& b0, int t);

// All states b(0), b(1), ..., b(t_max).
std::vector<Eigen::VectorXd> belief_trajectory(const LearningMatrix& T,
                                               const Eigen::VectorXd& b0, int t_max);

// Consensus weights w with lim_t T^t = 1 w^T: w_j proportional to
// (D1)_jj (D2)_jj. consensus_limit validates that the limit exists
// (connected and aperiodic); the _from_matrix form trusts the caller.
Eigen::VectorXd consensus_from_matrix(const LearningMatrix& T);
Eigen::VectorXd consensus_limit(const Graph& graph, const WeightFunction& phi);

enum class NormKind { euclidean, d_weighted };

// Operator-norm distance ||T^t - 1 w^T|| in the chosen metric. d_weighted
// conjugates by W^{1/2} first, which makes the distance exactly the decay of
// the subdominant spectrum. Small t is computed directly from the matrix
// power; past t = 64 the symmetrized eigendecomposition is used instead
// (identical up to roundoff, avoids long product chains).
double convergence_distance(const LearningMatrix& T, int t, NormKind norm);

// CSV rows "t,vertex_id,belief" for a trajectory, t counted from 0.
void write_belief_csv(std::ostream& out, const std::vector<Eigen::VectorXd>& trajectory);

}  // namespace degroot
