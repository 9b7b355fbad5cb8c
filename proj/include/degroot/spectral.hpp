#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "degroot/block_model.hpp"
#include "degroot/learning.hpp"
#include "degroot/weight_function.hpp"

namespace degroot {

// Full-spectrum view of a learning matrix. `eigenvalues` is sorted by
// descending magnitude (ties by descending value), so eigenvalues[0] is the
// Perron root and eigenvalues[1] is lambda2. Closed-form reports carry the
// reduced m-dimensional spectrum instead of all n values.
struct SpectralReport {
  Eigen::VectorXd eigenvalues;
  double lambda2 = 0.0;  // signed second eigenvalue by magnitude
  double abs_lambda2 = 0.0;
  // Unit-norm eigenvector for lambda2 in the original coordinates. Empty
  // when lambda2 belongs to a multi-dimensional eigenspace family whose
  // descriptor lives in WorstBeliefs instead.
  Eigen::VectorXd second_eigenvector;
  std::string method;  // "dense_numeric" | "closed_form"
  std::string branch;  // "a_minus_e" | "c_minus_d" | "" for numeric reports
  int case_id = 0;     // 1 | 2 | 3 for closed form, 0 for numeric
  int multiplicity = 1;  // eigenvalues whose magnitude matches |lambda2| within 1e-12
};

// Spectrum of T = diag1^{-1} A diag2 through the symmetric conjugation
// S = (diag2/diag1)^{1/2} A (diag2/diag1)^{1/2}; eigenvectors are mapped
// back through the similarity. Throws on nonpositive diagonals.
SpectralReport eigen_symmetrized(const LearningMatrix& T);
SpectralReport eigen_symmetrized(const Eigen::MatrixXd& entries,
                                 const Eigen::VectorXd& diag1,
                                 const Eigen::VectorXd& diag2);

// Subdominant eigenvalue only (no eigenvectors): the cheap path for sweeps.
double lambda2_signed(const LearningMatrix& T);
double lambda2_magnitude(const LearningMatrix& T);

// m x m reduction of the expected learning matrix: row 0 is [a, b, ..., b],
// rows k >= 1 are [e, d, ..., c, ..., d] with c on the diagonal. Shares the
// nonzero spectrum with the full expected matrix.
struct FBlockMatrix {
  int m = 0;
  Eigen::MatrixXd matrix;
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0, e = 0.0;
  Eigen::VectorXd diag1;  // row normalizers r_k
  Eigen::VectorXd diag2;  // group mass n_k phi_k (symmetrization data)
};

FBlockMatrix reduce_block_matrix(const EliteGrassrootsSpec& spec, const WeightFunction& phi);

// Closed-form subdominant eigenvalue from raw parameters. This permissive
// path accepts p == q or n1 == n2 (where the two-group structure degenerates
// and m = 2 still has a well-defined value); the branch switch threshold is
// NaN when the expected degrees coincide. m >= 3 with equal expected degrees
// has no applicable case and throws.
struct ClosedFormLambda2 {
  double lambda2 = 0.0;  // signed, from the selected branch
  double a_minus_e = 0.0;
  double c_minus_d = 0.0;  // meaningful for m >= 3 only
  std::string branch;      // "a_minus_e" | "c_minus_d"
  int case_id = 0;
  double threshold = 0.0;  // alpha where the branch max switches: g^{-1}(n1/n2)
};

ClosedFormLambda2 lambda2_closed_form_params(int n1, int n2, int m, double p, double q,
                                             const WeightFunction& phi);
SpectralReport lambda2_closed_form(const EliteGrassrootsSpec& spec, const WeightFunction& phi);

// Half-open/closed interval on the alpha axis; infinities are open ends.
struct AlphaInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = false;
  bool hi_closed = false;
  bool contains(double alpha) const;
};

// Monotonicity regime of |lambda2| as a function of alpha:
//   case 1 (m = 2):            decreasing on [t_p, inf)
//   case 2 (m >= 3, d1* > d2*): decreasing on (-inf, t_p] and [t_s, inf)
//   case 3 (m >= 3, d1* < d2*): decreasing on (t_s, t_p]
// with t_p = g^{-1}(n1/n2) and t_s the secondary threshold.
struct RegimeClassification {
  int case_id = 0;
  double alpha_threshold = 0.0;  // t_p
  std::optional<double> secondary_threshold;  // t_s, m >= 3 only
  std::vector<AlphaInterval> decreasing_intervals;
  bool contains(double alpha) const;
};

RegimeClassification classify_regime(const EliteGrassrootsSpec& spec,
                                     const WeightFunction& phi);

// The initial beliefs that converge slowest: the lambda2 eigenvector. In the
// a-e branch this is the block-constant vector with the displayed (v21, v22)
// coefficients; in the c-d branch the eigenspace is an (m-2)-dimensional
// family characterized by W-orthogonality (W = D1 D2) to the all-ones vector
// and to the block-constant direction v_prime, and `primary` holds the
// canonical representative: indicator of group 2 minus indicator of group 3,
// metric-projected and normalized.
struct WorstBeliefs {
  bool degenerate = false;  // true on the c-d branch
  Eigen::VectorXd primary;  // unit Euclidean norm, length n
  double lambda2 = 0.0;
  std::string branch;
  int multiplicity = 1;
  double v21 = 0.0, v22 = 0.0;  // block coefficients (a-e branch)
  Eigen::VectorXd v_prime;      // unit-norm fast block direction (c-d branch)
  std::string metric = "w_inner_product";
};

WorstBeliefs worst_initial_beliefs(const EliteGrassrootsSpec& spec, const WeightFunction& phi);

// Canonical member of the degenerate eigenspace; throws for m = 2, which has
// no multi-group dissent direction.
Eigen::VectorXd degenerate_representative(const EliteGrassrootsSpec& spec,
                                          const WeightFunction& phi);

}  // namespace degroot
