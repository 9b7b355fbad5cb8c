#include "degroot/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace degroot {

namespace {

struct Entries {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0, e = 0.0;
};

Entries entries_from_phi(int n1, int n2, int m, double p, double q, double phi1,
                         double phi2) {
  const double den1 = n1 * p * phi1 + (m - 1) * n2 * q * phi2;
  const double den2 = n1 * q * phi1 + n2 * p * phi2 + (m - 2) * n2 * q * phi2;
  Entries ent;
  ent.a = n1 * p * phi1 / den1;
  ent.b = n2 * q * phi2 / den1;
  ent.c = n2 * p * phi2 / den2;
  ent.d = n2 * q * phi2 / den2;
  ent.e = n1 * q * phi1 / den2;
  return ent;
}

// Same entries through the ratio g = phi2/phi1 only: immune to overflow or
// underflow of the raw phi values at extreme alpha.
Entries entries_from_g(int n1, int n2, int m, double p, double q, double gval) {
  Entries ent;
  if (std::isinf(gval)) {
    ent.a = 0.0;
    ent.b = 1.0 / (m - 1);
    ent.c = p / (p + (m - 2) * q);
    ent.d = q / (p + (m - 2) * q);
    ent.e = 0.0;
    return ent;
  }
  const double den1 = n1 * p + (m - 1) * n2 * q * gval;
  const double den2 = n1 * q + n2 * (p + (m - 2) * q) * gval;
  ent.a = n1 * p / den1;
  ent.b = n2 * q * gval / den1;
  ent.c = n2 * p * gval / den2;
  ent.d = n2 * q * gval / den2;
  ent.e = n1 * q / den2;
  return ent;
}

std::vector<int> magnitude_order(const Eigen::VectorXd& vals) {
  std::vector<int> idx(vals.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int i, int j) {
    const double mi = std::abs(vals[i]), mj = std::abs(vals[j]);
    if (mi != mj) return mi > mj;
    if (vals[i] != vals[j]) return vals[i] > vals[j];
    return i < j;
  });
  return idx;
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& entries, const Eigen::VectorXd& ws) {
  Eigen::MatrixXd s = ws.asDiagonal() * entries * ws.cwiseInverse().asDiagonal();
  return (0.5 * (s + s.transpose())).eval();
}

// v21/v22 per the displayed block-eigenvector coefficients; their ratio is
// -(m-1) b / e, which fixes the direction.
void prop2_coefficients(int n1, int n2, int m, const Entries& ent, double& v21,
                        double& v22) {
  const double m1 = m - 1.0;
  v21 = -m1 * ent.b / (ent.e * m1 * n2 + n1 * m1 * m1 * ent.b * ent.b / ent.e);
  v22 = 1.0 / (m1 * n2 + n1 * m1 * m1 * ent.b * ent.b / (ent.e * ent.e));
}

Eigen::VectorXd block_vector(const EliteGrassrootsSpec& spec, double on_group1,
                             double elsewhere) {
  Eigen::VectorXd v(spec.n());
  v.head(spec.n1).setConstant(on_group1);
  v.tail(spec.n() - spec.n1).setConstant(elsewhere);
  return v;
}

// Block-constant weights W_i = (D1*)_ii (D2*)_ii of the expected matrix.
Eigen::VectorXd star_metric_weights(const EliteGrassrootsSpec& spec, double phi1,
                                    double phi2) {
  const double r1 = spec.n1 * spec.p * phi1 + (spec.m - 1) * spec.n2 * spec.q * phi2;
  const double r2 = spec.n1 * spec.q * phi1 + spec.n2 * spec.p * phi2 +
                    (spec.m - 2) * spec.n2 * spec.q * phi2;
  return block_vector(spec, r1 * phi1, r2 * phi2);
}

}  // namespace

SpectralReport eigen_symmetrized(const Eigen::MatrixXd& entries,
                                 const Eigen::VectorXd& diag1,
                                 const Eigen::VectorXd& diag2) {
  const Eigen::Index n = entries.rows();
  if (entries.cols() != n)
    throw std::invalid_argument("eigen_symmetrized: matrix must be square");
  if (diag1.size() != n || diag2.size() != n)
    throw std::invalid_argument("eigen_symmetrized: diagonal size mismatch");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(diag1[i] > 0.0) || !(diag2[i] > 0.0))
      throw std::domain_error("eigen_symmetrized: diagonals must be strictly positive");

  const Eigen::VectorXd ws = (diag1.array() * diag2.array()).sqrt().matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(entries, ws));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigen_symmetrized: eigensolver did not converge");

  const auto order = magnitude_order(es.eigenvalues());
  SpectralReport report;
  report.method = "dense_numeric";
  report.eigenvalues.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    report.eigenvalues[i] = es.eigenvalues()[order[i]];
  if (n >= 2) {
    report.lambda2 = report.eigenvalues[1];
    report.abs_lambda2 = std::abs(report.lambda2);
    Eigen::VectorXd v = ws.cwiseInverse().asDiagonal() * es.eigenvectors().col(order[1]);
    v.normalize();
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0.0) v = -v;
    report.second_eigenvector = v;
    report.multiplicity = 0;
    for (Eigen::Index i = 1; i < n; ++i)
      if (std::abs(std::abs(report.eigenvalues[i]) - report.abs_lambda2) <= 1e-12)
        ++report.multiplicity;
  }
  return report;
}

SpectralReport eigen_symmetrized(const LearningMatrix& T) {
  return eigen_symmetrized(T.entries, T.diag1, T.diag2);
}

double lambda2_signed(const LearningMatrix& T) {
  if (T.n < 2) throw std::invalid_argument("lambda2: need at least two vertices");
  const Eigen::VectorXd ws = (T.diag1.array() * T.diag2.array()).sqrt().matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(T.entries, ws),
                                                    Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("lambda2: eigensolver did not converge");
  const auto order = magnitude_order(es.eigenvalues());
  return es.eigenvalues()[order[1]];
}

double lambda2_magnitude(const LearningMatrix& T) { return std::abs(lambda2_signed(T)); }

FBlockMatrix reduce_block_matrix(const EliteGrassrootsSpec& spec, const WeightFunction& phi) {
  const double phi1 = phi.evaluate(spec.d1_star);
  const double phi2 = phi.evaluate(spec.d2_star);
  const auto ent = entries_from_phi(spec.n1, spec.n2, spec.m, spec.p, spec.q, phi1, phi2);

  FBlockMatrix f;
  f.m = spec.m;
  f.a = ent.a;
  f.b = ent.b;
  f.c = ent.c;
  f.d = ent.d;
  f.e = ent.e;
  f.matrix.setZero(spec.m, spec.m);
  f.matrix(0, 0) = ent.a;
  for (int l = 1; l < spec.m; ++l) f.matrix(0, l) = ent.b;
  for (int k = 1; k < spec.m; ++k) {
    f.matrix(k, 0) = ent.e;
    for (int l = 1; l < spec.m; ++l) f.matrix(k, l) = (l == k) ? ent.c : ent.d;
  }
  f.diag1.resize(spec.m);
  f.diag2.resize(spec.m);
  f.diag1[0] = spec.n1 * spec.p * phi1 + (spec.m - 1) * spec.n2 * spec.q * phi2;
  f.diag2[0] = spec.n1 * phi1;
  for (int k = 1; k < spec.m; ++k) {
    f.diag1[k] = spec.n1 * spec.q * phi1 + spec.n2 * spec.p * phi2 +
                 (spec.m - 2) * spec.n2 * spec.q * phi2;
    f.diag2[k] = spec.n2 * phi2;
  }
  return f;
}

ClosedFormLambda2 lambda2_closed_form_params(int n1, int n2, int m, double p, double q,
                                             const WeightFunction& phi) {
  if (m < 2) throw std::invalid_argument("lambda2_closed_form: m must be at least 2");
  if (n1 < 1 || n2 < 1)
    throw std::invalid_argument("lambda2_closed_form: group sizes must be positive");
  if (!(p > 0.0) || p > 1.0 || !(q > 0.0) || q > 1.0)
    throw std::invalid_argument("lambda2_closed_form: p and q must lie in (0, 1]");

  const double d1s = n1 * p + (m - 1) * n2 * q;
  const double d2s = n1 * q + n2 * p + (m - 2) * n2 * q;
  const double alpha = phi.alpha();

  ClosedFormLambda2 out;
  out.case_id = (m == 2) ? 1 : (d1s > d2s ? 2 : 3);

  Entries ent;
  if (d1s == d2s) {
    if (m >= 3)
      throw std::invalid_argument(
          "lambda2_closed_form: equal expected degrees with m >= 3 fit no case");
    // phi cancels from every entry when the degrees coincide
    ent = entries_from_g(n1, n2, m, p, q, 1.0);
    out.threshold = std::numeric_limits<double>::quiet_NaN();
  } else {
    ent = entries_from_g(n1, n2, m, p, q, g(phi, alpha, d1s, d2s));
    out.threshold = g_inverse(phi, static_cast<double>(n1) / n2, d1s, d2s);
  }
  out.a_minus_e = ent.a - ent.e;
  out.c_minus_d = ent.c - ent.d;

  bool use_ae = true;
  if (m >= 3) {
    // the a-e branch carries the max exactly when g(alpha) <= n1/n2
    use_ae = (out.case_id == 2) ? (alpha >= out.threshold) : (alpha <= out.threshold);
  }
  out.branch = use_ae ? "a_minus_e" : "c_minus_d";
  out.lambda2 = use_ae ? out.a_minus_e : out.c_minus_d;
  return out;
}

SpectralReport lambda2_closed_form(const EliteGrassrootsSpec& spec, const WeightFunction& phi) {
  const auto core =
      lambda2_closed_form_params(spec.n1, spec.n2, spec.m, spec.p, spec.q, phi);

  SpectralReport report;
  report.method = "closed_form";
  report.branch = core.branch;
  report.case_id = core.case_id;
  report.lambda2 = core.lambda2;
  report.abs_lambda2 = std::abs(core.lambda2);

  Eigen::VectorXd vals(spec.m);
  vals[0] = 1.0;
  vals[1] = core.a_minus_e;
  for (int k = 2; k < spec.m; ++k) vals[k] = core.c_minus_d;
  const auto order = magnitude_order(vals);
  report.eigenvalues.resize(spec.m);
  for (int i = 0; i < spec.m; ++i) report.eigenvalues[i] = vals[order[i]];

  report.multiplicity = 0;
  for (int i = 1; i < spec.m; ++i)
    if (std::abs(std::abs(report.eigenvalues[i]) - report.abs_lambda2) <= 1e-12)
      ++report.multiplicity;

  if (core.branch == "a_minus_e") {
    const double phi1 = phi.evaluate(spec.d1_star);
    const double phi2 = phi.evaluate(spec.d2_star);
    const auto ent =
        entries_from_phi(spec.n1, spec.n2, spec.m, spec.p, spec.q, phi1, phi2);
    if (ent.e > 0.0 && std::isfinite(ent.b)) {
      double v21 = 0.0, v22 = 0.0;
      prop2_coefficients(spec.n1, spec.n2, spec.m, ent, v21, v22);
      Eigen::VectorXd v = block_vector(spec, v21, v22);
      v.normalize();
      report.second_eigenvector = v;
    }
  }
  return report;
}

bool AlphaInterval::contains(double alpha) const {
  const bool above = (alpha > lo) || (lo_closed && alpha == lo);
  const bool below = (alpha < hi) || (hi_closed && alpha == hi);
  return above && below;
}

bool RegimeClassification::contains(double alpha) const {
  for (const auto& iv : decreasing_intervals)
    if (iv.contains(alpha)) return true;
  return false;
}

RegimeClassification classify_regime(const EliteGrassrootsSpec& spec,
                                     const WeightFunction& phi) {
  const double d1s = spec.d1_star, d2s = spec.d2_star;
  if (d1s == d2s)
    throw std::invalid_argument("classify_regime: equal expected degrees are degenerate");
  const double inf = std::numeric_limits<double>::infinity();

  RegimeClassification rc;
  rc.alpha_threshold =
      g_inverse(phi, static_cast<double>(spec.n1) / spec.n2, d1s, d2s);
  if (spec.m == 2) {
    rc.case_id = 1;
    rc.decreasing_intervals.push_back({rc.alpha_threshold, inf, true, false});
    return rc;
  }

  const double ratio_s =
      static_cast<double>(spec.n1) / spec.n2 *
      std::sqrt(spec.p / ((spec.m - 1) * (spec.p + (spec.m - 2) * spec.q)));
  const double ts = g_inverse(phi, ratio_s, d1s, d2s);
  rc.secondary_threshold = ts;
  if (d1s > d2s) {
    rc.case_id = 2;
    rc.decreasing_intervals.push_back({-inf, rc.alpha_threshold, false, true});
    rc.decreasing_intervals.push_back({ts, inf, true, false});
  } else {
    rc.case_id = 3;
    rc.decreasing_intervals.push_back({ts, rc.alpha_threshold, false, true});
  }
  return rc;
}

Eigen::VectorXd degenerate_representative(const EliteGrassrootsSpec& spec,
                                          const WeightFunction& phi) {
  if (spec.m == 2)
    throw std::invalid_argument(
        "degenerate_representative: two groups admit no multi-group dissent direction");

  const double phi1 = phi.evaluate(spec.d1_star);
  const double phi2 = phi.evaluate(spec.d2_star);
  const auto ent = entries_from_phi(spec.n1, spec.n2, spec.m, spec.p, spec.q, phi1, phi2);
  const Eigen::VectorXd w = star_metric_weights(spec, phi1, phi2);
  const int n = spec.n();

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  x.segment(spec.n1, spec.n2).setConstant(1.0);
  x.segment(spec.n1 + spec.n2, spec.n2).setConstant(-1.0);

  const auto wdot = [&w](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    return (u.array() * w.array() * v.array()).sum();
  };
  // Both metric projections (against the ones vector and against the block
  // direction v') have coefficients proportional to mass(G2) - mass(G3). The
  // two segments hold n2 copies of the same weight value summed in the same
  // order, so the imbalance is bitwise zero and the subtractions keep the
  // off-support entries exactly zero.
  const double mass2 = w.segment(spec.n1, spec.n2).sum();
  const double mass3 = w.segment(spec.n1 + spec.n2, spec.n2).sum();
  const double imbalance = mass2 - mass3;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  x -= imbalance / w.sum() * ones;

  double v21 = 0.0, v22 = 0.0;
  prop2_coefficients(spec.n1, spec.n2, spec.m, ent, v21, v22);
  const Eigen::VectorXd vp = block_vector(spec, v21, v22);
  x -= v22 * imbalance / wdot(vp, vp) * vp;

  x.normalize();
  return x;
}

WorstBeliefs worst_initial_beliefs(const EliteGrassrootsSpec& spec, const WeightFunction& phi) {
  const auto report = lambda2_closed_form(spec, phi);

  WorstBeliefs wb;
  wb.lambda2 = report.lambda2;
  wb.branch = report.branch;
  wb.multiplicity = report.multiplicity;

  const double phi1 = phi.evaluate(spec.d1_star);
  const double phi2 = phi.evaluate(spec.d2_star);
  const auto ent = entries_from_phi(spec.n1, spec.n2, spec.m, spec.p, spec.q, phi1, phi2);
  prop2_coefficients(spec.n1, spec.n2, spec.m, ent, wb.v21, wb.v22);
  Eigen::VectorXd block = block_vector(spec, wb.v21, wb.v22);
  block.normalize();

  if (report.branch == "a_minus_e") {
    wb.degenerate = false;
    wb.primary = block;
  } else {
    wb.degenerate = true;
    wb.primary = degenerate_representative(spec, phi);
    wb.v_prime = block;
  }
  return wb;
}

}  // namespace degroot
