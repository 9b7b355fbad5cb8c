#include "degroot/block_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "degroot/rng.hpp"

namespace degroot {

int BlockModelSpec::n() const {
  int total = 0;
  for (int size : group_sizes) total += size;
  return total;
}

void BlockModelSpec::validate() const {
  if (m < 1) throw std::invalid_argument("block model: m must be >= 1");
  if (static_cast<int>(group_sizes.size()) != m)
    throw std::invalid_argument("block model: group_sizes length must equal m");
  for (int size : group_sizes)
    if (size < 1) throw std::invalid_argument("block model: every group size must be >= 1");
  if (link_probs.rows() != m || link_probs.cols() != m)
    throw std::invalid_argument("block model: link_probs must be m x m");
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l) {
      const double v = link_probs(k, l);
      if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("block model: link probabilities must lie in [0,1]");
      if (link_probs(k, l) != link_probs(l, k))
        throw std::invalid_argument("block model: link_probs must be symmetric");
    }
}

namespace {

std::vector<int> group_labels(const BlockModelSpec& spec) {
  std::vector<int> labels;
  labels.reserve(spec.n());
  for (int k = 0; k < spec.m; ++k)
    labels.insert(labels.end(), spec.group_sizes[k], k);
  return labels;
}

// Expected degree of a group-k vertex: Kahan-compensated sum over the same
// ascending per-entry sequence as a row of the expected adjacency, so that
// (under the self-loop convention) the value matches degrees() of that
// matrix bit-for-bit while staying within an ulp of the exact expectation.
double expected_group_degree(const BlockModelSpec& spec, int k) {
  double sum = 0.0, comp = 0.0;
  for (int l = 0; l < spec.m; ++l) {
    const double p = spec.link_probs(k, l);
    int count = spec.group_sizes[l];
    if (l == k && !spec.self_loops) count -= 1;  // the zeroed diagonal entry
    for (int r = 0; r < count; ++r) {
      const double y = p - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
  }
  return sum;
}

}  // namespace

EliteGrassrootsSpec elite_grassroots_spec(int n1, int n2, int m, double p, double q) {
  if (m < 2) throw std::invalid_argument("elite-grassroots: m must be >= 2");
  if (n1 < 1 || n2 < 1)
    throw std::invalid_argument("elite-grassroots: group sizes must be >= 1");
  if (n1 == n2)
    throw std::invalid_argument("elite-grassroots: n1 must differ from n2 (two group sizes)");
  if (!(p > 0.0 && p <= 1.0) || !(q > 0.0 && q <= 1.0))
    throw std::invalid_argument("elite-grassroots: p and q must lie in (0,1]");

  EliteGrassrootsSpec spec;
  spec.n1 = n1;
  spec.n2 = n2;
  spec.m = m;
  spec.p = p;
  spec.q = q;
  spec.block.m = m;
  spec.block.group_sizes.assign(m, n2);
  spec.block.group_sizes[0] = n1;
  spec.block.link_probs = Eigen::MatrixXd::Constant(m, m, q);
  spec.block.link_probs.diagonal().setConstant(p);
  spec.block.self_loops = true;
  spec.block.validate();

  spec.d1_star = expected_group_degree(spec.block, 0);
  spec.d2_star = expected_group_degree(spec.block, 1);
  if (spec.d1_star == spec.d2_star) {
    std::ostringstream msg;
    msg << "elite-grassroots: degenerate expected degrees d1* = d2* = " << spec.d1_star
        << " (no elite/grassroots distinction; with n1 != n2 this means p = q)";
    throw std::invalid_argument(msg.str());
  }
  spec.group1_is_elite = spec.d1_star > spec.d2_star;
  return spec;
}

Graph sample_adjacency(const BlockModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  const int n = spec.n();
  Graph g;
  g.n = n;
  g.num_groups = spec.m;
  g.group_of = group_labels(spec);
  g.kind = GraphKind::realized;
  g.weights = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int jstart = spec.self_loops ? i : i + 1;
    for (int j = jstart; j < n; ++j) {
      const double prob = spec.link_probs(g.group_of[i], g.group_of[j]);
      const std::uint64_t cell = static_cast<std::uint64_t>(i) * n + j;
      const double edge = rng::uniform01(seed, cell) < prob ? 1.0 : 0.0;
      g.weights(i, j) = edge;
      g.weights(j, i) = edge;
    }
  }
  return g;
}

Graph expected_adjacency(const BlockModelSpec& spec) {
  spec.validate();
  const int n = spec.n();
  Graph g;
  g.n = n;
  g.num_groups = spec.m;
  g.group_of = group_labels(spec);
  g.kind = GraphKind::expected;
  g.weights.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g.weights(i, j) = spec.link_probs(g.group_of[i], g.group_of[j]);
  if (!spec.self_loops) g.weights.diagonal().setZero();
  return g;
}

Graph perturb(const Graph& g, const PerturbationSpec& pert) {
  if (!(pert.delta >= 0.0 && pert.delta <= 1.0))
    throw std::invalid_argument("perturb: delta must lie in [0,1]");
  if (g.kind == GraphKind::perturbed)
    throw std::invalid_argument("perturb: input must be a realized or expected graph");
  Graph out = g;
  out.kind = GraphKind::perturbed;
  const int n = g.n;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const std::uint64_t cell = static_cast<std::uint64_t>(i) * n + j;
      const double eps = pert.noise.apply(rng::uniform01(pert.seed, cell));
      const double w = (1.0 - pert.delta) * g.weights(i, j) + pert.delta * eps;
      out.weights(i, j) = w;
      out.weights(j, i) = w;
    }
  }
  return out;
}

AssumptionReport check_assumptions(const BlockModelSpec& spec, double density_threshold) {
  spec.validate();
  const int n = spec.n();
  AssumptionReport report;
  report.density_threshold = density_threshold;

  double min_degree = expected_group_degree(spec, 0);
  for (int k = 1; k < spec.m; ++k)
    min_degree = std::min(min_degree, expected_group_degree(spec, k));
  report.tau_n = min_degree / n;
  report.density_score = report.tau_n / std::sqrt(std::log(static_cast<double>(n)) / n);
  report.density_pass = report.density_score >= density_threshold;

  int min_size = spec.group_sizes[0];
  for (int size : spec.group_sizes) min_size = std::min(min_size, size);
  report.min_group_fraction = static_cast<double>(min_size) / n;
  report.no_vanishing_pass = report.min_group_fraction >= 0.01;

  double max_entry = 0.0;
  double min_positive = std::numeric_limits<double>::infinity();
  for (int k = 0; k < spec.m; ++k)
    for (int l = 0; l < spec.m; ++l) {
      const double v = spec.link_probs(k, l);
      max_entry = std::max(max_entry, v);
      if (v > 0.0) min_positive = std::min(min_positive, v);
      else report.zero_prob_entries = true;
    }
  if (std::isfinite(min_positive) && min_positive > 0.0) {
    report.density_ratio = max_entry / min_positive;
    report.comparable_pass = report.density_ratio <= 100.0;
  } else {
    report.density_ratio = std::numeric_limits<double>::infinity();
    report.comparable_pass = false;
  }
  return report;
}

std::string format_report(const AssumptionReport& r) {
  std::ostringstream out;
  out << "tau_n = " << r.tau_n << "\n"
      << "density_score = " << r.density_score << " (threshold " << r.density_threshold
      << "): " << (r.density_pass ? "pass" : "fail") << "\n"
      << "min_group_fraction = " << r.min_group_fraction
      << " (threshold 0.01): " << (r.no_vanishing_pass ? "pass" : "fail") << "\n"
      << "density_ratio = " << r.density_ratio
      << " (threshold 100): " << (r.comparable_pass ? "pass" : "fail");
  if (r.zero_prob_entries)
    out << "\nwarning: zero linking probabilities present; ratio uses positive entries only";
  return out.str();
}

}  // namespace degroot
