#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "degroot/graph.hpp"

namespace degroot {

// Stochastic block model: groups k = 0..m-1 with sizes group_sizes[k] and a
// symmetric linking matrix P. Edges (including the diagonal, unless
// self_loops is disabled) are independent Bernoulli(P_{kl}).
struct BlockModelSpec {
  int m = 0;
  std::vector<int> group_sizes;
  Eigen::MatrixXd link_probs;
  bool self_loops = true;  // draw diagonal entries; disable for sensitivity checks

  int n() const;
  void validate() const;  // throws std::invalid_argument on violation
};

// Two-parameter block model: within-group probability p, between-group q,
// one group of size n1 and m-1 groups of size n2. The group with the larger
// expected degree is the elite side.
struct EliteGrassrootsSpec {
  BlockModelSpec block;
  int n1 = 0;
  int n2 = 0;
  int m = 0;
  double p = 0.0;
  double q = 0.0;
  double d1_star = 0.0;  // expected degree of group-0 vertices
  double d2_star = 0.0;  // expected degree of every other vertex
  bool group1_is_elite = false;

  int n() const { return n1 + (m - 1) * n2; }
};

// Throws std::invalid_argument for n1 == n2, out-of-range p/q, m < 2, or the
// degenerate d1* == d2* (which, given n1 != n2, happens exactly at p == q).
EliteGrassrootsSpec elite_grassroots_spec(int n1, int n2, int m, double p, double q);

// Bernoulli draws on the upper triangle (diagonal included when
// spec.self_loops), mirrored below. Pure in (spec, seed).
Graph sample_adjacency(const BlockModelSpec& spec, std::uint64_t seed);

// Entrywise expectation R of the sampled adjacency.
Graph expected_adjacency(const BlockModelSpec& spec);

// Noise law on [0, 1] for perturbation: quantile maps a uniform u in [0,1)
// into [0,1]. Default is uniform noise (identity quantile, mean 1/2).
struct NoiseLaw {
  std::string name = "uniform";
  double mean = 0.5;
  std::function<double(double)> quantile;  // empty handle = identity

  double apply(double u) const { return quantile ? quantile(u) : u; }
};

struct PerturbationSpec {
  double delta = 0.0;  // mixing weight in [0, 1]
  NoiseLaw noise;
  std::uint64_t seed = 0;
};

// Mixes the input with symmetric i.i.d. noise: (1-delta)*A_ij + delta*eps_ij,
// eps drawn on the upper triangle and mirrored. delta = 0 returns the input
// weights bit-exactly.
Graph perturb(const Graph& g, const PerturbationSpec& pert);

// Finite-n proxies for the standing assumptions on density, group sizes and
// comparable linking probabilities. Reported, never enforced.
struct AssumptionReport {
  double tau_n = 0.0;               // min_i d_i(R) / n
  double density_score = 0.0;       // tau_n / sqrt(log n / n)
  double min_group_fraction = 0.0;  // min_k n_k / n
  double density_ratio = 0.0;       // max P entry / min positive P entry
  double density_threshold = 5.0;
  bool density_pass = false;
  bool no_vanishing_pass = false;
  bool comparable_pass = false;
  bool zero_prob_entries = false;  // P has zeros: ratio over positive entries only
};

AssumptionReport check_assumptions(const BlockModelSpec& spec,
                                   double density_threshold = 5.0);

std::string format_report(const AssumptionReport& report);

}  // namespace degroot
