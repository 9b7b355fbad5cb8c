#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "degroot/block_model.hpp"
#include "degroot/graph.hpp"
#include "degroot/rng.hpp"
#include "doctest.h"

using namespace degroot;

namespace {

std::vector<double> abs_deviations(const Eigen::MatrixXd& mean, const Eigen::MatrixXd& ref) {
  std::vector<double> devs;
  for (int i = 0; i < mean.rows(); ++i)
    for (int j = i; j < mean.cols(); ++j) devs.push_back(std::abs(mean(i, j) - ref(i, j)));
  return devs;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t k = v.size();
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

}  // namespace

TEST_CASE("elite-grassroots spec derives expected degrees and elite side") {
  const auto two_group_ref = elite_grassroots_spec(200, 800, 2, 0.4, 0.2);
  CHECK(two_group_ref.d1_star == doctest::Approx(240.0).epsilon(1e-14));
  CHECK(two_group_ref.d2_star == doctest::Approx(360.0).epsilon(1e-14));
  CHECK_FALSE(two_group_ref.group1_is_elite);  // group 1 is the grassroots side

  const auto multi_group_ref = elite_grassroots_spec(400, 200, 4, 0.5, 0.3);
  CHECK(multi_group_ref.d1_star == doctest::Approx(380.0).epsilon(1e-14));
  CHECK(multi_group_ref.d2_star == doctest::Approx(340.0).epsilon(1e-14));
  CHECK(multi_group_ref.group1_is_elite);

  // d1* and d2* must equal the realized row sums of the expected adjacency
  // bit-for-bit (same ascending summation order).
  const Graph r = expected_adjacency(two_group_ref.block);
  const Eigen::VectorXd d = degrees(r);
  CHECK(d(0) == two_group_ref.d1_star);
  CHECK(d(199) == two_group_ref.d1_star);
  CHECK(d(200) == two_group_ref.d2_star);
  CHECK(d(999) == two_group_ref.d2_star);
}

TEST_CASE("elite-grassroots spec rejects invalid parameters") {
  CHECK_THROWS_AS(elite_grassroots_spec(100, 300, 2, 0.3, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(elite_grassroots_spec(300, 300, 2, 0.4, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(elite_grassroots_spec(200, 800, 1, 0.4, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(elite_grassroots_spec(200, 800, 2, 0.0, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(elite_grassroots_spec(200, 800, 2, 1.2, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(elite_grassroots_spec(200, 800, 2, 0.4, -0.1), std::invalid_argument);
}

TEST_CASE("sampling is deterministic in (spec, seed)") {
  const auto spec = elite_grassroots_spec(40, 80, 2, 0.4, 0.2);
  const Graph a = sample_adjacency(spec.block, 12345);
  const Graph b = sample_adjacency(spec.block, 12345);
  CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() == 0.0);
  const Graph c = sample_adjacency(spec.block, 12346);
  CHECK((a.weights - c.weights).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("degenerate Bernoulli p=q=1 gives the complete graph with self-loops") {
  BlockModelSpec spec;
  spec.m = 2;
  spec.group_sizes = {3, 5};
  spec.link_probs = Eigen::MatrixXd::Ones(2, 2);
  const Graph g = sample_adjacency(spec, 9);
  CHECK(g.weights.minCoeff() == 1.0);
  CHECK(g.weights.maxCoeff() == 1.0);
}

TEST_CASE("within-block edge density matches the Bernoulli rate") {
  const auto spec = elite_grassroots_spec(200, 800, 2, 0.4, 0.2);
  const Graph g = sample_adjacency(spec.block, 777);
  // Block 1 draws: n1*(n1+1)/2 independent Bernoulli(0.4) cells (diagonal included).
  long edges = 0;
  const long cells = 200 * 201 / 2;
  for (int i = 0; i < 200; ++i)
    for (int j = i; j < 200; ++j) edges += g.weights(i, j) > 0.0 ? 1 : 0;
  const double density = static_cast<double>(edges) / cells;
  const double four_sd = 4.0 * std::sqrt(0.4 * 0.6 / cells);
  CHECK(std::abs(density - 0.4) <= four_sd);
}

TEST_CASE("sampled graphs are exactly symmetric with 0/1 entries") {
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint64_t key = rng::derive(2024, trial);
    const int n1 = 3 + static_cast<int>(rng::at(key, 0) % 8);
    const int n2 = 3 + static_cast<int>(rng::at(key, 1) % 8);
    const int m = 2 + static_cast<int>(rng::at(key, 2) % 3);
    BlockModelSpec spec;
    spec.m = m;
    spec.group_sizes.assign(m, n2);
    spec.group_sizes[0] = n1;
    spec.link_probs = Eigen::MatrixXd::Constant(m, m, 0.1 + 0.4 * rng::uniform01(key, 3));
    spec.link_probs.diagonal().setConstant(0.1 + 0.8 * rng::uniform01(key, 4));
    const Graph g = sample_adjacency(spec, rng::at(key, 5));
    CHECK((g.weights - g.weights.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j) {
        const double w = g.weights(i, j);
        REQUIRE((w == 0.0 || w == 1.0));
      }
    const Graph pg = perturb(g, {0.5, NoiseLaw{}, rng::at(key, 6)});
    CHECK((pg.weights - pg.weights.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(pg.weights.minCoeff() >= 0.0);
    CHECK(pg.weights.maxCoeff() <= 1.0);
  }
}

TEST_CASE("expected adjacency holds block-constant probabilities") {
  SUBCASE("single group collapses to a constant matrix") {
    BlockModelSpec spec;
    spec.m = 1;
    spec.group_sizes = {4};
    spec.link_probs = Eigen::MatrixXd::Constant(1, 1, 0.5);
    const Graph r = expected_adjacency(spec);
    CHECK(r.weights.minCoeff() == 0.5);
    CHECK(r.weights.maxCoeff() == 0.5);
  }
  SUBCASE("row sums reproduce the expected degrees") {
    const auto spec = elite_grassroots_spec(200, 800, 2, 0.4, 0.2);
    const Eigen::VectorXd d = degrees(expected_adjacency(spec.block));
    for (int i = 0; i < 200; ++i) REQUIRE(d(i) == doctest::Approx(240.0).epsilon(1e-14));
    for (int i = 200; i < 1000; ++i) REQUIRE(d(i) == doctest::Approx(360.0).epsilon(1e-14));
  }
}

TEST_CASE("sample mean approaches the expected adjacency") {
  const auto spec = elite_grassroots_spec(10, 20, 2, 0.4, 0.2);
  const Graph r = expected_adjacency(spec.block);
  const int n = r.n;

  // Median entrywise error shrinks roughly like 1/sqrt(k).
  std::vector<double> med_at_k;
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  int done = 0;
  for (int k : {10, 100, 1000}) {
    for (; done < k; ++done)
      sum += sample_adjacency(spec.block, rng::derive(55, done)).weights;
    med_at_k.push_back(median(abs_deviations(sum / k, r.weights)));
  }
  CHECK(med_at_k[1] < med_at_k[0]);
  CHECK(med_at_k[2] < med_at_k[1]);

  // After 200 draws the typical (median) entry error is below 0.05.
  Eigen::MatrixXd sum200 = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < 200; ++k)
    sum200 += sample_adjacency(spec.block, rng::derive(77, k)).weights;
  CHECK(median(abs_deviations(sum200 / 200, r.weights)) <= 0.05);
}

TEST_CASE("perturbation mixes toward the noise law") {
  const auto spec = elite_grassroots_spec(4, 8, 2, 0.4, 0.2);
  const Graph r = expected_adjacency(spec.block);

  SUBCASE("delta=0 is the bit-exact identity") {
    const Graph same = perturb(r, {0.0, NoiseLaw{}, 42});
    CHECK((same.weights - r.weights).cwiseAbs().maxCoeff() == 0.0);
    CHECK(same.kind == GraphKind::perturbed);
  }
  SUBCASE("delta=1 is pure noise, independent of the input graph") {
    const Graph other = expected_adjacency(elite_grassroots_spec(4, 8, 2, 0.9, 0.1).block);
    const Graph n1 = perturb(r, {1.0, NoiseLaw{}, 42});
    const Graph n2 = perturb(other, {1.0, NoiseLaw{}, 42});
    CHECK((n1.weights - n2.weights).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("delta=0.3 Monte Carlo mean matches (1-delta)P + delta/2") {
    const int draws = 500;
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(r.n, r.n);
    for (int k = 0; k < draws; ++k)
      sum += perturb(r, {0.3, NoiseLaw{}, rng::derive(99, k)}).weights;
    const Eigen::MatrixXd mean = sum / draws;
    const Eigen::MatrixXd target = 0.7 * r.weights + Eigen::MatrixXd::Constant(r.n, r.n, 0.15);
    CHECK((mean - target).cwiseAbs().maxCoeff() <= 0.02);
  }
  SUBCASE("delta outside [0,1] is rejected") {
    CHECK_THROWS_AS(perturb(r, {1.5, NoiseLaw{}, 1}), std::invalid_argument);
    CHECK_THROWS_AS(perturb(r, {-0.1, NoiseLaw{}, 1}), std::invalid_argument);
  }
}

TEST_CASE("degrees sums rows") {
  SUBCASE("triangle without self-loops") {
    Graph g;
    g.n = 3;
    g.num_groups = 1;
    g.group_of = {0, 0, 0};
    g.weights = Eigen::MatrixXd::Ones(3, 3);
    g.weights.diagonal().setZero();
    const Eigen::VectorXd d = degrees(g);
    CHECK(d(0) == 2.0);
    CHECK(d(1) == 2.0);
    CHECK(d(2) == 2.0);
  }
  SUBCASE("empty graph") {
    Graph g;
    g.n = 3;
    g.num_groups = 1;
    g.group_of = {0, 0, 0};
    g.weights = Eigen::MatrixXd::Zero(3, 3);
    CHECK(degrees(g).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("assumption audit computes finite-n proxies") {
  const auto two_group_ref = elite_grassroots_spec(200, 800, 2, 0.4, 0.2);
  const AssumptionReport rep = check_assumptions(two_group_ref.block);
  CHECK(rep.tau_n == doctest::Approx(0.24).epsilon(1e-12));
  CHECK(rep.density_score == doctest::Approx(2.88764).epsilon(1e-4));
  CHECK_FALSE(rep.density_pass);  // 2.89 < default threshold 5
  CHECK(rep.min_group_fraction == doctest::Approx(0.2));
  CHECK(rep.no_vanishing_pass);
  CHECK(rep.density_ratio == doctest::Approx(2.0));
  CHECK(rep.comparable_pass);
  CHECK_FALSE(rep.zero_prob_entries);

  // Lower threshold flips the density verdict.
  CHECK(check_assumptions(two_group_ref.block, 2.0).density_pass);

  BlockModelSpec even;
  even.m = 2;
  even.group_sizes = {50, 50};
  even.link_probs = Eigen::MatrixXd::Constant(2, 2, 0.2);
  even.link_probs.diagonal().setConstant(0.4);
  CHECK(check_assumptions(even).no_vanishing_pass);

  BlockModelSpec zeros = even;
  zeros.link_probs(0, 1) = zeros.link_probs(1, 0) = 0.0;
  const AssumptionReport zrep = check_assumptions(zeros);
  CHECK(zrep.zero_prob_entries);  // flagged, not fatal
}

TEST_CASE("graph text serialization round-trips") {
  const auto spec = elite_grassroots_spec(6, 3, 2, 0.5, 0.25);

  SUBCASE("realized graphs are lossless") {
    const Graph g = sample_adjacency(spec.block, 31);
    std::stringstream buf;
    save_graph(g, buf);
    const Graph back = load_graph(buf);
    CHECK(back.kind == GraphKind::realized);
    CHECK(back.group_of == g.group_of);
    CHECK((back.weights - g.weights).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("weighted graphs round-trip within 1e-15") {
    Graph g = perturb(expected_adjacency(spec.block), {0.37, NoiseLaw{}, 5});
    std::stringstream buf;
    save_graph(g, buf);
    const Graph back = load_graph(buf);
    CHECK(back.kind == GraphKind::perturbed);
    CHECK((back.weights - g.weights).cwiseAbs().maxCoeff() <= 1e-15);
  }
  SUBCASE("corrupt headers are rejected") {
    std::stringstream buf("3 1 nonsense\n0 0 0\n");
    CHECK_THROWS(load_graph(buf));
  }
}

TEST_CASE("connectivity and aperiodicity helpers") {
  Graph path;
  path.n = 4;
  path.num_groups = 1;
  path.group_of = {0, 0, 0, 0};
  path.weights = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 0; i + 1 < 4; ++i) path.weights(i, i + 1) = path.weights(i + 1, i) = 1.0;
  CHECK(is_connected(path));
  CHECK_FALSE(is_aperiodic(path));  // bipartite, no self-loop

  Graph two = path;
  two.weights(1, 2) = two.weights(2, 1) = 0.0;
  CHECK_FALSE(is_connected(two));
  CHECK(connected_components(two).size() == 2);

  Graph triangle;
  triangle.n = 3;
  triangle.num_groups = 1;
  triangle.group_of = {0, 0, 0};
  triangle.weights = Eigen::MatrixXd::Ones(3, 3);
  triangle.weights.diagonal().setZero();
  CHECK(is_aperiodic(triangle));  // odd cycle

  Graph loop = path;
  loop.weights(0, 0) = 1.0;
  CHECK(is_aperiodic(loop));  // self-loop
}
