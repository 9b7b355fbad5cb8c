#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace degroot {

enum class GraphKind { realized, expected, perturbed };

std::string to_string(GraphKind kind);
GraphKind graph_kind_from_string(const std::string& s);

// Symmetric weighted network with group labels. `weights` entries lie in
// [0, 1]: binary for realized draws, fractional for expected or perturbed
// matrices. Immutable by convention after construction.
struct Graph {
  int n = 0;
  int num_groups = 0;
  Eigen::MatrixXd weights;    // n x n, exactly symmetric
  std::vector<int> group_of;  // size n, labels in [0, num_groups)
  GraphKind kind = GraphKind::realized;
};

// Row sums, Kahan-compensated in ascending column order, so that derived
// expected degrees can be compared bit-for-bit against these sums.
Eigen::VectorXd degrees(const Graph& g);

// Connectivity on the positive-weight pattern.
bool is_connected(const Graph& g);
std::vector<std::vector<int>> connected_components(const Graph& g);

// Aperiodicity of the induced update chain: a positive self-loop or an odd
// cycle (non-bipartite positive pattern) suffices.
bool is_aperiodic(const Graph& g);

// Text serialization: header "n m kind", one line of n group labels, then n
// lines of n space-separated weights. Lossless for realized graphs; weighted
// entries are printed with 17 significant digits (exact double round-trip).
void save_graph(const Graph& g, std::ostream& out);
Graph load_graph(std::istream& in);
void save_graph_file(const Graph& g, const std::string& path);
Graph load_graph_file(const std::string& path);

}  // namespace degroot
