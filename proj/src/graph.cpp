#include "degroot/graph.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "degroot/rng.hpp"

namespace degroot {

namespace rng {

double normal(std::uint64_t key, std::uint64_t i) {
  double u1 = uniform01(key, 2 * i);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double u2 = uniform01(key, 2 * i + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace rng

std::string to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::realized: return "realized";
    case GraphKind::expected: return "expected";
    case GraphKind::perturbed: return "perturbed";
  }
  throw std::logic_error("unknown GraphKind");
}

GraphKind graph_kind_from_string(const std::string& s) {
  if (s == "realized") return GraphKind::realized;
  if (s == "expected") return GraphKind::expected;
  if (s == "perturbed") return GraphKind::perturbed;
  throw std::invalid_argument("unknown graph kind: " + s);
}

Eigen::VectorXd degrees(const Graph& g) {
  Eigen::VectorXd d(g.n);
  for (int i = 0; i < g.n; ++i) {
    // Kahan-compensated, ascending j on purpose: block-constant expected
    // rows then reproduce the derived expected degrees bit-for-bit.
    double sum = 0.0, comp = 0.0;
    for (int j = 0; j < g.n; ++j) {
      const double y = g.weights(i, j) - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
    d(i) = sum;
  }
  return d;
}

std::vector<std::vector<int>> connected_components(const Graph& g) {
  std::vector<std::vector<int>> components;
  std::vector<char> seen(g.n, 0);
  for (int s = 0; s < g.n; ++s) {
    if (seen[s]) continue;
    std::vector<int> comp;
    std::queue<int> frontier;
    frontier.push(s);
    seen[s] = 1;
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      comp.push_back(u);
      for (int v = 0; v < g.n; ++v) {
        if (!seen[v] && g.weights(u, v) > 0.0) {
          seen[v] = 1;
          frontier.push(v);
        }
      }
    }
    components.push_back(std::move(comp));
  }
  return components;
}

bool is_connected(const Graph& g) {
  if (g.n == 0) return true;
  return connected_components(g).size() == 1;
}

bool is_aperiodic(const Graph& g) {
  for (int i = 0; i < g.n; ++i)
    if (g.weights(i, i) > 0.0) return true;
  // No self-loops: the chain is aperiodic iff the positive pattern has an odd
  // cycle, i.e. the graph is not bipartite. 2-color each component.
  std::vector<int> color(g.n, -1);
  for (int s = 0; s < g.n; ++s) {
    if (color[s] != -1) continue;
    color[s] = 0;
    std::queue<int> frontier;
    frontier.push(s);
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      for (int v = 0; v < g.n; ++v) {
        if (g.weights(u, v) <= 0.0) continue;
        if (color[v] == -1) {
          color[v] = 1 - color[u];
          frontier.push(v);
        } else if (color[v] == color[u]) {
          return true;  // odd cycle found
        }
      }
    }
  }
  return false;
}

namespace {

void write_weight(std::ostream& out, double w) {
  if (w == std::floor(w) && std::abs(w) < 1e15) {
    out << static_cast<long long>(w);
  } else {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", w);
    out << buf;
  }
}

}  // namespace

void save_graph(const Graph& g, std::ostream& out) {
  out << g.n << ' ' << g.num_groups << ' ' << to_string(g.kind) << '\n';
  for (int i = 0; i < g.n; ++i) out << g.group_of[i] << (i + 1 < g.n ? ' ' : '\n');
  if (g.n == 0) out << '\n';
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      if (j) out << ' ';
      write_weight(out, g.weights(i, j));
    }
    out << '\n';
  }
}

Graph load_graph(std::istream& in) {
  Graph g;
  std::string kind;
  if (!(in >> g.n >> g.num_groups >> kind))
    throw std::runtime_error("graph load: bad header");
  g.kind = graph_kind_from_string(kind);
  if (g.n < 0 || g.num_groups < 0) throw std::runtime_error("graph load: negative sizes");
  g.group_of.resize(g.n);
  for (int i = 0; i < g.n; ++i) {
    if (!(in >> g.group_of[i]) || g.group_of[i] < 0 || g.group_of[i] >= g.num_groups)
      throw std::runtime_error("graph load: bad group label");
  }
  g.weights.resize(g.n, g.n);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (!(in >> g.weights(i, j))) throw std::runtime_error("graph load: bad weight");
  return g;
}

void save_graph_file(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  save_graph(g, out);
}

Graph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for read: " + path);
  return load_graph(in);
}

}  // namespace degroot
