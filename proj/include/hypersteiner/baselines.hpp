#pragma once

// Neighbor Joining topology inference and its embedding into the Klein disk.

#include <chrono>
#include <cstdint>
#include <utility>
#include <vector>

#include "hypersteiner/errors.hpp"
#include "hypersteiner/heuristics.hpp"
#include "hypersteiner/klein.hpp"
#include "hypersteiner/random.hpp"
#include "hypersteiner/riemannian.hpp"
#include "hypersteiner/tree.hpp"

namespace hypersteiner {

struct DistanceMatrix {
  int n = 0;
  std::vector<double> d;  // row-major n x n

  double operator()(int i, int j) const { return d[static_cast<std::size_t>(i) * n + j]; }
  double& operator()(int i, int j) { return d[static_cast<std::size_t>(i) * n + j]; }
};

inline DistanceMatrix hyperbolic_distances(const std::vector<KleinPoint>& points) {
  DistanceMatrix dm;
  dm.n = static_cast<int>(points.size());
  dm.d.assign(static_cast<std::size_t>(dm.n) * dm.n, 0.0);
  for (int i = 0; i < dm.n; ++i) {
    for (int j = i + 1; j < dm.n; ++j) {
      const double v = distance(points[i], points[j]);
      dm(i, j) = v;
      dm(j, i) = v;
    }
  }
  return dm;
}

/// Unrooted tree shape: leaves are nodes 0..n-1, internal nodes n..2n-3.
struct Topology {
  int leaves = 0;
  std::vector<int> internal;
  std::vector<std::pair<int, int>> edges;
};

/// Neighbor Joining with the Q-criterion; ties go to the lexicographically
/// smallest (i, j) over the active node ids.
inline Topology nj_topology(const DistanceMatrix& dm) {
  const int n = dm.n;
  if (n < 3) throw InputError("nj_topology: needs at least 3 leaves");
  Topology topo;
  topo.leaves = n;

  const int total = 2 * n - 2;
  std::vector<double> dist(static_cast<std::size_t>(total) * total, 0.0);
  const auto at = [&](int i, int j) -> double& { return dist[static_cast<std::size_t>(i) * total + j]; };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) at(i, j) = dm(i, j);
  }
  std::vector<int> active(n);
  for (int i = 0; i < n; ++i) active[i] = i;
  int next = n;

  while (active.size() > 3) {
    const int m = static_cast<int>(active.size());
    std::vector<double> row(m, 0.0);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) row[a] += at(active[a], active[b]);
    }
    int best_a = 0;
    int best_b = 1;
    double best_q = 0.0;
    bool first = true;
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b < m; ++b) {
        const double q = (m - 2) * at(active[a], active[b]) - row[a] - row[b];
        if (first || q < best_q) {
          best_q = q;
          best_a = a;
          best_b = b;
          first = false;
        }
      }
    }
    const int i = active[best_a];
    const int j = active[best_b];
    const int u = next++;
    topo.internal.push_back(u);
    topo.edges.emplace_back(i, u);
    topo.edges.emplace_back(j, u);
    for (int k : active) {
      if (k == i || k == j) continue;
      const double v = 0.5 * (at(i, k) + at(j, k) - at(i, j));
      at(u, k) = v;
      at(k, u) = v;
    }
    active.erase(active.begin() + best_b);
    active.erase(active.begin() + best_a);
    active.push_back(u);
  }
  const int center = next++;
  topo.internal.push_back(center);
  for (int k : active) topo.edges.emplace_back(k, center);
  return topo;
}

/// Default optimizer settings of the Neighbor Joining embedding.
inline GdConfig nj_gd_config() {
  GdConfig gd;
  gd.learning_rate = 1.0;
  return gd;
}

/// Embeds the Neighbor Joining topology of the terminals: internal nodes
/// are drawn independently from the wrapped Gaussian G(0, 0.1) and then
/// optimised with the topology fixed.
inline SolveResult nj_embed(const std::vector<KleinPoint>& terminals, std::uint64_t seed,
                            const GdConfig& gd = nj_gd_config()) {
  const auto start = std::chrono::steady_clock::now();
  if (terminals.size() < 3) throw InputError("nj_embed: needs at least 3 terminals");
  const Topology topo = nj_topology(hyperbolic_distances(terminals));
  const double mst_length = mst(terminals).total_length();

  RandomStream rng(seed);
  Tree tree;
  tree.terminals = terminals;
  const GaussianSpec init{KleinPoint(0.0, 0.0), 0.1};
  for (std::size_t k = 0; k < topo.internal.size(); ++k) tree.steiner.push_back(sample_wrapped_gaussian(init, rng));
  // Internal node n + k is Steiner point k, which is vertex n + k of the tree.
  tree.edges = topo.edges;
  tree = polish(tree, gd);
  return make_result("nj", tree, mst_length, seed, start);
}

}  // namespace hypersteiner
