#pragma once

// Steiner trees over terminals plus Steiner points.

#include <algorithm>
#include <utility>
#include <vector>

#include "hypersteiner/errors.hpp"
#include "hypersteiner/klein.hpp"
#include "hypersteiner/triangulation.hpp"

namespace hypersteiner {

/// Vertex i < terminals.size() is a terminal, the rest are Steiner points.
struct Tree {
  std::vector<KleinPoint> terminals;
  std::vector<KleinPoint> steiner;
  std::vector<IndexPair> edges;

  int terminal_count() const { return static_cast<int>(terminals.size()); }
  int vertex_count() const { return static_cast<int>(terminals.size() + steiner.size()); }
  bool is_steiner(int i) const { return i >= terminal_count(); }

  const KleinPoint& vertex(int i) const {
    return i < terminal_count() ? terminals[i] : steiner[i - terminal_count()];
  }

  KleinPoint& vertex(int i) {
    return i < terminal_count() ? terminals[i] : steiner[i - terminal_count()];
  }

  std::vector<KleinPoint> vertices() const {
    std::vector<KleinPoint> out(terminals);
    out.insert(out.end(), steiner.begin(), steiner.end());
    return out;
  }

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(vertex_count());
    for (auto [u, v] : edges) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
    return adj;
  }

  std::vector<int> degrees() const {
    std::vector<int> deg(vertex_count(), 0);
    for (auto [u, v] : edges) {
      ++deg[u];
      ++deg[v];
    }
    return deg;
  }
};

/// Total hyperbolic length; edge lengths are summed in increasing order so
/// the value does not depend on the edge order.
inline double tree_length(const Tree& tree) {
  std::vector<double> lengths;
  lengths.reserve(tree.edges.size());
  for (auto [u, v] : tree.edges) lengths.push_back(distance(tree.vertex(u), tree.vertex(v)));
  std::sort(lengths.begin(), lengths.end());
  double sum = 0.0;
  for (double l : lengths) sum += l;
  return sum;
}

/// Connected, acyclic and spanning every vertex, with valid edge indices.
inline bool is_spanning_tree(const Tree& tree) {
  const int n = tree.vertex_count();
  if (n == 0) return false;
  if (static_cast<int>(tree.edges.size()) != n - 1) return false;
  UnionFind uf(static_cast<std::size_t>(n));
  for (auto [u, v] : tree.edges) {
    if (u < 0 || v < 0 || u >= n || v >= n || u == v) return false;
    if (!uf.unite(u, v)) return false;
  }
  return true;
}

/// Minimum spanning tree over terminals and Steiner points together.
inline Tree mst_tree(const std::vector<KleinPoint>& terminals, const std::vector<KleinPoint>& steiner) {
  Tree tree;
  tree.terminals = terminals;
  tree.steiner = steiner;
  const auto all = tree.vertices();
  if (all.size() >= 2) {
    for (const auto& e : mst(all).edges) tree.edges.emplace_back(e.i, e.j);
  }
  return tree;
}

/// Drops Steiner points flagged in `remove` and renumbers the edges; edges
/// touching a removed vertex are discarded.
inline Tree drop_steiner(const Tree& tree, const std::vector<char>& remove) {
  const int nt = tree.terminal_count();
  std::vector<int> remap(tree.vertex_count(), -1);
  Tree out;
  out.terminals = tree.terminals;
  for (int i = 0; i < nt; ++i) remap[i] = i;
  for (int k = 0; k < static_cast<int>(tree.steiner.size()); ++k) {
    if (remove[k]) continue;
    remap[nt + k] = nt + static_cast<int>(out.steiner.size());
    out.steiner.push_back(tree.steiner[k]);
  }
  for (auto [u, v] : tree.edges) {
    if (remap[u] >= 0 && remap[v] >= 0) out.edges.emplace_back(remap[u], remap[v]);
  }
  return out;
}

/// Merges vertex `from` (a Steiner point) into vertex `into`: edges of
/// `from` are re-attached to `into` and the point is dropped.
inline Tree contract_edge(const Tree& tree, int from, int into) {
  if (!tree.is_steiner(from)) std::swap(from, into);
  if (!tree.is_steiner(from)) throw InputError("contract_edge: needs a Steiner endpoint");
  Tree merged = tree;
  std::vector<IndexPair> edges;
  for (auto [u, v] : tree.edges) {
    if (u == from) u = into;
    if (v == from) v = into;
    if (u == v) continue;
    edges.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  merged.edges = edges;
  std::vector<char> remove(tree.steiner.size(), 0);
  remove[from - tree.terminal_count()] = 1;
  return drop_steiner(merged, remove);
}

}  // namespace hypersteiner
