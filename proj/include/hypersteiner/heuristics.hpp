#pragma once

// Steiner tree heuristics: degree-condition reduction, angle-condition
// expansion, the deterministic HyperSteiner and the randomized driver.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hypersteiner/errors.hpp"
#include "hypersteiner/fermat.hpp"
#include "hypersteiner/klein.hpp"
#include "hypersteiner/random.hpp"
#include "hypersteiner/riemannian.hpp"
#include "hypersteiner/tree.hpp"
#include "hypersteiner/triangulation.hpp"

namespace hypersteiner {

struct SolveResult {
  std::string method;
  Tree tree;
  double length = 0.0;
  double mst_length = 0.0;
  double red_percent = 0.0;
  std::uint64_t seed = 0;
  double wall_time_ms = 0.0;
};

/// Percentage reduction of `length` relative to the MST length.
inline double red_percent(double length, double mst_length) {
  if (mst_length <= 0.0) return 0.0;
  return (1.0 - length / mst_length) * 100.0;
}

/// Fills length, RED and timing of a result from its tree.
inline SolveResult make_result(std::string method, Tree tree, double mst_length, std::uint64_t seed,
                               std::chrono::steady_clock::time_point start) {
  SolveResult out;
  out.method = std::move(method);
  out.length = tree_length(tree);
  out.tree = std::move(tree);
  out.mst_length = mst_length;
  out.red_percent = red_percent(out.length, mst_length);
  out.seed = seed;
  out.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

struct ReduceOptions {
  /// A degree-3 replacement counts as a change only if it moves further
  /// than this hyperbolic distance.
  double move_tolerance = 1e-9;
  int max_rounds = 100;
  double dedupe_tolerance = 1e-12;
};

namespace detail {

/// Steiner points that do not coincide with a terminal or an earlier
/// Steiner point.
inline std::vector<KleinPoint> distinct_steiner(const std::vector<KleinPoint>& terminals,
                                                const std::vector<KleinPoint>& steiner, double tol) {
  if (steiner.empty()) return {};
  std::vector<KleinPoint> all(terminals);
  all.insert(all.end(), steiner.begin(), steiner.end());
  const int nt = static_cast<int>(terminals.size());
  std::vector<KleinPoint> out;
  for (int idx : dedupe_indices(all, tol, nt)) {
    if (idx >= nt) out.push_back(all[idx]);
  }
  return out;
}

/// Replaces a degree-4 Steiner point by the better of the two non-crossing
/// four-terminal full trees on its neighbours; when neither exists the
/// point is removed and its neighbours are joined by their own MST.
inline Tree split_degree_four(const Tree& tree, int s) {
  auto adj = tree.adjacency();
  std::vector<int> nb = adj[s];
  const KleinPoint& center = tree.vertex(s);
  std::sort(nb.begin(), nb.end(), [&](int a, int b) {
    const Vec2 da = tree.vertex(a).vec() - center.vec();
    const Vec2 db = tree.vertex(b).vec() - center.vec();
    return std::atan2(da.y, da.x) < std::atan2(db.y, db.x);
  });
  const auto& p = [&](int k) -> const KleinPoint& { return tree.vertex(nb[k]); };

  std::optional<LocalFst> best;
  std::array<int, 4> order{};
  for (const auto& cyc : {std::array<int, 4>{0, 1, 2, 3}, std::array<int, 4>{1, 2, 3, 0}}) {
    auto fst = fst4(p(cyc[0]), p(cyc[1]), p(cyc[2]), p(cyc[3]));
    if (fst && (!best || fst->length < best->length)) {
      best = fst;
      order = cyc;
    }
  }

  Tree out = tree;
  out.edges.clear();
  for (auto [u, v] : tree.edges) {
    if (u != s && v != s) out.edges.emplace_back(u, v);
  }
  if (best) {
    out.steiner[s - tree.terminal_count()] = best->steiner[0];
    const int s2 = out.vertex_count();
    out.steiner.push_back(best->steiner[1]);
    out.edges.emplace_back(nb[order[0]], s);
    out.edges.emplace_back(nb[order[1]], s);
    out.edges.emplace_back(nb[order[2]], s2);
    out.edges.emplace_back(nb[order[3]], s2);
    out.edges.emplace_back(s, s2);
    return out;
  }
  std::vector<KleinPoint> local;
  for (int v : nb) local.push_back(tree.vertex(v));
  for (const auto& e : mst_all_pairs(local).edges) out.edges.emplace_back(nb[e.i], nb[e.j]);
  std::vector<char> remove(tree.steiner.size(), 0);
  remove[s - tree.terminal_count()] = 1;
  return drop_steiner(out, remove);
}

}  // namespace detail

/// Degree-condition reduction. Repeatedly rebuilds T = MST(P u S'), drops
/// Steiner points of degree <= 2 or >= 5 and moves degree-3 points to the
/// Fermat point of their neighbours (dropping them when none exists); then
/// splits each degree-4 Steiner point into a four-terminal full tree.
inline Tree reduce_degree(const std::vector<KleinPoint>& terminals, const std::vector<KleinPoint>& steiner,
                          const ReduceOptions& opts = {}) {
  std::vector<KleinPoint> current = detail::distinct_steiner(terminals, steiner, opts.dedupe_tolerance);
  Tree tree = mst_tree(terminals, current);
  for (int round = 0; round < opts.max_rounds && !current.empty(); ++round) {
    const auto adj = tree.adjacency();
    const int nt = tree.terminal_count();
    std::vector<KleinPoint> next;
    bool changed = false;
    for (int k = 0; k < static_cast<int>(current.size()); ++k) {
      const auto& nb = adj[nt + k];
      const int deg = static_cast<int>(nb.size());
      if (deg <= 2 || deg >= 5) {
        changed = true;
        continue;
      }
      if (deg == 3) {
        const auto s = fermat_point(tree.vertex(nb[0]), tree.vertex(nb[1]), tree.vertex(nb[2]));
        if (!s) {
          changed = true;
          continue;
        }
        if (distance(*s, current[k]) > opts.move_tolerance) changed = true;
        next.push_back(*s);
        continue;
      }
      next.push_back(current[k]);
    }
    current = detail::distinct_steiner(terminals, next, opts.dedupe_tolerance);
    tree = mst_tree(terminals, current);
    if (!changed) break;
  }

  const int nt = tree.terminal_count();
  // Degree-4 points are handled one at a time on the evolving tree; split
  // points append their second Steiner point at the end.
  const int original = static_cast<int>(tree.steiner.size());
  for (int k = original - 1; k >= 0; --k) {
    const int s = nt + k;
    if (tree.adjacency()[s].size() == 4) tree = detail::split_degree_four(tree, s);
  }
  return tree;
}

struct ExpandOptions {
  /// Angles below this count as violating the 120 degree condition.
  double angle_threshold = kSteinerAngle - 1e-6;
};

/// Angle-condition expansion: for every vertex i and neighbour j, picks the
/// neighbour k of j whose edge meets (i, j) at the smallest angle below
/// 120 degrees and replaces the edges (i, j), (j, k) by the Fermat star of
/// (x_i, x_j, x_k).
inline Tree expand_angle(const Tree& input, const ExpandOptions& opts = {}) {
  Tree tree = input;
  const int n0 = tree.vertex_count();
  std::vector<std::vector<int>> adj(n0);
  for (auto [u, v] : tree.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
  const auto unlink = [&](int a, int b) {
    adj[a].erase(std::find(adj[a].begin(), adj[a].end(), b));
    adj[b].erase(std::find(adj[b].begin(), adj[b].end(), a));
  };

  for (int i = 0; i < n0; ++i) {
    const std::vector<int> firsts = adj[i];
    for (int j : firsts) {
      if (std::find(adj[i].begin(), adj[i].end(), j) == adj[i].end()) continue;
      int best_k = -1;
      double best_angle = opts.angle_threshold;
      for (int l : adj[j]) {
        if (l == i) continue;
        const double angle = angle_at(tree.vertex(j), tree.vertex(i), tree.vertex(l));
        if (angle < best_angle) {
          best_angle = angle;
          best_k = l;
        }
      }
      if (best_k < 0) continue;
      const auto s = fermat_point(tree.vertex(i), tree.vertex(j), tree.vertex(best_k));
      if (!s) continue;
      const int id = tree.vertex_count();
      tree.steiner.push_back(*s);
      adj.emplace_back();
      unlink(i, j);
      unlink(j, best_k);
      for (int v : {i, j, best_k}) {
        adj[v].push_back(id);
        adj[id].push_back(v);
      }
    }
  }

  tree.edges.clear();
  for (int u = 0; u < static_cast<int>(adj.size()); ++u) {
    for (int v : adj[u]) {
      if (u < v) tree.edges.emplace_back(u, v);
    }
  }
  std::sort(tree.edges.begin(), tree.edges.end());
  return tree;
}

/// Gradient descent that contracts collapsed edges and retries.
inline Tree polish(const Tree& tree, GdConfig gd) {
  gd.contract_collapsed = true;
  return optimize_steiner(tree, gd);
}

namespace detail {

struct QueueItem {
  double rho = 0.0;
  std::vector<int> terminals;  // indices into P, in LocalFst order
  LocalFst fst;
};

inline bool shares_component(UnionFind& uf, const std::vector<int>& ids) {
  for (std::size_t a = 0; a < ids.size(); ++a) {
    for (std::size_t b = a + 1; b < ids.size(); ++b) {
      if (uf.connected(ids[a], ids[b])) return true;
    }
  }
  return false;
}

}  // namespace detail

/// The deterministic HyperSteiner heuristic: full Steiner trees of Delaunay
/// triangles carrying two MST edges (and of adjacent triangle pairs carrying
/// three), ranked by local Steiner ratio and greedily concatenated with the
/// MST edges.
inline SolveResult hypersteiner(const std::vector<KleinPoint>& terminals) {
  const auto start = std::chrono::steady_clock::now();
  if (terminals.size() < 2) throw InputError("hypersteiner: needs at least 2 terminals");
  const EdgeList mst_edges = mst(terminals);
  const double mst_length = mst_edges.total_length();
  Tree mst_only;
  mst_only.terminals = terminals;
  for (const auto& e : mst_edges.edges) mst_only.edges.emplace_back(e.i, e.j);

  const Triangulation dt = delaunay(terminals);
  if (dt.degenerate()) return make_result("hs", mst_only, mst_length, 0, start);

  std::map<IndexPair, bool> in_mst;
  for (const auto& e : mst_edges.edges) in_mst[{e.i, e.j}] = true;
  const auto is_mst = [&](int a, int b) { return in_mst.count({std::min(a, b), std::max(a, b)}) > 0; };
  const auto& P = terminals;

  std::vector<detail::QueueItem> queue;
  std::vector<char> marked(dt.triangles.size(), 0);
  for (std::size_t t = 0; t < dt.triangles.size(); ++t) {
    const auto& tri = dt.triangles[t];
    int count = 0;
    std::vector<double> sides;
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k];
      const int b = tri[(k + 1) % 3];
      if (is_mst(a, b)) ++count;
      sides.push_back(distance(P[a], P[b]));
    }
    if (count != 2) continue;
    auto fst = fst3(P[tri[0]], P[tri[1]], P[tri[2]]);
    if (!fst) continue;
    marked[t] = 1;
    std::sort(sides.begin(), sides.end());
    const double rho = fst->length / (sides[0] + sides[1]);
    queue.push_back({rho, {tri[0], tri[1], tri[2]}, *fst});
  }

  const auto adjacency = dt.adjacency();
  std::vector<std::array<int, 4>> seen_quads;
  for (std::size_t t = 0; t < dt.triangles.size(); ++t) {
    if (!marked[t]) continue;
    const auto& tri = dt.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const int other = adjacency[t][k];
      if (other < 0) continue;
      const int v0 = tri[k];
      const int v1 = tri[(k + 1) % 3];
      const int v2 = tri[(k + 2) % 3];
      int d = -1;
      for (int x : dt.triangles[other]) {
        if (x != v1 && x != v2) d = x;
      }
      // Counter-clockwise cycle of the quadrilateral.
      const std::array<int, 4> cyc{v0, v1, d, v2};
      int count = 0;
      for (int e = 0; e < 4; ++e) count += is_mst(cyc[e], cyc[(e + 1) % 4]) ? 1 : 0;
      count += is_mst(v1, v2) ? 1 : 0;
      if (count != 3) continue;
      std::array<int, 4> key = cyc;
      std::sort(key.begin(), key.end());
      if (std::find(seen_quads.begin(), seen_quads.end(), key) != seen_quads.end()) continue;
      seen_quads.push_back(key);

      std::optional<LocalFst> best;
      std::vector<int> ids;
      for (const auto& order : {std::array<int, 4>{0, 1, 2, 3}, std::array<int, 4>{1, 2, 3, 0}}) {
        const std::array<int, 4> q{cyc[order[0]], cyc[order[1]], cyc[order[2]], cyc[order[3]]};
        auto fst = fst4(P[q[0]], P[q[1]], P[q[2]], P[q[3]]);
        if (fst && (!best || fst->length < best->length)) {
          best = fst;
          ids.assign(q.begin(), q.end());
        }
      }
      if (!best) continue;
      const std::vector<KleinPoint> quad{P[cyc[0]], P[cyc[1]], P[cyc[2]], P[cyc[3]]};
      const double rho = best->length / mst_all_pairs(quad).total_length();
      if (rho < 1.0) queue.push_back({rho, ids, *best});
    }
  }
  std::stable_sort(queue.begin(), queue.end(),
                   [](const detail::QueueItem& a, const detail::QueueItem& b) { return a.rho < b.rho; });

  Tree tree;
  tree.terminals = terminals;
  UnionFind uf(terminals.size());
  for (const auto& item : queue) {
    if (detail::shares_component(uf, item.terminals)) continue;
    const int nt = static_cast<int>(item.terminals.size());
    const int base = tree.vertex_count();
    for (const auto& s : item.fst.steiner) tree.steiner.push_back(s);
    for (auto [u, v] : item.fst.edges) {
      const int gu = u < nt ? item.terminals[u] : base + (u - nt);
      const int gv = v < nt ? item.terminals[v] : base + (v - nt);
      tree.edges.emplace_back(gu, gv);
    }
    for (int k = 1; k < nt; ++k) uf.unite(item.terminals[0], item.terminals[k]);
  }
  for (const auto& e : mst_edges.edges) {
    if (uf.unite(e.i, e.j)) tree.edges.emplace_back(e.i, e.j);
  }
  if (tree_length(tree) > mst_length) return make_result("hs", mst_only, mst_length, 0, start);
  return make_result("hs", tree, mst_length, 0, start);
}

struct RhsConfig {
  /// 0 selects floor(sqrt(|P|)).
  int max_iterations = 0;
  double insertion_low = 0.3;
  double insertion_high = 0.6;
  std::uint64_t seed = 0;
  GdConfig gd{};
  /// Relative improvement required to accept a new best tree.
  double accept_tolerance = 1e-10;
  /// Upper bound on outer iterations including restarts.
  int max_outer_iterations = 10000;
};

/// Randomized HyperSteiner: stochastic barycenter expansion over the
/// Delaunay triangulation of P u S, reduction, angle expansion and gradient
/// refinement, restarting the schedule whenever a shorter tree is found.
inline SolveResult randomized_hypersteiner(const std::vector<KleinPoint>& terminals,
                                           const RhsConfig& config = {}) {
  const auto start = std::chrono::steady_clock::now();
  if (terminals.size() < 2) throw InputError("randomized_hypersteiner: needs at least 2 terminals");
  if (!(config.insertion_low > 0.0 && config.insertion_low <= config.insertion_high &&
        config.insertion_high < 1.0)) {
    throw InputError("randomized_hypersteiner: insertion range must satisfy 0 < l <= u < 1");
  }
  const int max_n = config.max_iterations > 0
                        ? config.max_iterations
                        : static_cast<int>(std::floor(std::sqrt(static_cast<double>(terminals.size()))));
  RandomStream rng(config.seed);

  Tree best = mst_tree(terminals, {});
  const double mst_length = tree_length(best);
  double best_length = mst_length;
  std::vector<KleinPoint> best_steiner;
  std::vector<KleinPoint> steiner;

  int n = 1;
  for (int outer = 0; n <= max_n && outer < config.max_outer_iterations; ++outer) {
    const int passes = static_cast<int>(std::floor(2.0 * std::sqrt(static_cast<double>(n)) - 1.0));
    for (int pass = 0; pass < passes; ++pass) {
      steiner = detail::distinct_steiner(terminals, steiner, 1e-12);
      std::vector<KleinPoint> all(terminals);
      all.insert(all.end(), steiner.begin(), steiner.end());
      const Triangulation dt = delaunay(all);
      const double p = rng.uniform(config.insertion_low, config.insertion_high);
      for (const auto& tri : dt.triangles) {
        if (rng.bernoulli(p)) steiner.push_back(barycenter(all[tri[0]], all[tri[1]], all[tri[2]]));
      }
    }

    Tree tree = polish(reduce_degree(terminals, steiner), config.gd);
    tree = polish(expand_angle(tree), config.gd);
    double length = tree_length(tree);
    if (length < best_length) {
      tree = polish(reduce_degree(terminals, tree.steiner), config.gd);
      length = tree_length(tree);
    }

    if (length < best_length * (1.0 - config.accept_tolerance)) {
      best = tree;
      best_length = length;
      best_steiner = tree.steiner;
      steiner = tree.steiner;
      n = 1;
    } else {
      steiner = best_steiner;
      ++n;
    }
  }
  return make_result("rhs", best, mst_length, config.seed, start);
}

}  // namespace hypersteiner
