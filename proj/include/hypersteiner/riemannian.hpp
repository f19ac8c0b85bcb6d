#pragma once

// Fixed-topology refinement of Steiner positions by Riemannian gradient
// descent on the total tree length.

#include <algorithm>
#include <vector>

#include "hypersteiner/errors.hpp"
#include "hypersteiner/klein.hpp"
#include "hypersteiner/tree.hpp"

namespace hypersteiner {

struct GdConfig {
  int max_epochs = 10000;
  double learning_rate = 1e-2;
  int patience = 100;
  double threshold = 1e-6;
  bool use_retraction = false;
  /// Per-point tangent steps longer than this (metric norm) are rescaled.
  double max_step = 1.0;
  /// A Steiner point advances towards any neighbour by at most this fraction
  /// of the connecting edge per epoch.
  double max_edge_fraction = 0.5;
  /// Merge a Steiner point into its neighbour when their edge collapses and
  /// keep going, instead of throwing CollapsedEdgeError.
  bool contract_collapsed = false;
  /// At a collapsed edge take the minimum-norm subgradient instead of
  /// throwing: coincident points then move together until separating them
  /// shortens the tree. Takes precedence over contract_collapsed.
  bool collapse_subgradient = false;
};

inline constexpr double kCollapsedEdge = 1e-12;

/// Riemannian gradient of tree_length with respect to each Steiner point:
/// the negated sum of unit tangents towards its neighbours. Throws
/// CollapsedEdgeError when an incident edge is shorter than 1e-12.
inline std::vector<TangentVector> grad_tree_length(const Tree& tree) {
  const int nt = tree.terminal_count();
  std::vector<TangentVector> grad;
  grad.reserve(tree.steiner.size());
  for (const auto& s : tree.steiner) grad.push_back(TangentVector{0.0, 0.0, s});
  for (auto [u, v] : tree.edges) {
    if (u < nt && v < nt) continue;
    const KleinPoint& pu = tree.vertex(u);
    const KleinPoint& pv = tree.vertex(v);
    const double len = distance(pu, pv);
    if (len < kCollapsedEdge) throw CollapsedEdgeError(u, v);
    for (auto [a, b] : {std::pair{u, v}, std::pair{v, u}}) {
      if (a < nt) continue;
      const TangentVector toward = log_map(tree.vertex(a), tree.vertex(b));
      TangentVector& g = grad[a - nt];
      g.vx -= toward.vx / len;
      g.vy -= toward.vy / len;
    }
  }
  return grad;
}

/// Minimum-norm element of the subdifferential of tree_length at each
/// Steiner point, allowing edges shorter than 1e-12. Each Steiner point may
/// touch at most one collapsed edge; anything else throws
/// CollapsedEdgeError.
inline std::vector<TangentVector> subgrad_tree_length(const Tree& tree) {
  const int nt = tree.terminal_count();
  std::vector<TangentVector> grad;
  grad.reserve(tree.steiner.size());
  for (const auto& s : tree.steiner) grad.push_back(TangentVector{0.0, 0.0, s});
  std::vector<int> partner(tree.steiner.size(), -1);
  for (auto [u, v] : tree.edges) {
    if (u < nt && v < nt) continue;
    const double len = distance(tree.vertex(u), tree.vertex(v));
    if (len < kCollapsedEdge) {
      for (auto [a, b] : {std::pair{u, v}, std::pair{v, u}}) {
        if (a < nt) continue;
        if (partner[a - nt] != -1) throw CollapsedEdgeError(u, v);
        partner[a - nt] = b;
      }
      continue;
    }
    for (auto [a, b] : {std::pair{u, v}, std::pair{v, u}}) {
      if (a < nt) continue;
      const TangentVector toward = log_map(tree.vertex(a), tree.vertex(b));
      grad[a - nt].vx -= toward.vx / len;
      grad[a - nt].vy -= toward.vy / len;
    }
  }
  // The collapsed edge adds w to one end and -w to the other for any w in
  // the unit ball.
  const auto clip = [](const KleinPoint& base, Vec2 w) {
    const double n = metric_norm(base, w);
    return n > 1.0 ? (1.0 / n) * w : w;
  };
  for (int k = 0; k < static_cast<int>(tree.steiner.size()); ++k) {
    const int b = partner[k];
    if (b < 0) continue;
    const KleinPoint& s = tree.steiner[k];
    const Vec2 g = grad[k].vec();
    if (b < nt) {
      const Vec2 w = clip(s, Vec2{-g.x, -g.y});
      grad[k].vx += w.x;
      grad[k].vy += w.y;
    } else if (b - nt > k) {
      const Vec2 h = grad[b - nt].vec();
      const Vec2 w = clip(s, 0.5 * (h - g));
      grad[k].vx += w.x;
      grad[k].vy += w.y;
      grad[b - nt].vx -= w.x;
      grad[b - nt].vy -= w.y;
    }
  }
  return grad;
}

struct GdReport {
  Tree tree;
  int epochs = 0;
  double initial_length = 0.0;
  double final_length = 0.0;
};

/// Gradient descent S <- exp_S(-eta grad L(S)) with per-point step capping.
/// All Steiner points move simultaneously from the same configuration.
/// Stops after max_epochs or once the reference length has not dropped by
/// more than `threshold` for `patience` consecutive epochs, and returns the
/// best configuration seen. Terminals never move. With contract_collapsed
/// the returned tree may have fewer Steiner points than the input.
inline GdReport optimize_steiner_report(const Tree& tree, const GdConfig& config = {}) {
  GdReport report;
  report.tree = tree;
  report.initial_length = tree_length(tree);
  report.final_length = report.initial_length;
  if (tree.steiner.empty()) return report;

  const int nt = tree.terminal_count();
  std::vector<Vec2> steps;
  Tree current = tree;
  double best = report.initial_length;
  double reference = best;
  int stale = 0;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::vector<TangentVector> grad;
    try {
      grad = config.collapse_subgradient ? subgrad_tree_length(current) : grad_tree_length(current);
    } catch (const CollapsedEdgeError& e) {
      if (!config.contract_collapsed) throw;
      current = contract_edge(current, e.u(), e.v());
      if (current.steiner.empty()) break;
      continue;
    }
    steps.assign(current.steiner.size(), Vec2{});
    for (std::size_t k = 0; k < grad.size(); ++k) {
      const KleinPoint& s = current.steiner[k];
      Vec2 step{-config.learning_rate * grad[k].vx, -config.learning_rate * grad[k].vy};
      const double len = metric_norm(s, step);
      if (len > config.max_step) step = (config.max_step / len) * step;
      steps[k] = step;
    }
    for (auto [u, v] : current.edges) {
      if (u < nt && v < nt) continue;
      const double len = distance(current.vertex(u), current.vertex(v));
      if (len < kCollapsedEdge) continue;
      const double limit = config.max_edge_fraction * len;
      for (auto [a, b] : {std::pair{u, v}, std::pair{v, u}}) {
        if (a < nt) continue;
        const KleinPoint& s = current.vertex(a);
        const TangentVector toward = log_map(s, current.vertex(b));
        // log_map has metric norm `len`, so this is the advance towards b.
        const double advance = metric_inner(s, steps[a - nt], toward.vec()) / len;
        if (advance > limit) steps[a - nt] = (limit / advance) * steps[a - nt];
      }
    }
    for (std::size_t k = 0; k < grad.size(); ++k) {
      const KleinPoint& s = current.steiner[k];
      const TangentVector v{steps[k].x, steps[k].y, s};
      current.steiner[k] = config.use_retraction ? retract(s, v) : exp_map(s, v);
    }
    report.epochs = epoch + 1;
    const double length = tree_length(current);
    if (length < best) {
      best = length;
      report.tree = current;
    }
    if (reference - length > config.threshold) {
      reference = length;
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  report.final_length = best;
  return report;
}

inline Tree optimize_steiner(const Tree& tree, const GdConfig& config = {}) {
  return optimize_steiner_report(tree, config).tree;
}

}  // namespace hypersteiner
