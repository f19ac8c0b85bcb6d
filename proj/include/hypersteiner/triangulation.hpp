#pragma once

// Hyperbolic Delaunay triangulation through the power-diagram reduction,
// and the hyperbolic minimum spanning tree restricted to Delaunay edges.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "hypersteiner/errors.hpp"
#include "hypersteiner/klein.hpp"
#include "hypersteiner/predicates.hpp"

namespace hypersteiner {

/// Euclidean weighted site of a power diagram.
struct PowerSite {
  Vec2 center;
  double weight = 0.0;
};

/// The power site whose power cell, restricted to the disk, is the
/// hyperbolic Voronoi cell of p: center gamma(p) p, weight gamma(p) - 1.
inline PowerSite power_lift(const KleinPoint& p) {
  const double g = gamma(p);
  return PowerSite{{g * p.x(), g * p.y()}, g - 1.0};
}

/// Power of x with respect to a site, |x - c|^2 - w^2, evaluated literally.
inline double power(const PowerSite& site, Vec2 x) {
  const Vec2 d = x - site.center;
  return dot(d, d) - site.weight * site.weight;
}

/// Power of x with respect to the lifted site of p, in the cancellation
/// free form |x|^2 - 2 + gamma(p) (|x - p|^2 + A_x) + sqrt(A_p), which is
/// algebraically identical to power(power_lift(p), x).
inline double lifted_power(const KleinPoint& p, const KleinPoint& x) {
  const Vec2 d = x.vec() - p.vec();
  return (x.norm2() - 2.0) + gamma(p) * (dot(d, d) + x.conformal()) + p.sqrt_conformal();
}

using IndexPair = std::pair<int, int>;

struct Triangulation {
  std::vector<KleinPoint> points;
  /// Counter-clockwise index triples, rotated so the smallest index is first
  /// and sorted lexicographically.
  std::vector<std::array<int, 3>> triangles;
  /// Path through the points when no triangle exists (n < 3 or collinear).
  std::vector<IndexPair> path;

  bool degenerate() const noexcept { return triangles.empty(); }

  /// Unique undirected edges (i < j), sorted.
  std::vector<IndexPair> edges() const {
    if (triangles.empty()) {
      std::vector<IndexPair> out;
      for (auto [i, j] : path) out.emplace_back(std::min(i, j), std::max(i, j));
      std::sort(out.begin(), out.end());
      return out;
    }
    std::vector<IndexPair> out;
    out.reserve(triangles.size() * 3);
    for (const auto& t : triangles) {
      for (int k = 0; k < 3; ++k) {
        const int a = t[k];
        const int b = t[(k + 1) % 3];
        out.emplace_back(std::min(a, b), std::max(a, b));
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// For each triangle, the triangle across the edge opposite vertex k
  /// (-1 on the convex hull).
  std::vector<std::array<int, 3>> adjacency() const {
    std::vector<std::array<int, 3>> adj(triangles.size(), {-1, -1, -1});
    std::vector<std::pair<IndexPair, std::pair<int, int>>> half;
    half.reserve(triangles.size() * 3);
    for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
      for (int k = 0; k < 3; ++k) {
        const int a = triangles[t][(k + 1) % 3];
        const int b = triangles[t][(k + 2) % 3];
        half.push_back({{std::min(a, b), std::max(a, b)}, {t, k}});
      }
    }
    std::sort(half.begin(), half.end());
    for (std::size_t i = 0; i + 1 < half.size(); ++i) {
      if (half[i].first == half[i + 1].first) {
        auto [t1, k1] = half[i].second;
        auto [t2, k2] = half[i + 1].second;
        adj[t1][k1] = t2;
        adj[t2][k2] = t1;
      }
    }
    return adj;
  }
};

namespace detail {

inline constexpr int kGhost = -1;

/// Incremental Bowyer-Watson over ghost-closed triangles. Each triangle is
/// stored counter-clockwise; nbr[k] is the triangle across the edge that
/// is opposite vert[k]. A ghost triangle carries kGhost in one slot and
/// stands for the outside of the hull edge formed by the other two.
class DelaunayBuilder {
 public:
  explicit DelaunayBuilder(std::span<const KleinPoint> points) : pts_(points) {}

  /// Returns false when every point is collinear.
  bool build() {
    const int n = static_cast<int>(pts_.size());
    int third = -1;
    for (int k = 2; k < n; ++k) {
      if (predicates::orient2d(pts_[0], pts_[1], pts_[k]) != 0) {
        third = k;
        break;
      }
    }
    if (third < 0) return false;
    init(0, 1, third);
    for (int k = 2; k < n; ++k) {
      if (k != third) insert(k);
    }
    return true;
  }

  std::vector<std::array<int, 3>> real_triangles() const {
    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris_) {
      if (!t.alive || is_ghost(t)) continue;
      std::array<int, 3> v = t.vert;
      const auto smallest = std::min_element(v.begin(), v.end()) - v.begin();
      std::rotate(v.begin(), v.begin() + smallest, v.end());
      out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  struct Tri {
    std::array<int, 3> vert{};
    std::array<int, 3> nbr{-1, -1, -1};
    bool alive = true;
  };

  static bool is_ghost(const Tri& t) {
    return t.vert[0] == kGhost || t.vert[1] == kGhost || t.vert[2] == kGhost;
  }

  const KleinPoint& pt(int i) const { return pts_[static_cast<std::size_t>(i)]; }

  int new_tri(std::array<int, 3> v) {
    Tri t;
    t.vert = v;
    if (!free_.empty()) {
      const int id = free_.back();
      free_.pop_back();
      tris_[id] = t;
      return id;
    }
    tris_.push_back(t);
    return static_cast<int>(tris_.size()) - 1;
  }

  void link_all(const std::vector<int>& ids) {
    // Pair up half-edges among `ids` by their directed endpoints.
    std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> half;
    for (int id : ids) {
      for (int k = 0; k < 3; ++k) {
        const int a = tris_[id].vert[(k + 1) % 3];
        const int b = tris_[id].vert[(k + 2) % 3];
        half.push_back({{a, b}, {id, k}});
      }
    }
    std::sort(half.begin(), half.end());
    for (const auto& [edge, where] : half) {
      const std::pair<int, int> twin{edge.second, edge.first};
      auto it = std::lower_bound(half.begin(), half.end(), std::make_pair(twin, std::make_pair(-2, -2)));
      if (it != half.end() && it->first == twin) {
        tris_[where.first].nbr[where.second] = it->second.first;
      }
    }
  }

  void init(int a, int b, int c) {
    if (predicates::orient2d(pt(a), pt(b), pt(c)) < 0) std::swap(b, c);
    const int t0 = new_tri({a, b, c});
    const int g0 = new_tri({b, a, kGhost});
    const int g1 = new_tri({c, b, kGhost});
    const int g2 = new_tri({a, c, kGhost});
    link_all({t0, g0, g1, g2});
    last_ = t0;
  }

  bool conflicts(const Tri& t, const KleinPoint& p) const {
    for (int k = 0; k < 3; ++k) {
      if (t.vert[k] != kGhost) continue;
      const KleinPoint& a = pt(t.vert[(k + 1) % 3]);
      const KleinPoint& b = pt(t.vert[(k + 2) % 3]);
      const int o = predicates::orient2d(a, b, p);
      if (o > 0) return true;
      if (o < 0) return false;
      // Collinear with the hull edge: conflict only strictly inside the segment.
      const Vec2 ab = b.vec() - a.vec();
      const double s = dot(p.vec() - a.vec(), ab);
      return s > 0.0 && s < dot(ab, ab);
    }
    return predicates::in_power_circle(pt(t.vert[0]), pt(t.vert[1]), pt(t.vert[2]), p) > 0;
  }

  int locate(const KleinPoint& p) {
    int cur = last_;
    if (!tris_[cur].alive) cur = first_alive_real();
    if (is_ghost(tris_[cur])) cur = real_neighbor_of_ghost(cur);
    const std::size_t cap = 4 * tris_.size() + 16;
    for (std::size_t step = 0; step < cap; ++step) {
      const Tri& t = tris_[cur];
      int next = -1;
      for (int j = 0; j < 3; ++j) {
        const int k = static_cast<int>((j + step) % 3);
        const int a = t.vert[(k + 1) % 3];
        const int b = t.vert[(k + 2) % 3];
        if (predicates::orient2d(pt(a), pt(b), p) < 0) {
          next = t.nbr[k];
          break;
        }
      }
      if (next < 0) return cur;
      if (is_ghost(tris_[next])) return next;
      cur = next;
    }
    // Walk did not settle; fall back to a scan for any conflicting triangle.
    for (int id = 0; id < static_cast<int>(tris_.size()); ++id) {
      if (tris_[id].alive && conflicts(tris_[id], p)) return id;
    }
    throw GeometryError("delaunay: failed to locate point");
  }

  int first_alive_real() const {
    for (int id = 0; id < static_cast<int>(tris_.size()); ++id) {
      if (tris_[id].alive && !is_ghost(tris_[id])) return id;
    }
    return 0;
  }

  int real_neighbor_of_ghost(int id) const {
    const Tri& t = tris_[id];
    for (int k = 0; k < 3; ++k) {
      if (t.vert[k] == kGhost) return t.nbr[k];
    }
    return id;
  }

  void insert(int idx) {
    const KleinPoint& p = pt(idx);
    const int seed = locate(p);
    for (int v : tris_[seed].vert) {
      if (v != kGhost && pt(v) == p) throw GeometryError("delaunay: duplicate point");
    }

    std::vector<int> cavity{seed};
    std::vector<char> in_cavity(tris_.size(), 0);
    in_cavity[seed] = 1;
    for (std::size_t head = 0; head < cavity.size(); ++head) {
      const Tri& t = tris_[cavity[head]];
      for (int k = 0; k < 3; ++k) {
        const int nb = t.nbr[k];
        if (nb < 0 || in_cavity[nb]) continue;
        if (conflicts(tris_[nb], p)) {
          in_cavity[nb] = 1;
          cavity.push_back(nb);
        }
      }
    }

    // The cavity must be star-shaped from p; grow it across any boundary
    // edge that p does not see strictly from inside.
    struct Boundary {
      int a;
      int b;
      int outside;
    };
    std::vector<Boundary> boundary;
    for (bool repaired = true; repaired;) {
      repaired = false;
      boundary.clear();
      for (int id : cavity) {
        const Tri& t = tris_[id];
        for (int k = 0; k < 3; ++k) {
          const int nb = t.nbr[k];
          if (in_cavity[nb]) continue;
          const int a = t.vert[(k + 1) % 3];
          const int b = t.vert[(k + 2) % 3];
          if (a != kGhost && b != kGhost && predicates::orient2d(pt(a), pt(b), p) <= 0) {
            in_cavity[nb] = 1;
            cavity.push_back(nb);
            repaired = true;
            break;
          }
          boundary.push_back({a, b, nb});
        }
        if (repaired) break;
      }
    }

    for (int id : cavity) {
      tris_[id].alive = false;
      free_.push_back(id);
    }
    std::vector<int> created;
    created.reserve(boundary.size());
    for (const auto& e : boundary) {
      const int id = new_tri({e.a, e.b, idx});
      if (static_cast<std::size_t>(id) >= in_cavity.size()) in_cavity.resize(id + 1, 0);
      in_cavity[id] = 0;
      tris_[id].nbr[2] = e.outside;
      Tri& out = tris_[e.outside];
      for (int k = 0; k < 3; ++k) {
        if (out.vert[(k + 1) % 3] == e.b && out.vert[(k + 2) % 3] == e.a) out.nbr[k] = id;
      }
      created.push_back(id);
    }
    // New triangles share the spokes (x, p); pair them up.
    for (int id : created) {
      Tri& t = tris_[id];
      const int a = t.vert[0];
      const int b = t.vert[1];
      for (int other : created) {
        if (other == id) continue;
        const Tri& o = tris_[other];
        if (o.vert[0] == b) t.nbr[0] = other;   // edge (b, p) against (p, b)
        if (o.vert[1] == a) t.nbr[1] = other;   // edge (p, a) against (a, p)
      }
    }
    last_ = created.front();
    for (int id : created) {
      if (!is_ghost(tris_[id])) {
        last_ = id;
        break;
      }
    }
  }

  std::span<const KleinPoint> pts_;
  std::vector<Tri> tris_;
  std::vector<int> free_;
  int last_ = 0;
};

inline std::vector<IndexPair> collinear_path(std::span<const KleinPoint> points) {
  const int n = static_cast<int>(points.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (n >= 2) {
    // Project onto the direction spanned by the two farthest-apart extremes.
    const Vec2 dir = points[1].vec() - points[0].vec();
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
      return dot(points[i].vec(), dir) < dot(points[j].vec(), dir);
    });
  }
  std::vector<IndexPair> path;
  for (int k = 0; k + 1 < n; ++k) path.emplace_back(order[k], order[k + 1]);
  return path;
}

}  // namespace detail

/// Hyperbolic Delaunay triangulation of the points (the regular
/// triangulation of their power lifts). Fewer than three points or a
/// collinear set yields a degenerate result carrying only a path.
/// Throws GeometryError on duplicate points.
inline Triangulation delaunay(std::span<const KleinPoint> points) {
  Triangulation out;
  out.points.assign(points.begin(), points.end());
  const int n = static_cast<int>(points.size());
  if (n >= 3) {
    detail::DelaunayBuilder builder(points);
    if (builder.build()) {
      out.triangles = builder.real_triangles();
      return out;
    }
  }
  std::vector<KleinPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), [](const KleinPoint& a, const KleinPoint& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i] == sorted[i + 1]) throw GeometryError("delaunay: duplicate point");
  }
  out.path = detail::collinear_path(points);
  return out;
}

struct WeightedEdge {
  int i = 0;
  int j = 0;
  double length = 0.0;
};

struct EdgeList {
  std::vector<WeightedEdge> edges;

  double total_length() const {
    std::vector<double> lengths;
    lengths.reserve(edges.size());
    for (const auto& e : edges) lengths.push_back(e.length);
    std::sort(lengths.begin(), lengths.end());
    double sum = 0.0;
    for (double l : lengths) sum += l;
    return sum;
  }
};

/// Disjoint-set forest with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

  bool connected(int a, int b) { return find(a) == find(b); }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

namespace detail {

inline EdgeList kruskal(std::span<const KleinPoint> points, std::span<const IndexPair> candidates) {
  std::vector<WeightedEdge> sorted;
  sorted.reserve(candidates.size());
  for (auto [i, j] : candidates) {
    sorted.push_back({std::min(i, j), std::max(i, j), distance(points[i], points[j])});
  }
  std::sort(sorted.begin(), sorted.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    if (a.length != b.length) return a.length < b.length;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  UnionFind uf(points.size());
  EdgeList out;
  for (const auto& e : sorted) {
    if (uf.unite(e.i, e.j)) {
      out.edges.push_back(e);
      if (out.edges.size() + 1 == points.size()) break;
    }
  }
  return out;
}

}  // namespace detail

/// Kruskal over every pair of points: O(n^2 log n).
inline EdgeList mst_all_pairs(std::span<const KleinPoint> points) {
  if (points.empty()) throw GeometryError("mst: empty point set");
  std::vector<IndexPair> all;
  const int n = static_cast<int>(points.size());
  all.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) all.emplace_back(i, j);
  }
  return detail::kruskal(points, all);
}

/// Minimum spanning tree under the hyperbolic metric, computed by Kruskal
/// over the Delaunay edges (the MST is a subgraph of the triangulation).
inline EdgeList mst(std::span<const KleinPoint> points) {
  if (points.empty()) throw GeometryError("mst: empty point set");
  if (points.size() < 3) return mst_all_pairs(points);
  const Triangulation dt = delaunay(points);
  if (dt.degenerate()) return mst_all_pairs(points);
  const auto edges = dt.edges();
  return detail::kruskal(points, edges);
}

/// Indices of the points to keep when points closer than `tol` (Euclidean,
/// Klein coordinates) are merged; the first occurrence wins and indices in
/// `protected_prefix` are never dropped.
inline std::vector<int> dedupe_indices(std::span<const KleinPoint> points, double tol = 1e-12,
                                       int protected_prefix = 0) {
  const int n = static_cast<int>(points.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (points[a].x() != points[b].x()) return points[a].x() < points[b].x();
    return a < b;
  });
  std::vector<char> drop(n, 0);
  for (int s = 0; s < n; ++s) {
    const int i = order[s];
    for (int t = s + 1; t < n; ++t) {
      const int j = order[t];
      if (points[j].x() - points[i].x() > tol) break;
      if (drop[i] || drop[j]) continue;
      if (norm(points[i].vec() - points[j].vec()) < tol) {
        // Keep the protected or lower-index one.
        const int victim = (j < protected_prefix && i >= protected_prefix) ? i
                           : (i < protected_prefix && j >= protected_prefix) ? j
                                                                              : std::max(i, j);
        drop[victim] = 1;
      }
    }
  }
  std::vector<int> keep;
  for (int i = 0; i < n; ++i) {
    if (!drop[i]) keep.push_back(i);
  }
  return keep;
}

}  // namespace hypersteiner
