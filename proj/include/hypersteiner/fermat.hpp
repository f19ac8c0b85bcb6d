#pragma once

// Local full Steiner trees: isoptic curves, Fermat points of three
// terminals and two-Steiner-point trees on four terminals.

#include <array>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "hypersteiner/errors.hpp"
#include "hypersteiner/klein.hpp"

namespace hypersteiner {

inline constexpr double kSteinerAngle = 2.0 * std::numbers::pi / 3.0;

struct IsopticParams {
  KleinPoint x;
  KleinPoint y;
  double alpha = kSteinerAngle;
};

/// phi(s) = <x,s><y,s> - <x,y><s,s>
///          - cos(alpha) sqrt((<x,s>^2 - <x,x><s,s>)(<y,s>^2 - <y,y><s,s>)),
/// which vanishes exactly where the segment xy subtends the angle alpha at s.
inline double isoptic_eval(const IsopticParams& params, const KleinPoint& s) {
  if (s == params.x || s == params.y) {
    throw GeometryError("isoptic_eval: query point coincides with an endpoint");
  }
  const double xs = lorentzian_inner(params.x, s);
  const double ys = lorentzian_inner(params.y, s);
  const double xy = lorentzian_inner(params.x, params.y);
  const double xx = lorentzian_inner(params.x, params.x);
  const double yy = lorentzian_inner(params.y, params.y);
  const double ss = lorentzian_inner(s, s);
  const double left = xs * xs - xx * ss;
  const double right = ys * ys - yy * ss;
  return xs * ys - xy * ss - std::cos(params.alpha) * std::sqrt(std::max(0.0, left * right));
}

enum class FermatStatus {
  converged,
  obtuse,          // some interior angle is at least 2 pi / 3
  no_convergence,  // the root finder gave up
};

struct FermatSolve {
  FermatStatus status = FermatStatus::no_convergence;
  std::optional<KleinPoint> point;
  int iterations = 0;
  double residual = 0.0;
};

struct FermatOptions {
  int max_iterations = 100;
  double tolerance = 1e-12;
  /// Residual accepted when no further decrease is possible in floating point.
  double stall_tolerance = 1e-9;
  /// Maximum deviation of any angle at the solution from 2 pi / 3.
  double angle_tolerance = 1e-6;
  /// Weiszfeld steps taken before retrying Newton from a better start.
  int weiszfeld_iterations = 200;
};

namespace detail {

/// Both residuals are cos(angle) + 1/2 for two of the three angles at s.
struct FermatResidual {
  double f1 = 0.0;
  double f2 = 0.0;
  bool finite() const { return std::isfinite(f1) && std::isfinite(f2); }
  double size() const { return std::max(std::abs(f1), std::abs(f2)); }
};

inline FermatResidual fermat_residual(const KleinPoint& x, const KleinPoint& y, const KleinPoint& z,
                                      const KleinPoint& s) {
  if (s == x || s == y || s == z) {
    return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
  return {angle_cosine(s, x, y) + 0.5, angle_cosine(s, y, z) + 0.5};
}

inline bool fermat_admissible(const KleinPoint& x, const KleinPoint& y, const KleinPoint& z) {
  return angle_at(x, y, z) < kSteinerAngle && angle_at(y, z, x) < kSteinerAngle &&
         angle_at(z, x, y) < kSteinerAngle;
}

}  // namespace detail

namespace detail {

/// Damped Newton on the angle residuals in normal coordinates around
/// `start`, with a central-difference Jacobian and step halving.
inline FermatSolve newton_fermat(const KleinPoint& x, const KleinPoint& y, const KleinPoint& z,
                                 const KleinPoint& start, const FermatOptions& opts) {
  FermatSolve out;
  const auto [e1, e2] = orthonormal_frame(start);
  const auto at = [&](double w1, double w2) { return exp_map(start, w1 * e1 + w2 * e2); };
  const double scale = std::min({distance(x, y), distance(y, z), distance(x, z)});
  const double h = 1e-6 * scale;

  double w1 = 0.0;
  double w2 = 0.0;
  KleinPoint s = start;
  FermatResidual res = fermat_residual(x, y, z, s);
  int it = 0;
  for (; it < opts.max_iterations && res.size() > opts.tolerance; ++it) {
    const auto r1p = fermat_residual(x, y, z, at(w1 + h, w2));
    const auto r1m = fermat_residual(x, y, z, at(w1 - h, w2));
    const auto r2p = fermat_residual(x, y, z, at(w1, w2 + h));
    const auto r2m = fermat_residual(x, y, z, at(w1, w2 - h));
    const double j11 = (r1p.f1 - r1m.f1) / (2.0 * h);
    const double j21 = (r1p.f2 - r1m.f2) / (2.0 * h);
    const double j12 = (r2p.f1 - r2m.f1) / (2.0 * h);
    const double j22 = (r2p.f2 - r2m.f2) / (2.0 * h);
    const double det = j11 * j22 - j12 * j21;
    if (!std::isfinite(det) || det == 0.0) break;
    double d1 = -(j22 * res.f1 - j12 * res.f2) / det;
    double d2 = -(-j21 * res.f1 + j11 * res.f2) / det;
    // Never jump further than the triangle is wide.
    const double step = std::hypot(d1, d2);
    if (step > scale) {
      d1 *= scale / step;
      d2 *= scale / step;
    }
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving) {
      const KleinPoint trial = at(w1 + d1, w2 + d2);
      const auto trial_res = fermat_residual(x, y, z, trial);
      if (trial_res.finite() && trial_res.size() < res.size()) {
        w1 += d1;
        w2 += d2;
        s = trial;
        res = trial_res;
        accepted = true;
        break;
      }
      d1 *= 0.5;
      d2 *= 0.5;
    }
    if (!accepted) break;
  }

  out.iterations = it;
  out.residual = res.size();
  if (!(res.size() <= opts.stall_tolerance)) return out;
  if (s == x || s == y || s == z) return out;
  // Certify all three angles; the third is not part of the residual.
  for (const auto& [a, b] : {std::pair{x, y}, std::pair{y, z}, std::pair{z, x}}) {
    if (std::abs(angle_at(s, a, b) - kSteinerAngle) > opts.angle_tolerance) return out;
  }
  out.status = FermatStatus::converged;
  out.point = s;
  return out;
}

/// Hyperbolic Weiszfeld iterations on the sum of distances to x, y, z,
/// whose minimiser is the Fermat point of an admissible triangle.
inline KleinPoint weiszfeld_fermat(const KleinPoint& x, const KleinPoint& y, const KleinPoint& z,
                                   KleinPoint s, int iterations) {
  for (int it = 0; it < iterations; ++it) {
    Vec2 num{0.0, 0.0};
    double den = 0.0;
    for (const KleinPoint* v : {&x, &y, &z}) {
      const double d = distance(s, *v);
      if (d < 1e-300) return s;
      const TangentVector t = log_map(s, *v);
      num = num + (1.0 / d) * t.vec();
      den += 1.0 / d;
    }
    const KleinPoint next = exp_map(s, (1.0 / den) * num);
    if (next == s) break;
    s = next;
  }
  return s;
}

}  // namespace detail

/// Fermat point by damped Newton started at the barycenter. When Newton
/// does not converge from there, a Weiszfeld phase moves the start into
/// its basin and Newton is run again.
inline FermatSolve solve_fermat(const KleinPoint& x, const KleinPoint& y, const KleinPoint& z,
                                const FermatOptions& opts = {}) {
  if (x == y || y == z || x == z) throw GeometryError("fermat_point: terminals must be distinct");
  if (!detail::fermat_admissible(x, y, z)) {
    FermatSolve out;
    out.status = FermatStatus::obtuse;
    return out;
  }
  const KleinPoint center = barycenter(x, y, z);
  FermatSolve first = detail::newton_fermat(x, y, z, center, opts);
  if (first.status == FermatStatus::converged) return first;
  const KleinPoint start = detail::weiszfeld_fermat(x, y, z, center, opts.weiszfeld_iterations);
  FermatSolve second = detail::newton_fermat(x, y, z, start, opts);
  second.iterations += first.iterations + opts.weiszfeld_iterations;
  return second;
}

/// Fermat point of three terminals, or nothing when the triangle has an
/// angle of at least 2 pi / 3 or the solver does not converge.
inline std::optional<KleinPoint> fermat_point(const KleinPoint& x, const KleinPoint& y,
                                              const KleinPoint& z) {
  return solve_fermat(x, y, z).point;
}

/// A local full Steiner tree. Vertex indices in `edges` enumerate the
/// terminals first, then the Steiner points.
struct LocalFst {
  std::vector<KleinPoint> terminals;
  std::vector<KleinPoint> steiner;
  std::vector<std::pair<int, int>> edges;
  double length = 0.0;

  const KleinPoint& vertex(int i) const {
    const auto nt = static_cast<int>(terminals.size());
    return i < nt ? terminals[i] : steiner[i - nt];
  }
};

inline std::optional<LocalFst> fst3(const KleinPoint& x, const KleinPoint& y, const KleinPoint& z) {
  const auto s = fermat_point(x, y, z);
  if (!s) return std::nullopt;
  LocalFst fst;
  fst.terminals = {x, y, z};
  fst.steiner = {*s};
  fst.edges = {{0, 3}, {1, 3}, {2, 3}};
  fst.length = distance(x, *s) + distance(y, *s) + distance(z, *s);
  return fst;
}

/// Which terminals share a Steiner point in a four-terminal full tree.
enum class Pairing {
  ab_cd,
  ac_bd,
  ad_bc,
};

struct Fst4Options {
  int min_rounds = 3;
  int max_rounds = 1000;
  /// Rounds stop once neither Steiner point moves further than this
  /// fraction of the tree length.
  double movement_tolerance = 1e-12;
  double collapse_tolerance = 1e-10;
};

/// Four-terminal full Steiner tree for a fixed pairing: s1 joins the first
/// pair and s2, s2 joins the second pair and s1. Solved by alternating
/// Fermat problems starting from the barycenter of each pair with the
/// midpoint of the opposite pair. Returns nothing when the alternation does
/// not settle within max_rounds.
inline std::optional<LocalFst> fst4(const KleinPoint& a, const KleinPoint& b, const KleinPoint& c,
                                    const KleinPoint& d, Pairing pairing = Pairing::ab_cd,
                                    const Fst4Options& opts = {}) {
  std::array<KleinPoint, 4> t{a, b, c, d};
  if (pairing == Pairing::ac_bd) t = {a, c, b, d};
  if (pairing == Pairing::ad_bc) t = {a, d, b, c};
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (t[i] == t[j]) throw GeometryError("fst4: terminals must be distinct");
    }
  }

  KleinPoint s1 = barycenter(t[0], t[1], midpoint(t[2], t[3]));
  KleinPoint s2 = barycenter(t[2], t[3], midpoint(t[0], t[1]));
  bool converged = false;
  for (int round = 0; round < opts.max_rounds; ++round) {
    if (s2 == t[0] || s2 == t[1]) return std::nullopt;
    const auto n1 = fermat_point(t[0], t[1], s2);
    if (!n1) return std::nullopt;
    if (*n1 == t[2] || *n1 == t[3]) return std::nullopt;
    const auto n2 = fermat_point(t[2], t[3], *n1);
    if (!n2) return std::nullopt;
    const double moved = std::max(distance(s1, *n1), distance(s2, *n2));
    s1 = *n1;
    s2 = *n2;
    if (distance(s1, s2) < opts.collapse_tolerance) return std::nullopt;
    const double length = distance(t[0], s1) + distance(t[1], s1) + distance(t[2], s2) +
                          distance(t[3], s2) + distance(s1, s2);
    if (round + 1 >= opts.min_rounds && moved <= opts.movement_tolerance * length) {
      converged = true;
      break;
    }
  }
  // Alternation that has not settled is heading for a collapsed s1 s2 edge.
  if (!converged) return std::nullopt;

  LocalFst fst;
  fst.terminals = {t[0], t[1], t[2], t[3]};
  fst.steiner = {s1, s2};
  fst.edges = {{0, 4}, {1, 4}, {2, 5}, {3, 5}, {4, 5}};
  fst.length = distance(t[0], s1) + distance(t[1], s1) + distance(t[2], s2) + distance(t[3], s2) +
               distance(s1, s2);
  return fst;
}

}  // namespace hypersteiner
