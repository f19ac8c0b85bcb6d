#pragma once

// Klein-Beltrami model of the hyperbolic plane (curvature -1).
//
// Points live in the open unit disk and geodesics are straight chords.
// Every formula below is written in a form that avoids subtracting nearly
// equal quantities: the conformal factor 1 - |p|^2 is evaluated in
// double-double arithmetic and the distance uses the half-angle identity
//   cosh d - 1 = (|x - y|^2 + (sqrt(A_x) - sqrt(A_y))^2) / (2 sqrt(A_x A_y)),
// with A_p = 1 - |p|^2, so points at 1 - 1e-10 from the origin remain usable.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "hypersteiner/errors.hpp"
#include "hypersteiner/random.hpp"

namespace hypersteiner {

/// Points with Euclidean norm >= 1 - kBoundaryEpsilon are rejected.
inline constexpr double kBoundaryEpsilon = 1e-12;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

namespace detail {

inline void two_sum(double a, double b, double& s, double& err) {
  s = a + b;
  const double bb = s - a;
  err = (a - (s - bb)) + (b - bb);
}

/// 1 - x^2 - y^2 with the products and sums carried in double-double.
inline double one_minus_norm2(double x, double y) {
  const double px = x * x;
  const double ex = std::fma(x, x, -px);
  const double py = y * y;
  const double ey = std::fma(y, y, -py);
  double s1 = 0.0;
  double t1 = 0.0;
  two_sum(1.0, -px, s1, t1);
  double s2 = 0.0;
  double t2 = 0.0;
  two_sum(s1, -py, s2, t2);
  return s2 + ((t1 + t2) - (ex + ey));
}

inline constexpr double kMinConformal = 2.0 * kBoundaryEpsilon - kBoundaryEpsilon * kBoundaryEpsilon;

}  // namespace detail

/// A point of the open unit disk in Klein coordinates. Caches the
/// conformal factor A = 1 - |p|^2 and its square root.
class KleinPoint {
 public:
  constexpr KleinPoint() = default;

  KleinPoint(double x, double y) : x_(x), y_(y) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw GeometryError("Klein point has non-finite coordinates");
    }
    conformal_ = detail::one_minus_norm2(x, y);
    if (!(conformal_ > detail::kMinConformal)) {
      throw GeometryError("point (" + std::to_string(x) + ", " + std::to_string(y) +
                          ") lies outside the admissible open unit disk");
    }
    sqrt_conformal_ = std::sqrt(conformal_);
  }

  explicit KleinPoint(Vec2 v) : KleinPoint(v.x, v.y) {}

  /// Returns nullopt instead of throwing when (x, y) is not admissible.
  static std::optional<KleinPoint> try_make(double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return std::nullopt;
    if (!(detail::one_minus_norm2(x, y) > detail::kMinConformal)) return std::nullopt;
    return KleinPoint(x, y);
  }

  constexpr double x() const noexcept { return x_; }
  constexpr double y() const noexcept { return y_; }
  constexpr Vec2 vec() const noexcept { return {x_, y_}; }

  /// 1 - |p|^2.
  constexpr double conformal() const noexcept { return conformal_; }
  constexpr double sqrt_conformal() const noexcept { return sqrt_conformal_; }
  double norm2() const noexcept { return x_ * x_ + y_ * y_; }

  friend constexpr bool operator==(const KleinPoint& a, const KleinPoint& b) noexcept {
    return a.x_ == b.x_ && a.y_ == b.y_;
  }

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double conformal_ = 1.0;
  double sqrt_conformal_ = 1.0;
};

/// Tangent vector at `base`, stored by its components in the Klein chart.
struct TangentVector {
  double vx = 0.0;
  double vy = 0.0;
  KleinPoint base;

  constexpr Vec2 vec() const noexcept { return {vx, vy}; }
};

struct GaussianSpec {
  KleinPoint mu;
  double sigma = 1.0;
};

/// Lorentzian product of the homogeneous lifts (1, x) and (1, y):
/// -1 + x.y, evaluated as -(|x - y|^2 + A_x + A_y) / 2.
inline double lorentzian_inner(const KleinPoint& x, const KleinPoint& y) {
  const Vec2 d = x.vec() - y.vec();
  return -0.5 * (dot(d, d) + x.conformal() + y.conformal());
}

namespace detail {

/// (cosh d(x, y) - 1) / 2 = sinh^2(d / 2).
inline double sinh2_half_distance(const KleinPoint& x, const KleinPoint& y) {
  const Vec2 diff = y.vec() - x.vec();
  const Vec2 sum = y.vec() + x.vec();
  const double sa = x.sqrt_conformal();
  const double sb = y.sqrt_conformal();
  // sqrt(A_x) - sqrt(A_y) = (|y|^2 - |x|^2) / (sqrt(A_x) + sqrt(A_y))
  const double gap = dot(diff, sum) / (sa + sb);
  return (dot(diff, diff) + gap * gap) / (4.0 * sa * sb);
}

}  // namespace detail

/// Hyperbolic distance arccosh(-<x,y> / sqrt(<x,x><y,y>)), computed as
/// 2 asinh(sinh(d/2)); the radicand is non-negative by construction.
inline double distance(const KleinPoint& x, const KleinPoint& y) {
  if (x == y) return 0.0;
  return 2.0 * std::asinh(std::sqrt(detail::sinh2_half_distance(x, y)));
}

/// cosh of the hyperbolic distance.
inline double cosh_distance(const KleinPoint& x, const KleinPoint& y) {
  return 1.0 + 2.0 * detail::sinh2_half_distance(x, y);
}

/// Lorentz factor 1 / sqrt(1 - |p|^2).
inline double gamma(const KleinPoint& p) { return 1.0 / p.sqrt_conformal(); }

/// Lorentz-factor weighted centroid of three points.
inline KleinPoint barycenter(const KleinPoint& u, const KleinPoint& v, const KleinPoint& w) {
  const double gu = gamma(u);
  const double gv = gamma(v);
  const double gw = gamma(w);
  const double total = gu + gv + gw;
  return KleinPoint((gu * u.x() + gv * v.x() + gw * w.x()) / total,
                    (gu * u.y() + gv * v.y() + gw * w.y()) / total);
}

/// Geodesic midpoint of two points (two-point Lorentz-weighted centroid).
inline KleinPoint midpoint(const KleinPoint& u, const KleinPoint& v) {
  const double gu = gamma(u);
  const double gv = gamma(v);
  const double total = gu + gv;
  return KleinPoint((gu * u.x() + gv * v.x()) / total, (gu * u.y() + gv * v.y()) / total);
}

/// Riemannian inner product at `base` of two chart vectors:
/// g(u, w) = (A u.w + (b.u)(b.w)) / A^2.
inline double metric_inner(const KleinPoint& base, Vec2 u, Vec2 w) {
  const double a = base.conformal();
  const Vec2 b = base.vec();
  return (a * dot(u, w) + dot(b, u) * dot(b, w)) / (a * a);
}

inline double metric_norm(const KleinPoint& base, Vec2 v) {
  const double a = base.conformal();
  const Vec2 b = base.vec();
  const double bv = dot(b, v);
  return std::sqrt(a * dot(v, v) + bv * bv) / a;
}

inline double metric_norm(const TangentVector& v) { return metric_norm(v.base, v.vec()); }

/// A g-orthonormal frame at `base`: the radial direction first (any
/// direction at the origin), then its perpendicular.
inline std::pair<Vec2, Vec2> orthonormal_frame(const KleinPoint& base) {
  const double r = norm(base.vec());
  if (r == 0.0) return {{1.0, 0.0}, {0.0, 1.0}};
  const Vec2 radial{base.x() / r, base.y() / r};
  const Vec2 perp{-radial.y, radial.x};
  return {base.conformal() * radial, base.sqrt_conformal() * perp};
}

/// Interior angle at `vertex` between the geodesics towards `a` and `b`,
/// in [0, pi]. Chords are geodesics, so the angle is the one between the
/// chord directions measured with the metric at the vertex; this equals the
/// hyperbolic cosine rule but stays accurate for tiny triangles.
inline double angle_at(const KleinPoint& vertex, const KleinPoint& a, const KleinPoint& b) {
  if (a == vertex || b == vertex) {
    throw GeometryError("angle_at: zero-length edge at the vertex");
  }
  const Vec2 u = a.vec() - vertex.vec();
  const Vec2 w = b.vec() - vertex.vec();
  const Vec2 v = vertex.vec();
  const double conf = vertex.conformal();
  const double g = conf * dot(u, w) + dot(v, u) * dot(v, w);
  const double s = vertex.sqrt_conformal() * std::abs(cross(u, w));
  return std::atan2(s, g);
}

/// Cosine of angle_at without the atan2 round trip.
inline double angle_cosine(const KleinPoint& vertex, const KleinPoint& a, const KleinPoint& b) {
  const Vec2 u = a.vec() - vertex.vec();
  const Vec2 w = b.vec() - vertex.vec();
  const Vec2 v = vertex.vec();
  const double conf = vertex.conformal();
  const double g = conf * dot(u, w) + dot(v, u) * dot(v, w);
  const double nu = conf * dot(u, u) + dot(v, u) * dot(v, u);
  const double nw = conf * dot(w, w) + dot(v, w) * dot(v, w);
  return g / std::sqrt(nu * nw);
}

namespace detail {

/// Klein coordinates of the point at hyperbolic distance `dist` from
/// `base` along the chord with Euclidean unit direction `dir`.
///
/// With A = 1 - |b|^2 and beta = b.dir the chord meets the circle at
/// parameters c > 0 and -a < 0 (a c = A); the cross-ratio distance gives
///   tau = A (1 - e^{-2D}) / (a + c e^{-2D}).
inline Vec2 walk_chord(const KleinPoint& base, Vec2 dir, double dist) {
  const double conf = base.conformal();
  const double beta = dot(base.vec(), dir);
  const double root = std::sqrt(beta * beta + conf);
  double ahead = 0.0;   // c
  double behind = 0.0;  // a
  if (beta >= 0.0) {
    behind = beta + root;
    ahead = conf / behind;
  } else {
    ahead = root - beta;
    behind = conf / ahead;
  }
  const double decay = std::exp(-2.0 * dist);
  const double tau = conf * (-std::expm1(-2.0 * dist)) / (behind + ahead * decay);
  return base.vec() + tau * dir;
}

/// Pulls a chart position back inside the admissible disk along the ray
/// from the origin.
inline KleinPoint clamp_into_disk(Vec2 p) {
  if (auto q = KleinPoint::try_make(p.x, p.y)) return *q;
  const double r = norm(p);
  const double target = 1.0 - 4.0 * kBoundaryEpsilon;
  return KleinPoint(p.x / r * target, p.y / r * target);
}

}  // namespace detail

/// Riemannian exponential map: follows the chord from `base` in the
/// direction of v for hyperbolic length |v|_g.
inline KleinPoint exp_map(const KleinPoint& base, const TangentVector& v) {
  const Vec2 dv = v.vec();
  const double len = norm(dv);
  if (len == 0.0) return base;
  const double dist = metric_norm(base, dv);
  const Vec2 dir{dv.x / len, dv.y / len};
  return detail::clamp_into_disk(detail::walk_chord(base, dir, dist));
}

inline KleinPoint exp_map(const KleinPoint& base, Vec2 v) {
  return exp_map(base, TangentVector{v.x, v.y, base});
}

/// Inverse of exp_map: the chord direction scaled to metric length
/// distance(base, target).
inline TangentVector log_map(const KleinPoint& base, const KleinPoint& target) {
  if (base == target) return TangentVector{0.0, 0.0, base};
  const Vec2 w = target.vec() - base.vec();
  const double scale = distance(base, target) / metric_norm(base, w);
  return TangentVector{w.x * scale, w.y * scale, base};
}

/// First-order retraction: a straight step in the Klein chart, pulled back
/// to at most half the remaining chord length if it would leave the disk.
inline KleinPoint retract(const KleinPoint& base, const TangentVector& v) {
  const Vec2 dv = v.vec();
  const double len = norm(dv);
  if (len == 0.0) return base;
  const Vec2 dir{dv.x / len, dv.y / len};
  const double beta = dot(base.vec(), dir);
  const double conf = base.conformal();
  const double root = std::sqrt(beta * beta + conf);
  const double ahead = beta >= 0.0 ? conf / (beta + root) : root - beta;
  const double step = std::min(len, 0.5 * ahead);
  return detail::clamp_into_disk(base.vec() + step * dir);
}

/// Sample from the wrapped (pseudo-hyperbolic) normal: an isotropic normal
/// in the tangent plane at the origin, parallel-transported to mu along the
/// radial geodesic and pushed through exp_mu. Resamples if the draw lands
/// outside the admissible disk.
inline KleinPoint sample_wrapped_gaussian(const GaussianSpec& spec, RandomStream& rng) {
  if (!(spec.sigma > 0.0)) throw GeometryError("wrapped Gaussian requires sigma > 0");
  const KleinPoint& mu = spec.mu;
  const double r = norm(mu.vec());
  const Vec2 radial = r > 0.0 ? Vec2{mu.x() / r, mu.y() / r} : Vec2{1.0, 0.0};
  const Vec2 perp{-radial.y, radial.x};
  constexpr int kMaxAttempts = 100;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const double n1 = spec.sigma * rng.normal();
    const double n2 = spec.sigma * rng.normal();
    Vec2 chart{n1, n2};
    if (r > 0.0) {
      // Transport keeps the components along (radial, perp); the unit
      // vectors of that frame at mu are A * radial and sqrt(A) * perp.
      const double vr = dot(chart, radial);
      const double vp = dot(chart, perp);
      chart = (mu.conformal() * vr) * radial + (mu.sqrt_conformal() * vp) * perp;
    }
    const double len = norm(chart);
    if (len == 0.0) return mu;
    const double dist = metric_norm(mu, chart);
    const Vec2 p = detail::walk_chord(mu, {chart.x / len, chart.y / len}, dist);
    if (auto q = KleinPoint::try_make(p.x, p.y)) return *q;
  }
  throw GeometryError("wrapped Gaussian: no admissible sample after repeated attempts");
}

/// Poincare disk -> Klein: z -> 2z / (1 + |z|^2).
inline KleinPoint poincare_to_klein(double x, double y) {
  const double s = 1.0 + x * x + y * y;
  return KleinPoint(2.0 * x / s, 2.0 * y / s);
}

/// Klein -> Poincare: p -> p / (1 + sqrt(1 - |p|^2)).
inline Vec2 klein_to_poincare(const KleinPoint& p) {
  const double s = 1.0 + p.sqrt_conformal();
  return {p.x() / s, p.y() / s};
}

}  // namespace hypersteiner
