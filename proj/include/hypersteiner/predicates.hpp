#pragma once

// Geometric predicates with a floating-point filter and an exact fallback
// built on non-overlapping floating-point expansions.

#include <cmath>
#include <limits>
#include <vector>

#include "hypersteiner/klein.hpp"

namespace hypersteiner::predicates {

namespace detail {

using Expansion = std::vector<double>;

inline void two_sum(double a, double b, double& x, double& y) {
  x = a + b;
  const double bv = x - a;
  const double av = x - bv;
  y = (a - av) + (b - bv);
}

inline void fast_two_sum(double a, double b, double& x, double& y) {
  x = a + b;
  y = b - (x - a);
}

inline void two_product(double a, double b, double& x, double& y) {
  x = a * b;
  y = std::fma(a, b, -x);
}

/// e + b, components kept in increasing magnitude with zeros removed.
inline Expansion grow(const Expansion& e, double b) {
  Expansion h;
  h.reserve(e.size() + 1);
  double q = b;
  for (double c : e) {
    double sum = 0.0;
    double err = 0.0;
    two_sum(q, c, sum, err);
    if (err != 0.0) h.push_back(err);
    q = sum;
  }
  if (q != 0.0 || h.empty()) h.push_back(q);
  return h;
}

inline Expansion add(Expansion e, const Expansion& f) {
  for (double c : f) e = grow(e, c);
  return e;
}

inline Expansion scale(const Expansion& e, double b) {
  Expansion h;
  if (e.empty()) return h;
  h.reserve(2 * e.size());
  double q = 0.0;
  double hh = 0.0;
  two_product(e[0], b, q, hh);
  if (hh != 0.0) h.push_back(hh);
  for (std::size_t i = 1; i < e.size(); ++i) {
    double p1 = 0.0;
    double p0 = 0.0;
    two_product(e[i], b, p1, p0);
    double sum = 0.0;
    two_sum(q, p0, sum, hh);
    if (hh != 0.0) h.push_back(hh);
    fast_two_sum(p1, sum, q, hh);
    if (hh != 0.0) h.push_back(hh);
  }
  if (q != 0.0 || h.empty()) h.push_back(q);
  return h;
}

inline int sign(const Expansion& e) {
  for (auto it = e.rbegin(); it != e.rend(); ++it) {
    if (*it > 0.0) return 1;
    if (*it < 0.0) return -1;
  }
  return 0;
}

inline Expansion product(double a, double b) {
  double x = 0.0;
  double y = 0.0;
  two_product(a, b, x, y);
  Expansion e;
  if (y != 0.0) e.push_back(y);
  e.push_back(x);
  return e;
}

/// Exact ax*by - ax*cy + bx*cy - bx*ay + cx*ay - cx*by.
inline Expansion orient2d_exact(Vec2 a, Vec2 b, Vec2 c) {
  Expansion e = product(a.x, b.y);
  e = add(e, product(-a.x, c.y));
  e = add(e, product(b.x, c.y));
  e = add(e, product(-b.x, a.y));
  e = add(e, product(c.x, a.y));
  e = add(e, product(-c.x, b.y));
  return e;
}

inline constexpr double kEps = std::numeric_limits<double>::epsilon() / 2.0;  // 2^-53
inline constexpr double kOrientBound = (3.0 + 16.0 * kEps) * kEps;
inline constexpr double kLiftedBound = 32.0 * kEps;

}  // namespace detail

/// Sign of the orientation of (a, b, c): +1 counter-clockwise, -1
/// clockwise, 0 collinear. Exact for any finite doubles.
inline int orient2d(Vec2 a, Vec2 b, Vec2 c) {
  const double left = (a.x - c.x) * (b.y - c.y);
  const double right = (a.y - c.y) * (b.x - c.x);
  const double det = left - right;
  const double bound = detail::kOrientBound * (std::abs(left) + std::abs(right));
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return detail::sign(detail::orient2d_exact(a, b, c));
}

inline int orient2d(const KleinPoint& a, const KleinPoint& b, const KleinPoint& c) {
  return orient2d(a.vec(), b.vec(), c.vec());
}

/// Power in-circle test for the hyperbolic Delaunay triangulation.
///
/// Lifting each site p to (p, sqrt(1 - |p|^2)) is, up to a positive
/// per-row scale, the paraboloid lifting (gamma p, |gamma p|^2 - (gamma-1)^2)
/// of the power site of p. For a counter-clockwise triangle (a, b, c) the
/// result is +1 when d lies strictly inside the power circumcircle (its
/// hyperbolic Voronoi cell would steal from the triangle), -1 when outside
/// and 0 on the circle. Exact with respect to the stored lifted heights.
inline int in_power_circle(const KleinPoint& a, const KleinPoint& b, const KleinPoint& c,
                           const KleinPoint& d) {
  const double adx = a.x() - d.x();
  const double ady = a.y() - d.y();
  const double ads = a.sqrt_conformal() - d.sqrt_conformal();
  const double bdx = b.x() - d.x();
  const double bdy = b.y() - d.y();
  const double bds = b.sqrt_conformal() - d.sqrt_conformal();
  const double cdx = c.x() - d.x();
  const double cdy = c.y() - d.y();
  const double cds = c.sqrt_conformal() - d.sqrt_conformal();

  const double bc1 = bdx * cdy;
  const double bc2 = bdy * cdx;
  const double ac1 = adx * cdy;
  const double ac2 = ady * cdx;
  const double ab1 = adx * bdy;
  const double ab2 = ady * bdx;
  // det3 of the difference rows (x, y, s); the hyperbolic test is its negation.
  const double det = ads * (bc1 - bc2) - bds * (ac1 - ac2) + cds * (ab1 - ab2);
  const double permanent = std::abs(ads) * (std::abs(bc1) + std::abs(bc2)) +
                           std::abs(bds) * (std::abs(ac1) + std::abs(ac2)) +
                           std::abs(cds) * (std::abs(ab1) + std::abs(ab2));
  const double bound = detail::kLiftedBound * permanent;
  if (det > bound) return -1;
  if (-det > bound) return 1;

  // det4 of rows (x, y, 1, s) expanded along the s column.
  using detail::Expansion;
  const Vec2 pa = a.vec();
  const Vec2 pb = b.vec();
  const Vec2 pc = c.vec();
  const Vec2 pd = d.vec();
  Expansion total = detail::scale(detail::orient2d_exact(pb, pc, pd), -a.sqrt_conformal());
  total = detail::add(total, detail::scale(detail::orient2d_exact(pa, pc, pd), b.sqrt_conformal()));
  total = detail::add(total, detail::scale(detail::orient2d_exact(pa, pb, pd), -c.sqrt_conformal()));
  total = detail::add(total, detail::scale(detail::orient2d_exact(pa, pb, pc), d.sqrt_conformal()));
  return detail::sign(total);
}

}  // namespace hypersteiner::predicates
