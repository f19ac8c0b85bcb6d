#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "hypersteiner/klein.hpp"
#include "hypersteiner/random.hpp"
#include "test_support.hpp"

using namespace hypersteiner;
using hstest::random_point;
using hstest::random_vec;

namespace {

constexpr double kPi = std::numbers::pi;

// Hyperboloid exponential map written out independently: lift the base and
// the chart tangent, walk the hyperbola, project back to the chart.
Vec2 hyperboloid_exp(const KleinPoint& b, Vec2 v) {
  using LD = long double;
  const LD a = 1.0L - static_cast<LD>(b.x()) * b.x() - static_cast<LD>(b.y()) * b.y();
  const LD g = 1.0L / std::sqrt(a);
  const LD bv = static_cast<LD>(b.x()) * v.x + static_cast<LD>(b.y()) * v.y;
  const LD g3 = g * g * g * bv;
  // d/dt of g(b + t v) (1, b + t v) at t = 0.
  const LD V0 = g3;
  const LD V1 = g3 * b.x() + g * v.x;
  const LD V2 = g3 * b.y() + g * v.y;
  const LD n = std::sqrt(-V0 * V0 + V1 * V1 + V2 * V2);
  if (n == 0.0L) return b.vec();
  const LD X0 = g * std::cosh(n) + V0 / n * std::sinh(n);
  const LD X1 = g * b.x() * std::cosh(n) + V1 / n * std::sinh(n);
  const LD X2 = g * b.y() * std::cosh(n) + V2 / n * std::sinh(n);
  return {static_cast<double>(X1 / X0), static_cast<double>(X2 / X0)};
}

}  // namespace

TEST(KleinPoint, RejectsPointsOnOrOutsideTheGuard) {
  EXPECT_THROW(KleinPoint(1.0, 0.0), GeometryError);
  EXPECT_THROW(KleinPoint(0.8, 0.8), GeometryError);
  EXPECT_THROW(KleinPoint(1.0 - 1e-13, 0.0), GeometryError);
  EXPECT_THROW(KleinPoint(std::nan(""), 0.0), GeometryError);
  EXPECT_THROW(KleinPoint(INFINITY, 0.0), GeometryError);
  EXPECT_FALSE(KleinPoint::try_make(1.0, 0.0).has_value());
  EXPECT_TRUE(KleinPoint::try_make(0.3, -0.4).has_value());
}

TEST(KleinPoint, AdmitsExtremeBoundaryRadius) {
  const double t = 1.0 - 1e-10;
  for (int k = 0; k < 10; ++k) {
    const double a = 2.0 * kPi * k / 10;
    EXPECT_NO_THROW(KleinPoint(t * std::cos(a), t * std::sin(a)));
  }
  const KleinPoint p(t, 0.0);
  // 1 - t^2 = (1 - t)(1 + t) with 1 - t exact.
  const double expected = (1.0 - t) * (1.0 + t);
  EXPECT_NEAR(p.conformal(), expected, 1e-15 * expected);
}

TEST(Lorentzian, Examples) {
  EXPECT_DOUBLE_EQ(lorentzian_inner(KleinPoint(0, 0), KleinPoint(0, 0)), -1.0);
  EXPECT_DOUBLE_EQ(lorentzian_inner(KleinPoint(0.5, 0), KleinPoint(0.5, 0)), -0.75);
  EXPECT_NEAR(lorentzian_inner(KleinPoint(0.3, 0.4), KleinPoint(-0.1, 0.2)), -1.0 + (-0.03 + 0.08), 1e-16);
}

TEST(Lorentzian, SymmetricAndNegativeOnTheDiagonal) {
  RandomStream rng(11);
  for (int i = 0; i < 1000; ++i) {
    const auto x = random_point(rng, 0.999);
    const auto y = random_point(rng, 0.999);
    EXPECT_NEAR(lorentzian_inner(x, y), lorentzian_inner(y, x), 1e-15);
    EXPECT_LT(lorentzian_inner(x, x), 0.0);
  }
}

TEST(Distance, Examples) {
  EXPECT_EQ(distance(KleinPoint(0, 0), KleinPoint(0, 0)), 0.0);
  EXPECT_NEAR(distance(KleinPoint(0, 0), KleinPoint(0.5, 0)), std::atanh(0.5), 1e-15);
  EXPECT_NEAR(distance(KleinPoint(0, 0), KleinPoint(0.5, 0)), std::acosh(1.0 / std::sqrt(0.75)), 1e-12);
}

TEST(Distance, RadialDistanceIsArtanhNotTwiceIt) {
  // Origin to (r, 0) evaluates to artanh(r) under the arccosh formula.
  for (double r : {0.1, 0.5, 0.9, 0.999}) {
    EXPECT_NEAR(distance(KleinPoint(0, 0), KleinPoint(r, 0)), std::atanh(r), 1e-12 * (1 + std::atanh(r)));
  }
}

TEST(Distance, NearBoundaryMatchesClosedForm) {
  const double r = 1.0 - 1e-10;
  const double one_minus_r = 1.0 - r;  // exact by Sterbenz
  const double expected = 0.5 * std::log((1.0 + r) / one_minus_r);
  EXPECT_NEAR(distance(KleinPoint(0, 0), KleinPoint(r, 0)), expected, 1e-12 * expected);
  EXPECT_NEAR(distance(KleinPoint(-r, 0), KleinPoint(r, 0)), 2.0 * expected, 1e-11 * expected);
}

TEST(Distance, AgreesWithExtendedPrecisionArccosh) {
  RandomStream rng(12);
  for (int i = 0; i < 2000; ++i) {
    const auto x = random_point(rng, 0.99);
    const auto y = random_point(rng, 0.99);
    const double want = hstest::oracle_distance(x, y);
    if (want < 1e-3) continue;  // arccosh oracle loses digits for close pairs
    EXPECT_NEAR(distance(x, y), want, 1e-10 * (1.0 + want));
  }
}

TEST(Distance, SmallSeparationsStayAccurate) {
  // For nearby points the metric at the base gives the first-order length.
  RandomStream rng(13);
  for (int i = 0; i < 200; ++i) {
    const auto p = random_point(rng, 0.9);
    const Vec2 dir = random_vec(rng, 1.0);
    const Vec2 step = (1e-9 / norm(dir)) * dir;
    const KleinPoint q(p.x() + step.x, p.y() + step.y);
    const double first_order = metric_norm(p, step);
    EXPECT_NEAR(distance(p, q), first_order, 1e-6 * first_order);
  }
}

TEST(Distance, MetricAxioms) {
  RandomStream rng(14);
  for (int i = 0; i < 2000; ++i) {
    const auto x = random_point(rng, 0.999);
    const auto y = random_point(rng, 0.999);
    const auto z = random_point(rng, 0.999);
    EXPECT_EQ(distance(x, y), distance(y, x));
    EXPECT_EQ(distance(x, x), 0.0);
    EXPECT_GT(distance(x, y), 0.0);
    EXPECT_LE(distance(x, z), distance(x, y) + distance(y, z) + 1e-10);
  }
}

TEST(Gamma, Examples) {
  EXPECT_DOUBLE_EQ(gamma(KleinPoint(0, 0)), 1.0);
  EXPECT_DOUBLE_EQ(gamma(KleinPoint(0.6, 0)), 1.25);
  EXPECT_NEAR(gamma(KleinPoint(0.8, 0)), 5.0 / 3.0, 1e-15);
}

TEST(Gamma, SquaredTimesConformalFactorIsOne) {
  RandomStream rng(15);
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_point(rng, 0.999999);
    const double g = gamma(p);
    EXPECT_NEAR(g * g * (1.0 - p.x() * p.x() - p.y() * p.y()), 1.0, 1e-9);
    EXPECT_NEAR(g * g * p.conformal(), 1.0, 1e-12);
  }
}

TEST(Barycenter, Examples) {
  const KleinPoint p(0.3, -0.2);
  const auto m = barycenter(p, p, p);
  EXPECT_NEAR(m.x(), p.x(), 1e-15);
  EXPECT_NEAR(m.y(), p.y(), 1e-15);

  const auto o = barycenter(KleinPoint(0, 0), KleinPoint(0.7, 0), KleinPoint(-0.7, 0));
  EXPECT_NEAR(o.x(), 0.0, 1e-15);
  EXPECT_NEAR(o.y(), 0.0, 1e-15);

  // (1.25 * 0.6, 1.25 * 0.6) / (1.25 + 1.25 + 1)
  const auto b = barycenter(KleinPoint(0.6, 0), KleinPoint(0, 0.6), KleinPoint(0, 0));
  EXPECT_NEAR(b.x(), 0.75 / 3.5, 1e-15);
  EXPECT_NEAR(b.y(), 0.75 / 3.5, 1e-15);
}

TEST(Barycenter, LiesInsideTheEuclideanHull) {
  RandomStream rng(16);
  for (int i = 0; i < 1000; ++i) {
    const auto u = random_point(rng, 0.999);
    const auto v = random_point(rng, 0.999);
    const auto w = random_point(rng, 0.999);
    const auto m = barycenter(u, v, w);
    EXPECT_LT(m.norm2(), 1.0);
    // Recover the weights and compare with the Lorentz factors.
    const double det = (v.x() - u.x()) * (w.y() - u.y()) - (w.x() - u.x()) * (v.y() - u.y());
    if (std::fabs(det) < 1e-6) continue;
    const double l1 = ((m.x() - u.x()) * (w.y() - u.y()) - (w.x() - u.x()) * (m.y() - u.y())) / det;
    const double l2 = ((v.x() - u.x()) * (m.y() - u.y()) - (m.x() - u.x()) * (v.y() - u.y())) / det;
    const double l0 = 1.0 - l1 - l2;
    EXPECT_GT(l0, 0.0);
    EXPECT_GT(l1, 0.0);
    EXPECT_GT(l2, 0.0);
    const double s = gamma(u) + gamma(v) + gamma(w);
    EXPECT_NEAR(l1, gamma(v) / s, 1e-8);
    EXPECT_NEAR(l2, gamma(w) / s, 1e-8);
  }
}

TEST(Midpoint, IsEquidistantOnTheGeodesic) {
  RandomStream rng(17);
  for (int i = 0; i < 200; ++i) {
    const auto u = random_point(rng, 0.99);
    const auto v = random_point(rng, 0.99);
    const auto m = midpoint(u, v);
    const double d = distance(u, v);
    EXPECT_NEAR(distance(u, m), d / 2, 1e-9 * (1 + d));
    EXPECT_NEAR(distance(v, m), d / 2, 1e-9 * (1 + d));
  }
}

TEST(Metric, FrameIsOrthonormal) {
  RandomStream rng(18);
  for (int i = 0; i < 500; ++i) {
    const auto p = random_point(rng, 0.9999);
    const auto [e1, e2] = orthonormal_frame(p);
    EXPECT_NEAR(metric_inner(p, e1, e1), 1.0, 1e-9);
    EXPECT_NEAR(metric_inner(p, e2, e2), 1.0, 1e-9);
    EXPECT_NEAR(metric_inner(p, e1, e2), 0.0, 1e-9);
  }
}

TEST(Angle, Examples) {
  EXPECT_NEAR(angle_at(KleinPoint(0, 0), KleinPoint(0.3, 0), KleinPoint(0, 0.3)), kPi / 2, 1e-15);
  EXPECT_NEAR(angle_at(KleinPoint(0, 0), KleinPoint(0.3, 0), KleinPoint(-0.3, 0)), kPi, 1e-15);
  const auto tri = hstest::regular_polygon(3, 1e-4);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(angle_at(tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]), kPi / 3, 1e-6);
  }
}

TEST(Angle, DegenerateInputThrows) {
  const KleinPoint p(0.1, 0.2);
  EXPECT_THROW(angle_at(p, p, KleinPoint(0, 0)), GeometryError);
  EXPECT_THROW(angle_at(p, KleinPoint(0, 0), p), GeometryError);
}

TEST(Angle, MatchesTheHyperbolicCosineRule) {
  RandomStream rng(19);
  for (int i = 0; i < 2000; ++i) {
    const auto a = random_point(rng, 0.95);
    const auto b = random_point(rng, 0.95);
    const auto c = random_point(rng, 0.95);
    if (distance(a, b) < 1e-2 || distance(b, c) < 1e-2 || distance(a, c) < 1e-2) continue;
    const double got = angle_at(b, a, c);
    EXPECT_GE(got, 0.0);
    EXPECT_LE(got, kPi);
    EXPECT_NEAR(got, hstest::oracle_angle(b, a, c), 1e-8);
    EXPECT_NEAR(std::cos(got), angle_cosine(b, a, c), 1e-12);
  }
}

TEST(Angle, TinyTrianglesAreFlat) {
  RandomStream rng(20);
  for (int i = 0; i < 500; ++i) {
    const auto center = random_point(rng, 0.9);
    const auto [e1, e2] = orthonormal_frame(center);
    std::vector<KleinPoint> tri;
    for (double base_angle : {0.0, 2.1, 4.2}) {
      const double a = base_angle + 0.5 * rng.uniform(-1.0, 1.0);
      const double len = 1e-4 * rng.uniform(0.5, 1.0);
      tri.push_back(exp_map(center, (len * std::cos(a)) * e1 + (len * std::sin(a)) * e2));
    }
    const double sum = angle_at(tri[0], tri[1], tri[2]) + angle_at(tri[1], tri[2], tri[0]) +
                       angle_at(tri[2], tri[0], tri[1]);
    EXPECT_NEAR(sum, kPi, 1e-6);
  }
}

TEST(Angle, LargeTrianglesHaveAngleDefect) {
  const auto tri = hstest::regular_polygon(3, 0.9);
  const double sum = angle_at(tri[0], tri[1], tri[2]) + angle_at(tri[1], tri[2], tri[0]) +
                     angle_at(tri[2], tri[0], tri[1]);
  EXPECT_LT(sum, kPi - 0.1);
}

TEST(ExpMap, ZeroVectorIsIdentity) {
  RandomStream rng(21);
  for (int i = 0; i < 100; ++i) {
    const auto p = random_point(rng, 0.999);
    const auto q = exp_map(p, Vec2{0, 0});
    EXPECT_EQ(q, p);
  }
}

TEST(ExpMap, FromOriginReachesTanhRadius) {
  for (double len : {0.1, 1.0, 3.0, 10.0}) {
    const Vec2 dir{0.6, -0.8};
    const auto q = exp_map(KleinPoint(0, 0), len * dir);
    EXPECT_NEAR(std::hypot(q.x(), q.y()), std::tanh(len), 1e-14);
    EXPECT_NEAR(q.x() / std::hypot(q.x(), q.y()), 0.6, 1e-12);
  }
}

TEST(ExpMap, UnitSpeedGeodesics) {
  RandomStream rng(22);
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_point(rng, 0.999);
    const auto [e1, e2] = orthonormal_frame(p);
    const double len = 3.0 * rng.uniform();
    const double ang = 2.0 * kPi * rng.uniform();
    const Vec2 v = (len * std::cos(ang)) * e1 + (len * std::sin(ang)) * e2;
    const auto q = exp_map(p, v);
    EXPECT_NEAR(distance(p, q), metric_norm(p, v), 1e-9 * (1 + len));
  }
}

TEST(ExpMap, MatchesHyperboloidConstruction) {
  RandomStream rng(23);
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_point(rng, 0.95);
    const auto [e1, e2] = orthonormal_frame(p);
    const double len = 2.0 * rng.uniform();
    const double ang = 2.0 * kPi * rng.uniform();
    const Vec2 v = (len * std::cos(ang)) * e1 + (len * std::sin(ang)) * e2;
    const auto q = exp_map(p, v);
    const Vec2 want = hyperboloid_exp(p, v);
    EXPECT_NEAR(q.x(), want.x, 1e-12);
    EXPECT_NEAR(q.y(), want.y, 1e-12);
  }
}

TEST(LogMap, Examples) {
  const KleinPoint p(0.2, 0.3);
  const auto z = log_map(p, p);
  EXPECT_EQ(z.vx, 0.0);
  EXPECT_EQ(z.vy, 0.0);

  const auto v = log_map(KleinPoint(0, 0), KleinPoint(std::tanh(1.0), 0));
  EXPECT_NEAR(metric_norm(v), 1.0, 1e-12);
  EXPECT_NEAR(v.vy, 0.0, 1e-15);
  EXPECT_GT(v.vx, 0.0);
}

TEST(LogMap, RoundTripsThroughExp) {
  RandomStream rng(24);
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_point(rng, 0.99);
    const auto q = random_point(rng, 0.99);
    const auto v = log_map(p, q);
    EXPECT_NEAR(metric_norm(v), distance(p, q), 1e-9 * (1 + distance(p, q)));
    const auto back = exp_map(p, v);
    EXPECT_NEAR(back.x(), q.x(), 1e-9);
    EXPECT_NEAR(back.y(), q.y(), 1e-9);
  }
}

TEST(Retraction, AgreesWithExpToFirstOrder) {
  RandomStream rng(25);
  for (int i = 0; i < 200; ++i) {
    const auto p = random_point(rng, 0.9);
    const Vec2 v = random_vec(rng, 1.0);
    EXPECT_EQ(retract(p, TangentVector{0.0, 0.0, p}), p);
    const double e1 = distance(retract(p, TangentVector{1e-5 * v.x, 1e-5 * v.y, p}), exp_map(p, 1e-5 * v));
    const double e2 = distance(retract(p, TangentVector{2e-5 * v.x, 2e-5 * v.y, p}), exp_map(p, 2e-5 * v));
    // Second-order agreement: doubling the step quadruples the gap.
    EXPECT_GT(e2, 3.5 * e1);
    EXPECT_LT(e2, 4.5 * e1);
  }
}

TEST(Retraction, StaysInsideTheDisk) {
  const KleinPoint p(0.99, 0.0);
  const auto q = retract(p, TangentVector{10.0, 0.0, p});
  EXPECT_LT(q.x(), 1.0);
  EXPECT_GT(q.x(), p.x());
}

TEST(WrappedGaussian, IsDeterministicGivenTheSeed) {
  const GaussianSpec spec{KleinPoint(0.3, -0.4), 0.5};
  RandomStream a(99);
  RandomStream b(99);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_wrapped_gaussian(spec, a), sample_wrapped_gaussian(spec, b));
}

TEST(WrappedGaussian, TinySigmaReturnsTheMean) {
  RandomStream rng(26);
  const KleinPoint mu(0.5, 0.5);
  for (int i = 0; i < 20; ++i) {
    const auto p = sample_wrapped_gaussian({mu, 1e-12}, rng);
    EXPECT_LT(distance(p, mu), 1e-10);
  }
}

TEST(WrappedGaussian, DistanceFromOriginIsRayleigh) {
  // At the origin the wrap is exp_0 of an isotropic normal, so hyperbolic
  // radii follow the Rayleigh law with scale sigma. One-sample KS test.
  RandomStream rng(27);
  const double sigma = 0.5;
  const int n = 10000;
  std::vector<double> r;
  for (int i = 0; i < n; ++i) r.push_back(distance(KleinPoint(0, 0), sample_wrapped_gaussian({KleinPoint(0, 0), sigma}, rng)));
  std::sort(r.begin(), r.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double cdf = 1.0 - std::exp(-r[i] * r[i] / (2 * sigma * sigma));
    d = std::max({d, std::fabs(cdf - static_cast<double>(i) / n), std::fabs(cdf - static_cast<double>(i + 1) / n)});
  }
  EXPECT_LT(d, 1.63 / std::sqrt(static_cast<double>(n)));  // 1% critical value
}

TEST(WrappedGaussian, TransportPreservesDistanceLaw) {
  // Moving the mean is an isometry, so d(mu, sample) is Rayleigh as well.
  RandomStream rng(28);
  const double sigma = 0.3;
  const KleinPoint mu(0.99, 0.0);
  const int n = 5000;
  std::vector<double> r;
  for (int i = 0; i < n; ++i) r.push_back(distance(mu, sample_wrapped_gaussian({mu, sigma}, rng)));
  std::sort(r.begin(), r.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double cdf = 1.0 - std::exp(-r[i] * r[i] / (2 * sigma * sigma));
    d = std::max({d, std::fabs(cdf - static_cast<double>(i) / n), std::fabs(cdf - static_cast<double>(i + 1) / n)});
  }
  EXPECT_LT(d, 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST(WrappedGaussian, SucceedsAtTheExtremeBoundary) {
  RandomStream rng(29);
  const double t = 1.0 - 1e-10;
  for (int k = 0; k < 10; ++k) {
    const KleinPoint mu(t * std::cos(2 * kPi * k / 10), t * std::sin(2 * kPi * k / 10));
    for (int i = 0; i < 50; ++i) {
      const auto p = sample_wrapped_gaussian({mu, 0.1}, rng);
      EXPECT_LT(p.norm2(), 1.0);
    }
  }
}

TEST(Poincare, ConversionsRoundTrip) {
  RandomStream rng(30);
  for (int i = 0; i < 500; ++i) {
    const auto p = random_point(rng, 0.999);
    const Vec2 z = klein_to_poincare(p);
    const auto back = poincare_to_klein(z.x, z.y);
    EXPECT_NEAR(back.x(), p.x(), 1e-14);
    EXPECT_NEAR(back.y(), p.y(), 1e-14);
  }
  const auto k = poincare_to_klein(0.5, 0.0);
  EXPECT_NEAR(k.x(), 0.8, 1e-15);
}
