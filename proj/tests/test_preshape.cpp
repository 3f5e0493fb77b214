#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "geocurve/selfcheck.hpp"

using namespace geocurve;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

void expect_coords(const Vector& got, std::initializer_list<double> want, double tol = 1e-15) {
  ASSERT_EQ(got.size(), static_cast<Eigen::Index>(want.size()));
  Eigen::Index i = 0;
  for (double w : want) EXPECT_NEAR(got[i++], w, tol) << "index " << i - 1;
}

}  // namespace

TEST(Duplicate, PairsEachCoordinate) {
  expect_coords(duplicate(RawFeature{1, 3}).coords(), {1, 1, 3, 3});
  expect_coords(duplicate(RawFeature{0, 0}).coords(), {0, 0, 0, 0});
  expect_coords(duplicate(RawFeature{2, -1, 5}).coords(), {2, 2, -1, -1, 5, 5});
}

TEST(RawFeature, RejectsShortOrNonFinite) {
  EXPECT_THROW(RawFeature{1.0}, Error);
  EXPECT_THROW(RawFeature(vec({1.0, std::nan("")})), Error);
}

TEST(Center, SubtractsPerAxisMeans) {
  expect_coords(center(PairedVector(vec({1, 1, 3, 3}))).coords(), {-1, -1, 1, 1});
  expect_coords(center(PairedVector(vec({0, 0, 0, 0}))).coords(), {0, 0, 0, 0});
  expect_coords(center(PairedVector(vec({2, 2, -1, -1, 5, 5}))).coords(), {0, 0, -3, -3, 3, 3});
}

TEST(Center, AxesAreIndependent) {
  // x mean 1, y mean 10
  expect_coords(center(PairedVector(vec({0, 5, 2, 15}))).coords(), {-1, -5, 1, 5});
}

TEST(Normalize, ScalesToUnitNorm) {
  expect_coords(normalize(PairedVector(vec({-1, -1, 1, 1}))).coords(), {-0.5, -0.5, 0.5, 0.5});
  const Vector unit = vec({-0.5, -0.5, 0.5, 0.5});
  expect_coords(normalize(PairedVector(unit)).coords(), {-0.5, -0.5, 0.5, 0.5});
}

TEST(Normalize, ZeroVectorIsDegenerate) {
  try {
    normalize(PairedVector(vec({0, 0, 0, 0})));
    FAIL() << "expected DegenerateVector";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateVector);
  }
}

TEST(Project, WorkedExamples) {
  expect_coords(project(RawFeature{1, 3}).coords(), {-0.5, -0.5, 0.5, 0.5});
  expect_coords(project(RawFeature{3, 1}).coords(), {0.5, 0.5, -0.5, -0.5});
}

TEST(Project, ConstantVectorIsDegenerate) {
  for (double c : {0.0, 1.0, -7.25}) {
    try {
      project(RawFeature{c, c, c, c});
      FAIL() << "expected DegenerateVector for constant " << c;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::DegenerateVector);
    }
  }
}

TEST(GeodesicDistance, WorkedExamples) {
  const auto a = project(RawFeature{1, 3});
  const auto b = project(RawFeature{3, 1});
  EXPECT_EQ(geodesic_distance(a, a), 0.0);
  EXPECT_NEAR(geodesic_distance(a, b), std::numbers::pi, 1e-15);

  // [1,-1,0,0] and [0,0,1,-1] project to orthogonal pre-shapes
  const auto c = project(RawFeature{1, -1, 0, 0});
  const auto d = project(RawFeature{0, 0, 1, -1});
  EXPECT_NEAR(c.coords().dot(d.coords()), 0.0, 1e-16);
  EXPECT_NEAR(geodesic_distance(c, d), std::numbers::pi / 2, 1e-15);
}

TEST(GeodesicDistance, DimensionMismatch) {
  try {
    geodesic_distance(project(RawFeature{1, 3}), project(RawFeature{1, 2, 3}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(GeodesicDistance, SmallAnglesKeepPrecision) {
  Rng rng(3);
  const PreShapeVector a = gen::preshape(rng, 32);
  Vector u = gen::preshape(rng, 32).coords();
  u -= a.coords() * a.coords().dot(u);
  u /= u.norm();
  const auto b = PreShapeVector::trusted(std::cos(1e-7) * a.coords() + std::sin(1e-7) * u);
  EXPECT_NEAR(geodesic_distance(a, b), 1e-7, 1e-15);
}

TEST(PreShapeVector, CheckedRejectsOffSphere) {
  EXPECT_THROW(PreShapeVector::checked(vec({1, 1, 0, 0})), Error);              // not centered
  EXPECT_THROW(PreShapeVector::checked(vec({-1, -1, 1, 1})), Error);            // norm 2
  EXPECT_NO_THROW(PreShapeVector::checked(vec({-0.5, -0.5, 0.5, 0.5})));
}

// Properties over random inputs.

TEST(ProjectProperty, CenteredUnitNorm) {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto d = static_cast<Eigen::Index>(2 + uniform_index(rng, 511));
    const PreShapeVector p = project(gen::raw_feature(rng, d) * gen::uniform(rng, 1e-3, 1e3));
    const auto [mx, my] = detail::axis_means(p.coords());
    ASSERT_LE(std::abs(mx), 1e-12);
    ASSERT_LE(std::abs(my), 1e-12);
    ASSERT_LE(std::abs(p.coords().norm() - 1.0), 1e-12);
  }
}

TEST(ProjectProperty, ShiftAndScaleInvariant) {
  Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    const auto d = static_cast<Eigen::Index>(2 + uniform_index(rng, 200));
    const Vector v = gen::raw_feature(rng, d);
    const double a = gen::uniform(rng, 0.01, 100.0);
    const double b = gen::uniform(rng, -50.0, 50.0);
    const Vector moved = (a * v).array() + b;
    ASSERT_LE((project(moved).coords() - project(v).coords()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(ProjectProperty, ReprojectionIsIdentity) {
  Rng rng(13);
  for (int i = 0; i < 500; ++i) {
    const PreShapeVector p = gen::preshape(rng, static_cast<Eigen::Index>(2 + uniform_index(rng, 300)));
    const PreShapeVector again = normalize(center(PairedVector(p.coords())));
    ASSERT_LE((again.coords() - p.coords()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(GeodesicDistanceProperty, MetricAxioms) {
  Rng rng(14);
  for (int i = 0; i < 500; ++i) {
    const auto d = static_cast<Eigen::Index>(2 + uniform_index(rng, 64));
    const auto a = gen::preshape(rng, d), b = gen::preshape(rng, d), c = gen::preshape(rng, d);
    const double ab = geodesic_distance(a, b), ba = geodesic_distance(b, a);
    ASSERT_EQ(ab, ba);
    ASSERT_GE(ab, 0.0);
    ASSERT_LE(ab, std::numbers::pi);
    ASSERT_EQ(geodesic_distance(a, a), 0.0);
    ASSERT_LE(ab, geodesic_distance(a, c) + geodesic_distance(c, b) + 1e-9);
  }
}
