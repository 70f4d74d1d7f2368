#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "memmap/core_map.hpp"
#include "memmap/linalg2.hpp"

using namespace memmap;

namespace {

// tent written directly from its two branches
double tent_ref(double x) { return x < 0.5 ? 2.0 * x : 2.0 - 2.0 * x; }

Point2 step_ref(double a, Point2 p) { return {p.y, tent_ref(a * p.y + (1.0 - a) * p.x)}; }

Mat2 inverse_of(const Mat2& m) {
  double d = m.det();
  return {m.d / d, -m.b / d, -m.c / d, m.a / d};
}

}  // namespace

TEST(Tent, BranchValues) {
  EXPECT_DOUBLE_EQ(tent(0.25), 0.5);
  EXPECT_DOUBLE_EQ(tent(0.5), 1.0);
  EXPECT_DOUBLE_EQ(tent(0.75), 0.5);
  EXPECT_DOUBLE_EQ(tent(0.0), 0.0);
  EXPECT_DOUBLE_EQ(tent(1.0), 0.0);
}

TEST(Tent, RejectsOutsideUnitInterval) {
  EXPECT_THROW(tent(1.1), DomainError);
  EXPECT_THROW(tent(-0.01), DomainError);
  EXPECT_NO_THROW(tent(1.0 + 1e-13));
}

TEST(BaseMap, TentConstructorMatchesTent) {
  BaseMap b = BaseMap::tent();
  EXPECT_EQ(b.branch_count(), 2);
  for (int i = 0; i <= 1000; ++i) {
    double x = i / 1000.0;
    EXPECT_NEAR(b(x), tent_ref(x), 1e-15);
  }
  EXPECT_EQ(b.branch_of(0.25), 1);
  EXPECT_EQ(b.branch_of(0.5), 2);
}

TEST(BaseMap, RejectsBadBranches) {
  EXPECT_THROW(BaseMap({0.0, 0.5, 1.0}, {0.5, -0.5}, {0.0, 0.5}), DomainError);  // not expanding
  EXPECT_THROW(BaseMap({0.0, 0.5, 1.0}, {2.0, 2.0}, {0.0, -1.0}), DomainError);  // discontinuous at 1/2
  EXPECT_THROW(BaseMap({0.0, 1.0}, {3.0}, {0.0}), DomainError);                 // image leaves [0,1]
  EXPECT_THROW(BaseMap({0.0, 0.6, 0.5, 1.0}, {2.0, 2.0, 2.0}, {0.0, 0.0, 0.0}), DomainError);
}

TEST(BaseMap, BranchInverseRoundTrip) {
  BaseMap b = BaseMap::tent();
  for (double v : {0.0, 0.2, 0.5, 0.99}) {
    EXPECT_NEAR(b(b.branch_inverse(1, v)), v, 1e-15);
    EXPECT_NEAR(b(b.branch_inverse(2, v)), v, 1e-15);
  }
  EXPECT_THROW(b.branch_inverse(3, 0.5), DomainError);
}

TEST(SValue, ConvexCombination) {
  EXPECT_DOUBLE_EQ(s_value(0.5, {0.4, 0.4}), 0.4);
  EXPECT_DOUBLE_EQ(s_value(0.25, {1.0, 0.0}), 0.75);
  EXPECT_NEAR(s_value(0.75, {1.0 / 3.0, 1.0}), 5.0 / 6.0, 1e-15);
}

TEST(Classify, BoundaryBelongsToUpperRegion) {
  EXPECT_EQ(classify(0.5, {0.4, 0.4}), RegionLabel::A1);
  EXPECT_EQ(classify(0.5, {0.6, 0.6}), RegionLabel::A2);
  EXPECT_EQ(classify(0.5, {0.5, 0.5}), RegionLabel::A2);
}

TEST(GStep, NamedValues) {
  for (double a : {0.0, 0.1, 0.3, 0.5, 0.7, 0.9}) {
    Point2 q = g_step(a, kInteriorFixedPoint);
    EXPECT_NEAR(q.x, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(q.y, 2.0 / 3.0, 1e-15);
  }
  EXPECT_EQ(g_step(0.5, {1.0, 1.0}), (Point2{1.0, 0.0}));
  Point2 q = g_step(0.0, {0.25, 0.9});
  EXPECT_DOUBLE_EQ(q.x, 0.9);
  EXPECT_DOUBLE_EQ(q.y, 0.5);
}

TEST(GStep, AgreesWithDirectFormulaAndShifts) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BaseMap b = BaseMap::tent();
  MemoryMap dummy(0.5);
  for (int i = 0; i < 10000; ++i) {
    double a = u(rng) * 0.999;
    Point2 p{u(rng), u(rng)};
    Point2 q = g_step(a, p), r = step_ref(a, p);
    EXPECT_EQ(q.x, p.y);
    EXPECT_NEAR(q.y, r.y, 1e-15);
    EXPECT_NEAR(g_step(a, p, b).y, r.y, 1e-15);
    EXPECT_NEAR(MemoryMap(a)(p).y, r.y, 1e-15);
  }
}

TEST(GStep, NoMemorySecondIterateIsProductOfTents) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    Point2 p{u(rng), u(rng)};
    Point2 q = g_step(0.0, g_step(0.0, p));
    EXPECT_EQ(q.x, tent_ref(p.x));
    EXPECT_EQ(q.y, tent_ref(p.y));
  }
}

TEST(Orbit, PeriodThreeAtOneHalf) {
  auto o = orbit(0.5, {1.0, 1.0}, 3);
  ASSERT_EQ(o.size(), 3u);
  EXPECT_EQ(o[0], (Point2{1.0, 0.0}));
  EXPECT_EQ(o[1], (Point2{0.0, 1.0}));
  EXPECT_EQ(o[2], (Point2{1.0, 1.0}));
}

TEST(Orbit, SwapAtThreeQuarters) {
  auto o = orbit(0.75, {1.0 / 3.0, 1.0}, 2);
  EXPECT_NEAR(o[0].x, 1.0, 1e-15);
  EXPECT_NEAR(o[0].y, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(o[1].x, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(o[1].y, 1.0, 1e-15);
}

TEST(Orbit, ConsecutiveImagesAndSkip) {
  auto o = orbit(0.37, {0.2, 0.9}, 50, 7);
  auto full = orbit(0.37, {0.2, 0.9}, 57);
  for (std::size_t k = 0; k < 50; ++k) EXPECT_EQ(o[k], full[k + 7]);
  for (std::size_t k = 0; k + 1 < o.size(); ++k) EXPECT_EQ(o[k + 1], g_step(0.37, o[k]));
  EXPECT_THROW(orbit(0.37, {0.2, 0.9}, 0), DomainError);
  EXPECT_THROW(orbit(0.37, {1.2, 0.9}, 3), DomainError);
}

TEST(Orbit, ConvergesToFixedPointAboveOneHalf) {
  auto o = orbit(0.6, {0.9, 0.1}, 100000);
  EXPECT_LT(distance(o.back(), kInteriorFixedPoint), 1e-6);
}

TEST(MemoryMap, DriftIsReported) {
  MemoryMap g(0.3);
  EXPECT_THROW(g.checked_step({0.5, 1.5}), DriftError);
}

TEST(Alpha, RangeChecked) {
  EXPECT_THROW(Alpha(1.0), DomainError);
  EXPECT_THROW(Alpha(-0.1), DomainError);
  EXPECT_THROW(Alpha(std::nan("")), DomainError);
  EXPECT_NO_THROW(Alpha(0.0));
}

TEST(FixedPoints, OnlyOriginAndInteriorPoint) {
  // fixed points need x = y and tent(x) = x, so x in {0, 2/3}; scan for near-fixed points elsewhere
  const int n = 600;
  for (double a : {0.2, 0.45, 0.6, 0.74}) {
    double worst = 1e300;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        Point2 p{double(i) / n, double(j) / n};
        if (distance(p, {0, 0}) < 0.02 || distance(p, kInteriorFixedPoint) < 0.02) continue;
        worst = std::min(worst, distance(g_step(a, p), p));
      }
    EXPECT_GT(worst, 1e-3) << "alpha " << a;
  }
}

TEST(InverseBranch, UndoesForwardStep) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BaseMap b = BaseMap::tent();
  for (int i = 0; i < 2000; ++i) {
    double a = 0.05 + 0.9 * u(rng);
    Point2 p{u(rng), u(rng)};
    int j = classify(a, p) == RegionLabel::A1 ? 1 : 2;
    Point2 back = inverse_branch(a, b, j, g_step(a, p));
    EXPECT_NEAR(back.x, p.x, 1e-9);
    EXPECT_NEAR(back.y, p.y, 1e-12);
  }
}

TEST(InverseBranchDerivative, NamedValues) {
  BaseMap b = BaseMap::tent();
  Mat2 m1 = inverse_branch_derivative(0.5, b, 1, 0.3);
  EXPECT_EQ(m1, (Mat2{-1.0, 1.0, 1.0, 0.0}));
  Mat2 m2 = inverse_branch_derivative(0.5, b, 2, 0.7);
  EXPECT_EQ(m2, (Mat2{-1.0, -1.0, 1.0, 0.0}));
  EXPECT_THROW(inverse_branch_derivative(0.5, b, 3, 0.7), DomainError);
  EXPECT_THROW(inverse_branch_derivative(0.5, b, 1, 1.5), DomainError);
}

TEST(InverseBranchDerivative, IsInverseOfForwardJacobian) {
  BaseMap b = BaseMap::tent();
  for (double a : {0.0, 0.1, 0.3, 0.5, 0.8}) {
    for (int j : {1, 2}) {
      double k = j == 1 ? 2.0 : -2.0;
      Mat2 fwd{0.0, 1.0, k * (1.0 - a), k * a};
      Mat2 inv = inverse_branch_derivative(a, b, j, 0.4);
      Mat2 id = inv * fwd;
      EXPECT_NEAR(id.a, 1.0, 1e-14);
      EXPECT_NEAR(id.b, 0.0, 1e-14);
      EXPECT_NEAR(id.c, 0.0, 1e-14);
      EXPECT_NEAR(id.d, 1.0, 1e-14);
    }
  }
}

TEST(InverseBranchDerivative, MatchesFiniteDifference) {
  BaseMap b = BaseMap::tent();
  const double h = 1e-6;
  for (double a : {0.2, 0.45, 0.7})
    for (int j : {1, 2}) {
      Point2 uv{0.4, 0.55};
      Mat2 m = inverse_branch_derivative(a, b, j, uv.y);
      Point2 du = (1.0 / (2 * h)) * (inverse_branch(a, b, j, {uv.x + h, uv.y}) - inverse_branch(a, b, j, {uv.x - h, uv.y}));
      Point2 dv = (1.0 / (2 * h)) * (inverse_branch(a, b, j, {uv.x, uv.y + h}) - inverse_branch(a, b, j, {uv.x, uv.y - h}));
      EXPECT_NEAR(m.a, du.x, 1e-7);
      EXPECT_NEAR(m.c, du.y, 1e-7);
      EXPECT_NEAR(m.b, dv.x, 1e-7);
      EXPECT_NEAR(m.d, dv.y, 1e-7);
    }
}

TEST(InverseBranchDerivative, ChainEqualsProductOfInverses) {
  BaseMap b = BaseMap::tent();
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<int> sym(1, 2);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int t = 0; t < 200; ++t) {
    double a = u(rng);
    std::vector<int> word(1 + t % 8);
    for (auto& s : word) s = sym(rng);
    Mat2 ref = Mat2::identity(), back = Mat2::identity();
    for (int s : word) {
      ref = ref * inverse_of(branch_matrix(s, a));
      back = back * inverse_branch_derivative(a, b, s, 0.5);
    }
    double scale = std::max(1.0, ref.max_abs()) * double(word.size());
    EXPECT_NEAR(back.a, ref.a, 1e-12 * scale);
    EXPECT_NEAR(back.b, ref.b, 1e-12 * scale);
    EXPECT_NEAR(back.c, ref.c, 1e-12 * scale);
    EXPECT_NEAR(back.d, ref.d, 1e-12 * scale);
  }
}

TEST(InverseBranchDerivative, LargerSingularValueAtLeastOne) {
  BaseMap b = BaseMap::tent();
  for (int i = 0; i < 99; ++i) {
    double a = 0.01 * (i + 0.5);
    for (int j : {1, 2}) EXPECT_GE(singular_values(inverse_branch_derivative(a, b, j, 0.5)).s1, 1.0 - 1e-15);
  }
}
