#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "memmap/regimes.hpp"

using namespace memmap;

namespace {

Point2 step_ref(double a, Point2 p) {
  double s = a * p.y + (1 - a) * p.x;
  return {p.y, s < 0.5 ? 2 * s : 2 - 2 * s};
}

// point-in-convex-polygon from the raw vertex list
bool inside(const ConvexPolygon& poly, Point2 p, double tol = 1e-12) {
  auto v = poly.vertices();
  double sign = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    Point2 a = v[i], b = v[(i + 1) % v.size()];
    double c = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if (std::abs(c) <= tol) continue;
    if (sign == 0) sign = c;
    else if (c * sign < 0) return false;
  }
  return true;
}

Point2 sample_in(const ConvexPolygon& poly, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  auto v = poly.vertices();
  std::vector<double> w(v.size());
  double tot = 0;
  for (auto& x : w) tot += x = -std::log(u(rng) + 1e-300);
  Point2 p{0, 0};
  for (std::size_t i = 0; i < v.size(); ++i) p = {p.x + v[i].x * w[i] / tot, p.y + v[i].y * w[i] / tot};
  return p;
}

}  // namespace

TEST(PeriodThree, CornerCycle) {
  auto r = verify_period3_half({1, 1});
  EXPECT_EQ(r.outcome, HalfOutcome::periodic3);
  EXPECT_EQ(r.entry_time, 0);
  EXPECT_EQ(r.cycle[0], (Point2{1, 1}));
  EXPECT_EQ(r.cycle[1], (Point2{1, 0}));
  EXPECT_EQ(r.cycle[2], (Point2{0, 1}));
  EXPECT_EQ(r.deviation, 0.0);
}

TEST(PeriodThree, FixedAndOrigin) {
  EXPECT_EQ(verify_period3_half({2.0 / 3, 2.0 / 3}).outcome, HalfOutcome::fixed);
  EXPECT_THROW(verify_period3_half({0, 0}), DomainError);
}

TEST(PeriodThree, TransientEntryTimeByDirectIteration) {
  Point2 p{0.1, 0.2};
  int n = 0;
  while (p.x + p.y < 1) { p = step_ref(0.5, p); ++n; }
  auto r = verify_period3_half({0.1, 0.2});
  EXPECT_EQ(r.outcome, HalfOutcome::transient_then_periodic3);
  EXPECT_EQ(r.entry_time, n);
  EXPECT_GT(n, 0);
  EXPECT_LE(r.deviation, 1e-12);
}

TEST(PeriodThree, CompositionIsIdentity) {
  AffineMap c = period3_composition();
  EXPECT_EQ(c.lin.a, 1.0);
  EXPECT_EQ(c.lin.b, 0.0);
  EXPECT_EQ(c.lin.c, 0.0);
  EXPECT_EQ(c.lin.d, 1.0);
  EXPECT_EQ(c.shift.x, 0.0);
  EXPECT_EQ(c.shift.y, 0.0);
}

TEST(PeriodThree, DyadicPointsReturnExactly) {
  for (int i = 0; i <= 64; ++i)
    for (int j = 0; j <= 64; ++j) {
      Point2 p{i / 64.0, j / 64.0};
      if (p.x + p.y < 1) continue;
      Point2 q = step_ref(0.5, step_ref(0.5, step_ref(0.5, p)));
      EXPECT_EQ(q, p);
      if (sup_distance(p, {2.0 / 3, 2.0 / 3}) > 0) EXPECT_EQ(verify_period3_half(p).deviation, 0.0);
    }
}

TEST(PeriodTwo, NamedPoints) {
  EXPECT_EQ(verify_period2_line({1.0 / 3, 1}).outcome, LineOutcome::periodic2);
  EXPECT_EQ(verify_period2_line({2.0 / 3, 2.0 / 3}).outcome, LineOutcome::fixed);
  auto r = verify_period2_line({0.4, 14.0 / 15});
  EXPECT_EQ(r.outcome, LineOutcome::periodic2);
  EXPECT_NEAR(r.image.x, 14.0 / 15, 1e-15);
  EXPECT_NEAR(r.image.y, 0.4, 1e-15);
  EXPECT_LE(r.deviation, 1e-12);
  EXPECT_THROW(verify_period2_line({0.5, 0.5}), DomainError);
}

TEST(PeriodTwo, RestrictionIsSwap) {
  auto [g, swap] = period2_restriction();
  EXPECT_NEAR(g.lin.a, swap.lin.a, 1e-12);
  EXPECT_NEAR(g.lin.b, swap.lin.b, 1e-12);
  EXPECT_NEAR(g.lin.c, swap.lin.c, 1e-12);
  EXPECT_NEAR(g.lin.d, swap.lin.d, 1e-12);
  EXPECT_NEAR(g.shift.x, swap.shift.x, 1e-12);
  EXPECT_NEAR(g.shift.y, swap.shift.y, 1e-12);
  for (int i = 0; i <= 20; ++i) {
    double t = 1.0 / 3 + i / 30.0;
    Point2 q = step_ref(0.75, {t, 4.0 / 3 - t});
    EXPECT_NEAR(q.x, 4.0 / 3 - t, 1e-14);
    EXPECT_NEAR(q.y, t, 1e-14);
  }
}

TEST(PeriodTwo, LineInsideMiddleRegion) {
  auto br = b_regions();
  for (int i = 0; i <= 40; ++i) {
    double t = 1.0 / 3 + i / 60.0;
    EXPECT_TRUE(inside(br.b1, {t, 4.0 / 3 - t}, 1e-12)) << t;
  }
  EXPECT_NEAR(br.b1.area() + br.b2.area() + br.b3.area(), region_polygons(0.75).a2.area(), 1e-12);
}

TEST(PeriodTwo, LowerRegionMapsIntoUpper) {
  auto br = b_regions();
  auto g2 = AffineBranch::of(RegionLabel::A2, 0.75);
  EXPECT_TRUE(is_subset(affine_image(g2.map, br.b2), br.b3));
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    Point2 p = sample_in(br.b2, rng);
    EXPECT_TRUE(inside(br.b3, step_ref(0.75, p), 1e-12));
  }
}

TEST(PeriodTwo, DistanceHalvesInMiddleRegion) {
  std::mt19937_64 rng(8);
  auto br = b_regions();
  for (int i = 0; i < 2000; ++i) {
    Point2 p = sample_in(br.b1, rng);
    Point2 ts = line_coordinates(p);
    EXPECT_NEAR(p.x, 2.0 / 3 - ts.x - 2 * ts.y, 1e-14);
    EXPECT_NEAR(p.y, 2.0 / 3 + ts.x + ts.y, 1e-14);
    Point2 q = line_coordinates(step_ref(0.75, p));
    EXPECT_NEAR(q.x, -ts.x, 1e-13);
    EXPECT_NEAR(q.y, -ts.y / 2, 1e-13);
    Point2 q2 = step_ref(0.75, p);
    EXPECT_NEAR(distance_to_periodic_line(q2), distance_to_periodic_line(p) / 2, 1e-13);
    EXPECT_TRUE(inside(br.b1, q2, 1e-12));
  }
}

TEST(PeriodTwo, SecondImageBound) {
  EXPECT_LE(eq72_excess(), 1e-12);
  std::mt19937_64 rng(9);
  auto br = b_regions();
  for (int i = 0; i < 5000; ++i) {
    Point2 q = step_ref(0.75, step_ref(0.75, sample_in(br.b2, rng)));
    if (0.75 * q.y + 0.25 * q.x < 0.5) EXPECT_LT(q.y, -3.0 * q.x / 7 + 16.0 / 21 + 1e-12);
  }
}

TEST(Spectrum, NamedValues) {
  auto s = fixed_point_spectrum(0.6);
  EXPECT_TRUE(s.complex_pair);
  EXPECT_NEAR(std::abs(s.e1), std::sqrt(0.8), 1e-14);
  EXPECT_NEAR(s.spectral_radius, 0.894427191, 1e-9);

  double r = std::sqrt(3.0) - 1;
  auto d = fixed_point_spectrum(r);
  EXPECT_NEAR(d.e1.real(), -r, 1e-7);
  EXPECT_NEAR(d.e2.real(), -r, 1e-7);

  auto q = fixed_point_spectrum(0.75);
  EXPECT_FALSE(q.complex_pair);
  EXPECT_NEAR(q.e1.real(), -0.5, 1e-15);
  EXPECT_NEAR(q.e2.real(), -1.0, 1e-15);
  // (1/e, 1) is proportional to [-2, 1] and [-1, 1]
  EXPECT_NEAR(q.v1[0].real(), -2.0, 1e-14);
  EXPECT_NEAR(q.v2[0].real(), -1.0, 1e-14);
}

TEST(Spectrum, EigenpairsOfDerivative) {
  for (int i = 1; i < 100; ++i) {
    double a = i / 100.0;
    auto s = fixed_point_spectrum(a);
    for (auto [e, v] : {std::pair{s.e1, s.v1}, std::pair{s.e2, s.v2}}) {
      EXPECT_NEAR(std::abs(e * e + 2.0 * a * e + 2.0 * (1 - a)), 0.0, 1e-12);
      // D2 = [[0,1],[-2(1-a),-2a]] applied to v
      std::complex<double> r0 = v[1], r1 = -2.0 * (1 - a) * v[0] - 2.0 * a * v[1];
      EXPECT_NEAR(std::abs(r0 - e * v[0]), 0.0, 1e-10);
      EXPECT_NEAR(std::abs(r1 - e * v[1]), 0.0, 1e-10);
    }
    if (a > 0.5 && a < 0.75) {
      EXPECT_LT(s.spectral_radius, 1.0);
      double expect = a < std::sqrt(3.0) - 1 ? std::sqrt(2 * (1 - a)) : a + std::sqrt(a * a + 2 * a - 2);
      EXPECT_NEAR(s.spectral_radius, expect, 1e-12);
    }
  }
}

TEST(TrapCases, BoundariesAndDispatch) {
  auto& cb = case_boundaries();
  EXPECT_NEAR(cb.octagon_end, (std::sqrt(33.0) - 1) / 8, 1e-14);
  EXPECT_NEAR(cb.pentagon_i_end, 0.5970091680, 1e-10);
  EXPECT_NEAR(cb.pentagon_ii_end, (std::sqrt(13.0) - 1) / 4, 1e-14);
  EXPECT_NEAR(cb.pentagon_iii_end, std::sqrt(33.0) / 12 + 0.25, 1e-14);
  EXPECT_NEAR(cb.heptagon_end, 0.7360241475, 1e-10);
  EXPECT_EQ(trap_case(0.533), TrapCase::octagon);
  EXPECT_EQ(trap_case(0.594), TrapCase::pentagon_i);
  EXPECT_EQ(trap_case(0.63), TrapCase::pentagon_ii);
  EXPECT_EQ(trap_case(0.69), TrapCase::pentagon_iii);
  EXPECT_EQ(trap_case(0.734), TrapCase::heptagon);
  EXPECT_EQ(trap_case(0.743), TrapCase::hexagon);
  EXPECT_THROW(trap_case(cb.octagon_end), IndeterminateError);
  EXPECT_THROW(trap_case(0.5), DomainError);
  EXPECT_THROW(trap_case(0.75), DomainError);
}

TEST(ExitSet, ShapeAndDefinition) {
  EXPECT_EQ(exit_set(0.63).size(), 4u);
  EXPECT_EQ(exit_set(0.69).size(), 3u);
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0, 1);
  for (double a : {0.55, 0.63, 0.69}) {
    ConvexPolygon w = exit_set(a);
    for (int i = 0; i < 4000; ++i) {
      Point2 p{u(rng), u(rng)};
      double s = a * p.y + (1 - a) * p.x;
      Point2 q = step_ref(a, p);
      double pre = ((2 - p.y) / 2 - a * p.x) / (1 - a);  // x of the A2 preimage
      bool in_w = s >= 0.5 && a * q.y + (1 - a) * q.x < 0.5 && pre >= 0 && pre <= 1;
      if (std::abs(a * q.y + (1 - a) * q.x - 0.5) < 1e-9 || std::abs(s - 0.5) < 1e-9 || std::abs(pre) < 1e-9 ||
          std::abs(pre - 1) < 1e-9)
        continue;
      EXPECT_EQ(inside(w, p, 1e-12), in_w) << a << " (" << p.x << ", " << p.y << ")";
    }
  }
}

TEST(TrappingRegion, ForwardInvariantBySampling) {
  std::mt19937_64 rng(11);
  for (double a : {0.51, 0.533, 0.55, 0.594, 0.63, 0.69, 0.734, 0.743, 0.749}) {
    auto tr = build_trapping_region(a);
    EXPECT_TRUE(tr.polygon.is_convex());
    for (auto v : tr.polygon.vertices()) EXPECT_GE(a * v.y + (1 - a) * v.x, 0.5 - 1e-12) << a;
    for (auto v : tr.polygon.vertices()) EXPECT_TRUE(inside(tr.polygon, step_ref(a, v), 1e-10)) << a;
    for (int i = 0; i < 500; ++i) {
      Point2 p = sample_in(tr.polygon, rng);
      EXPECT_TRUE(inside(tr.polygon, step_ref(a, p), 1e-12)) << a;
    }
  }
}

TEST(TrappingRegion, NamedShapes) {
  auto oct = build_trapping_region(0.533);
  EXPECT_EQ(oct.kind, TrapCase::octagon);
  EXPECT_EQ(oct.vertices.size(), 8u);

  auto hept = build_trapping_region(0.734);
  ASSERT_EQ(hept.vertices.size(), 7u);
  Point2 p4{}, p1a{}, p3a{};
  for (auto& v : hept.vertices) {
    if (v.name == "p4") p4 = v.p;
    if (v.name == "p1a") p1a = v.p;
    if (v.name == "p3a") p3a = v.p;
  }
  EXPECT_LE(sup_distance(p1a, step_ref(0.734, p4)), 1e-14);
  EXPECT_LE(sup_distance(p3a, step_ref(0.734, step_ref(0.734, p4))), 1e-14);

  auto hex = build_trapping_region(0.743);
  EXPECT_EQ(hex.kind, TrapCase::hexagon);
  EXPECT_EQ(hex.vertices.size(), 6u);
  auto s = fixed_point_spectrum(0.743);
  for (auto& v : hex.vertices) {
    if (v.name != "p2") continue;
    Point2 p1 = hex.vertices[0].p;
    double slope = 1.0 / s.v1[0].real();
    EXPECT_NEAR((v.p.y - p1.y) / (v.p.x - p1.x), slope, 1e-9);
  }
}

TEST(Absorption, NamedTimes) {
  for (auto [a, k] : std::vector<std::pair<double, int>>{{0.594, 5}, {0.63, 4}, {0.69, 4}, {0.734, 4}, {0.743, 4}}) {
    auto tr = build_trapping_region(a);
    ConvexPolygon w = exit_set(a);
    EXPECT_EQ(absorption_time(a, tr.polygon, w), k) << a;
    EXPECT_TRUE(absorbed_at(a, tr.polygon, w, k)) << a;
  }
  auto tr = build_trapping_region(0.594);
  EXPECT_FALSE(absorbed_at(0.594, tr.polygon, exit_set(0.594), 4));
}

TEST(Absorption, SampledImagesOfExitSetLandInside) {
  std::mt19937_64 rng(12);
  for (double a : {0.533, 0.594, 0.69}) {
    auto tr = build_trapping_region(a);
    ConvexPolygon w = exit_set(a);
    int k = *absorption_time(a, tr.polygon, w);
    for (int i = 0; i < 1000; ++i) {
      Point2 p = sample_in(w, rng);
      for (int j = 0; j < k; ++j) p = step_ref(a, p);
      EXPECT_TRUE(inside(tr.polygon, p, 1e-10)) << a;
    }
  }
}

TEST(GlobalAttractor, CertifiedAcrossCases) {
  for (double a : {0.533, 0.594, 0.63, 0.69, 0.734, 0.743}) {
    auto rep = verify_global_attractor(a, 200, 3);
    EXPECT_TRUE(rep.certified()) << a;
    EXPECT_EQ(rep.failures, 0u);
  }
}

TEST(GlobalAttractor, RunMarginAndLowestPoint) {
  double a = 0.55;
  double margin = 2 * (2 * a - 1) * (8 * std::pow(a, 4) + 4 * std::pow(a, 3) - 4 * a * a - 5 * a + 3);
  EXPECT_NEAR(margin, 0.0875, 5e-4);
  auto rep = verify_global_attractor(a, 50, 1);
  bool seen_margin = false, seen_low = false;
  for (auto& c : rep.checks) {
    if (c.name == "run_margin") { seen_margin = true; EXPECT_TRUE(c.pass) << c.detail; }
    if (c.name == "second_image_lowest_point") { seen_low = true; EXPECT_TRUE(c.pass) << c.detail; }
  }
  EXPECT_TRUE(seen_margin);
  EXPECT_TRUE(seen_low);

  // lowest point of sampled second images of W
  std::mt19937_64 rng(13);
  ConvexPolygon w = exit_set(a);
  double low = 1e300;
  for (int i = 0; i < 20000; ++i) low = std::min(low, step_ref(a, step_ref(a, sample_in(w, rng))).y);
  double expect = 8 * a * a * a - 8 * a + 4;
  EXPECT_GE(low, expect - 1e-12);
  EXPECT_LT(low, expect + 5e-3);
}

TEST(GlobalAttractor, ConvergenceSteps) {
  EXPECT_EQ(converge_steps(0.6, {2.0 / 3, 2.0 / 3}), 0);
  long n = converge_steps(0.6, {0.1, 0.9});
  ASSERT_GT(n, 0);
  Point2 p{0.1, 0.9};
  for (long i = 0; i < n; ++i) p = step_ref(0.6, p);
  EXPECT_LE(sup_distance(p, {2.0 / 3, 2.0 / 3}), 1e-6);
}

TEST(InvariantRegions, BelowHalf) {
  for (double a : {0.3, 0.45}) {
    auto rep = invariant_region_checks(a, 200);
    EXPECT_TRUE(rep.all_pass()) << a;
  }
  auto rep = invariant_region_checks(0.3, 100);
  bool found = false;
  for (auto& c : rep.checks)
    if (c.name == "a2_image_floor") {
      found = true;
      EXPECT_NE(c.detail.find("vertex minimum 0.18 at (1, 0)"), std::string::npos) << c.detail;
    }
  EXPECT_TRUE(found);
  // S(G(1, 0)) at 0.3
  Point2 q = step_ref(0.3, {1, 0});
  EXPECT_NEAR(0.3 * q.y + 0.7 * q.x, 0.18, 1e-15);
}

TEST(InvariantRegions, ReachA2WithinSixSampled) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(0, 1);
  double a = 0.3;
  int longest = 0;
  for (int i = 0; i < 100000; ++i) {
    Point2 p{u(rng), u(rng)};
    if (a * p.y + (1 - a) * p.x < 2 * a * a) continue;
    int run = 0;
    while (a * p.y + (1 - a) * p.x < 0.5 && run < 20) { p = step_ref(a, p); ++run; }
    longest = std::max(longest, run);
  }
  EXPECT_LE(longest, 6);
}

TEST(InvariantRegions, AboveHalf) {
  for (double a : {0.6, 0.7}) EXPECT_TRUE(invariant_region_checks(a, 200).all_pass()) << a;
  auto rep = invariant_region_checks(0.6, 100);
  for (auto& c : rep.checks)
    if (c.name == "a2_image_floor") EXPECT_NE(c.detail.find("vertex minimum 0.4 at (1, 1)"), std::string::npos) << c.detail;
  EXPECT_THROW(invariant_region_checks(0.75), DomainError);
}
