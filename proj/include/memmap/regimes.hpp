#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "core_map.hpp"
#include "geometry.hpp"
#include "linalg2.hpp"
#include "sequences.hpp"

namespace memmap {

inline std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline double sup_distance(Point2 a, Point2 b) { return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)); }

// ---- alpha = 1/2 ----------------------------------------------------------

enum class HalfOutcome { periodic3, transient_then_periodic3, fixed };

inline const char* to_string(HalfOutcome o) {
  switch (o) {
    case HalfOutcome::periodic3: return "periodic3";
    case HalfOutcome::transient_then_periodic3: return "transient-then-periodic3";
    default: return "fixed";
  }
}

struct Period3Result {
  HalfOutcome outcome = HalfOutcome::periodic3;
  int entry_time = 0;
  std::array<Point2, 3> cycle{};
  double deviation = 0.0;  // sup-norm of G^3(q) - q at the entry point q
};

// G on the upper triangle x + y >= 1 at alpha = 1/2
inline AffineMap upper_triangle_map() { return {{0.0, 1.0, -1.0, -1.0}, {0.0, 2.0}}; }

inline AffineMap period3_composition() {
  AffineMap g = upper_triangle_map();
  return g * g * g;
}

inline Period3Result verify_period3_half(Point2 p) {
  if (p.x == 0.0 && p.y == 0.0) throw DomainError("verify_period3_half: (0,0) is a fixed point");
  if (!in_unit_square(p)) throw DomainError("verify_period3_half: point outside the unit square");
  Period3Result r;
  if (sup_distance(p, kInteriorFixedPoint) <= 1e-12) {
    r.outcome = HalfOutcome::fixed;
    r.cycle = {p, p, p};
    return r;
  }
  Point2 q = p;
  while (q.x + q.y < 1.0) {
    q = g_step(0.5, q);
    if (++r.entry_time > 100000) throw VerificationError("verify_period3_half: no entry into the upper triangle");
  }
  r.outcome = r.entry_time == 0 ? HalfOutcome::periodic3 : HalfOutcome::transient_then_periodic3;
  Point2 q1 = g_step(0.5, q), q2 = g_step(0.5, q1), q3 = g_step(0.5, q2);
  r.cycle = {q, q1, q2};
  r.deviation = sup_distance(q3, q);
  return r;
}

// ---- alpha = 3/4 ----------------------------------------------------------

enum class LineOutcome { periodic2, fixed };

inline const char* to_string(LineOutcome o) { return o == LineOutcome::periodic2 ? "periodic2" : "fixed"; }

struct Period2Result {
  LineOutcome outcome = LineOutcome::periodic2;
  Point2 image{}, image2{};
  double deviation = 0.0;  // sup-norm of G^2(p) - p
};

inline constexpr double kPeriodicLineSum = 4.0 / 3.0;

inline double distance_to_periodic_line(Point2 p) { return std::abs(p.x + p.y - kPeriodicLineSum) / std::sqrt(2.0); }

inline Period2Result verify_period2_line(Point2 p) {
  if (std::abs(p.x + p.y - kPeriodicLineSum) > 1e-12) throw DomainError("verify_period2_line: point not on x + y = 4/3");
  Period2Result r;
  r.image = g_step(0.75, p);
  r.image2 = g_step(0.75, r.image);
  r.deviation = sup_distance(r.image2, p);
  r.outcome = sup_distance(p, kInteriorFixedPoint) <= 1e-12 ? LineOutcome::fixed : LineOutcome::periodic2;
  return r;
}

// G2 at alpha = 3/4 composed with the parametrisation t -> (t, 4/3 - t), and the swap composed with it.
// Equal maps mean G acts as the swap on the line.
inline std::pair<AffineMap, AffineMap> period2_restriction() {
  AffineMap param{{1.0, 0.0, -1.0, 0.0}, {0.0, kPeriodicLineSum}};
  AffineMap swap{{0.0, 1.0, 1.0, 0.0}, {0.0, 0.0}};
  return {AffineBranch::of(RegionLabel::A2, 0.75).map * param, swap * param};
}

struct BRegions {
  ConvexPolygon b1, b2, b3;
};

// parts of A2 at alpha = 3/4 cut by y = -x/2 + 5/6 and y = -x/2 + 7/6
inline BRegions b_regions() {
  ConvexPolygon a2 = region_polygons(0.75).a2;
  Line lo{0.5, 1.0, -5.0 / 6.0}, hi{0.5, 1.0, -7.0 / 6.0};
  return {a2.clipped(lo).clipped(hi.flipped()), a2.clipped(lo.flipped()), a2.clipped(hi)};
}

// (t, s) with p = X0 + t(-1, 1) + s(-2, 1); one A2 step sends (t, s) to (-t, -s/2)
inline Point2 line_coordinates(Point2 p) {
  double dx = p.x - kInteriorFixedPoint.x, dy = p.y - kInteriorFixedPoint.y;
  return {dx + 2.0 * dy, -(dx + dy)};
}

// largest value of y + 3x/7 - 16/21 over the vertices of G^2(B2) cap A1
inline double eq72_excess() {
  auto br = b_regions();
  auto g2 = AffineBranch::of(RegionLabel::A2, 0.75);
  ConvexPolygon img = affine_image(g2.map, affine_image(g2.map, br.b2));
  ConvexPolygon part = split_by_partition(0.75, img).a1;
  double worst = -1e300;
  for (auto p : part.vertices()) worst = std::max(worst, p.y + 3.0 * p.x / 7.0 - 16.0 / 21.0);
  return worst;
}

// ---- fixed point spectrum -------------------------------------------------

struct FixedPointSpectrum {
  double alpha = 0.0;
  std::complex<double> e1, e2;
  std::array<std::complex<double>, 2> v1{}, v2{};  // (1/e, 1)
  bool complex_pair = false;
  double spectral_radius = 0.0;
};

inline FixedPointSpectrum fixed_point_spectrum(Alpha alpha) {
  double a = alpha.value();
  FixedPointSpectrum f;
  f.alpha = a;
  std::complex<double> root = std::sqrt(std::complex<double>(a * a + 2.0 * a - 2.0, 0.0));
  f.e1 = -a + root;
  f.e2 = -a - root;
  f.complex_pair = a * a + 2.0 * a - 2.0 < 0.0;
  f.v1 = {1.0 / f.e1, 1.0};
  f.v2 = {1.0 / f.e2, 1.0};
  f.spectral_radius = std::max(std::abs(f.e1), std::abs(f.e2));
  return f;
}

// ---- trapping regions for 1/2 < alpha < 3/4 --------------------------------

enum class TrapCase { octagon, pentagon_i, pentagon_ii, pentagon_iii, heptagon, hexagon };

inline const char* to_string(TrapCase c) {
  switch (c) {
    case TrapCase::octagon: return "octagon";
    case TrapCase::pentagon_i: return "pentagon_i";
    case TrapCase::pentagon_ii: return "pentagon_ii";
    case TrapCase::pentagon_iii: return "pentagon_iii";
    case TrapCase::heptagon: return "heptagon";
    default: return "hexagon";
  }
}

struct CaseBoundaries {
  double octagon_end, pentagon_i_end, pentagon_ii_end, pentagon_iii_end, heptagon_end;
};

inline const CaseBoundaries& case_boundaries() {
  static const CaseBoundaries cb{
      find_root(Polynomial::from_descending({4, 1, -2}), 0.55, 0.65, 1e-15),
      find_root(Polynomial::from_descending({16, 0, -16, 10, -9, 4}), 0.594, 0.6, 1e-15),
      find_root(Polynomial::from_descending({2, 1, -1.5}), 0.6, 0.7, 1e-15),
      find_root(Polynomial::from_descending({6, -3, -1}), 0.7, 0.75, 1e-15),
      find_root(Polynomial::from_descending({4, -8, 14, -13, 4}), 0.73, 0.74, 1e-15),
  };
  return cb;
}

inline TrapCase trap_case(Alpha alpha, double eps = 1e-9) {
  double a = alpha.value();
  if (!(a > 0.5 && a < 0.75)) throw DomainError("trapping regions need 1/2 < alpha < 3/4");
  const auto& cb = case_boundaries();
  for (double b : {cb.octagon_end, cb.pentagon_i_end, cb.pentagon_ii_end, cb.pentagon_iii_end, cb.heptagon_end})
    if (std::abs(a - b) <= eps) throw IndeterminateError("alpha within " + fmt_num(eps) + " of a case boundary " + fmt_num(b));
  if (a <= cb.octagon_end) return TrapCase::octagon;
  if (a <= cb.pentagon_i_end) return TrapCase::pentagon_i;
  if (a <= cb.pentagon_ii_end) return TrapCase::pentagon_ii;
  if (a <= cb.pentagon_iii_end) return TrapCase::pentagon_iii;
  if (a <= cb.heptagon_end) return TrapCase::heptagon;
  return TrapCase::hexagon;
}

// absorption time the construction is designed for
inline int nominal_absorption(TrapCase c) { return c == TrapCase::pentagon_i ? 5 : 4; }

// A2 points leaving A2 in one step, restricted to the non-transient G(A2)
inline ConvexPolygon exit_set(Alpha alpha) {
  auto regions = region_polygons(alpha);
  auto g2 = AffineBranch::of(RegionLabel::A2, alpha);
  AffineForm sg = AffineForm::s_form(alpha).pullback(g2.map);
  ConvexPolygon leave = regions.a2.clipped(Line{-sg.cx, -sg.cy, 0.5 - sg.cc});
  return intersect(leave, affine_image(g2.map, regions.a2));
}

struct NamedVertex {
  std::string name;
  Point2 p;
  std::string provenance;
};

struct TrappingRegion {
  double alpha = 0.0;
  TrapCase kind = TrapCase::octagon;
  ConvexPolygon polygon;
  std::vector<NamedVertex> vertices;
  double parameter = 0.0;  // position of p5 along its edge, octagon only
};

namespace detail {

inline Point2 upper_left(const ConvexPolygon& w) {
  double top = -1e300;
  for (auto p : w.vertices()) top = std::max(top, p.y);
  Point2 best{1e300, 0.0};
  for (auto p : w.vertices())
    if (p.y > top - 1e-9 && p.x < best.x) best = p;
  return best;
}

inline bool inside_a2(Alpha alpha, const ConvexPolygon& t) {
  for (auto p : t.vertices())
    if (s_value(alpha, p) < 0.5 - 1e-12) return false;
  return true;
}

inline bool maps_into(Alpha alpha, const ConvexPolygon& t) {
  for (auto p : t.vertices())
    if (!t.contains(g_step(alpha, p), kContainTol)) return false;
  return true;
}

inline std::vector<NamedVertex> octagon_vertices(Alpha alpha, const ConvexPolygon& w, double t) {
  double a = alpha.value();
  Point2 p2 = w.lowest_vertex();
  Point2 p6 = g2_inverse(alpha, p2), p3a = g2_inverse(alpha, p6), p1a = g2_inverse(alpha, p3a);
  Point2 p4 = g_step(alpha, p2);
  Point2 top{(2 * a - 1) / (2 * a), 1.0};
  Point2 p5 = p4 + t * (top - p4);
  Point2 p3 = g2_inverse(alpha, p5), p1 = g2_inverse(alpha, p3);
  return {{"p1", p1, "G2^-1(p3)"},       {"p1a", p1a, "G2^-1(p3a)"}, {"p2", p2, "lowest vertex of W"},
          {"p3", p3, "G2^-1(p5)"},       {"p3a", p3a, "G2^-1(p6)"},  {"p4", p4, "G(p2), lower edge of G(A2)"},
          {"p5", p5, "on lower edge of G(A2)"}, {"p6", p6, "G2^-1(p2)"}};
}

inline bool octagon_valid(Alpha alpha, const std::vector<NamedVertex>& v) {
  std::vector<Point2> pts;
  for (auto& nv : v) pts.push_back(nv.p);
  ConvexPolygon t = ConvexPolygon::hull(pts);
  return t.size() == 8 && t.is_convex() && inside_a2(alpha, t) && maps_into(alpha, t);
}

}  // namespace detail

inline TrappingRegion build_trapping_region(Alpha alpha) {
  TrappingRegion tr;
  tr.alpha = alpha.value();
  tr.kind = trap_case(alpha);
  double a = alpha.value();
  ConvexPolygon w = exit_set(alpha);
  if (w.empty()) throw VerificationError("exit set is empty");

  switch (tr.kind) {
    case TrapCase::octagon: {
      // largest parameter keeping a valid octagon, scanned then refined
      const int n = 200;
      int best = -1;
      for (int k = n; k >= 1; --k)
        if (detail::octagon_valid(alpha, detail::octagon_vertices(alpha, w, double(k) / n))) { best = k; break; }
      if (best < 0) throw VerificationError("no valid octagon parameter");
      double lo = double(best) / n, hi = std::min(1.0, double(best + 1) / n);
      if (hi > lo) {
        for (int it = 0; it < 40; ++it) {
          double mid = 0.5 * (lo + hi);
          if (detail::octagon_valid(alpha, detail::octagon_vertices(alpha, w, mid))) lo = mid;
          else hi = mid;
        }
      }
      double t = lo - 1e-6;
      if (!detail::octagon_valid(alpha, detail::octagon_vertices(alpha, w, t))) t = double(best) / n;
      tr.parameter = t;
      tr.vertices = detail::octagon_vertices(alpha, w, t);
      break;
    }
    case TrapCase::pentagon_i:
    case TrapCase::pentagon_ii:
    case TrapCase::pentagon_iii:
    case TrapCase::heptagon: {
      Point2 p3 = detail::upper_left(w);
      Point2 p5 = g_step(alpha, p3), p2 = g_step(alpha, p5), p4 = g_step(alpha, p2);
      Point2 p1 = g2_inverse(alpha, p3);
      tr.vertices = {{"p1", p1, "G2^-1(p3)"}, {"p2", p2, "G(p5)"}, {"p3", p3, "upper-left vertex of W"},
                     {"p4", p4, "G(p2)"},     {"p5", p5, "G(p3)"}};
      if (tr.kind == TrapCase::heptagon) {
        Point2 p1a = g_step(alpha, p4);
        tr.vertices.push_back({"p1a", p1a, "G(p4)"});
        tr.vertices.push_back({"p3a", g_step(alpha, p1a), "G^2(p4)"});
      }
      break;
    }
    case TrapCase::hexagon: {
      double l1 = -a + std::sqrt(a * a + 2 * a - 2);
      Point2 dir{1.0 / l1, 1.0};
      Point2 p1 = detail::upper_left(w);
      Point2 p4 = g2_inverse(alpha, p1);
      auto at_x = [&](Point2 q, double c) { double s = (c - q.x) / dir.x; return Point2{c, q.y + s * dir.y}; };
      tr.vertices = {{"p1", p1, "upper-left vertex of W"},
                     {"p2", at_x(p1, 1.0), "eigenline through p1 meets x = 1"},
                     {"p3", {1.0, (a - 0.5) / a}, "partition line meets x = 1"},
                     {"p4", p4, "G2^-1(p1)"},
                     {"p5", at_x(p4, 0.0), "eigenline through p4 meets x = 0"},
                     {"p6", {0.0, 1.0}, "corner (0, 1)"}};
      break;
    }
  }
  std::vector<Point2> pts;
  for (auto& v : tr.vertices) pts.push_back(v.p);
  tr.polygon = ConvexPolygon::hull(pts);
  if (!detail::inside_a2(alpha, tr.polygon)) throw VerificationError("trapping region leaves A2");
  if (!detail::maps_into(alpha, tr.polygon)) throw VerificationError("G(T) is not inside T");
  return tr;
}

// first k with G^k(W) inside T; pieces already inside T are retired since T is forward invariant
inline std::optional<int> absorption_time(Alpha alpha, const ConvexPolygon& t, const ConvexPolygon& w, int kmax = 200) {
  std::vector<ConvexPolygon> live{w};
  for (int k = 0; k <= kmax; ++k) {
    std::vector<ConvexPolygon> rest;
    for (auto& p : live)
      if (!is_subset(p, t)) rest.push_back(p);
    if (rest.empty()) return k;
    std::vector<ConvexPolygon> next;
    for (auto& p : rest) {
      auto parts = split_by_partition(alpha, p);
      if (!parts.a1.empty()) next.push_back(affine_image(AffineBranch::of(RegionLabel::A1, alpha).map, parts.a1));
      if (!parts.a2.empty()) next.push_back(affine_image(AffineBranch::of(RegionLabel::A2, alpha).map, parts.a2));
    }
    live = std::move(next);
  }
  return std::nullopt;
}

// every piece of G^k(W) inside T
inline bool absorbed_at(Alpha alpha, const ConvexPolygon& t, const ConvexPolygon& w, int k) {
  for (auto& pc : iterate_set(alpha, w, k).pieces)
    if (!is_subset(pc.poly, t)) return false;
  return true;
}

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct AttractorReport {
  double alpha = 0.0;
  std::string case_name;
  std::vector<Check> checks;
  std::size_t samples = 0;
  std::size_t failures = 0;
  int absorption_k = -1;
  int nominal_k = 0;

  bool certified() const {
    for (auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// iterate until within tol of X0; returns the step count or -1
inline long converge_steps(Alpha alpha, Point2 p, double tol = 1e-6, long max_steps = 100000) {
  MemoryMap g(alpha);
  for (long i = 0; i <= max_steps; ++i) {
    if (distance(p, kInteriorFixedPoint) < tol) return i;
    p = g.checked_step(p);
  }
  return -1;
}

inline Check sampled_convergence(Alpha alpha, std::size_t samples, std::uint64_t seed, std::size_t& failures) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  failures = 0;
  long worst = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    Point2 p{u(rng), u(rng)};
    if (p.x == 0.0 && p.y == 0.0) continue;
    long n = converge_steps(alpha, p);
    if (n < 0) ++failures;
    else worst = std::max(worst, n);
  }
  return {"sampled_convergence", failures == 0,
          std::to_string(samples - failures) + "/" + std::to_string(samples) + " starts within 1e-6 of X0, slowest " +
              std::to_string(worst) + " steps"};
}

inline AttractorReport verify_global_attractor(Alpha alpha, std::size_t samples = 1000, std::uint64_t seed = 1) {
  double a = alpha.value();
  AttractorReport rep;
  rep.alpha = a;
  rep.samples = samples;
  TrappingRegion tr = build_trapping_region(alpha);
  rep.case_name = to_string(tr.kind);
  rep.nominal_k = nominal_absorption(tr.kind);
  rep.checks.push_back({"trap_invariant", true, "G(T) inside T and T inside A2, " + std::to_string(tr.polygon.size()) + " vertices"});

  ConvexPolygon w = exit_set(alpha);
  auto k = absorption_time(alpha, tr.polygon, w);
  rep.absorption_k = k ? *k : -1;
  bool nominal = absorbed_at(alpha, tr.polygon, w, rep.nominal_k);
  rep.checks.push_back({"absorption", k.has_value(),
                        k ? "G^" + std::to_string(*k) + "(W) inside T; nominal k=" + std::to_string(rep.nominal_k) +
                                (nominal ? " holds" : " does not hold")
                          : "W not absorbed within 200 steps"});

  double two_step = 4 * a * a * (1 - a);
  rep.checks.push_back({"two_step_return", two_step > 0.5, "(2a)^2(1-a) = " + fmt_num(two_step)});

  if (tr.kind == TrapCase::octagon) {
    double margin = 2 * (2 * a - 1) * (8 * a * a * a * a + 4 * a * a * a - 4 * a * a - 5 * a + 3);
    double xw = a / (a + 1), yw = 8 * a * a * a - 8 * a + 4;
    double ct = -4 * a * a + 4 * a - 1, cs = -4 * a * a - 2 * a + 2, cc = 2 * a * (2 * a - 1);
    double linear = ct * xw + cs * (1 - yw) + cc;
    auto g2 = AffineBranch::of(RegionLabel::A2, alpha);
    double direct = g2(g2({xw, yw})).y - xw;
    rep.checks.push_back({"run_margin", margin > 0.0 && linear > 0.0 && std::abs(linear - direct) <= 1e-12,
                          "closed form " + fmt_num(margin) + ", linear form " + fmt_num(linear) + ", direct " + fmt_num(direct)});

    // lowest point of G^2(W)
    Point2 low{1e300, 1e300};
    for (auto& pc : iterate_set(alpha, w, 2).pieces) {
      Point2 q = pc.poly.lowest_vertex();
      if (q.y < low.y) low = q;
    }
    Point2 expect{2 * a * (2 * a - 1), yw};
    rep.checks.push_back({"second_image_lowest_point", sup_distance(low, expect) <= 1e-9,
                          "(" + fmt_num(low.x) + ", " + fmt_num(low.y) + ")"});
  }

  rep.checks.push_back(sampled_convergence(alpha, samples, seed, rep.failures));
  return rep;
}

// ---- invariant regions ----------------------------------------------------

struct RegionReport {
  double alpha = 0.0;
  std::vector<Check> checks;

  bool all_pass() const {
    for (auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

namespace detail {

template <class Hyp, class Ineq>
inline Check grid_check(const std::string& name, int n, Hyp hyp, Ineq ineq) {
  long tested = 0, bad = 0;
  double worst = 1e300;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      Point2 p{double(i) / n, double(j) / n};
      if (!hyp(p)) continue;
      ++tested;
      double slack = ineq(p);
      worst = std::min(worst, slack);
      if (slack < -1e-12) ++bad;
    }
  return {name, bad == 0 && tested > 0,
          std::to_string(tested) + " grid points, " + std::to_string(bad) + " violations, min slack " + fmt_num(worst)};
}

inline std::pair<double, Point2> min_over_vertices(const ConvexPolygon& poly, const AffineForm& f) {
  double best = 1e300;
  Point2 arg{};
  for (auto p : poly.vertices())
    if (f(p) < best) { best = f(p); arg = p; }
  return {best, arg};
}

}  // namespace detail

inline RegionReport invariant_region_checks(Alpha alpha, int grid = 400) {
  double a = alpha.value();
  if (!(a > 0.0 && a < 0.75)) throw DomainError("invariant_region_checks: alpha must lie in (0, 3/4)");
  RegionReport rep;
  rep.alpha = a;
  auto S = [&](Point2 p) { return s_value(alpha, p); };
  auto G = [&](Point2 p) { return g_step(alpha, p); };
  auto in1 = [&](Point2 p) { return classify(alpha, p) == RegionLabel::A1; };
  auto in2 = [&](Point2 p) { return classify(alpha, p) == RegionLabel::A2; };
  auto regions = region_polygons(alpha);
  auto g1 = AffineBranch::of(RegionLabel::A1, alpha), g2 = AffineBranch::of(RegionLabel::A2, alpha);
  AffineForm s = AffineForm::s_form(alpha);

  rep.checks.push_back(detail::grid_check("a1_step_growth", grid, in1, [&](Point2 p) { return S(G(p)) - 2 * a * S(p); }));

  if (a < 0.5) {
    rep.checks.push_back(detail::grid_check(
        "a1_two_step_growth", grid, [&](Point2 p) { return in1(p) && in1(G(p)); },
        [&](Point2 p) { return S(G(G(p))) - (4 * a * a - 2 * a + 2) * S(p); }));
    auto [m3, at3] = detail::min_over_vertices(regions.a2, s.pullback(g2.map));
    Check c3 = detail::grid_check("a2_image_floor", grid, in2, [&](Point2 p) { return S(G(p)) - 2 * a * a; });
    c3.pass = c3.pass && m3 >= 2 * a * a - 1e-12;
    c3.detail += "; vertex minimum " + fmt_num(m3) + " at (" + fmt_num(at3.x) + ", " + fmt_num(at3.y) + ")";
    rep.checks.push_back(c3);
    rep.checks.push_back(detail::grid_check(
        "a2_a1_image_floor", grid, [&](Point2 p) { return in2(p) && in1(G(p)); },
        [&](Point2 p) { return S(G(G(p))) - 2 * a * (1 - a); }));

    // orbits coming out of A2 never drop below S = 2a^2
    ConvexPolygon ai = ConvexPolygon::unit_square().clipped(Line::s_level(alpha, 2 * a * a));
    ConvexPolygon img = affine_image(g2.map, regions.a2);
    bool ok = is_subset(img, ai);
    std::vector<ConvexPolygon> cur{split_by_partition(alpha, img).a1};
    int steps = 0;
    while (ok && !cur.empty() && !cur.front().empty() && steps < 200) {
      std::vector<ConvexPolygon> next;
      for (auto& p : cur) {
        ConvexPolygon q = affine_image(g1.map, p);
        if (!is_subset(q, ai)) ok = false;
        auto parts = split_by_partition(alpha, q);
        if (!parts.a1.empty()) next.push_back(parts.a1);
      }
      cur = std::move(next);
      ++steps;
    }
    rep.checks.push_back({"invariant_region", ok, "G(A2) and the A1 chain after it stay above S = 2a^2 (" +
                                                      std::to_string(steps) + " chain steps)"});

    if (a > 0.24) {
      // consecutive A1 positions possible inside A_I
      std::vector<ConvexPolygon> run{split_by_partition(alpha, ai).a1};
      int longest = 0;
      while (!run.empty() && longest < 50) {
        ++longest;
        std::vector<ConvexPolygon> next;
        for (auto& p : run) {
          auto q = split_by_partition(alpha, affine_image(g1.map, p)).a1;
          if (!q.empty()) next.push_back(q);
        }
        run = std::move(next);
      }
      rep.checks.push_back({"reach_a2_within_6", longest <= 6,
                            "longest A1 run inside A_I is " + std::to_string(longest)});
    }
  } else {
    auto [m20, at20] = detail::min_over_vertices(regions.a2, s.pullback(g2.map));
    Check c20 = detail::grid_check("a2_image_floor", grid, in2, [&](Point2 p) { return S(G(p)) - (1 - a); });
    c20.pass = c20.pass && m20 >= 1 - a - 1e-12;
    c20.detail += "; vertex minimum " + fmt_num(m20) + " at (" + fmt_num(at20.x) + ", " + fmt_num(at20.y) + ")";
    rep.checks.push_back(c20);

    ConvexPolygon ai = ConvexPolygon::unit_square().clipped(Line::s_level(alpha, 1 - a));
    auto parts = split_by_partition(alpha, ai);
    bool ok = (parts.a1.empty() || is_subset(affine_image(g1.map, parts.a1), ai)) &&
              (parts.a2.empty() || is_subset(affine_image(g2.map, parts.a2), ai));
    rep.checks.push_back({"invariant_region", ok, "G maps the region above S = 1 - a into itself"});

    double f = 4 * a * a * (1 - a);
    Check c21 = detail::grid_check(
        "two_step_return", grid, [&](Point2 p) { return in1(p) && S(p) >= 1 - a; },
        [&](Point2 p) { return (in2(G(p)) || in2(G(G(p)))) ? 1.0 : -1.0; });
    c21.pass = c21.pass && f > 0.5;
    c21.detail += "; (2a)^2(1-a) = " + fmt_num(f);
    rep.checks.push_back(c21);
  }
  return rep;
}

}  // namespace memmap
