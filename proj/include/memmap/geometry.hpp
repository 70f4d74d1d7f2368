#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "core_map.hpp"
#include "linalg2.hpp"
#include "types.hpp"

namespace memmap {

inline constexpr double kAreaEps = 1e-16;   // pieces at or below this area are dropped
inline constexpr double kMergeEps = 1e-14;  // L1 distance under which clip vertices merge
inline constexpr double kContainTol = 1e-9;

// zero set of a*x + b*y + c; the "inside" of a line is where the form is >= 0
struct Line {
  double a = 0.0, b = 0.0, c = 0.0;

  double operator()(Point2 p) const { return a * p.x + b * p.y + c; }
  Line flipped() const { return {-a, -b, -c}; }

  // S(x, y) = level, positive side is S >= level
  static Line s_level(Alpha alpha, double level) {
    double al = alpha.value();
    return {1.0 - al, al, -level};
  }
  static Line partition(Alpha alpha) { return s_level(alpha, 0.5); }

  // left side of the directed segment p -> q
  static Line left_of(Point2 p, Point2 q) {
    double a = -(q.y - p.y), b = q.x - p.x;
    return {a, b, -(a * p.x + b * p.y)};
  }
};

inline Point2 line_intersection(const Line& l, const Line& m) {
  double det = l.a * m.b - l.b * m.a;
  if (det == 0.0) throw DomainError("line_intersection: parallel lines");
  return {(l.b * m.c - m.b * l.c) / det, (m.a * l.c - l.a * m.c) / det};
}

inline double signed_area(const std::vector<Point2>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * s;
}

class ConvexPolygon {
 public:
  ConvexPolygon() = default;

  // vertices in cyclic order, either orientation
  explicit ConvexPolygon(std::vector<Point2> v) : v_(std::move(v)) {
    dedupe();
    if (signed_area(v_) < 0.0) std::reverse(v_.begin(), v_.end());
  }

  static ConvexPolygon unit_square() { return ConvexPolygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

  // monotone chain; collinear points dropped
  static ConvexPolygon hull(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end(), [](Point2 p, Point2 q) { return p.x < q.x || (p.x == q.x && p.y < q.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return ConvexPolygon(pts);
    std::vector<Point2> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
      h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
      while (k >= t && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
      h[k++] = pts[i];
    }
    h.resize(k - 1);
    return ConvexPolygon(std::move(h));
  }

  const std::vector<Point2>& vertices() const { return v_; }
  std::size_t size() const { return v_.size(); }
  const Point2& operator[](std::size_t i) const { return v_[i]; }

  double area() const { return v_.size() < 3 ? 0.0 : signed_area(v_); }

  // covers the degenerate cases too: points, segments, slivers
  bool empty() const { return v_.size() < 3 || area() <= kAreaEps; }

  Point2 centroid() const {
    if (v_.empty()) throw DomainError("centroid of empty polygon");
    double a = area();
    if (a <= kAreaEps) {
      Point2 s{};
      for (auto p : v_) s = s + p;
      return (1.0 / static_cast<double>(v_.size())) * s;
    }
    double cx = 0, cy = 0;
    for (std::size_t i = 0; i < v_.size(); ++i) {
      Point2 p = v_[i], q = v_[(i + 1) % v_.size()];
      double w = cross(p, q);
      cx += (p.x + q.x) * w;
      cy += (p.y + q.y) * w;
    }
    return {cx / (6 * a), cy / (6 * a)};
  }

  // signed distance-like margin: >= -tol means inside
  bool contains(Point2 p, double tol = kContainTol) const {
    if (v_.empty()) return false;
    if (v_.size() == 1) return distance(p, v_[0]) <= tol;
    if (v_.size() == 2) return segment_distance(p, v_[0], v_[1]) <= tol;
    for (std::size_t i = 0; i < v_.size(); ++i) {
      Point2 a = v_[i], b = v_[(i + 1) % v_.size()];
      double len = distance(a, b);
      if (len == 0.0) continue;
      if (cross(b - a, p - a) / len < -tol) return false;
    }
    return true;
  }

  // smallest edge margin of p (negative when outside)
  double margin(Point2 p) const {
    double m = 1e300;
    for (std::size_t i = 0; i < v_.size(); ++i) {
      Point2 a = v_[i], b = v_[(i + 1) % v_.size()];
      double len = distance(a, b);
      if (len == 0.0) continue;
      m = std::min(m, cross(b - a, p - a) / len);
    }
    return m;
  }

  ConvexPolygon clipped(const Line& keep) const {
    std::vector<Point2> out;
    std::size_t n = v_.size();
    for (std::size_t i = 0; i < n; ++i) {
      Point2 p = v_[i], q = v_[(i + 1) % n];
      double fp = keep(p), fq = keep(q);
      if (fp >= 0.0) out.push_back(p);
      if ((fp >= 0.0) != (fq >= 0.0)) {
        double t = fp / (fp - fq);
        out.push_back(p + t * (q - p));
      }
    }
    return ConvexPolygon(std::move(out));
  }

  // strict convexity check on the stored cyclic order
  bool is_convex(double tol = 1e-12) const {
    std::size_t n = v_.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
      Point2 a = v_[i], b = v_[(i + 1) % n], c = v_[(i + 2) % n];
      if (cross(b - a, c - b) <= tol) return false;
    }
    return true;
  }

  Point2 lowest_vertex() const {
    return *std::min_element(v_.begin(), v_.end(), [](Point2 p, Point2 q) { return p.y < q.y || (p.y == q.y && p.x < q.x); });
  }

 private:
  static double segment_distance(Point2 p, Point2 a, Point2 b) {
    Point2 d = b - a;
    double l2 = dot(d, d);
    double t = l2 == 0.0 ? 0.0 : std::clamp(dot(p - a, d) / l2, 0.0, 1.0);
    return distance(p, a + t * d);
  }

  void dedupe() {
    std::vector<Point2> res;
    for (auto p : v_)
      if (res.empty() || std::abs(p.x - res.back().x) + std::abs(p.y - res.back().y) > kMergeEps) res.push_back(p);
    while (res.size() > 1 && std::abs(res.front().x - res.back().x) + std::abs(res.front().y - res.back().y) <= kMergeEps)
      res.pop_back();
    v_ = std::move(res);
  }

  std::vector<Point2> v_;
};

inline ConvexPolygon intersect(const ConvexPolygon& a, const ConvexPolygon& b) {
  ConvexPolygon r = a;
  const auto& v = b.vertices();
  if (v.size() < 3) return ConvexPolygon();
  for (std::size_t i = 0; i < v.size(); ++i) {
    r = r.clipped(Line::left_of(v[i], v[(i + 1) % v.size()]));
    if (r.size() < 3) return r;
  }
  return r;
}

inline bool is_subset(const ConvexPolygon& a, const ConvexPolygon& b, double tol = kContainTol) {
  for (auto p : a.vertices())
    if (!b.contains(p, tol)) return false;
  return true;
}

struct AffineMap {
  Mat2 lin = Mat2::identity();
  Point2 shift{};

  Point2 operator()(Point2 p) const { return lin * p + shift; }

  // (f * g)(p) = f(g(p))
  friend AffineMap operator*(const AffineMap& f, const AffineMap& g) { return {f.lin * g.lin, f.lin * g.shift + f.shift}; }

  AffineMap inverse() const {
    double d = lin.det();
    if (d == 0.0) throw DomainError("AffineMap: singular linear part");
    Mat2 inv{lin.d / d, -lin.b / d, -lin.c / d, lin.a / d};
    return {inv, -1.0 * (inv * shift)};
  }
};

// affine functional cx*x + cy*y + cc
struct AffineForm {
  double cx = 0.0, cy = 0.0, cc = 0.0;

  double operator()(Point2 p) const { return cx * p.x + cy * p.y + cc; }

  static AffineForm s_form(Alpha alpha) { return {1.0 - alpha.value(), alpha.value(), 0.0}; }

  // form composed with a map: p -> f(m(p))
  AffineForm pullback(const AffineMap& m) const {
    return {cx * m.lin.a + cy * m.lin.c, cx * m.lin.b + cy * m.lin.d, cx * m.shift.x + cy * m.shift.y + cc};
  }
};

// G restricted to one region, extended affinely to the plane
struct AffineBranch {
  RegionLabel label = RegionLabel::A1;
  double alpha = 0.0;
  AffineMap map;

  static AffineBranch of(RegionLabel r, Alpha alpha) {
    AffineBranch br{r, alpha.value(), {branch_matrix(r, alpha), {0.0, r == RegionLabel::A1 ? 0.0 : 2.0}}};
    return br;
  }

  Point2 operator()(Point2 p) const { return map(p); }

  // explicit inverse (u, v) -> ((tau_i^{-1}(v) - alpha*u) / (1 - alpha), u)
  AffineMap inverse() const {
    double a = alpha, k = 1.0 / (1.0 - a);
    if (label == RegionLabel::A1) return {{-a * k, 0.5 * k, 1.0, 0.0}, {0.0, 0.0}};
    return {{-a * k, -0.5 * k, 1.0, 0.0}, {k, 0.0}};
  }
};

inline Point2 g2_inverse(Alpha alpha, Point2 p) { return AffineBranch::of(RegionLabel::A2, alpha).inverse()(p); }

inline ConvexPolygon affine_image(const AffineMap& m, const ConvexPolygon& poly) {
  std::vector<Point2> out;
  out.reserve(poly.size());
  for (auto p : poly.vertices()) out.push_back(m(p));
  return ConvexPolygon(std::move(out));
}

// image of a polygon lying inside the branch's region
inline ConvexPolygon map_polygon(const AffineBranch& br, const ConvexPolygon& poly, double tol = kContainTol) {
  for (auto p : poly.vertices()) {
    double s = br.alpha * p.y + (1.0 - br.alpha) * p.x - 0.5;
    bool ok = br.label == RegionLabel::A1 ? s <= tol : s >= -tol;
    if (!ok) throw DomainError("map_polygon: polygon straddles the partition line; split it first");
  }
  return affine_image(br.map, poly);
}

struct RegionPair {
  ConvexPolygon a1, a2;
};

inline RegionPair region_polygons(Alpha alpha) {
  auto sq = ConvexPolygon::unit_square();
  Line part = Line::partition(alpha);
  return {sq.clipped(part.flipped()), sq.clipped(part)};
}

struct Piece {
  ConvexPolygon poly;
  std::vector<RegionLabel> itinerary;  // time order
};

struct PieceSet {
  std::vector<Piece> pieces;
  std::size_t dropped = 0;
  double dropped_area = 0.0;

  double total_area() const {
    double s = 0.0;
    for (auto& p : pieces) s += p.poly.area();
    return s;
  }
  bool empty() const { return pieces.empty(); }
  std::vector<ConvexPolygon> polygons() const {
    std::vector<ConvexPolygon> out;
    for (auto& p : pieces) out.push_back(p.poly);
    return out;
  }
};

inline void keep_piece(PieceSet& set, ConvexPolygon poly, std::vector<RegionLabel> itin) {
  if (poly.empty()) {
    if (poly.size() >= 3) {
      ++set.dropped;
      set.dropped_area += std::max(0.0, poly.area());
    }
    return;
  }
  set.pieces.push_back({std::move(poly), std::move(itin)});
}

// pieces on the non-negative side first
inline PieceSet split_by_line(const ConvexPolygon& poly, const Line& line) {
  PieceSet out;
  keep_piece(out, poly.clipped(line), {});
  keep_piece(out, poly.clipped(line.flipped()), {});
  return out;
}

// A1 and A2 parts of a polygon; empty parts come back empty
inline RegionPair split_by_partition(Alpha alpha, const ConvexPolygon& poly) {
  Line part = Line::partition(alpha);
  ConvexPolygon p1 = poly.clipped(part.flipped()), p2 = poly.clipped(part);
  if (p1.empty()) p1 = ConvexPolygon();
  if (p2.empty()) p2 = ConvexPolygon();
  return {std::move(p1), std::move(p2)};
}

inline PieceSet iterate_set(Alpha alpha, const ConvexPolygon& poly, int k) {
  if (k < 0) throw DomainError("iterate_set: negative step count");
  PieceSet cur;
  keep_piece(cur, poly, {});
  if (poly.size() >= 1 && poly.size() < 3) cur.pieces.push_back({poly, {}});  // points and segments are carried along
  AffineBranch g1 = AffineBranch::of(RegionLabel::A1, alpha), g2 = AffineBranch::of(RegionLabel::A2, alpha);
  for (int step = 0; step < k; ++step) {
    PieceSet next;
    next.dropped = cur.dropped;
    next.dropped_area = cur.dropped_area;
    for (auto& pc : cur.pieces) {
      if (pc.poly.size() < 3) {
        // lower-dimensional input: route by the vertex majority side, no split
        RegionLabel r = classify(alpha, pc.poly.centroid());
        auto itin = pc.itinerary;
        itin.push_back(r);
        next.pieces.push_back({affine_image((r == RegionLabel::A1 ? g1 : g2).map, pc.poly), std::move(itin)});
        continue;
      }
      auto parts = split_by_partition(alpha, pc.poly);
      for (auto r : {RegionLabel::A1, RegionLabel::A2}) {
        const ConvexPolygon& part = r == RegionLabel::A1 ? parts.a1 : parts.a2;
        if (part.size() < 3) continue;
        auto itin = pc.itinerary;
        itin.push_back(r);
        keep_piece(next, affine_image((r == RegionLabel::A1 ? g1 : g2).map, part), std::move(itin));
      }
      // area lost at the split
      double lost = pc.poly.area() - parts.a1.area() - parts.a2.area();
      if (lost > kAreaEps) next.dropped_area += lost;
    }
    cur = std::move(next);
  }
  return cur;
}

inline void write_polygon_csv_header(std::ostream& os) { os << "label,vertex_index,x,y\n"; }

inline void write_polygon_csv(std::ostream& os, const std::string& label, const ConvexPolygon& poly) {
  char buf[128];
  for (std::size_t i = 0; i < poly.size(); ++i) {
    std::snprintf(buf, sizeof buf, ",%zu,%.17g,%.17g\n", i, poly[i].x, poly[i].y);
    os << label << buf;
  }
}

}  // namespace memmap
