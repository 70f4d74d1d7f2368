#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "linalg2.hpp"
#include "types.hpp"

namespace memmap {

inline constexpr double kDriftTol = 1e-9;
inline constexpr Point2 kInteriorFixedPoint{2.0 / 3.0, 2.0 / 3.0};

inline double tent(double x) {
  if (!(x >= -1e-12 && x <= 1.0 + 1e-12))
    throw DomainError("tent: argument outside [0,1]: " + std::to_string(x));
  return x < 0.5 ? 2.0 * x : 2.0 - 2.0 * x;
}

// Continuous piecewise-linear expanding map of [0,1].
// Branch j (1-based) covers [a_{j-1}, a_j); the last branch also owns 1.
class BaseMap {
 public:
  BaseMap(std::vector<double> breakpoints, std::vector<double> slopes, std::vector<double> intercepts)
      : a_(std::move(breakpoints)), k_(std::move(slopes)), c_(std::move(intercepts)) {
    std::size_t q = k_.size();
    if (q == 0 || a_.size() != q + 1 || c_.size() != q) throw DomainError("BaseMap: inconsistent sizes");
    if (a_.front() != 0.0 || a_.back() != 1.0) throw DomainError("BaseMap: breakpoints must span [0,1]");
    for (std::size_t j = 0; j < q; ++j) {
      if (!(a_[j] < a_[j + 1])) throw DomainError("BaseMap: breakpoints not ascending");
      if (!(std::abs(k_[j]) > 1.0)) throw DomainError("BaseMap: branch not expanding");
      double lo = k_[j] * a_[j] + c_[j], hi = k_[j] * a_[j + 1] + c_[j];
      if (std::min(lo, hi) < -1e-12 || std::max(lo, hi) > 1.0 + 1e-12)
        throw DomainError("BaseMap: branch image leaves [0,1]");
      if (j + 1 < q) {
        double next = k_[j + 1] * a_[j + 1] + c_[j + 1];
        if (std::abs(hi - next) > 1e-12) throw DomainError("BaseMap: discontinuous at a breakpoint");
      }
    }
  }

  static BaseMap tent() { return BaseMap({0.0, 0.5, 1.0}, {2.0, -2.0}, {0.0, 2.0}); }

  int branch_count() const { return static_cast<int>(k_.size()); }
  const std::vector<double>& breakpoints() const { return a_; }

  int branch_of(double x) const {
    check_domain(x);
    auto it = std::upper_bound(a_.begin() + 1, a_.end() - 1, x);
    return static_cast<int>(it - a_.begin());
  }

  double operator()(double x) const {
    int j = branch_of(x);
    return k_[j - 1] * x + c_[j - 1];
  }

  double slope(int j) const { return k_.at(checked(j) - 1); }

  std::pair<double, double> branch_image(int j) const {
    int i = checked(j) - 1;
    double lo = k_[i] * a_[i] + c_[i], hi = k_[i] * a_[i + 1] + c_[i];
    return {std::min(lo, hi), std::max(lo, hi)};
  }

  double branch_inverse(int j, double v) const {
    auto [lo, hi] = branch_image(j);
    if (v < lo - 1e-12 || v > hi + 1e-12)
      throw DomainError("value " + std::to_string(v) + " outside image of branch " + std::to_string(j));
    return (v - c_[j - 1]) / k_[j - 1];
  }

 private:
  int checked(int j) const {
    if (j < 1 || j > branch_count()) throw DomainError("branch index out of range: " + std::to_string(j));
    return j;
  }
  static void check_domain(double x) {
    if (!(x >= -1e-12 && x <= 1.0 + 1e-12)) throw DomainError("BaseMap: argument outside [0,1]");
  }

  std::vector<double> a_, k_, c_;
};

inline double s_value(Alpha alpha, Point2 p) {
  double a = alpha.value();
  return a * p.y + (1.0 - a) * p.x;
}

inline RegionLabel classify(Alpha alpha, Point2 p) {
  return s_value(alpha, p) >= 0.5 ? RegionLabel::A2 : RegionLabel::A1;
}

inline Point2 g_step(Alpha alpha, Point2 p) { return {p.y, tent(s_value(alpha, p))}; }

inline Point2 g_step(Alpha alpha, Point2 p, const BaseMap& base) { return {p.y, base(s_value(alpha, p))}; }

// hot-loop form of g_step for the tent base
class MemoryMap {
 public:
  explicit MemoryMap(Alpha alpha) : a_(alpha.value()), b_(1.0 - alpha.value()) {}

  double alpha() const { return a_; }
  double s(Point2 p) const { return a_ * p.y + b_ * p.x; }
  RegionLabel region(Point2 p) const { return s(p) >= 0.5 ? RegionLabel::A2 : RegionLabel::A1; }

  Point2 operator()(Point2 p) const {
    double s = a_ * p.y + b_ * p.x;
    return {p.y, s < 0.5 ? 2.0 * s : 2.0 - 2.0 * s};
  }

  // step with the drift check used by every orbit loop
  Point2 checked_step(Point2 p) const {
    Point2 q = (*this)(p);
    if (!in_unit_square(q, kDriftTol))
      throw DriftError("orbit left the unit square: (" + std::to_string(q.x) + ", " + std::to_string(q.y) + ")");
    return q;
  }

 private:
  double a_, b_;
};

// images G^{skip+1}(p0), ..., G^{skip+n}(p0)
inline std::vector<Point2> orbit(Alpha alpha, Point2 p0, std::size_t n, std::size_t skip = 0) {
  if (n < 1) throw DomainError("orbit: n must be at least 1");
  if (!in_unit_square(p0, 1e-12)) throw DomainError("orbit: start point outside the unit square");
  MemoryMap g(alpha);
  Point2 p = p0;
  for (std::size_t i = 0; i < skip; ++i) p = g.checked_step(p);
  std::vector<Point2> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    p = g.checked_step(p);
    out.push_back(p);
  }
  return out;
}

// inverse of the branch of G living over branch j of the base map
inline Point2 inverse_branch(Alpha alpha, const BaseMap& base, int j, Point2 uv) {
  double a = alpha.value();
  return {(base.branch_inverse(j, uv.y) - a * uv.x) / (1.0 - a), uv.x};
}

inline Mat2 inverse_branch_derivative(Alpha alpha, const BaseMap& base, int j, double v) {
  base.branch_inverse(j, v);  // range checks
  double a = alpha.value();
  return {-a / (1.0 - a), 1.0 / ((1.0 - a) * base.slope(j)), 1.0, 0.0};
}

}  // namespace memmap
