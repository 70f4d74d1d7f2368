#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace memmap {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// orbit left the unit square by more than the drift tolerance
struct DriftError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RootError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct VerificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IndeterminateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Point2 a, Point2 b) { return a.x == b.x && a.y == b.y; }
};

inline constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

inline bool in_unit_square(Point2 p, double tol = 1e-12) {
  return p.x >= -tol && p.x <= 1.0 + tol && p.y >= -tol && p.y <= 1.0 + tol;
}

// A1 / A2 double as the symbols 1 / 2 of an itinerary
enum class RegionLabel : int { A1 = 1, A2 = 2 };

inline int symbol_index(RegionLabel r) { return static_cast<int>(r); }

inline RegionLabel label_from_symbol(int s) {
  if (s == 1) return RegionLabel::A1;
  if (s == 2) return RegionLabel::A2;
  throw DomainError("symbol must be 1 or 2, got " + std::to_string(s));
}

inline const char* to_string(RegionLabel r) { return r == RegionLabel::A1 ? "A1" : "A2"; }

// memory weight; 0 is allowed for the memoryless limit.
// Implicit so call sites can pass a plain double and still get the range check.
class Alpha {
 public:
  Alpha(double v) : v_(v) {
    if (!(v >= 0.0 && v < 1.0))
      throw DomainError("alpha must lie in [0, 1), got " + std::to_string(v));
  }
  double value() const { return v_; }
  operator double() const { return v_; }

 private:
  double v_;
};

}  // namespace memmap
