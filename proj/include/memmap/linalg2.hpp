#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "symbol_block.hpp"
#include "types.hpp"

namespace memmap {

// [[a, b], [c, d]]
struct Mat2 {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

  constexpr double det() const { return a * d - b * c; }
  constexpr double trace() const { return a + d; }
  constexpr double frobenius_sq() const { return a * a + b * b + c * c + d * d; }
  double frobenius() const { return std::sqrt(frobenius_sq()); }
  constexpr Mat2 transpose() const { return {a, c, b, d}; }
  double max_abs() const { return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d))); }

  constexpr Point2 operator*(Point2 p) const { return {a * p.x + b * p.y, c * p.x + d * p.y}; }
  friend constexpr Mat2 operator*(const Mat2& m, const Mat2& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
  }
  friend constexpr Mat2 operator*(double s, const Mat2& m) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }
  friend constexpr bool operator==(const Mat2&, const Mat2&) = default;
};

struct SigmaPair {
  double s1 = 0.0;  // larger
  double s2 = 0.0;  // smaller
};

// eigenvalues of M^T M; the small root is taken as det^2 / large root to avoid cancellation
inline SigmaPair singular_values(const Mat2& m) {
  // scale first so squares stay in range for very large or small entries
  double scale = m.max_abs();
  if (scale == 0.0) return {0.0, 0.0};
  int e;
  std::frexp(scale, &e);
  Mat2 n = std::ldexp(1.0, -e) * m;
  double p = n.frobenius_sq();
  double q = std::abs(n.det());
  double disc = std::max(0.0, (p - 2.0 * q) * (p + 2.0 * q));
  double l1 = 0.5 * (p + std::sqrt(disc));
  double s1 = std::sqrt(l1);
  double s2 = s1 > 0.0 ? q / s1 : 0.0;
  return {std::ldexp(s1, e), std::ldexp(s2, e)};
}

// coefficients in ascending powers
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> ascending) : c_(std::move(ascending)) {}

  static Polynomial from_descending(std::vector<double> coeffs) {
    return Polynomial(std::vector<double>(coeffs.rbegin(), coeffs.rend()));
  }

  double operator()(double x) const {
    double r = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
    return r;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return Polynomial({0.0});
    std::vector<double> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return Polynomial(std::move(d));
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<double>& coefficients() const { return c_; }

 private:
  std::vector<double> c_;
};

// bisection; exact zeros at an endpoint are returned directly
template <class F>
double find_root(F&& f, double lo, double hi, double tol = 1e-9) {
  if (!(lo < hi)) throw RootError("find_root: empty bracket");
  double flo = f(lo), fhi = f(hi);
  if (!std::isfinite(flo) || !std::isfinite(fhi)) throw RootError("find_root: non-finite value at bracket end");
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw RootError("find_root: no sign change on bracket");
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double fm = f(mid);
    if (!std::isfinite(fm)) throw RootError("find_root: non-finite value inside bracket");
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) { lo = mid; flo = fm; }
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline Mat2 branch_matrix(RegionLabel r, Alpha alpha) {
  double a = alpha.value();
  double sgn = r == RegionLabel::A1 ? 1.0 : -1.0;
  return {0.0, 1.0, sgn * 2.0 * (1.0 - a), sgn * 2.0 * a};
}

inline Mat2 branch_matrix(int symbol, Alpha alpha) { return branch_matrix(label_from_symbol(symbol), alpha); }

inline Mat2 block_product(const SymbolBlock& block, Alpha alpha) {
  if (block.empty()) throw DomainError("empty block");
  Mat2 m = Mat2::identity();
  for (RegionLabel r : block.symbols()) m = m * branch_matrix(r, alpha);
  return m;
}

inline double sequence_sigma2(const SymbolBlock& block, Alpha alpha) {
  return singular_values(block_product(block, alpha)).s2;
}

enum class PairKind { follows_d1, follows_d2 };

// closed forms for sigma of D_i D_1 and D_i D_2 (the same for i = 1, 2)
inline SigmaPair closed_form_sigma(PairKind kind, Alpha alpha) {
  double a = alpha.value();
  double a2 = a * a, a3 = a2 * a, a4 = a3 * a, a5 = a4 * a, a6 = a5 * a, a7 = a6 * a, a8 = a7 * a;
  double base, w;
  if (kind == PairKind::follows_d1) {
    base = 16 * a4 - 24 * a3 + 22 * a2 - 8 * a + 4;
    w = 64 * a8 - 192 * a7 + 320 * a6 - 328 * a5 + 245 * a4 - 120 * a3 + 36 * a2;
  } else {
    base = 16 * a4 - 8 * a3 + 6 * a2 - 8 * a + 4;
    w = 64 * a8 - 64 * a7 + 64 * a6 - 88 * a5 + 69 * a4 - 24 * a3 + 4 * a2;
  }
  double r = 2.0 * std::sqrt(std::max(0.0, w));
  return {std::sqrt(base + r), std::sqrt(std::max(0.0, base - r))};
}

// Lower bound |det P| / ||P||_F for a long product P, kept in log2 form.
// Factors are pushed in time order, each one multiplying on the left.
class Sigma2Bound {
 public:
  void push_latest(const Mat2& m) {
    prod_ = m * prod_;
    double d = m.det();
    if (d == 0.0) { zero_ = true; return; }
    int e;
    double mant = std::frexp(std::abs(d), &e);
    log2_det_ += std::log2(mant) + e;
    renormalize();
    ++count_;
  }

  std::size_t size() const { return count_; }

  double log2_value() const {
    if (zero_) return -std::numeric_limits<double>::infinity();
    return log2_det_ - (std::log2(prod_.frobenius()) + prod_exp_);
  }
  double log10_value() const { return log2_value() * std::log10(2.0); }
  double value() const { return std::exp2(log2_value()); }

 private:
  void renormalize() {
    double f = prod_.max_abs();
    if (f == 0.0) { zero_ = true; return; }
    if (f > 0x1p64 || f < 0x1p-64) {
      int e;
      std::frexp(f, &e);
      prod_ = std::ldexp(1.0, -e) * prod_;
      prod_exp_ += e;
    }
  }

  Mat2 prod_ = Mat2::identity();
  std::int64_t prod_exp_ = 0;
  double log2_det_ = 0.0;
  bool zero_ = false;
  std::size_t count_ = 0;
};

// factors in written (product) order: the first factor is leftmost
inline double sigma2_product_bound(std::span<const Mat2> factors) {
  if (factors.empty()) throw DomainError("sigma2_product_bound: empty sequence");
  Sigma2Bound acc;
  for (auto it = factors.rbegin(); it != factors.rend(); ++it) acc.push_latest(*it);
  return acc.value();
}

// first downward crossing of sigma2 through 1 on (0, 1/2); nullopt if sigma2 stays above 1
inline std::optional<double> sigma2_threshold(const SymbolBlock& block, double step = 1e-3, double tol = 1e-9) {
  auto f = [&](double a) { return sequence_sigma2(block, a) - 1.0; };
  double prev_a = step;
  double prev = f(prev_a);
  for (int k = 2; k * step < 0.5; ++k) {
    double a = k * step;
    double cur = f(a);
    if (prev > 0.0 && cur <= 0.0) return find_root(f, prev_a, a, tol);
    prev_a = a;
    prev = cur;
  }
  return std::nullopt;
}

}  // namespace memmap
