#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "core_map.hpp"
#include "linalg2.hpp"

namespace memmap {

inline constexpr std::uint64_t kDefaultIterations = 1000000;
inline constexpr std::uint64_t kDefaultSkip = 1500000;
inline constexpr int kDefaultGrid = 1024;

// uniform start in the open unit square, reproducible from the seed
inline Point2 random_start(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point2 p{u(rng), u(rng)};
  return p;
}

struct Histogram2D {
  int grid = 0;
  std::vector<std::uint64_t> counts;  // row-major, row = floor(y * grid)
  std::uint64_t total = 0;
  double alpha = 0.0;
  Point2 start{};
  std::uint64_t iterations = 0;
  std::uint64_t skip = 0;
  std::uint64_t seed = 0;

  Histogram2D() = default;
  explicit Histogram2D(int g) : grid(g), counts(std::size_t(g) * g, 0) {
    if (g < 2) throw DomainError("histogram grid must be at least 2");
  }

  int cell_index(double v) const { return std::clamp(static_cast<int>(v * grid), 0, grid - 1); }
  void add(Point2 p) {
    ++counts[std::size_t(cell_index(p.y)) * grid + cell_index(p.x)];
    ++total;
  }
  std::uint64_t at(int row, int col) const { return counts[std::size_t(row) * grid + col]; }
  Point2 cell_center(int row, int col) const { return {(col + 0.5) / grid, (row + 0.5) / grid}; }
  double cell_diagonal() const { return std::sqrt(2.0) / grid; }

  std::size_t occupied() const {
    return std::size_t(std::count_if(counts.begin(), counts.end(), [](std::uint64_t c) { return c > 0; }));
  }

  Histogram2D& operator+=(const Histogram2D& o) {
    if (o.grid != grid) throw DomainError("histogram grids differ");
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
    total += o.total;
    iterations += o.iterations;
    return *this;
  }
};

inline Histogram2D run_histogram(Alpha alpha, Point2 p0, std::uint64_t iterations, std::uint64_t skip = kDefaultSkip,
                                 int grid = kDefaultGrid, std::uint64_t seed = 0) {
  if (iterations < 1) throw DomainError("iterations must be at least 1");
  if (!in_unit_square(p0)) throw DomainError("start point outside the unit square");
  Histogram2D h(grid);
  h.alpha = alpha.value();
  h.start = p0;
  h.iterations = iterations;
  h.skip = skip;
  h.seed = seed;
  MemoryMap g(alpha);
  Point2 p = p0;
  for (std::uint64_t i = 0; i < skip; ++i) p = g.checked_step(p);
  for (std::uint64_t i = 0; i < iterations; ++i) {
    p = g.checked_step(p);
    h.add(p);
  }
  return h;
}

inline std::vector<double> marginal_density(const Histogram2D& h) {
  if (h.total == 0) throw DomainError("marginal_density: empty histogram");
  std::vector<double> d(h.grid, 0.0);
  for (int r = 0; r < h.grid; ++r)
    for (int c = 0; c < h.grid; ++c) d[c] += double(h.at(r, c));
  for (auto& v : d) v *= double(h.grid) / double(h.total);
  return d;
}

// integral of f against a binned density, midpoint rule
inline double integrate_density(const std::vector<double>& d, const std::function<double(double)>& f) {
  double n = double(d.size()), acc = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) acc += d[i] * f((i + 0.5) / n);
  return acc / n;
}

// mean of f over the first coordinate of p0, G(p0), ..., G^{n-1}(p0)
inline double birkhoff_average(Alpha alpha, const std::function<double(double)>& f, Point2 p0, std::uint64_t n) {
  if (n == 0) throw DomainError("birkhoff_average: n must be positive");
  MemoryMap g(alpha);
  Point2 p = p0;
  double acc = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    acc += f(p.x);
    p = g.checked_step(p);
  }
  return acc / double(n);
}

struct BatchEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t batches = 0;
};

inline BatchEstimate birkhoff_batch_means(Alpha alpha, const std::function<double(double)>& f, Point2 p0,
                                          std::uint64_t skip, std::uint64_t per_batch, std::size_t batches) {
  if (batches < 2 || per_batch == 0) throw DomainError("batch means need at least two nonempty batches");
  MemoryMap g(alpha);
  Point2 p = p0;
  for (std::uint64_t i = 0; i < skip; ++i) p = g.checked_step(p);
  std::vector<double> means;
  for (std::size_t b = 0; b < batches; ++b) {
    double acc = 0.0;
    for (std::uint64_t i = 0; i < per_batch; ++i) {
      acc += f(p.x);
      p = g.checked_step(p);
    }
    means.push_back(acc / double(per_batch));
  }
  BatchEstimate e;
  e.batches = batches;
  e.mean = std::accumulate(means.begin(), means.end(), 0.0) / double(batches);
  double var = 0.0;
  for (double m : means) var += (m - e.mean) * (m - e.mean);
  var /= double(batches - 1);
  e.std_error = std::sqrt(var / double(batches));
  return e;
}

struct GrowthSample {
  std::uint64_t n = 0;
  double log10_bound = 0.0;
};

// det/Frobenius lower bound for sigma2 of the orbit's derivative product, sampled at 10, 100, ... and N
inline std::vector<GrowthSample> sigma2_growth_experiment(Alpha alpha, Point2 p0, std::uint64_t N) {
  MemoryMap g(alpha);
  Sigma2Bound bound;
  std::vector<GrowthSample> out;
  Point2 p = p0;
  std::uint64_t next = 10;
  for (std::uint64_t k = 1; k <= N; ++k) {
    bound.push_latest(branch_matrix(g.region(p), alpha));
    p = g.checked_step(p);
    if (k == N || k == next) {
      out.push_back({k, bound.log10_value()});
      if (k == next) next *= 10;
    }
  }
  return out;
}

// occupied cells whose center lies below S = 2a^2 by more than a cell diagonal
inline std::size_t support_floor_violations(const Histogram2D& h) {
  double floor = 2.0 * h.alpha * h.alpha - h.cell_diagonal();
  std::size_t bad = 0;
  for (int r = 0; r < h.grid; ++r)
    for (int c = 0; c < h.grid; ++c)
      if (h.at(r, c) > 0 && s_value(h.alpha, h.cell_center(r, c)) < floor) ++bad;
  return bad;
}

inline double jaccard(const Histogram2D& a, const Histogram2D& b) {
  if (a.grid != b.grid) throw DomainError("histogram grids differ");
  std::size_t both = 0, either = 0;
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    bool x = a.counts[i] > 0, y = b.counts[i] > 0;
    both += x && y;
    either += x || y;
  }
  return either ? double(both) / double(either) : 1.0;
}

// ---- clusters -------------------------------------------------------------

inline constexpr int kClusterLinkRadius = 3;
inline constexpr std::uint64_t kClusterIterations = 100000000;
inline constexpr std::uint64_t kClusterSkip = 35000000;
inline constexpr int kClusterGrid = 2048;

struct ClusterReport {
  double alpha = 0.0;
  int count = 0;
  int rotation = 0;  // clockwise position shift per application of G
  bool consistent = false;    // every cluster moves by the same shift
  bool single_cycle = false;  // successor map is one n-cycle
  bool three_r_relation = false;  // 3r = -1 mod c
  double agreement = 0.0;         // share of angular neighbours agreeing with the rotation
  std::vector<int> labels;        // per cell, -1 when empty; cluster ids in clockwise order
  std::vector<Point2> centroids;
  std::vector<int> successor;
};

inline std::vector<int> label_components(const Histogram2D& h, int radius, int& count) {
  const int g = h.grid;
  std::vector<int> lab(h.counts.size(), -1);
  std::vector<std::size_t> stack;
  count = 0;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    if (!h.counts[i] || lab[i] >= 0) continue;
    lab[i] = count;
    stack.push_back(i);
    while (!stack.empty()) {
      std::size_t k = stack.back();
      stack.pop_back();
      int r = int(k / g), c = int(k % g);
      for (int dr = -radius; dr <= radius; ++dr)
        for (int dc = -radius; dc <= radius; ++dc) {
          int rr = r + dr, cc = c + dc;
          if (rr < 0 || cc < 0 || rr >= g || cc >= g) continue;
          std::size_t kk = std::size_t(rr) * g + cc;
          if (h.counts[kk] && lab[kk] < 0) {
            lab[kk] = count;
            stack.push_back(kk);
          }
        }
    }
    ++count;
  }
  return lab;
}

inline ClusterReport detect_clusters(Alpha alpha, std::uint64_t iterations = kClusterIterations,
                                     std::uint64_t skip = kClusterSkip, int grid = kClusterGrid,
                                     Point2 p0 = {0.3, 0.7}, int radius = kClusterLinkRadius) {
  Histogram2D h = run_histogram(alpha, p0, iterations, skip, grid);
  ClusterReport rep;
  rep.alpha = alpha.value();
  int n = 0;
  std::vector<int> raw = label_components(h, radius, n);
  rep.count = n;
  if (n == 0) throw VerificationError("detect_clusters: empty support");

  std::vector<double> sx(n, 0.0), sy(n, 0.0), w(n, 0.0);
  double cx = 0.0, cy = 0.0, cw = 0.0;
  for (int r = 0; r < grid; ++r)
    for (int c = 0; c < grid; ++c) {
      int l = raw[std::size_t(r) * grid + c];
      if (l < 0) continue;
      Point2 q = h.cell_center(r, c);
      sx[l] += q.x; sy[l] += q.y; w[l] += 1.0;
      cx += q.x; cy += q.y; cw += 1.0;
    }
  cx /= cw;
  cy /= cw;

  // clockwise angle around the support centroid, starting from the positive x direction
  std::vector<double> angle(n);
  for (int l = 0; l < n; ++l) {
    double t = std::atan2(sy[l] / w[l] - cy, sx[l] / w[l] - cx);
    angle[l] = t > 0 ? 2 * M_PI - t : -t;
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return angle[a] < angle[b]; });

  // majority successor from consecutive orbit points
  std::vector<std::uint64_t> trans(std::size_t(n) * n, 0);
  MemoryMap g(alpha);
  Point2 p = p0;
  for (std::uint64_t i = 0; i <= skip; ++i) p = g.checked_step(p);
  auto raw_of = [&](Point2 q) { return raw[std::size_t(h.cell_index(q.y)) * grid + h.cell_index(q.x)]; };
  int prev = raw_of(p);
  for (std::uint64_t i = 1; i < iterations; ++i) {
    p = g.checked_step(p);
    int cur = raw_of(p);
    if (prev >= 0 && cur >= 0) ++trans[std::size_t(prev) * n + cur];
    prev = cur;
  }
  std::vector<int> succ(n, -1);
  for (int i = 0; i < n; ++i) {
    auto row = trans.begin() + std::ptrdiff_t(i) * n;
    auto it = std::max_element(row, row + n);
    if (*it > 0) succ[i] = int(it - row);
  }

  // cycle index of each cluster when the successor map is one n-cycle
  std::vector<int> cyc(n, -1);
  int at = 0;
  for (int k = 0; k < n && at >= 0 && cyc[at] < 0; ++k) {
    cyc[at] = k;
    at = succ[at];
  }
  rep.single_cycle = at == 0 && std::count(cyc.begin(), cyc.end(), -1) == 0;

  std::vector<int> pos(n);
  if (rep.single_cycle) {
    // angular neighbours vote on how many G steps separate adjacent clusters
    std::vector<int> votes(n, 0);
    for (int i = 0; i < n; ++i) ++votes[((cyc[order[(i + 1) % n]] - cyc[order[i]]) % n + n) % n];
    int m = int(std::max_element(votes.begin(), votes.end()) - votes.begin());
    rep.agreement = double(votes[m]) / n;
    int r = -1;
    for (int t = 0; t < n; ++t)
      if ((long(t) * m) % n == 1 % n) { r = t; break; }
    if (r >= 0) {
      rep.rotation = r;
      rep.consistent = true;
      int base = int(std::find(order.begin(), order.end(), 0) - order.begin());
      for (int l = 0; l < n; ++l) pos[l] = int((base + long(cyc[l]) * r) % n);
    }
  }
  if (!rep.consistent) {
    for (int i = 0; i < n; ++i) pos[order[i]] = i;
    std::vector<int> votes(n, 0);
    for (int i = 0; i < n; ++i)
      if (succ[i] >= 0) ++votes[((pos[succ[i]] - pos[i]) % n + n) % n];
    rep.rotation = int(std::max_element(votes.begin(), votes.end()) - votes.begin());
    rep.agreement = double(votes[rep.rotation]) / n;
  }

  rep.labels.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) rep.labels[i] = raw[i] < 0 ? -1 : pos[raw[i]];
  rep.centroids.resize(n);
  rep.successor.assign(n, -1);
  for (int l = 0; l < n; ++l) {
    rep.centroids[pos[l]] = {sx[l] / w[l], sy[l] / w[l]};
    if (succ[l] >= 0) rep.successor[pos[l]] = pos[succ[l]];
  }
  rep.three_r_relation = (3LL * rep.rotation + 1) % n == 0;
  return rep;
}

// cluster index after applying the successor map k times
inline int advance_cluster(const ClusterReport& rep, int cluster, long k) {
  for (long i = 0; i < k && cluster >= 0; ++i) cluster = rep.successor[cluster];
  return cluster;
}

// ---- writers --------------------------------------------------------------

inline void write_histogram_csv(std::ostream& os, const Histogram2D& h) {
  os << "row,col,count\n";
  for (int r = 0; r < h.grid; ++r)
    for (int c = 0; c < h.grid; ++c)
      if (h.at(r, c)) os << r << ',' << c << ',' << h.at(r, c) << '\n';
}

// one byte per cell, top row at y near 1; 0 empty, else log-scaled into 1..255
inline std::vector<std::uint8_t> support_pixels(const Histogram2D& h) {
  std::uint64_t mx = *std::max_element(h.counts.begin(), h.counts.end());
  std::vector<std::uint8_t> px(h.counts.size(), 0);
  if (mx == 0) return px;
  double lm = std::log1p(double(mx));
  for (int r = 0; r < h.grid; ++r)
    for (int c = 0; c < h.grid; ++c) {
      std::uint64_t v = h.at(r, c);
      if (!v) continue;
      px[std::size_t(h.grid - 1 - r) * h.grid + c] = std::uint8_t(1 + std::lround(254.0 * std::log1p(double(v)) / lm));
    }
  return px;
}

namespace detail {
template <class T>
void put_le(std::ostream& os, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}
}  // namespace detail

inline constexpr char kSupportMagic[8] = {'M', 'M', 'S', 'U', 'P', 'P', '0', '1'};

inline void write_support_image(std::ostream& os, const Histogram2D& h) {
  os.write(kSupportMagic, 8);
  detail::put_le<std::uint32_t>(os, std::uint32_t(h.grid));
  detail::put_le<double>(os, h.alpha);
  detail::put_le<std::uint64_t>(os, h.iterations);
  auto px = support_pixels(h);
  os.write(reinterpret_cast<const char*>(px.data()), std::streamsize(px.size()));
}

inline void write_pgm(std::ostream& os, const Histogram2D& h) {
  os << "P5\n" << h.grid << ' ' << h.grid << "\n255\n";
  auto px = support_pixels(h);
  os.write(reinterpret_cast<const char*>(px.data()), std::streamsize(px.size()));
}

}  // namespace memmap
