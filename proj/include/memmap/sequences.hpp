#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core_map.hpp"
#include "geometry.hpp"
#include "linalg2.hpp"
#include "symbol_block.hpp"

namespace memmap {

inline constexpr double kIndeterminateArea = 1e-12;
inline constexpr double kSigmaMargin = 1e-9;

// below this every pair product D_i D_j has sigma2 > 1
inline double alpha1() {
  static const double r = find_root(Polynomial::from_descending({16, 16, -52, 48, -9}), 0.2, 0.3, 1e-15);
  return r;
}

// A1 runs drop from 3 to 2 here
inline double alpha2() {
  static const double r = find_root(Polynomial::from_descending({8, -8, 8, 0, -0.5}), 0.2, 0.3, 1e-15);
  return r;
}

inline double lone_a2_visit_threshold() { return (std::sqrt(5.0) - 1.0) / 4.0; }

// Sets an orbit can be in at a run boundary.
//   b:     G2(A2) cap A1, positions right after leaving A2
//   entry: A2 parts of the A1 chain out of b, positions right after entering A2
struct RunContext {
  double alpha = 0.0;
  ConvexPolygon b;
  std::vector<ConvexPolygon> entry;
  int a1_chain = 0;  // longest A1 run starting in b
};

inline RunContext run_context(Alpha alpha) {
  RunContext ctx;
  ctx.alpha = alpha.value();
  auto regions = region_polygons(alpha);
  auto g1 = AffineBranch::of(RegionLabel::A1, alpha), g2 = AffineBranch::of(RegionLabel::A2, alpha);
  ctx.b = intersect(affine_image(g2.map, regions.a2), regions.a1);
  if (ctx.b.empty()) return ctx;
  std::vector<ConvexPolygon> cur{ctx.b};
  while (!cur.empty()) {
    ++ctx.a1_chain;
    if (ctx.a1_chain > 200) throw VerificationError("A1 chain does not terminate");
    std::vector<ConvexPolygon> next;
    for (auto& p : cur) {
      auto parts = split_by_partition(alpha, affine_image(g1.map, p));
      if (!parts.a2.empty()) ctx.entry.push_back(parts.a2);
      if (!parts.a1.empty()) next.push_back(parts.a1);
    }
    cur = std::move(next);
  }
  return ctx;
}

// nullopt below alpha1, where no bound is claimed
inline std::optional<int> max_a1_run(Alpha alpha) {
  if (!(alpha.value() > 0.0 && alpha.value() < 0.5)) throw DomainError("max_a1_run: alpha must lie in (0, 1/2)");
  if (alpha.value() < alpha1()) return std::nullopt;
  return run_context(alpha).a1_chain;
}

struct RunCount {
  int value = 0;
  bool indeterminate = false;
};

inline RunCount min_a2_run(Alpha alpha) {
  if (!(alpha.value() > 0.0 && alpha.value() < 0.5)) throw DomainError("min_a2_run: alpha must lie in (0, 1/2)");
  Point2 v2 = g_step(alpha, g_step(alpha, {0.0, 1.0}));
  double s = s_value(alpha, v2) - 0.5;
  bool boundary = std::abs(alpha.value() - lone_a2_visit_threshold()) <= 1e-12 || std::abs(s) <= 1e-12;
  if (boundary) return {2, true};
  return {s > 0.0 ? 2 : 1, false};
}

// ---- named admissibility events -------------------------------------------

enum class Witness { w_partition, z_left_edge, v_top_left };

inline Point2 witness_point(Witness w, double a) {
  switch (w) {
    case Witness::w_partition: return {(a + 0.5) / (a + 1.0), a / (a + 1.0)};
    case Witness::z_left_edge: return {0.0, 2.0 * a};
    case Witness::v_top_left: return {0.0, 1.0};
  }
  return {};
}

enum class AdmissibilityEvent {
  lone_a2_visit_excluded,
  single_a1_runs,
  run4_excluded,
  run3_followed_by_run2,
  run3_excluded,
  run6_followed_by_run2_only,
  run6_after_run5_run2,
  run6_excluded,
};

struct EventSpec {
  AdmissibilityEvent event;
  const char* name;
  const char* description;
  Witness witness;
  int steps;
  double lo, hi;          // search window holding exactly one root
  const char* flip_word;  // block that turns inadmissible above the threshold
};

inline const std::vector<EventSpec>& admissibility_events() {
  static const std::vector<EventSpec> events = {
      {AdmissibilityEvent::lone_a2_visit_excluded, "lone_a2_visit_excluded", "A2 runs have length at least 2",
       Witness::v_top_left, 2, 0.25, 1.0 / 3.0, "D1D2D1"},
      {AdmissibilityEvent::single_a1_runs, "single_a1_runs", "A1 runs have length 1", Witness::w_partition, 1, 0.25,
       0.45, "D1D1"},
      {AdmissibilityEvent::run4_excluded, "run4_excluded", "D1D2^4 not admissible", Witness::z_left_edge, 5,
       1.0 / 3.0, 0.40, "D1D2^4"},
      {AdmissibilityEvent::run3_followed_by_run2, "run3_followed_by_run2", "D1D2^3 is followed by D1D2^2",
       Witness::w_partition, 7, 1.0 / 3.0, 0.43, "D2^3D1D2^3"},
      {AdmissibilityEvent::run3_excluded, "run3_excluded", "D1D2^3 not admissible", Witness::w_partition, 4,
       1.0 / 3.0, 0.5, "D1D2^3"},
      {AdmissibilityEvent::run6_followed_by_run2_only, "run6_followed_by_run2_only",
       "D1D2^6 is followed only by D1D2^2", Witness::w_partition, 10, 0.4345, 0.46, "D1D2^5D1D2^6"},
      {AdmissibilityEvent::run6_after_run5_run2, "run6_after_run5_run2", "D1D2^6 is followed by D1D2^5D1D2^2",
       Witness::w_partition, 13, 0.4452, 0.4528, "D1D2^2D1D2^2D1D2^6"},
      {AdmissibilityEvent::run6_excluded, "run6_excluded", "D1D2^6 and D1D2^7 not admissible",
       Witness::w_partition, 7, 0.44, 0.47, "D1D2^6"},
  };
  return events;
}

inline const EventSpec& event_spec(AdmissibilityEvent e) {
  for (auto& s : admissibility_events())
    if (s.event == e) return s;
  throw DomainError("unknown admissibility event");
}

// S(G^k(witness)) - 1/2 as a function of alpha
inline double event_function(const EventSpec& spec, double a) {
  Point2 p = witness_point(spec.witness, a);
  for (int i = 0; i < spec.steps; ++i) p = g_step(a, p);
  return s_value(a, p) - 0.5;
}

inline double admissibility_threshold(AdmissibilityEvent e, double tol = 1e-13) {
  const EventSpec& spec = event_spec(e);
  auto f = [&](double a) { return event_function(spec, a); };
  const int n = 4000;
  int changes = 0;
  double lo = spec.lo, hi = spec.hi;
  double prev = f(spec.lo);
  for (int i = 1; i <= n; ++i) {
    double a = spec.lo + (spec.hi - spec.lo) * i / n;
    double cur = f(a);
    if ((prev > 0.0) != (cur > 0.0)) {
      ++changes;
      lo = spec.lo + (spec.hi - spec.lo) * (i - 1) / n;
      hi = a;
    }
    prev = cur;
  }
  if (changes != 1)
    throw RootError(std::string("admissibility_threshold: expected one root in the window for ") + spec.name +
                    ", found " + std::to_string(changes));
  return find_root(f, lo, hi, tol);
}

// ---- admissibility of blocks ----------------------------------------------

enum class Verdict { yes, no, indeterminate };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "yes";
    case Verdict::no: return "no";
    default: return "indeterminate";
  }
}

inline Verdict area_verdict(double area) {
  if (area <= kAreaEps) return Verdict::no;
  if (area <= kIndeterminateArea) return Verdict::indeterminate;
  return Verdict::yes;
}

inline double total_area(const std::vector<ConvexPolygon>& ps) {
  double s = 0.0;
  for (auto& p : ps) s += p.area();
  return s;
}

inline std::vector<ConvexPolygon> clip_to_region(Alpha alpha, const std::vector<ConvexPolygon>& ps, RegionLabel r) {
  std::vector<ConvexPolygon> out;
  for (auto& p : ps) {
    auto parts = split_by_partition(alpha, p);
    auto& q = r == RegionLabel::A1 ? parts.a1 : parts.a2;
    if (!q.empty()) out.push_back(std::move(q));
  }
  return out;
}

inline std::vector<ConvexPolygon> map_all(Alpha alpha, const std::vector<ConvexPolygon>& ps, RegionLabel r) {
  auto br = AffineBranch::of(r, alpha);
  std::vector<ConvexPolygon> out;
  out.reserve(ps.size());
  for (auto& p : ps) out.push_back(affine_image(br.map, p));
  return out;
}

struct Realization {
  Verdict verdict = Verdict::no;
  double area = 0.0;
  int empty_at = -1;                   // time index where the set vanished, for "no"
  std::vector<ConvexPolygon> witness;  // positions at the last symbol
};

// A block read as a run-boundary segment: starting in A2 means starting in the entry set,
// starting in A1 means starting in b.
inline Realization realize(const RunContext& ctx, const SymbolBlock& block) {
  if (block.empty()) throw DomainError("realize: empty block");
  Alpha alpha(ctx.alpha);
  auto time = block.time_order();
  std::vector<ConvexPolygon> cur;
  if (time.front() == RegionLabel::A2) cur = ctx.entry;
  else if (!ctx.b.empty()) cur = {ctx.b};
  Realization out;
  for (std::size_t i = 0; i < time.size(); ++i) {
    cur = clip_to_region(alpha, cur, time[i]);
    if (cur.empty()) {
      out.empty_at = static_cast<int>(i);
      return out;
    }
    if (i + 1 < time.size()) cur = map_all(alpha, cur, time[i]);
  }
  out.area = total_area(cur);
  out.verdict = area_verdict(out.area);
  out.witness = std::move(cur);
  return out;
}

inline Verdict admissible(Alpha alpha, const SymbolBlock& block) { return realize(run_context(alpha), block).verdict; }

struct AdmissibilityEntry {
  SymbolBlock block;
  Verdict verdict = Verdict::no;
  double area = 0.0;
  std::vector<ConvexPolygon> witness;
};

struct AdmissibilityReport {
  double alpha = 0.0;
  int max_len = 0;
  std::vector<AdmissibilityEntry> entries;  // admissible words and minimal inadmissible extensions

  std::optional<Verdict> lookup(const SymbolBlock& b) const {
    for (auto& e : entries)
      if (e.block == b) return e.verdict;
    return std::nullopt;
  }
};

inline AdmissibilityReport admissible_blocks(Alpha alpha, int max_len) {
  if (max_len < 1 || max_len > 20) throw DomainError("admissible_blocks: max_len must lie in [1, 20]");
  RunContext ctx = run_context(alpha);
  AdmissibilityReport rep;
  rep.alpha = alpha.value();
  rep.max_len = max_len;
  std::vector<RegionLabel> word;

  std::function<void(const std::vector<ConvexPolygon>&)> grow = [&](const std::vector<ConvexPolygon>& at) {
    double area = total_area(at);
    Verdict v = area_verdict(area);
    rep.entries.push_back({SymbolBlock::from_time_order(word), v, area, v == Verdict::yes ? at : std::vector<ConvexPolygon>{}});
    if (static_cast<int>(word.size()) >= max_len) return;
    auto moved = map_all(alpha, at, word.back());
    for (auto r : {RegionLabel::A1, RegionLabel::A2}) {
      auto next = clip_to_region(alpha, moved, r);
      word.push_back(r);
      if (next.empty()) rep.entries.push_back({SymbolBlock::from_time_order(word), Verdict::no, 0.0, {}});
      else grow(next);
      word.pop_back();
    }
  };

  for (auto first : {RegionLabel::A1, RegionLabel::A2}) {
    std::vector<ConvexPolygon> start = first == RegionLabel::A2 ? ctx.entry : std::vector<ConvexPolygon>{ctx.b};
    start = clip_to_region(alpha, start, first);
    word = {first};
    if (start.empty()) rep.entries.push_back({SymbolBlock::from_time_order(word), Verdict::no, 0.0, {}});
    else grow(start);
  }
  return rep;
}

// runs D1D2^m (m <= max_m) that can directly follow a block in time
inline std::vector<SymbolBlock> successors(Alpha alpha, const SymbolBlock& block, int max_m = 12) {
  RunContext ctx = run_context(alpha);
  std::vector<SymbolBlock> out;
  for (int m = 1; m <= max_m; ++m) {
    SymbolBlock next = SymbolBlock::run(m);
    if (realize(ctx, next + block).verdict == Verdict::yes) out.push_back(next);
  }
  return out;
}

// ---- existence certificate ------------------------------------------------

enum class CertificateVerdict { proven, not_proven, indeterminate };

inline const char* to_string(CertificateVerdict v) {
  switch (v) {
    case CertificateVerdict::proven: return "proven";
    case CertificateVerdict::not_proven: return "not-proven";
    default: return "indeterminate";
  }
}

struct CertificateOptions {
  double margin = kSigmaMargin;
  int restart_run = 6;  // A2 run length after which a segment may be closed mid-run
  int max_depth = 60;
};

struct CertificateSegment {
  SymbolBlock block;
  double sigma2 = 0.0;
  bool admissible = true;
  std::string restart;  // "entry" or "run"
};

struct ExistenceCertificate {
  double alpha = 0.0;
  CertificateVerdict verdict = CertificateVerdict::not_proven;
  std::string route;  // "pairs" or "segment_cover"
  std::vector<CertificateSegment> segments;
  std::vector<std::string> rules;
  double min_sigma2 = 0.0;
  double pair_threshold = 0.0;
  CertificateOptions options;
  std::size_t nodes = 0;
  double dropped_area = 0.0;
  std::string failure;  // first uncovered word, time order, if any
};

// A2 points that have spent k further steps in A2: R_0 = A2, R_k = A2 cap G2(R_{k-1})
inline ConvexPolygon long_run_set(Alpha alpha, int k) {
  auto regions = region_polygons(alpha);
  auto g2 = AffineBranch::of(RegionLabel::A2, alpha);
  ConvexPolygon r = regions.a2;
  for (int i = 0; i < k && !r.empty(); ++i) r = intersect(affine_image(g2.map, r), regions.a2);
  return r;
}

inline ExistenceCertificate acim_certificate(Alpha alpha, CertificateOptions opt = {}) {
  if (!(alpha.value() > 0.0 && alpha.value() < 0.5)) throw DomainError("acim_certificate: alpha must lie in (0, 1/2)");
  ExistenceCertificate cert;
  cert.alpha = alpha.value();
  cert.options = opt;
  cert.pair_threshold = alpha1();

  double pair_min = 1e300;
  std::vector<CertificateSegment> pairs;
  for (auto i : {RegionLabel::A1, RegionLabel::A2})
    for (auto j : {RegionLabel::A1, RegionLabel::A2}) {
      SymbolBlock b({i, j});
      double s = sequence_sigma2(b, alpha);
      pair_min = std::min(pair_min, s);
      pairs.push_back({b, s, true, "any"});
    }
  if (pair_min > 1.0 + opt.margin) {
    cert.route = "pairs";
    cert.verdict = CertificateVerdict::proven;
    cert.segments = std::move(pairs);
    cert.min_sigma2 = pair_min;
    cert.rules = {"submultiplicativity", "pair_products"};
    return cert;
  }

  cert.route = "segment_cover";
  cert.rules = {"submultiplicativity", "segment_cover", "long_run_restart"};
  RunContext ctx = run_context(alpha);
  ConvexPolygon rk = long_run_set(alpha, opt.restart_run);
  std::map<SymbolBlock, CertificateSegment> found;
  bool near_margin = false;
  double worst = 1e300;
  std::vector<RegionLabel> word;
  bool failed = false;

  std::function<bool(const std::vector<ConvexPolygon>&, const Mat2&, RegionLabel, int)> dfs =
      [&](const std::vector<ConvexPolygon>& pieces, const Mat2& m, RegionLabel last, int run) -> bool {
    ++cert.nodes;
    if (static_cast<int>(word.size()) > opt.max_depth) {
      if (!failed) {
        std::string w;
        for (auto r : word) w += std::to_string(symbol_index(r));
        cert.failure = w;
      }
      failed = true;
      return false;
    }
    bool ok = true;
    std::vector<ConvexPolygon> in1, in2;
    for (auto& p : pieces) {
      auto parts = split_by_partition(alpha, p);
      double lost = p.area() - parts.a1.area() - parts.a2.area();
      if (lost > 0.0) cert.dropped_area += lost;
      if (!parts.a1.empty()) in1.push_back(std::move(parts.a1));
      if (!parts.a2.empty()) in2.push_back(std::move(parts.a2));
    }
    for (auto sym : {RegionLabel::A1, RegionLabel::A2}) {
      const auto& part = sym == RegionLabel::A1 ? in1 : in2;
      if (part.empty()) continue;
      bool boundary = sym == RegionLabel::A2 && last == RegionLabel::A1;
      bool long_run = sym == RegionLabel::A2 && last == RegionLabel::A2 && run >= opt.restart_run;
      if ((boundary && !word.empty()) || long_run) {
        double s = singular_values(m).s2;
        if (std::abs(s - 1.0) <= opt.margin) near_margin = true;
        if (s > 1.0 + opt.margin) {
          SymbolBlock b = SymbolBlock::from_time_order(word);
          found.try_emplace(b, CertificateSegment{b, s, true, boundary ? "entry" : "run"});
          worst = std::min(worst, s);
          continue;
        }
      }
      int next_run = sym == last ? run + 1 : 1;
      word.push_back(sym);
      bool sub = dfs(map_all(alpha, part, sym), branch_matrix(sym, alpha) * m, sym, next_run);
      word.pop_back();
      if (!sub) ok = false;
      if (failed) return false;
    }
    return ok;
  };

  bool ok = dfs(ctx.entry, Mat2::identity(), RegionLabel::A1, 0);
  if (ok && !rk.empty()) {
    word = {RegionLabel::A2};
    auto start = map_all(alpha, {rk}, RegionLabel::A2);
    ok = dfs(start, branch_matrix(RegionLabel::A2, alpha), RegionLabel::A2, opt.restart_run + 1);
    word.clear();
  }

  for (auto& [b, seg] : found) cert.segments.push_back(seg);
  cert.min_sigma2 = cert.segments.empty() ? 0.0 : worst;
  if (ok && cert.dropped_area <= 1e-9) cert.verdict = CertificateVerdict::proven;
  else if (near_margin || (ok && cert.dropped_area > 1e-9)) cert.verdict = CertificateVerdict::indeterminate;
  else cert.verdict = CertificateVerdict::not_proven;
  return cert;
}

}  // namespace memmap
