#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "memmap/json_io.hpp"
#include "memmap/memmap.hpp"

using namespace memmap;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kFailed = 1, kUsage = 2, kIndeterminate = 3 };

struct RunConfig {
  std::optional<double> alpha;
  std::optional<double> x0, y0;
  std::optional<std::uint64_t> n, skip;
  std::optional<int> grid;
  std::uint64_t seed = 1;
  std::optional<double> tol;
  std::string out;
  bool json = false;
};

fs::path out_dir() {
  const char* d = std::getenv("MEMMAP_OUT_DIR");
  return d && *d ? fs::path(d) : fs::path(".");
}

std::string alpha_tag(double a) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", a);
  return buf;
}

Alpha require_alpha(const RunConfig& c) {
  if (!c.alpha) throw CLI::ValidationError("--alpha", "required for this subcommand");
  return Alpha(*c.alpha);
}

Point2 start_point(const RunConfig& c) {
  if (c.x0.has_value() != c.y0.has_value()) throw CLI::ValidationError("--x0/--y0", "give both or neither");
  if (c.x0) {
    Point2 p{*c.x0, *c.y0};
    if (!in_unit_square(p)) throw DomainError("start point outside the unit square");
    return p;
  }
  return random_start(c.seed);
}

std::ofstream open_out(const fs::path& p, bool binary = false) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, binary ? std::ios::binary : std::ios::out);
  if (!os) throw std::runtime_error("cannot open " + p.string());
  return os;
}

void print_checks(const std::vector<Check>& checks) {
  for (auto& c : checks) std::printf("  [%s] %s: %s\n", c.pass ? "pass" : "FAIL", c.name.c_str(), c.detail.c_str());
}

int cmd_simulate(const RunConfig& c) {
  Alpha alpha = require_alpha(c);
  Point2 p0 = start_point(c);
  std::uint64_t n = c.n.value_or(1000), skip = c.skip.value_or(0);
  if (n < 1) throw DomainError("--n must be at least 1");
  auto pts = orbit(alpha, p0, n, skip);

  std::ostringstream csv;
  csv << "n,x,y,region\n";
  char buf[96];
  long first_a2 = -1;
  std::uint64_t in_a2 = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    RegionLabel r = classify(alpha, pts[i]);
    if (r == RegionLabel::A2) {
      ++in_a2;
      if (first_a2 < 0) first_a2 = long(i);
    }
    std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%s\n", (unsigned long long)(skip + i + 1), pts[i].x, pts[i].y,
                  to_string(r));
    csv << buf;
  }
  if (c.out.empty() || c.out == "-") {
    if (!c.json) std::cout << csv.str();
  } else {
    open_out(c.out) << csv.str();
  }

  Point2 last = pts.back();
  json s = {{"alpha", alpha.value()},
            {"start", point_json(p0)},
            {"n", n},
            {"skip", skip},
            {"terminal", point_json(last)},
            {"terminal_distance_to_fixed_point", distance(last, kInteriorFixedPoint)},
            {"first_a2_index", first_a2 < 0 ? json(nullptr) : json(skip + std::uint64_t(first_a2) + 1)},
            {"a2_fraction", double(in_a2) / double(n)}};
  if (c.json) std::cout << s.dump(2) << '\n';
  else
    std::fprintf(stderr, "terminal (%.12g, %.12g), distance to (2/3,2/3) %.3g, A2 fraction %.6f\n", last.x, last.y,
                 distance(last, kInteriorFixedPoint), double(in_a2) / double(n));
  return kOk;
}

int cmd_support(const RunConfig& c) {
  Alpha alpha = require_alpha(c);
  int grid = c.grid.value_or(kDefaultGrid);
  if (grid < 2) throw CLI::ValidationError("--grid", "must be at least 2");
  Point2 p0 = start_point(c);
  Histogram2D h = run_histogram(alpha, p0, c.n.value_or(kDefaultIterations), c.skip.value_or(kDefaultSkip), grid, c.seed);
  fs::path base = c.out.empty() ? out_dir() / ("support_" + alpha_tag(alpha.value())) : fs::path(c.out);
  {
    auto os = open_out(base.string() + ".mmsupp", true);
    write_support_image(os, h);
  }
  {
    auto os = open_out(base.string() + ".pgm", true);
    write_pgm(os, h);
  }
  {
    auto os = open_out(base.string() + ".csv");
    write_histogram_csv(os, h);
  }
  json meta = histogram_metadata(h);
  if (alpha.value() < 0.5) meta["floor_violations"] = support_floor_violations(h);
  open_out(base.string() + ".json") << meta.dump(2) << '\n';
  if (c.json) std::cout << meta.dump(2) << '\n';
  else std::printf("occupied %zu of %d cells; wrote %s.{mmsupp,pgm,csv,json}\n", h.occupied(), grid * grid, base.string().c_str());
  return kOk;
}

int certify_half(const RunConfig& c) {
  auto comp = period3_composition();
  bool identity = comp.lin.a == 1 && comp.lin.b == 0 && comp.lin.c == 0 && comp.lin.d == 1 && comp.shift.x == 0 &&
                  comp.shift.y == 0;
  std::vector<Check> checks{{"third_power_identity", identity, "G^3 on x + y >= 1 composed symbolically"}};
  std::mt19937_64 rng(c.seed);
  std::uniform_int_distribution<std::uint64_t> u(1, 1ULL << 30);
  std::uint64_t samples = c.n.value_or(10000), bad = 0;
  int longest = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    Point2 p{std::ldexp(double(u(rng)), -30), std::ldexp(double(u(rng)), -30)};
    auto r = verify_period3_half(p);
    longest = std::max(longest, r.entry_time);
    if (r.outcome != HalfOutcome::fixed && r.deviation != 0.0) ++bad;
  }
  checks.push_back({"dyadic_period3", bad == 0,
                    std::to_string(samples - bad) + "/" + std::to_string(samples) + " exact, longest transient " +
                        std::to_string(longest)});
  json j = {{"alpha", 0.5}, {"case", "period3"}, {"checks", checks_json(checks)}, {"samples", samples}, {"failures", bad}};
  if (c.json) std::cout << j.dump(2) << '\n';
  else {
    std::printf("alpha 0.5: period-3 regime\n");
    print_checks(checks);
  }
  return bad == 0 && identity ? kOk : kFailed;
}

int certify_three_quarters(const RunConfig& c) {
  auto [lhs, rhs] = period2_restriction();
  double dev = std::max({std::abs(lhs.lin.a - rhs.lin.a), std::abs(lhs.lin.b - rhs.lin.b), std::abs(lhs.lin.c - rhs.lin.c),
                         std::abs(lhs.lin.d - rhs.lin.d), std::abs(lhs.shift.x - rhs.shift.x),
                         std::abs(lhs.shift.y - rhs.shift.y)});
  std::vector<Check> checks{{"swap_on_line", dev <= 1e-12, "affine restriction deviation " + fmt_num(dev)}};
  auto br = b_regions();
  auto g2 = AffineBranch::of(RegionLabel::A2, 0.75);
  checks.push_back({"b2_into_b3", is_subset(affine_image(g2.map, br.b2), br.b3), "G(B2) inside B3"});
  checks.push_back({"b1_invariant", is_subset(affine_image(g2.map, br.b1), br.b1), "G(B1) inside B1"});
  double ex = eq72_excess();
  checks.push_back({"second_image_bound", ex <= 1e-12, "max of y + 3x/7 - 16/21 over G^2(B2) cap A1 vertices " + fmt_num(ex)});
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> u(1.0 / 3.0, 1.0);
  std::uint64_t samples = c.n.value_or(10000), bad = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    double x = u(rng);
    auto r = verify_period2_line({x, kPeriodicLineSum - x});
    if (r.deviation > 1e-12) ++bad;
  }
  checks.push_back({"period2_on_line", bad == 0, std::to_string(samples - bad) + "/" + std::to_string(samples) + " return within 1e-12"});
  bool ok = std::all_of(checks.begin(), checks.end(), [](const Check& k) { return k.pass; });
  json j = {{"alpha", 0.75}, {"case", "period2_line"}, {"checks", checks_json(checks)}, {"samples", samples}, {"failures", bad}};
  if (c.json) std::cout << j.dump(2) << '\n';
  else {
    std::printf("alpha 0.75: period-2 line x + y = 4/3\n");
    print_checks(checks);
  }
  return ok ? kOk : kFailed;
}

int cmd_certify(const RunConfig& c) {
  Alpha alpha = require_alpha(c);
  double a = alpha.value();
  if (a == 0.5) return certify_half(c);
  if (a == 0.75) return certify_three_quarters(c);
  if (a > 0.0 && a < 0.5) {
    CertificateOptions opt;
    if (c.tol) opt.margin = *c.tol;
    auto cert = acim_certificate(alpha, opt);
    if (c.json) std::cout << to_json(cert).dump(2) << '\n';
    else {
      std::printf("alpha %.10g: %s (route %s, %zu segments, min sigma2 %.10g)\n", a, to_string(cert.verdict),
                  cert.route.c_str(), cert.segments.size(), cert.min_sigma2);
      if (!cert.failure.empty()) std::printf("  uncovered: %s\n", cert.failure.c_str());
    }
    if (cert.verdict == CertificateVerdict::proven) return kOk;
    return cert.verdict == CertificateVerdict::indeterminate ? kIndeterminate : kFailed;
  }
  if (a > 0.5 && a < 0.75) {
    try {
      trap_case(alpha, c.tol.value_or(1e-9));
    } catch (const IndeterminateError& e) {
      json j = {{"alpha", a}, {"case", "indeterminate"}, {"checks", json::array()}, {"samples", 0}, {"failures", 0},
                {"detail", e.what()}};
      if (c.json) std::cout << j.dump(2) << '\n';
      else std::printf("alpha %.10g: indeterminate (%s)\n", a, e.what());
      return kIndeterminate;
    }
    auto rep = verify_global_attractor(alpha, c.n.value_or(1000), c.seed);
    if (c.json) std::cout << to_json(rep).dump(2) << '\n';
    else {
      std::printf("alpha %.10g: %s, attractor %s\n", a, rep.case_name.c_str(), rep.certified() ? "certified" : "NOT certified");
      print_checks(rep.checks);
    }
    return rep.certified() ? kOk : kFailed;
  }
  throw DomainError("certify covers 0 < alpha <= 3/4");
}

int cmd_thresholds(const RunConfig& c) {
  auto rows = threshold_table();
  bool ok = true;
  for (auto& r : rows) ok = ok && r.status != RowStatus::mismatch;
  if (c.json) {
    json a = json::array();
    for (auto& r : rows) a.push_back(to_json(r));
    std::cout << a.dump(2) << '\n';
  } else {
    std::printf("%-42s %-14s %-14s %-12s %s\n", "name", "computed", "reference", "delta", "status");
    auto cell = [](const std::optional<double>& v, const char* f) {
      char b[32];
      if (!v) return std::string("-");
      std::snprintf(b, sizeof b, f, *v);
      return std::string(b);
    };
    for (auto& r : rows) {
      std::printf("%-42s %-14s %-14s %-12s %s", r.name.c_str(), cell(r.computed, "%.10f").c_str(),
                  cell(r.reference, "%.10f").c_str(), cell(r.delta, "%.2e").c_str(), to_string(r.status));
      if (!r.note.empty()) std::printf("  (%s)", r.note.c_str());
      std::printf("\n");
    }
  }
  return ok ? kOk : kFailed;
}

int cmd_clusters(const RunConfig& c) {
  Alpha alpha = require_alpha(c);
  int grid = c.grid.value_or(kClusterGrid);
  if (grid < 2) throw CLI::ValidationError("--grid", "must be at least 2");
  Point2 p0 = c.x0 ? start_point(c) : Point2{0.3, 0.7};
  std::fprintf(stderr, "cluster counts only; within-cluster fill is not asserted\n");
  auto rep = detect_clusters(alpha, c.n.value_or(kClusterIterations), c.skip.value_or(kClusterSkip), grid, p0);
  if (!c.out.empty()) {
    auto os = open_out(c.out);
    os << "cluster,cx,cy,successor\n";
    char buf[96];
    for (int i = 0; i < rep.count; ++i) {
      std::snprintf(buf, sizeof buf, "%d,%.9f,%.9f,%d\n", i, rep.centroids[i].x, rep.centroids[i].y, rep.successor[i]);
      os << buf;
    }
  }
  if (c.json) std::cout << to_json(rep).dump(2) << '\n';
  else
    std::printf("alpha %.10g: %d clusters, rotation %d clockwise%s%s\n", alpha.value(), rep.count, rep.rotation,
                rep.consistent ? "" : " (inconsistent shifts)", rep.three_r_relation ? ", 3r = -1 mod c" : "");
  return rep.consistent ? kOk : kIndeterminate;
}

int cmd_growth(const RunConfig& c) {
  Alpha alpha = require_alpha(c);
  Point2 p0 = start_point(c);
  auto g = sigma2_growth_experiment(alpha, p0, c.n.value_or(100000));
  if (c.json) {
    json a = json::array();
    for (auto& s : g) a.push_back({{"n", s.n}, {"log10_bound", s.log10_bound}});
    std::cout << json{{"alpha", alpha.value()}, {"start", point_json(p0)}, {"samples", a}}.dump(2) << '\n';
  } else {
    std::printf("n,log10_bound\n");
    for (auto& s : g) std::printf("%llu,%.6f\n", (unsigned long long)s.n, s.log10_bound);
  }
  return kOk;
}

int cmd_polygons(const RunConfig& c) {
  Alpha alpha = require_alpha(c);
  double a = alpha.value();
  std::ostringstream os;
  write_polygon_csv_header(os);
  auto regions = region_polygons(alpha);
  write_polygon_csv(os, "A1", regions.a1);
  write_polygon_csv(os, "A2", regions.a2);
  if (a > 0.0 && a < 0.5) {
    auto ctx = run_context(alpha);
    write_polygon_csv(os, "B", ctx.b);
    for (std::size_t i = 0; i < ctx.entry.size(); ++i) write_polygon_csv(os, "E" + std::to_string(i), ctx.entry[i]);
  } else if (a > 0.5 && a < 0.75) {
    write_polygon_csv(os, "W", exit_set(alpha));
    write_polygon_csv(os, "T", build_trapping_region(alpha).polygon);
  } else if (a == 0.75) {
    auto br = b_regions();
    write_polygon_csv(os, "B1", br.b1);
    write_polygon_csv(os, "B2", br.b2);
    write_polygon_csv(os, "B3", br.b3);
  }
  if (c.out.empty() || c.out == "-") std::cout << os.str();
  else open_out(c.out) << os.str();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"memmap: memory-map simulator and verifier"};
  app.footer("Environment: MEMMAP_OUT_DIR sets the default output directory (default \".\").\n"
             "Exit codes: 0 ok, 1 check failed or not proven, 2 usage error, 3 indeterminate.");
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* s) {
    s->add_option("--alpha", cfg.alpha, "memory parameter in [0, 1)");
    s->add_option("--x0", cfg.x0, "start x (with --y0); random from --seed otherwise");
    s->add_option("--y0", cfg.y0, "start y");
    s->add_option("--n", cfg.n, "iterations or samples");
    s->add_option("--skip", cfg.skip, "iterations discarded before recording");
    s->add_option("--grid", cfg.grid, "histogram grid resolution");
    s->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    s->add_option("--tol", cfg.tol, "certificate margin or case-boundary tolerance");
    s->add_option("--out", cfg.out, "output path or prefix");
    s->add_flag("--json", cfg.json, "machine-readable output");
  };

  std::function<int(const RunConfig&)> handler;
  auto sub = [&](const char* name, const char* desc, int (*fn)(const RunConfig&)) {
    auto s = app.add_subcommand(name, desc);
    common(s);
    s->callback([&handler, fn] { handler = fn; });
  };
  sub("simulate", "iterate G and write the orbit as CSV (n,x,y,region)", cmd_simulate);
  sub("support", "histogram an orbit; writes .mmsupp, .pgm, .csv and .json", cmd_support);
  sub("certify", "acim certificate, attractor certificate or periodic suite depending on alpha", cmd_certify);
  sub("thresholds", "table of computed thresholds against reference decimals", cmd_thresholds);
  sub("clusters", "cluster count and rotation of the support", cmd_clusters);
  sub("growth", "log10 of the sigma2 lower bound along an orbit", cmd_growth);
  sub("polygons", "dump named regions as label,vertex_index,x,y", cmd_polygons);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    return handler(cfg);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kUsage;
  } catch (const IndeterminateError& e) {
    std::fprintf(stderr, "indeterminate: %s\n", e.what());
    return kIndeterminate;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailed;
  }
}
