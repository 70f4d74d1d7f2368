#pragma once

#include <string>

#include "json.hpp"
#include "measure.hpp"
#include "regimes.hpp"
#include "sequences.hpp"
#include "thresholds.hpp"

namespace memmap {

using nlohmann::json;

inline json point_json(Point2 p) { return json::array({p.x, p.y}); }

inline json polygon_json(const ConvexPolygon& poly) {
  json a = json::array();
  for (auto p : poly.vertices()) a.push_back(point_json(p));
  return a;
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

inline json to_json(const ExistenceCertificate& c) {
  json blocks = json::array();
  for (auto& s : c.segments)
    blocks.push_back({{"word", s.block.str()}, {"sigma2", s.sigma2}, {"admissible", s.admissible}, {"restart", s.restart}});
  return {{"alpha", c.alpha},
          {"verdict", to_string(c.verdict)},
          {"route", c.route},
          {"blocks", blocks},
          {"thresholds_used", {{"pair_threshold", c.pair_threshold}, {"margin", c.options.margin},
                               {"restart_run", c.options.restart_run}, {"max_depth", c.options.max_depth}}},
          {"rules", c.rules},
          {"min_sigma2", c.min_sigma2},
          {"nodes", c.nodes},
          {"dropped_area", c.dropped_area},
          {"failure", c.failure}};
}

inline json checks_json(const std::vector<Check>& checks) {
  json a = json::array();
  for (auto& c : checks) a.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return a;
}

inline json to_json(const AttractorReport& r) {
  return {{"alpha", r.alpha},     {"case", r.case_name},       {"checks", checks_json(r.checks)},
          {"samples", r.samples}, {"failures", r.failures},    {"absorption_k", r.absorption_k},
          {"nominal_k", r.nominal_k}, {"certified", r.certified()}};
}

inline json to_json(const RegionReport& r) {
  return {{"alpha", r.alpha}, {"case", "invariant_regions"}, {"checks", checks_json(r.checks)},
          {"samples", 0}, {"failures", std::count_if(r.checks.begin(), r.checks.end(), [](const Check& c) { return !c.pass; })}};
}

inline json to_json(const TrappingRegion& t) {
  json v = json::array();
  for (auto& nv : t.vertices) v.push_back({{"name", nv.name}, {"point", point_json(nv.p)}, {"provenance", nv.provenance}});
  return {{"alpha", t.alpha}, {"case", to_string(t.kind)}, {"vertices", v}, {"polygon", polygon_json(t.polygon)},
          {"parameter", t.parameter}};
}

inline json to_json(const ThresholdRow& r) {
  return {{"name", r.name},
          {"source", r.source},
          {"computed", optional_json(r.computed)},
          {"reference", optional_json(r.reference)},
          {"delta", optional_json(r.delta)},
          {"status", to_string(r.status)},
          {"note", r.note}};
}

inline json histogram_metadata(const Histogram2D& h) {
  return {{"alpha", h.alpha}, {"grid", h.grid},           {"start", point_json(h.start)}, {"iterations", h.iterations},
          {"skip", h.skip},   {"seed", h.seed},           {"total", h.total},             {"occupied", h.occupied()},
          {"layout", "row = floor(y * grid), col = floor(x * grid)"}};
}

inline json to_json(const ClusterReport& r) {
  json c = json::array();
  for (auto p : r.centroids) c.push_back(point_json(p));
  return {{"alpha", r.alpha},
          {"clusters", r.count},
          {"rotation", r.rotation},
          {"orientation", "clockwise"},
          {"consistent", r.consistent},
          {"single_cycle", r.single_cycle},
          {"three_r_plus_one_divisible", r.three_r_relation},
          {"agreement", r.agreement},
          {"centroids", c},
          {"successor", r.successor}};
}

inline json to_json(const Period3Result& r) {
  json cyc = json::array();
  for (auto p : r.cycle) cyc.push_back(point_json(p));
  return {{"outcome", to_string(r.outcome)}, {"entry_time", r.entry_time}, {"cycle", cyc}, {"deviation", r.deviation}};
}

inline json to_json(const Period2Result& r) {
  return {{"outcome", to_string(r.outcome)}, {"image", point_json(r.image)}, {"image2", point_json(r.image2)},
          {"deviation", r.deviation}};
}

inline json to_json(const FixedPointSpectrum& f) {
  auto cj = [](std::complex<double> z) { return json::array({z.real(), z.imag()}); };
  return {{"alpha", f.alpha},
          {"eigenvalues", {cj(f.e1), cj(f.e2)}},
          {"eigenvectors", {{cj(f.v1[0]), cj(f.v1[1])}, {cj(f.v2[0]), cj(f.v2[1])}}},
          {"complex_pair", f.complex_pair},
          {"spectral_radius", f.spectral_radius}};
}

}  // namespace memmap
