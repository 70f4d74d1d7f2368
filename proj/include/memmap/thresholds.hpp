#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "linalg2.hpp"
#include "regimes.hpp"
#include "sequences.hpp"
#include "symbol_block.hpp"

namespace memmap {

inline constexpr double kThresholdMatchTol = 1e-6;

enum class RowStatus { match, all_alpha, discrepancy, mismatch };

inline const char* to_string(RowStatus s) {
  switch (s) {
    case RowStatus::match: return "match";
    case RowStatus::all_alpha: return "all-alpha";
    case RowStatus::discrepancy: return "DISCREPANCY";
    default: return "MISMATCH";
  }
}

struct ThresholdRow {
  std::string name;
  std::string source;  // what was solved
  std::optional<double> computed;
  std::optional<double> reference;
  std::optional<double> delta;
  RowStatus status = RowStatus::match;
  std::string note;
};

namespace detail {

inline ThresholdRow compare_row(std::string name, std::string source, std::optional<double> computed,
                                std::optional<double> reference) {
  ThresholdRow r{std::move(name), std::move(source), computed, reference, std::nullopt, RowStatus::match, ""};
  if (!computed && !reference) {
    r.status = RowStatus::all_alpha;
    r.note = "sigma2 > 1 on all of (0, 1/2)";
  } else if (computed && reference) {
    r.delta = *computed - *reference;
    r.status = std::abs(*r.delta) <= kThresholdMatchTol ? RowStatus::match : RowStatus::mismatch;
  } else {
    r.status = RowStatus::mismatch;
  }
  return r;
}

inline std::optional<double> printed_root(const std::vector<double>& desc, double lo, double hi) {
  try {
    return find_root(Polynomial::from_descending(desc), lo, hi, 1e-14);
  } catch (const RootError&) {
    return std::nullopt;
  }
}

}  // namespace detail

struct SigmaThresholdEntry {
  const char* name;
  const char* block;
  std::optional<double> reference;
};

inline const std::vector<SigmaThresholdEntry>& sigma_threshold_entries() {
  static const std::vector<SigmaThresholdEntry> rows = {
      {"pair_d2d1", "D2D1", 0.24760367},
      {"run1", "D1D2", 0.3709557543},
      {"run3", "D1D2^3", 0.3938896523},
      {"a1x2_run1", "D1D1D2", 0.3149466135},
      {"a1x2_run2", "D1D1D2^2", 0.3758203590},
      {"a1x2_run3", "D1D1D2^3", 0.3506831157},
      {"a1x3_run1", "D1D1D1D2", 0.3058009335},
      {"a1x3_run2", "D1D1D1D2^2", 0.3355882883},
      {"a1x3_run3", "D1D1D1D2^3", 0.3312697596},
      {"run4", "D1D2^4", 0.4444154417},
      {"run6", "D1D2^6", 0.4345268819},
      {"run7", "D1D2^7", 0.4645618403},
      {"run2_run3", "D1D2^2D1D2^3", 0.4160029431},
      {"run2_run2_run3", "D1D2^2D1D2^2D1D2^3", 0.4315221884},
      {"run2_run3_run2_run3", "D1D2^2D1D2^3D1D2^2D1D2^3", 0.4584009011},
      {"run2_run2_run2", "D1D2^2D1D2^2D1D2^2", std::nullopt},
      {"run5_run2_run3", "D1D2^5D1D2^2D1D2^3", 0.4456891654},
      {"run6_run2_run3", "D1D2^6D1D2^2D1D2^3", 0.4624281766},
      {"run5_run6", "D1D2^5D1D2^6", 0.4487890698},
      {"run2_run6", "D1D2^2D1D2^6", 0.4451846371},
      {"run2_run2_run6", "D1D2^2D1D2^2D1D2^6", 0.4527916100},
      {"run4_run2_run6", "D1D2^4D1D2^2D1D2^6", std::nullopt},
      {"run5_run2_run6", "D1D2^5D1D2^2D1D2^6", 0.4600595036},
      {"run6_run2_run6", "D1D2^6D1D2^2D1D2^6", 0.4718920017},
  };
  return rows;
}

inline double event_reference(AdmissibilityEvent e) {
  switch (e) {
    case AdmissibilityEvent::lone_a2_visit_excluded: return 0.3090169943;
    case AdmissibilityEvent::single_a1_runs: return 1.0 / 3.0;
    case AdmissibilityEvent::run4_excluded: return 0.3510763028;
    case AdmissibilityEvent::run3_followed_by_run2: return 0.3931078326;
    case AdmissibilityEvent::run3_excluded: return 0.4284630893;
    case AdmissibilityEvent::run6_followed_by_run2_only: return 0.4397492527;
    case AdmissibilityEvent::run6_after_run5_run2: return 0.4496432201;
    default: return 0.4546258153;
  }
}

inline std::vector<ThresholdRow> threshold_table() {
  std::vector<ThresholdRow> rows;
  rows.push_back(detail::compare_row("alpha1", "root of 16a^4+16a^3-52a^2+48a-9", alpha1(), 0.24760367));
  rows.push_back(detail::compare_row("alpha2", "root of 8a^4-8a^3+8a^2-1/2", alpha2(), 0.2797707433));

  PairKind kinds[] = {PairKind::follows_d1, PairKind::follows_d2};
  for (PairKind k : kinds) {
    auto f = [k](double a) { return closed_form_sigma(k, a).s2 - 1.0; };
    rows.push_back(detail::compare_row(k == PairKind::follows_d1 ? "closed_form_follows_d1" : "closed_form_follows_d2",
                                       "closed-form sigma2 of pairs = 1", find_root(f, 0.2, 0.45, 1e-13),
                                       k == PairKind::follows_d1 ? 0.24760367 : 0.3709557543));
  }

  for (auto& e : sigma_threshold_entries()) {
    SymbolBlock b = SymbolBlock::parse(e.block);
    rows.push_back(detail::compare_row(e.name, "sigma2(" + b.str() + ") = 1", sigma2_threshold(b, 1e-3, 1e-13),
                                       e.reference));
  }

  for (auto& spec : admissibility_events()) {
    ThresholdRow r = detail::compare_row(spec.name,
                                         "S(G^" + std::to_string(spec.steps) + "(witness)) = 1/2, " + spec.description,
                                         admissibility_threshold(spec.event), event_reference(spec.event));
    rows.push_back(r);
  }

  {
    double root = admissibility_threshold(AdmissibilityEvent::run4_excluded);
    Polynomial printed = Polynomial::from_descending({1, 8, -8, -40, -48, -96, 320});
    ThresholdRow r{"run4_excluded_printed_polynomial", "a^6+8a^5-8a^4-40a^3-48a^2-96a+320", root, 0.3510763028,
                   root - 0.3510763028, RowStatus::discrepancy,
                   "printed polynomial does not vanish at the root (value " + fmt_num(printed(root)) +
                       "); derived root from S(G^5(0, 2a)) = 1/2 reported"};
    rows.push_back(r);
  }
  rows.push_back(detail::compare_row("run3_followed_by_run2_printed_polynomial",
                                     "root of 192a^7+192a^6-336a^5-144a^4+256a^3-128a^2+53a-11",
                                     detail::printed_root({192, 192, -336, -144, 256, -128, 53, -11}, 0.38, 0.40),
                                     0.3931078326));
  rows.push_back(detail::compare_row("run3_excluded_printed_polynomial", "root of 24a^4+12a^3-36a^2+9a+1",
                                     detail::printed_root({24, 12, -36, 9, 1}, 0.4, 0.45), 0.4284630893));

  const auto& cb = case_boundaries();
  rows.push_back(detail::compare_row("octagon_end", "(sqrt(33)-1)/8", cb.octagon_end, 0.5930703309));
  rows.push_back(detail::compare_row("pentagon_i_end", "root of 16a^5-16a^3+10a^2-9a+4", cb.pentagon_i_end, 0.5970091680));
  rows.push_back(detail::compare_row("pentagon_ii_end", "(sqrt(13)-1)/4", cb.pentagon_ii_end, 0.6513878188));
  rows.push_back(detail::compare_row("pentagon_iii_end", "sqrt(33)/12+1/4", cb.pentagon_iii_end, 0.7287135539));
  rows.push_back(detail::compare_row("heptagon_end", "root of 4a^4-8a^3+14a^2-13a+4", cb.heptagon_end, 0.7360241475));
  return rows;
}

}  // namespace memmap
