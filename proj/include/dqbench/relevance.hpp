#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dqbench/core.hpp"
#include "dqbench/manifest.hpp"

namespace dqbench::relevance {

struct AmountParams {
  std::size_t small_threshold = 30;    // below this the sample itself is small
  std::size_t per_class_minimum = 10;  // comfortable members per target class
};

struct AmountAssessment {
  std::size_t records = 0;
  bool small_flag = false;
  bool split_warning = false;  // stratified classes would get thin
  std::string note;
};

inline AmountAssessment assess_amount(const Dataset& ds,
                                      std::size_t class_count = 4,
                                      const AmountParams& params = {}) {
  if (class_count == 0) throw ConfigError("class count must be positive");
  AmountAssessment out;
  out.records = ds.records.size();
  out.small_flag = out.records < params.small_threshold;
  out.split_warning = out.records / class_count < params.per_class_minimum;
  out.note = std::to_string(out.records) + " record(s)";
  if (out.small_flag)
    out.note += "; fewer than " + std::to_string(params.small_threshold);
  if (out.split_warning)
    out.note += "; splitting into " + std::to_string(class_count) +
                " target classes leaves fewer than " +
                std::to_string(params.per_class_minimum) + " members each";
  return out;
}

enum class HeterogeneityStatus { single_source, multi_source, no_evidence };

inline std::string to_string(HeterogeneityStatus s) {
  switch (s) {
    case HeterogeneityStatus::single_source: return "single_source";
    case HeterogeneityStatus::multi_source: return "multi_source";
    default: return "no_evidence";
  }
}

struct HeterogeneityAssessment {
  HeterogeneityStatus status = HeterogeneityStatus::no_evidence;
  std::size_t organization_count = 0;  // zero when unknown
  std::string detail;
};

// Decided purely from the manifest: the data values themselves cannot tell
// one contributing organization from many.
inline HeterogeneityAssessment assess_heterogeneity(
    const manifest::TemplateManifest& m) {
  HeterogeneityAssessment out;
  if (!m.heterogeneity) {
    out.detail = "no heterogeneity declaration";
    return out;
  }
  const auto& h = *m.heterogeneity;
  std::size_t listed =
      std::max(h.organizations.size(), h.per_org_record_counts.size());
  if (h.organization_count && listed > 0 && *h.organization_count != listed)
    throw ValidationError(
        "manifest error: heterogeneity declares " +
        std::to_string(*h.organization_count) + " organization(s) but lists " +
        std::to_string(listed));
  std::size_t count = h.organization_count.value_or(listed);
  if (count == 0) {
    out.detail = h.notes.empty() ? "heterogeneity declaration is empty" : h.notes;
    return out;
  }
  out.organization_count = count;
  out.status = count == 1 ? HeterogeneityStatus::single_source
                          : HeterogeneityStatus::multi_source;
  out.detail = std::to_string(count) + " contributing organization(s)";
  if (!h.organizations.empty()) {
    std::string joined;
    for (const auto& org : h.organizations)
      joined += (joined.empty() ? "" : ", ") + org;
    out.detail += ": " + joined;
  }
  return out;
}

struct TimelinessAssessment {
  bool has_dates = false;  // true when per-project dates settled the era
  int criterion = 0;       // 1 dates, 2 declared period, 3 publication year
  std::string era;         // "1981", "1974-1979", "2000s", "2011[P]"
  std::string detail;
};

namespace detail {

// Numeric year columns come in two-digit (93) and four-digit (1993) form.
inline std::optional<int> year_of(const Cell& cell) {
  if (is_date(cell)) return as_date(cell).year;
  if (!is_number(cell)) return std::nullopt;
  double v = as_number(cell);
  if (v != std::floor(v)) return std::nullopt;
  int y = static_cast<int>(v);
  if (y >= 0 && y < 100) return 1900 + y;
  if (y >= 1000 && y < 3000) return y;
  return std::nullopt;
}

inline void collect_years(const Dataset& ds, const std::string& attribute,
                          std::vector<int>& into) {
  if (attribute.empty()) return;
  std::size_t idx = ds.require_attribute(attribute);
  for (const auto& record : ds.records)
    if (auto y = year_of(record[idx])) into.push_back(*y);
}

}  // namespace detail

// Settles the collection era by the strongest available evidence, in order:
//   1. per-project dates (dataset columns or explicit year lists),
//   2. a declared collection period, echoed verbatim,
//   3. the first publication year, marked "[P]".
// A single-year span collapses to that year.
inline TimelinessAssessment assess_timeliness(const manifest::TemplateManifest& m,
                                              const Dataset* ds = nullptr) {
  TimelinessAssessment out;
  if (m.timeliness && m.timeliness->dates && m.timeliness->dates->any()) {
    const auto& dates = *m.timeliness->dates;
    std::vector<int> starts = dates.start_years;
    std::vector<int> ends = dates.completion_years;
    if (ds) {
      detail::collect_years(*ds, dates.start_attribute, starts);
      detail::collect_years(*ds, dates.completion_attribute, ends);
    } else if (!dates.start_attribute.empty() ||
               !dates.completion_attribute.empty()) {
      throw ConfigError(
          "timeliness dates name dataset attributes but no dataset was given");
    }
    std::vector<int> all = starts;
    all.insert(all.end(), ends.begin(), ends.end());
    if (all.empty())
      throw ValidationError("timeliness date declaration yields no years");
    int lo = !starts.empty() ? *std::min_element(starts.begin(), starts.end())
                             : *std::min_element(all.begin(), all.end());
    int hi = !ends.empty() ? *std::max_element(ends.begin(), ends.end())
                           : *std::max_element(all.begin(), all.end());
    if (hi < lo) hi = lo;
    out.has_dates = true;
    out.criterion = 1;
    out.era = lo == hi ? std::to_string(lo)
                       : std::to_string(lo) + "-" + std::to_string(hi);
    out.detail = "per-project dates span " + out.era;
    return out;
  }
  if (m.timeliness && !m.timeliness->period.empty()) {
    out.criterion = 2;
    out.era = m.timeliness->period;
    out.detail = "declared collection period";
    return out;
  }
  if (m.timeliness && m.timeliness->first_publication_year) {
    out.criterion = 3;
    out.era = std::to_string(*m.timeliness->first_publication_year) + "[P]";
    out.detail = "approximated by the first publication year";
    return out;
  }
  throw ValidationError(
      "timeliness indeterminate: no dates, period, or publication year declared");
}

}  // namespace dqbench::relevance
