#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "dqbench/core.hpp"

namespace dqbench::accuracy {

enum class QuartileMethod {
  linear_interpolation,  // order statistics at (n-1)*0.25 and (n-1)*0.75
  tukey_hinges           // medians of the lower/upper halves
};

struct OutlierSummary {
  std::string attribute;
  std::size_t non_missing = 0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double lower_fence = 0.0;
  double upper_fence = 0.0;
  std::vector<std::size_t> outlier_indices;  // record indices, ascending
  double outlier_fraction = 0.0;             // |indices| / non_missing

  double outlier_percent() const { return 100.0 * outlier_fraction; }
};

namespace detail {

inline double interpolated_quantile(const std::vector<double>& sorted, double p) {
  double pos = p * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double median_of(const std::vector<double>& sorted, std::size_t from,
                        std::size_t to_excl) {
  std::size_t n = to_excl - from;
  std::size_t mid = from + n / 2;
  if (n % 2 == 1) return sorted[mid];
  return (sorted[mid - 1] + sorted[mid]) / 2.0;
}

}  // namespace detail

// Boxplot-fence outlier scan for one numeric attribute. Fences sit 1.5 IQR
// beyond the quartiles; values strictly outside are outliers (on-the-fence
// values are inliers). Fewer than 4 non-missing values give no meaningful
// quartiles: the attribute is skipped with a warning.
inline std::optional<OutlierSummary> detect_outliers(
    const Dataset& ds, const std::string& attribute,
    QuartileMethod method = QuartileMethod::linear_interpolation,
    std::vector<std::string>* warnings = nullptr) {
  std::size_t idx = ds.require_attribute(attribute);
  const AttributeSpec& spec = ds.attributes[idx];
  if (spec.kind != AttributeKind::numeric)
    throw UsageError("attribute '" + attribute +
                     "' is not numeric; outlier fences need numbers");

  std::vector<double> values;
  for (const auto& record : ds.records)
    if (is_number(record[idx])) values.push_back(as_number(record[idx]));

  if (values.size() < 4) {
    if (warnings)
      warnings->push_back("attribute '" + attribute + "' has only " +
                          std::to_string(values.size()) +
                          " non-missing value(s); outlier scan skipped");
    return std::nullopt;
  }

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());

  OutlierSummary s;
  s.attribute = attribute;
  s.non_missing = values.size();
  if (method == QuartileMethod::linear_interpolation) {
    s.q1 = detail::interpolated_quantile(sorted, 0.25);
    s.q3 = detail::interpolated_quantile(sorted, 0.75);
  } else {
    std::size_t n = sorted.size();
    std::size_t half = n / 2;
    // Odd counts include the median in both halves (hinge convention).
    s.q1 = detail::median_of(sorted, 0, n % 2 == 1 ? half + 1 : half);
    s.q3 = detail::median_of(sorted, half, n);
  }
  s.iqr = s.q3 - s.q1;
  s.lower_fence = s.q1 - 1.5 * s.iqr;
  s.upper_fence = s.q3 + 1.5 * s.iqr;

  for (std::size_t r = 0; r < ds.records.size(); ++r) {
    const Cell& cell = ds.records[r][idx];
    if (!is_number(cell)) continue;
    double v = as_number(cell);
    if (v < s.lower_fence || v > s.upper_fence) s.outlier_indices.push_back(r);
  }
  s.outlier_fraction = static_cast<double>(s.outlier_indices.size()) /
                       static_cast<double>(s.non_missing);
  return s;
}

// Scans every attribute in the default set: numeric kind with role feature
// or target. Identifier, derived, and excluded roles stay out, mirroring
// how transformed and bookkeeping columns are left off boxplots.
inline std::vector<OutlierSummary> detect_outliers_default(
    const Dataset& ds, QuartileMethod method = QuartileMethod::linear_interpolation,
    std::vector<std::string>* warnings = nullptr) {
  std::vector<OutlierSummary> out;
  for (const auto& spec : ds.attributes) {
    if (spec.kind != AttributeKind::numeric) continue;
    if (spec.role != AttributeRole::feature && spec.role != AttributeRole::target)
      continue;
    if (auto s = detect_outliers(ds, spec.name, method, warnings))
      out.push_back(std::move(*s));
  }
  return out;
}

}  // namespace dqbench::accuracy
