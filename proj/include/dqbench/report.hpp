#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dqbench/accuracy.hpp"
#include "dqbench/core.hpp"
#include "dqbench/csv.hpp"
#include "dqbench/manifest.hpp"
#include "dqbench/noise.hpp"
#include "dqbench/outliers.hpp"
#include "dqbench/provenance.hpp"
#include "dqbench/relevance.hpp"

namespace dqbench::report {

using json = nlohmann::ordered_json;

struct AssessParams {
  std::string target;  // empty: use the attribute with role `target`
  classifier::NoiseParams noise;
  std::optional<accuracy::QuartileMethod> quartile_method;  // unset: manifest/default
  relevance::AmountParams amount;
  provenance::TrustParams trust;
  bool run_fisma = true;
  provenance::Rubric rubric = provenance::default_rubric();
};

// Each quality dimension either carries its assessment or the reason it
// could not be produced; the report always shows every dimension.
template <typename T>
struct Assessed {
  std::optional<T> value;
  std::string error;

  bool ok() const { return value.has_value(); }
  const T& operator*() const { return *value; }
  const T* operator->() const { return &*value; }
};

struct QualityReport {
  std::string dataset_name;
  std::string source_digest;
  std::size_t records = 0;
  std::size_t attributes = 0;
  std::string manifest_name;
  std::string manifest_version;

  // parameter echo
  std::string target;
  classifier::NoiseParams noise_params;
  accuracy::QuartileMethod quartile_method =
      accuracy::QuartileMethod::linear_interpolation;

  Assessed<classifier::NoiseResult> noise;
  Assessed<std::vector<accuracy::OutlierSummary>> outliers;
  Assessed<accuracy::ConsistencyReport> consistency;
  Assessed<accuracy::IncompletenessSummary> incompleteness;
  Assessed<std::vector<accuracy::DuplicateGroup>> duplicates;
  Assessed<relevance::AmountAssessment> amount;
  Assessed<relevance::HeterogeneityAssessment> heterogeneity;
  Assessed<relevance::TimelinessAssessment> timeliness;
  Assessed<provenance::SensitivityAssessment> sensitivity;
  Assessed<provenance::AccessibilityAssessment> accessibility;
  Assessed<provenance::TrustAssessment> trustworthiness;
  Assessed<provenance::FismaScore> fisma;

  std::vector<std::string> warnings;

  const accuracy::OutlierSummary* target_outliers() const {
    if (!outliers.ok()) return nullptr;
    for (const auto& s : *outliers)
      if (s.attribute == target) return &s;
    return nullptr;
  }
};

namespace detail {

template <typename T, typename Fn>
void run_assessor(Assessed<T>& slot, Fn&& fn) {
  try {
    slot.value = fn();
  } catch (const Error& e) {
    slot.error = e.what();
  }
}

}  // namespace detail

inline QualityReport assess(const Dataset& raw, const manifest::TemplateManifest& m,
                            const AssessParams& params = {}) {
  QualityReport rep;
  Dataset ds = manifest::apply_declarations(raw, m, &rep.warnings);

  rep.dataset_name = ds.name;
  rep.source_digest = ds.source_digest;
  rep.records = ds.records.size();
  rep.attributes = ds.attributes.size();
  rep.manifest_name = m.name;
  rep.manifest_version = m.version;
  rep.noise_params = params.noise;

  rep.target = params.target;
  if (rep.target.empty())
    for (const auto& spec : ds.attributes)
      if (spec.role == AttributeRole::target) rep.target = spec.name;

  if (params.quartile_method) {
    rep.quartile_method = *params.quartile_method;
  } else if (m.outliers && m.outliers->method == "tukey_hinges") {
    rep.quartile_method = accuracy::QuartileMethod::tukey_hinges;
  }

  detail::run_assessor(rep.noise, [&] {
    if (rep.target.empty())
      throw ConfigError("no target attribute: pass one or declare a role");
    Dataset cleaned = manifest::apply_pre_steps(ds, m, rep.target, &rep.warnings);
    return classifier::misclassification_rate(cleaned, rep.target, params.noise);
  });

  detail::run_assessor(rep.outliers, [&] {
    auto summaries =
        accuracy::detect_outliers_default(ds, rep.quartile_method, &rep.warnings);
    if (m.outliers && !m.outliers->excluded_attributes.empty()) {
      const auto& excluded = m.outliers->excluded_attributes;
      std::erase_if(summaries, [&](const accuracy::OutlierSummary& s) {
        return std::find(excluded.begin(), excluded.end(), s.attribute) !=
               excluded.end();
      });
    }
    return summaries;
  });

  detail::run_assessor(rep.consistency,
                       [&] { return accuracy::check_consistency(ds, m); });
  detail::run_assessor(rep.incompleteness,
                       [&] { return accuracy::assess_incompleteness(ds); });
  detail::run_assessor(rep.duplicates,
                       [&] { return accuracy::detect_duplicates(ds); });
  detail::run_assessor(rep.amount, [&] {
    return relevance::assess_amount(ds, params.noise.class_count, params.amount);
  });
  detail::run_assessor(rep.heterogeneity,
                       [&] { return relevance::assess_heterogeneity(m); });
  detail::run_assessor(rep.timeliness,
                       [&] { return relevance::assess_timeliness(m, &ds); });
  detail::run_assessor(rep.sensitivity,
                       [&] { return provenance::assess_commercial_sensitivity(m); });
  detail::run_assessor(rep.accessibility, [&] {
    return provenance::assess_accessibility(m, &rep.warnings);
  });
  detail::run_assessor(rep.trustworthiness, [&] {
    return provenance::assess_trustworthiness(m, params.trust);
  });
  if (params.run_fisma) {
    detail::run_assessor(rep.fisma, [&] {
      return provenance::fisma_score(m, &ds, params.rubric);
    });
  } else {
    rep.fisma.error = "not requested";
  }
  return rep;
}

// --- summary cells (one per quality dimension, shared by every format) --

inline const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> columns = {
      "Dataset",       "Noise",          "Outliers",
      "Inconsistency", "Incompleteness", "Redundancy",
      "Amount of Data", "Heterogeneity", "Timeliness",
      "Commercial Sensitivity", "Accessibility", "Trustworthiness"};
  return columns;
}

namespace detail {

inline std::string not_assessed(const std::string& reason) {
  return "not assessed: " + reason;
}

}  // namespace detail

inline std::vector<std::string> summary_cells(const QualityReport& rep) {
  std::vector<std::string> cells;
  cells.push_back(rep.dataset_name);

  if (rep.noise.ok())
    cells.push_back(format_fixed(rep.noise->noisy_percent, 1));
  else
    cells.push_back(detail::not_assessed(rep.noise.error));

  if (!rep.outliers.ok()) {
    cells.push_back(detail::not_assessed(rep.outliers.error));
  } else if (const auto* s = rep.target_outliers()) {
    cells.push_back(format_fixed(s->outlier_percent(), 0));
  } else {
    cells.push_back(detail::not_assessed("no boxplot for target attribute '" +
                                         rep.target + "'"));
  }

  if (rep.consistency.ok())
    cells.push_back(rep.consistency->findings.empty() ? "No" : "Yes");
  else
    cells.push_back(detail::not_assessed(rep.consistency.error));

  if (rep.incompleteness.ok())
    cells.push_back(rep.incompleteness->any_missing() ? "Yes" : "No");
  else
    cells.push_back(detail::not_assessed(rep.incompleteness.error));

  if (rep.duplicates.ok())
    cells.push_back(rep.duplicates->empty() ? "No" : "Yes");
  else
    cells.push_back(detail::not_assessed(rep.duplicates.error));

  if (rep.amount.ok())
    cells.push_back(std::to_string(rep.amount->records) +
                    (rep.amount->small_flag ? " (small)" : ""));
  else
    cells.push_back(detail::not_assessed(rep.amount.error));

  if (rep.heterogeneity.ok()) {
    switch (rep.heterogeneity->status) {
      case relevance::HeterogeneityStatus::single_source:
        cells.push_back("No");
        break;
      case relevance::HeterogeneityStatus::multi_source:
        cells.push_back("Yes: " +
                        std::to_string(rep.heterogeneity->organization_count));
        break;
      default:
        cells.push_back("No evidence");
    }
  } else {
    cells.push_back(detail::not_assessed(rep.heterogeneity.error));
  }

  if (rep.timeliness.ok())
    cells.push_back((rep.timeliness->has_dates ? "Yes/" : "No/") +
                    rep.timeliness->era);
  else
    cells.push_back(detail::not_assessed(rep.timeliness.error));

  if (rep.sensitivity.ok())
    cells.push_back(rep.sensitivity->status == "yes" ? "Yes" : "No evidence");
  else
    cells.push_back(detail::not_assessed(rep.sensitivity.error));

  if (rep.accessibility.ok())
    cells.push_back(rep.accessibility->is_public
                        ? "Public"
                        : (rep.accessibility->location.empty() ? "No evidence"
                                                               : "Restricted"));
  else
    cells.push_back(detail::not_assessed(rep.accessibility.error));

  if (rep.trustworthiness.ok())
    cells.push_back(rep.trustworthiness->status == "yes" ? "Yes" : "No evidence");
  else
    cells.push_back(detail::not_assessed(rep.trustworthiness.error));

  return cells;
}

// --- JSON rendering ------------------------------------------------------

namespace detail {

inline json records_1based(const std::vector<std::size_t>& indices) {
  json arr = json::array();
  for (std::size_t i : indices) arr.push_back(i + 1);
  return arr;
}

template <typename T, typename Fn>
json section(const Assessed<T>& slot, Fn&& fill) {
  if (!slot.ok()) return json{{"not_assessed", slot.error}};
  json j = json::object();
  fill(j, *slot);
  return j;
}

}  // namespace detail

inline json render_json(const QualityReport& rep) {
  json j = json::object();
  j["tool"] = {{"name", "dqbench"}, {"version", version}};
  j["dataset"] = {{"name", rep.dataset_name},
                  {"records", rep.records},
                  {"attributes", rep.attributes},
                  {"source_digest", rep.source_digest}};
  j["manifest"] = {{"name", rep.manifest_name}, {"version", rep.manifest_version}};
  j["parameters"] = {
      {"target", rep.target},
      {"folds", rep.noise_params.folds},
      {"classes", rep.noise_params.class_count},
      {"seed", rep.noise_params.seed},
      {"min_leaf", rep.noise_params.min_leaf},
      {"prune_confidence", rep.noise_params.prune_confidence},
      {"discretization",
       rep.noise_params.equal_width ? "equal_width" : "equal_frequency"},
      {"quartile_method",
       rep.quartile_method == accuracy::QuartileMethod::tukey_hinges
           ? "tukey_hinges"
           : "linear_interpolation"}};

  j["noise"] = detail::section(rep.noise, [](json& s, const classifier::NoiseResult& n) {
    s["noisy_percent"] = round_half_up(n.noisy_percent, 1);
    s["records_used"] = n.records_used;
    s["misclassified"] = n.misclassified;
    s["excluded_missing_target"] = n.excluded_missing_target;
    json folds = json::array();
    for (const auto& f : n.per_fold)
      folds.push_back({{"fold", f.fold},
                       {"records", f.records},
                       {"misclassified", f.misclassified}});
    s["per_fold"] = std::move(folds);
    s["flagged_records"] = detail::records_1based(n.flagged_records);
    s["class_boundaries"] = n.class_boundaries;
    s["class_sizes"] = n.class_sizes;
    s["feature_names"] = n.feature_names;
    if (!n.warnings.empty()) s["warnings"] = n.warnings;
  });

  j["outliers"] = detail::section(
      rep.outliers, [&](json& s, const std::vector<accuracy::OutlierSummary>& v) {
        s["target_attribute"] = rep.target;
        json arr = json::array();
        for (const auto& o : v) {
          json e = json::object();
          e["attribute"] = o.attribute;
          e["non_missing"] = o.non_missing;
          e["q1"] = o.q1;
          e["q3"] = o.q3;
          e["iqr"] = o.iqr;
          e["lower_fence"] = o.lower_fence;
          e["upper_fence"] = o.upper_fence;
          e["outlier_count"] = o.outlier_indices.size();
          e["outlier_percent"] = round_half_up(o.outlier_percent(), 1);
          e["records"] = detail::records_1based(o.outlier_indices);
          arr.push_back(std::move(e));
        }
        s["summaries"] = std::move(arr);
      });

  j["inconsistency"] = detail::section(
      rep.consistency, [](json& s, const accuracy::ConsistencyReport& c) {
        json findings = json::array();
        for (const auto& f : c.findings)
          findings.push_back({{"kind", f.kind},
                              {"attribute", f.attribute},
                              {"records", detail::records_1based(f.records)},
                              {"detail", f.detail}});
        s["findings"] = std::move(findings);
        json checks = json::array();
        for (const auto& f : c.formula_checks)
          checks.push_back({{"attribute", f.attribute},
                            {"expression", f.expression},
                            {"evaluated", f.evaluated},
                            {"violations", f.violations},
                            {"unevaluated", f.unevaluated}});
        s["formula_checks"] = std::move(checks);
        if (!c.warnings.empty()) s["warnings"] = c.warnings;
      });

  j["incompleteness"] = detail::section(
      rep.incompleteness, [](json& s, const accuracy::IncompletenessSummary& i) {
        s["any_missing"] = i.any_missing();
        s["records_with_missing"] = i.records_with_missing;
        s["cells_missing"] = i.cells_missing;
        json arr = json::array();
        for (const auto& pa : i.per_attribute)
          if (pa.missing > 0)
            arr.push_back({{"name", pa.name},
                           {"missing", pa.missing},
                           {"percent", round_half_up(pa.percent, 1)}});
        s["per_attribute"] = std::move(arr);
      });

  j["redundancy"] = detail::section(
      rep.duplicates, [](json& s, const std::vector<accuracy::DuplicateGroup>& g) {
        s["duplicate_group_count"] = g.size();
        json arr = json::array();
        for (const auto& group : g)
          arr.push_back(detail::records_1based(group.records));
        s["groups"] = std::move(arr);
      });

  j["amount_of_data"] = detail::section(
      rep.amount, [](json& s, const relevance::AmountAssessment& a) {
        s["records"] = a.records;
        s["small"] = a.small_flag;
        s["split_warning"] = a.split_warning;
        s["note"] = a.note;
      });

  j["heterogeneity"] = detail::section(
      rep.heterogeneity, [](json& s, const relevance::HeterogeneityAssessment& h) {
        s["status"] = relevance::to_string(h.status);
        if (h.organization_count > 0)
          s["organization_count"] = h.organization_count;
        s["detail"] = h.detail;
      });

  j["timeliness"] = detail::section(
      rep.timeliness, [](json& s, const relevance::TimelinessAssessment& t) {
        s["dates_known"] = t.has_dates;
        s["criterion"] = t.criterion;
        s["era"] = t.era;
        s["detail"] = t.detail;
      });

  j["commercial_sensitivity"] = detail::section(
      rep.sensitivity, [](json& s, const provenance::SensitivityAssessment& v) {
        s["status"] = v.status;
        s["details"] = v.details;
      });

  j["accessibility"] = detail::section(
      rep.accessibility, [](json& s, const provenance::AccessibilityAssessment& a) {
        s["public"] = a.is_public;
        if (!a.location.empty()) s["location"] = a.location;
        s["detail"] = a.detail;
      });

  j["trustworthiness"] = detail::section(
      rep.trustworthiness, [](json& s, const provenance::TrustAssessment& t) {
        s["status"] = t.status;
        s["detail"] = t.detail;
      });

  j["fisma"] =
      detail::section(rep.fisma, [](json& s, const provenance::FismaScore& f) {
        s["total"] = f.total;
        s["rating"] = f.rating;
        s["mandatory_missing"] = f.mandatory_missing;
        json arr = json::array();
        for (const auto& item : f.items)
          arr.push_back({{"measures", item.measures},
                         {"points_possible", item.points_possible},
                         {"points_awarded", item.points_awarded},
                         {"mandatory", item.mandatory},
                         {"covered", item.covered},
                         {"evidence", item.evidence}});
        s["items"] = std::move(arr);
      });

  json cells = json::object();
  auto values = summary_cells(rep);
  const auto& columns = summary_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) cells[columns[i]] = values[i];
  j["cells"] = std::move(cells);

  if (!rep.warnings.empty()) j["warnings"] = rep.warnings;
  return j;
}

inline std::string render_json_text(const QualityReport& rep) {
  return render_json(rep).dump(2) + "\n";
}

// --- markdown rendering ---------------------------------------------------

namespace detail {

inline std::string md_row(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + c + " |";
  return out + "\n";
}

}  // namespace detail

inline std::string render_markdown(const QualityReport& rep) {
  std::string out = "# Data quality report: " + rep.dataset_name + "\n\n";
  out += std::to_string(rep.records) + " records, " +
         std::to_string(rep.attributes) + " attributes; target `" +
         (rep.target.empty() ? "(none)" : rep.target) + "`; seed " +
         std::to_string(rep.noise_params.seed) + "; dqbench " + version + "\n\n";

  out += detail::md_row(summary_columns());
  out += detail::md_row(
      std::vector<std::string>(summary_columns().size(), "---"));
  out += detail::md_row(summary_cells(rep));
  out += "\n";

  out += "## Noise\n\n";
  if (rep.noise.ok()) {
    const auto& n = *rep.noise;
    out += "- noisy records: " + std::to_string(n.misclassified) + " of " +
           std::to_string(n.records_used) + " (" +
           format_fixed(n.noisy_percent, 1) + "%)\n";
    out += "- folds: " + std::to_string(rep.noise_params.folds) +
           ", effort classes: " + std::to_string(rep.noise_params.class_count) +
           ", seed: " + std::to_string(rep.noise_params.seed) + "\n";
    if (n.excluded_missing_target > 0)
      out += "- records without a target value: " +
             std::to_string(n.excluded_missing_target) + " (excluded)\n";
    std::string bounds;
    for (double b : n.class_boundaries)
      bounds += (bounds.empty() ? "" : ", ") + format_number(b);
    out += "- class boundaries: " + (bounds.empty() ? "(none)" : bounds) + "\n";
  } else {
    out += detail::not_assessed(rep.noise.error) + "\n";
  }
  out += "\n## Outliers\n\n";
  if (rep.outliers.ok()) {
    // display-side trim: quartile arithmetic leaves long binary tails
    auto trimmed = [](double v) { return format_number(round_half_up(v, 4)); };
    out += detail::md_row({"Attribute", "n", "Q1", "Q3", "Lower fence",
                           "Upper fence", "Outliers", "%"});
    out += detail::md_row(std::vector<std::string>(8, "---"));
    for (const auto& s : *rep.outliers) {
      std::string name =
          s.attribute == rep.target ? "**" + s.attribute + "**" : s.attribute;
      out += detail::md_row({name, std::to_string(s.non_missing), trimmed(s.q1),
                             trimmed(s.q3), trimmed(s.lower_fence),
                             trimmed(s.upper_fence),
                             std::to_string(s.outlier_indices.size()),
                             format_fixed(s.outlier_percent(), 1)});
    }
  } else {
    out += detail::not_assessed(rep.outliers.error) + "\n";
  }
  out += "\n## Inconsistency\n\n";
  if (rep.consistency.ok()) {
    if (rep.consistency->findings.empty()) out += "no findings\n";
    for (const auto& f : rep.consistency->findings)
      out += "- " + f.kind + " (" + f.attribute + "): " + f.detail + "\n";
    for (const auto& c : rep.consistency->formula_checks)
      out += "- checked `" + c.attribute + " = " + c.expression + "`: " +
             std::to_string(c.violations) + " violation(s) over " +
             std::to_string(c.evaluated) + " record(s)\n";
  } else {
    out += detail::not_assessed(rep.consistency.error) + "\n";
  }
  out += "\n## Incompleteness\n\n";
  if (rep.incompleteness.ok()) {
    const auto& i = *rep.incompleteness;
    if (!i.any_missing()) {
      out += "no missing cells\n";
    } else {
      out += "- " + std::to_string(i.cells_missing) + " missing cell(s) across " +
             std::to_string(i.records_with_missing) + " record(s)\n";
      for (const auto& pa : i.per_attribute)
        if (pa.missing > 0)
          out += "- " + pa.name + ": " + std::to_string(pa.missing) + " (" +
                 format_fixed(pa.percent, 1) + "%)\n";
    }
  } else {
    out += detail::not_assessed(rep.incompleteness.error) + "\n";
  }
  out += "\n## Redundancy\n\n";
  if (rep.duplicates.ok()) {
    if (rep.duplicates->empty()) {
      out += "no duplicate records\n";
    } else {
      for (const auto& g : *rep.duplicates) {
        std::string members;
        for (std::size_t r : g.records)
          members += (members.empty() ? "" : ", ") + std::to_string(r + 1);
        out += "- records " + members + " are identical\n";
      }
    }
  } else {
    out += detail::not_assessed(rep.duplicates.error) + "\n";
  }
  out += "\n## Relevance\n\n";
  out += "- amount of data: " +
         (rep.amount.ok() ? rep.amount->note
                          : detail::not_assessed(rep.amount.error)) +
         "\n";
  out += "- heterogeneity: " +
         (rep.heterogeneity.ok() ? rep.heterogeneity->detail
                                 : detail::not_assessed(rep.heterogeneity.error)) +
         "\n";
  out += "- timeliness: " +
         (rep.timeliness.ok() ? rep.timeliness->era + " (" +
                                    rep.timeliness->detail + ")"
                              : detail::not_assessed(rep.timeliness.error)) +
         "\n";
  out += "\n## Provenance\n\n";
  out += "- commercial sensitivity: " +
         (rep.sensitivity.ok() ? rep.sensitivity->status + " (" +
                                     rep.sensitivity->details + ")"
                               : detail::not_assessed(rep.sensitivity.error)) +
         "\n";
  out += "- accessibility: " +
         (rep.accessibility.ok()
              ? rep.accessibility->detail
              : detail::not_assessed(rep.accessibility.error)) +
         "\n";
  out += "- trustworthiness: " +
         (rep.trustworthiness.ok()
              ? rep.trustworthiness->status + " (" + rep.trustworthiness->detail +
                    ")"
              : detail::not_assessed(rep.trustworthiness.error)) +
         "\n";
  if (rep.fisma.ok()) {
    out += "\n## Situation completeness\n\n";
    out += "- score: " + format_number(rep.fisma->total) + " of 100, rating " +
           rep.fisma->rating + "\n";
    for (const auto& item : rep.fisma->items)
      out += "- " + item.measures + ": " + format_number(item.points_awarded) +
             "/" + format_number(item.points_possible) + " (" + item.evidence +
             ")\n";
  } else if (rep.fisma.error != "not requested") {
    out += "\n## Situation completeness\n\n";
    out += detail::not_assessed(rep.fisma.error) + "\n";
  }
  if (!rep.warnings.empty()) {
    out += "\n## Warnings\n\n";
    for (const auto& w : rep.warnings) out += "- " + w + "\n";
  }
  return out;
}

inline std::string csv_header_row() {
  std::string out;
  const auto& columns = summary_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    csv::write_field(out, columns[i], false);
  }
  return out + "\n";
}

inline std::string csv_row(const QualityReport& rep) {
  std::string out;
  auto cells = summary_cells(rep);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    csv::write_field(out, cells[i], false);
  }
  return out + "\n";
}

}  // namespace dqbench::report
