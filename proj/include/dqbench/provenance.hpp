#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "dqbench/core.hpp"
#include "dqbench/manifest.hpp"

namespace dqbench::provenance {

struct SensitivityAssessment {
  std::string status;  // "yes" | "no_evidence"
  std::string details;
};

// Anonymization measures in the manifest are the only signal: a declared
// list of anonymized or removed attributes means the donors considered the
// data commercially sensitive.
inline SensitivityAssessment assess_commercial_sensitivity(
    const manifest::TemplateManifest& m) {
  SensitivityAssessment out;
  if (m.commercial_sensitivity &&
      !m.commercial_sensitivity->anonymized_attributes.empty()) {
    out.status = "yes";
    std::string joined;
    for (const auto& a : m.commercial_sensitivity->anonymized_attributes)
      joined += (joined.empty() ? "" : ", ") + a;
    out.details = "anonymized or removed: " + joined;
    if (!m.commercial_sensitivity->notes.empty())
      out.details += " (" + m.commercial_sensitivity->notes + ")";
    return out;
  }
  out.status = "no_evidence";
  out.details = m.commercial_sensitivity && !m.commercial_sensitivity->notes.empty()
                    ? m.commercial_sensitivity->notes
                    : "no anonymization declared";
  return out;
}

struct AccessibilityAssessment {
  bool is_public = false;
  std::string location;
  std::string detail;
};

inline AccessibilityAssessment assess_accessibility(
    const manifest::TemplateManifest& m,
    std::vector<std::string>* warnings = nullptr) {
  AccessibilityAssessment out;
  if (!m.accessibility || m.accessibility->location.empty()) {
    out.detail = "no access location declared";
    if (warnings) warnings->push_back(out.detail);
    return out;
  }
  out.location = m.accessibility->location;
  if (m.accessibility->restricted.value_or(false)) {
    out.detail = "access restricted; hosted at " + out.location;
    return out;
  }
  out.is_public = true;
  out.detail = "publicly available at " + out.location;
  return out;
}

struct TrustParams {
  bool require_contact = true;
  bool require_collection_method = true;
};

struct TrustAssessment {
  std::string status;  // "yes" | "no_evidence"
  std::string detail;
};

// Verifiability standard: someone to ask (contact) and a described way the
// numbers were gathered (collection_method). Either requirement can be
// relaxed through the params.
inline TrustAssessment assess_trustworthiness(const manifest::TemplateManifest& m,
                                              const TrustParams& params = {}) {
  TrustAssessment out;
  bool has_contact = m.provenance && !m.provenance->contact.empty();
  bool has_method = m.provenance && !m.provenance->collection_method.empty();
  std::vector<std::string> missing;
  if (params.require_contact && !has_contact) missing.push_back("contact");
  if (params.require_collection_method && !has_method)
    missing.push_back("collection_method");
  if (missing.empty()) {
    out.status = "yes";
    out.detail = "provenance declares";
    if (has_contact) out.detail += " a contact";
    if (has_contact && has_method) out.detail += " and";
    if (has_method) out.detail += " the collection method";
    return out;
  }
  out.status = "no_evidence";
  std::string joined;
  for (const auto& f : missing) joined += (joined.empty() ? "" : ", ") + f;
  out.detail = "provenance lacks: " + joined;
  return out;
}

// --- situation-completeness score over a 100-point rubric ---------------

struct RubricItem {
  std::string measures;  // matched against attribute tags of the same name
  double points = 0.0;
  bool mandatory = false;
  friend bool operator==(const RubricItem&, const RubricItem&) = default;
};

struct Rubric {
  std::vector<RubricItem> items;
  friend bool operator==(const Rubric&, const Rubric&) = default;
};

inline Rubric default_rubric() {
  return Rubric{{
      {"size", 20.0, true},
      {"effort", 20.0, true},
      {"start_date", 10.0, true},
      {"end_date", 10.0, true},
      {"duration", 5.0, false},
      {"programming_language", 5.0, false},
      {"platform", 5.0, false},
      {"project_type", 5.0, false},
      {"business_sector", 5.0, false},
      {"tool_usage", 5.0, false},
      {"customer_participation", 5.0, false},
      {"staff_experience", 5.0, false},
  }};
}

inline void check_rubric(const Rubric& rubric) {
  double sum = 0.0;
  for (const auto& item : rubric.items) {
    if (item.measures.empty())
      throw ConfigError("rubric items need a measures tag");
    if (item.points <= 0.0)
      throw ConfigError("rubric item '" + item.measures +
                        "' needs positive points");
    sum += item.points;
  }
  if (std::abs(sum - 100.0) > 1e-9)
    throw ConfigError("rubric points sum to " + format_number(sum) +
                      ", expected 100");
}

inline Rubric parse_rubric(const std::string& text) {
  auto root = nlohmann::ordered_json::parse(text, nullptr, false);
  if (root.is_discarded() || !root.is_object() || !root.contains("items") ||
      !root["items"].is_array())
    throw ConfigError("rubric file must be a JSON object with an items array");
  Rubric rubric;
  for (const auto& j : root["items"]) {
    if (!j.is_object() || !j.contains("measures") || !j["measures"].is_string() ||
        !j.contains("points") || !j["points"].is_number())
      throw ConfigError("rubric items need a measures tag and points");
    RubricItem item;
    item.measures = j["measures"].get<std::string>();
    item.points = j["points"].get<double>();
    if (j.contains("mandatory")) {
      if (!j["mandatory"].is_boolean())
        throw ConfigError("rubric mandatory flag must be a boolean");
      item.mandatory = j["mandatory"].get<bool>();
    }
    rubric.items.push_back(std::move(item));
  }
  check_rubric(rubric);
  return rubric;
}

inline std::string fisma_rating(double total, bool mandatory_missing) {
  if (mandatory_missing) return "X";
  if (total >= 90.0) return "AAA";
  if (total >= 80.0) return "AA";
  if (total >= 70.0) return "A";
  if (total >= 60.0) return "B";
  if (total >= 50.0) return "C";
  if (total >= 40.0) return "D";
  return "X";
}

struct ScoreItem {
  std::string measures;
  double points_possible = 0.0;
  double points_awarded = 0.0;
  bool mandatory = false;
  bool covered = false;  // some declaration matched the concept
  std::string evidence;
};

struct FismaScore {
  double total = 0.0;
  std::string rating;  // AAA..D, X
  bool mandatory_missing = false;
  std::vector<ScoreItem> items;
};

// Rubric concepts are matched against the `measures` tags of declared
// attributes. With a dataset in hand, points scale by how populated the
// matching columns are; manifest-only scoring grants full points per
// covered concept. Date concepts may alternatively be covered by explicit
// year lists in the timeliness section. Any uncovered mandatory concept
// forces the X rating.
inline FismaScore fisma_score(const manifest::TemplateManifest& m,
                              const Dataset* ds = nullptr,
                              const Rubric& rubric = default_rubric()) {
  check_rubric(rubric);
  FismaScore out;
  for (const auto& item : rubric.items) {
    ScoreItem score;
    score.measures = item.measures;
    score.points_possible = item.points;
    score.mandatory = item.mandatory;

    std::vector<const manifest::AttributeDecl*> matches;
    for (const auto& decl : m.attributes)
      if (decl.measures == item.measures) matches.push_back(&decl);

    bool years_fallback =
        m.timeliness && m.timeliness->dates &&
        ((item.measures == "start_date" &&
          !m.timeliness->dates->start_years.empty()) ||
         (item.measures == "end_date" &&
          !m.timeliness->dates->completion_years.empty()));

    if (matches.empty() && !years_fallback) {
      score.evidence = "no declaration covers this concept";
      if (item.mandatory) out.mandatory_missing = true;
      out.items.push_back(std::move(score));
      continue;
    }
    score.covered = true;
    double fraction = 1.0;
    if (!matches.empty() && ds) {
      // best-populated matching column decides the fraction
      double best = 0.0;
      const manifest::AttributeDecl* best_decl = matches.front();
      for (const auto* decl : matches) {
        auto idx = ds->attribute_index(decl->name);
        if (!idx) continue;
        std::size_t non_missing = 0;
        for (const auto& record : ds->records)
          if (!is_missing(record[*idx])) ++non_missing;
        double f = ds->records.empty() ? 0.0
                                       : static_cast<double>(non_missing) /
                                             static_cast<double>(ds->records.size());
        if (f > best) {
          best = f;
          best_decl = decl;
        }
      }
      fraction = best;
      score.evidence = "attribute '" + best_decl->name + "'";
      if (fraction <= 0.0 && years_fallback) {
        fraction = 1.0;
        score.evidence = "declared year list";
      } else if (fraction <= 0.0) {
        score.covered = false;
        score.evidence = "declared attribute absent or empty in the dataset";
        if (item.mandatory) out.mandatory_missing = true;
        out.items.push_back(std::move(score));
        continue;
      }
    } else if (!matches.empty()) {
      score.evidence = "attribute '" + matches.front()->name + "'";
    } else {
      score.evidence = "declared year list";
    }
    score.points_awarded = item.points * fraction;
    out.items.push_back(std::move(score));
  }
  for (const auto& item : out.items) out.total += item.points_awarded;
  out.rating = fisma_rating(out.total, out.mandatory_missing);
  return out;
}

}  // namespace dqbench::provenance
