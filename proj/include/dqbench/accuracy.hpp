#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dqbench/core.hpp"
#include "dqbench/dataset_io.hpp"
#include "dqbench/expr.hpp"
#include "dqbench/manifest.hpp"

namespace dqbench::accuracy {

struct AttributeMissing {
  std::string name;
  std::size_t missing = 0;
  double percent = 0.0;
  friend bool operator==(const AttributeMissing&, const AttributeMissing&) = default;
};

struct IncompletenessSummary {
  std::size_t records = 0;
  std::size_t attributes = 0;
  std::size_t records_with_missing = 0;
  std::size_t cells_missing = 0;
  std::vector<AttributeMissing> per_attribute;  // dataset column order

  bool any_missing() const { return cells_missing > 0; }
};

inline IncompletenessSummary assess_incompleteness(const Dataset& ds) {
  IncompletenessSummary out;
  out.records = ds.records.size();
  out.attributes = ds.attributes.size();
  out.per_attribute.resize(ds.attributes.size());
  for (std::size_t a = 0; a < ds.attributes.size(); ++a)
    out.per_attribute[a].name = ds.attributes[a].name;
  for (const auto& record : ds.records) {
    bool any = false;
    for (std::size_t a = 0; a < record.size(); ++a) {
      if (!is_missing(record[a])) continue;
      ++out.per_attribute[a].missing;
      ++out.cells_missing;
      any = true;
    }
    if (any) ++out.records_with_missing;
  }
  for (auto& pa : out.per_attribute)
    pa.percent = out.records == 0
                     ? 0.0
                     : 100.0 * static_cast<double>(pa.missing) /
                           static_cast<double>(out.records);
  return out;
}

struct DuplicateGroup {
  std::vector<std::size_t> records;  // ascending indices, size >= 2
  friend bool operator==(const DuplicateGroup&, const DuplicateGroup&) = default;
};

namespace detail {

// Canonical comparison token: numbers through shortest round-trip form,
// text trimmed, missing mapped to a sentinel no literal cell can produce
// (cell_token renders missing as "?", which must stay distinct from a
// text cell that actually contains "?").
inline std::string comparison_token(const Cell& cell) {
  if (is_missing(cell)) return std::string("\x01");
  if (is_text(cell)) return trim(as_text(cell));
  return cell_token(cell);
}

}  // namespace detail

// Exact-duplicate groups over all non-identifier attributes. Identifier
// columns are synthetic uniqueness and would mask true duplicates.
inline std::vector<DuplicateGroup> detect_duplicates(const Dataset& ds) {
  std::vector<std::size_t> compared;
  for (std::size_t a = 0; a < ds.attributes.size(); ++a)
    if (ds.attributes[a].role != AttributeRole::identifier) compared.push_back(a);

  std::map<std::string, std::vector<std::size_t>> buckets;
  for (std::size_t r = 0; r < ds.records.size(); ++r) {
    std::string key;
    for (std::size_t a : compared) {
      key += detail::comparison_token(ds.records[r][a]);
      key += '\x1f';
    }
    buckets[key].push_back(r);
  }

  std::vector<DuplicateGroup> groups;
  for (auto& [key, members] : buckets)
    if (members.size() >= 2) groups.push_back({std::move(members)});
  std::sort(groups.begin(), groups.end(),
            [](const DuplicateGroup& a, const DuplicateGroup& b) {
              return a.records.front() < b.records.front();
            });
  return groups;
}

struct ConsistencyFinding {
  std::string kind;  // formula_violation | unit_mixture | date_format_mixture |
                     // label_swap_suspicion
  std::string attribute;
  std::vector<std::size_t> records;
  std::string detail;
};

struct FormulaCheck {
  std::string attribute;
  std::string expression;
  std::size_t evaluated = 0;    // records with a comparable stored value
  std::size_t violations = 0;   // beyond tolerance, or undefined expression
  std::size_t unevaluated = 0;  // missing operands or missing stored value
};

struct ConsistencyReport {
  std::vector<ConsistencyFinding> findings;
  std::vector<FormulaCheck> formula_checks;
  std::vector<std::string> warnings;
};

namespace detail {

struct FormulaOutcome {
  std::size_t evaluated = 0;
  std::size_t violations = 0;
  std::size_t unevaluated = 0;
  std::size_t undefined = 0;
  std::vector<std::size_t> violating;
  std::optional<std::size_t> example;  // first violating record
  double example_stored = 0.0;
  double example_computed = 0.0;
};

inline FormulaOutcome run_formula(const Dataset& ds, const expr::Formula& formula,
                                  std::size_t stored_idx, double rel_tol,
                                  double abs_tol) {
  FormulaOutcome out;
  for (std::size_t r = 0; r < ds.records.size(); ++r) {
    const Cell& stored = ds.records[r][stored_idx];
    if (is_missing(stored)) {
      ++out.unevaluated;
      continue;
    }
    auto value = formula.evaluate(ds, r);
    if (value.status == expr::Formula::Status::unevaluated) {
      ++out.unevaluated;
      continue;
    }
    ++out.evaluated;
    if (value.status == expr::Formula::Status::undefined) {
      ++out.violations;
      ++out.undefined;
      out.violating.push_back(r);
      continue;
    }
    double observed = as_number(stored);
    double expected = value.value;
    double tol = std::max(abs_tol, rel_tol * std::abs(expected));
    if (std::abs(observed - expected) > tol) {
      ++out.violations;
      out.violating.push_back(r);
      if (!out.example) {
        out.example = r;
        out.example_stored = observed;
        out.example_computed = expected;
      }
    }
  }
  return out;
}

}  // namespace detail

// Internal-consistency scan driven by manifest declarations: derived-column
// formulas (with tolerance), swapped-column probes for failing formulas,
// unit mixtures among attributes measuring the same concept, and date
// columns mixing their declared format with an alternate one.
inline ConsistencyReport check_consistency(const Dataset& ds,
                                           const manifest::TemplateManifest& m) {
  ConsistencyReport report;

  if (m.noise) {
    for (const auto& decl : m.noise->formulas) {
      auto stored_idx = ds.attribute_index(decl.attribute);
      if (!stored_idx) {
        report.warnings.push_back("formula declared for unknown attribute '" +
                                  decl.attribute + "'");
        continue;
      }
      if (ds.attributes[*stored_idx].kind != AttributeKind::numeric) {
        report.warnings.push_back("formula declared for non-numeric attribute '" +
                                  decl.attribute + "'");
        continue;
      }
      expr::Formula formula;
      try {
        formula = expr::Formula::parse(decl.expression);
        formula.bind_check(ds);
      } catch (const Error& e) {
        report.warnings.push_back("formula for '" + decl.attribute +
                                  "' not checked: " + e.what());
        continue;
      }
      double rel_tol = decl.tolerance.relative.value_or(1e-6);
      double abs_tol = decl.tolerance.absolute.value_or(0.0);
      auto outcome =
          detail::run_formula(ds, formula, *stored_idx, rel_tol, abs_tol);

      FormulaCheck check;
      check.attribute = decl.attribute;
      check.expression = decl.expression;
      check.evaluated = outcome.evaluated;
      check.violations = outcome.violations;
      check.unevaluated = outcome.unevaluated;
      report.formula_checks.push_back(check);

      if (outcome.violations > 0) {
        ConsistencyFinding finding;
        finding.kind = "formula_violation";
        finding.attribute = decl.attribute;
        finding.records = outcome.violating;
        finding.detail = std::to_string(outcome.violations) + " of " +
                         std::to_string(outcome.evaluated) +
                         " evaluated record(s) disagree with '" + decl.expression +
                         "'";
        if (outcome.undefined > 0)
          finding.detail += "; " + std::to_string(outcome.undefined) +
                            " undefined (division by zero)";
        if (outcome.example)
          finding.detail += "; e.g. record " + std::to_string(*outcome.example + 1) +
                            " stores " + format_number(outcome.example_stored) +
                            " but the expression gives " +
                            format_number(outcome.example_computed);
        report.findings.push_back(std::move(finding));

        // Would exchanging the stored column with one of the operands make
        // the formula hold? A near-perfect fit after the exchange points at
        // swapped column labels rather than noisy values.
        for (const auto& ref : formula.referenced()) {
          auto ref_idx = ds.attribute_index(ref);
          if (!ref_idx || *ref_idx == *stored_idx) continue;
          if (ds.attributes[*ref_idx].kind != AttributeKind::numeric) continue;
          Dataset swapped = ds;
          for (auto& record : swapped.records)
            std::swap(record[*stored_idx], record[*ref_idx]);
          auto redo =
              detail::run_formula(swapped, formula, *stored_idx, rel_tol, abs_tol);
          if (redo.evaluated == 0) continue;
          double fit = static_cast<double>(redo.evaluated - redo.violations) /
                       static_cast<double>(redo.evaluated);
          if (fit >= 0.9 && redo.violations < outcome.violations) {
            ConsistencyFinding swap;
            swap.kind = "label_swap_suspicion";
            swap.attribute = ref;
            swap.detail = "exchanging columns '" + decl.attribute + "' and '" +
                          ref + "' satisfies '" + decl.expression + "' for " +
                          std::to_string(redo.evaluated - redo.violations) +
                          " of " + std::to_string(redo.evaluated) +
                          " record(s)";
            report.findings.push_back(std::move(swap));
          }
        }
      }
    }
  }

  // Same measured concept, different declared units.
  std::map<std::string, std::vector<std::size_t>> by_measure;
  for (std::size_t a = 0; a < ds.attributes.size(); ++a)
    if (!ds.attributes[a].measures.empty())
      by_measure[ds.attributes[a].measures].push_back(a);
  for (const auto& [measure, members] : by_measure) {
    std::vector<std::string> units;
    for (std::size_t a : members) {
      const std::string& unit = ds.attributes[a].unit;
      if (!unit.empty() &&
          std::find(units.begin(), units.end(), unit) == units.end())
        units.push_back(unit);
    }
    if (units.size() < 2) continue;
    ConsistencyFinding finding;
    finding.kind = "unit_mixture";
    finding.attribute = measure;
    std::string parts;
    for (std::size_t a : members)
      if (!ds.attributes[a].unit.empty())
        parts += (parts.empty() ? "" : ", ") + ds.attributes[a].name + " in '" +
                 ds.attributes[a].unit + "'";
    finding.detail = "attributes measuring '" + measure +
                     "' use different units: " + parts;
    report.findings.push_back(std::move(finding));
  }

  // Date columns whose residual text cells parse under an alternate format.
  for (std::size_t a = 0; a < ds.attributes.size(); ++a) {
    const AttributeSpec& spec = ds.attributes[a];
    if (spec.kind != AttributeKind::date || spec.alternate_date_formats.empty())
      continue;
    std::vector<std::size_t> mixed;
    for (std::size_t r = 0; r < ds.records.size(); ++r) {
      const Cell& cell = ds.records[r][a];
      if (!is_text(cell)) continue;
      for (const auto& format : spec.alternate_date_formats) {
        if (io::parse_date(trim(as_text(cell)), format)) {
          mixed.push_back(r);
          break;
        }
      }
    }
    if (mixed.empty()) continue;
    ConsistencyFinding finding;
    finding.kind = "date_format_mixture";
    finding.attribute = spec.name;
    finding.records = mixed;
    finding.detail = std::to_string(mixed.size()) + " value(s) of '" + spec.name +
                     "' match an alternate date format instead of '" +
                     spec.date_format + "'";
    report.findings.push_back(std::move(finding));
  }

  return report;
}

}  // namespace dqbench::accuracy
