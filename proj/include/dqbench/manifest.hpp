#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dqbench/core.hpp"
#include "dqbench/dataset_io.hpp"

namespace dqbench::manifest {

using json = nlohmann::ordered_json;

struct Tolerance {
  std::optional<double> relative;
  std::optional<double> absolute;
  friend bool operator==(const Tolerance&, const Tolerance&) = default;
};

struct FormulaDecl {
  std::string attribute;   // the stored column the expression should equal
  std::string expression;
  Tolerance tolerance;
  friend bool operator==(const FormulaDecl&, const FormulaDecl&) = default;
};

struct PreStep {
  std::string action;  // "drop" | "keep" | "drop_missing_target"
  std::string rule;    // record predicate (unused for drop_missing_target)
  friend bool operator==(const PreStep&, const PreStep&) = default;
};

struct NoiseSection {
  std::vector<FormulaDecl> formulas;
  std::string method;
  std::string tool;
  std::vector<PreStep> pre_steps;  // artifact-level addition
  friend bool operator==(const NoiseSection&, const NoiseSection&) = default;
};

struct OutlierSection {
  std::string method;  // "linear_interpolation" | "tukey_hinges"
  std::vector<std::string> excluded_attributes;
  std::map<std::string, double> known_percentages;
  std::string notes;
  friend bool operator==(const OutlierSection&, const OutlierSection&) = default;
};

struct Range {
  double min = 0.0;
  double max = 0.0;
  friend bool operator==(const Range&, const Range&) = default;
};

struct SummaryStats {
  std::map<std::string, double> means;
  std::map<std::string, double> sds;
  friend bool operator==(const SummaryStats&, const SummaryStats&) = default;
};

struct InconsistencySection {
  std::map<std::string, std::string> explanations;
  std::map<std::string, Range> ranges;
  std::optional<SummaryStats> summary_stats;
  std::string notes;
  friend bool operator==(const InconsistencySection&,
                         const InconsistencySection&) = default;
};

struct IncompletenessSection {
  std::vector<std::string> markers;
  std::string marker_semantics;
  std::vector<std::string> affected_attributes;
  std::string reasons;
  std::string notes;
  friend bool operator==(const IncompletenessSection&,
                         const IncompletenessSection&) = default;
};

struct RedundancySection {
  std::string notes;
  friend bool operator==(const RedundancySection&, const RedundancySection&) = default;
};

struct AmountSection {
  std::optional<std::size_t> expected_records;
  friend bool operator==(const AmountSection&, const AmountSection&) = default;
};

struct HeterogeneitySection {
  std::optional<std::size_t> organization_count;
  std::vector<std::string> organizations;
  std::map<std::string, std::size_t> per_org_record_counts;
  std::string notes;
  friend bool operator==(const HeterogeneitySection&,
                         const HeterogeneitySection&) = default;
};

struct CollectionDates {
  std::string start_attribute;       // dataset column carrying start dates
  std::string completion_attribute;  // dataset column carrying end dates
  std::vector<int> start_years;      // explicit years, for date-less datasets
  std::vector<int> completion_years;
  friend bool operator==(const CollectionDates&, const CollectionDates&) = default;

  bool any() const {
    return !start_attribute.empty() || !completion_attribute.empty() ||
           !start_years.empty() || !completion_years.empty();
  }
};

struct TimelinessSection {
  std::optional<CollectionDates> dates;
  std::string period;  // publication-stated era, echoed verbatim
  std::optional<int> first_publication_year;  // artifact-level addition
  std::string effort_distribution;
  friend bool operator==(const TimelinessSection&, const TimelinessSection&) = default;
};

struct SensitivitySection {
  std::vector<std::string> anonymized_attributes;
  std::string notes;
  friend bool operator==(const SensitivitySection&, const SensitivitySection&) = default;
};

struct AccessibilitySection {
  std::string location;
  std::optional<bool> restricted;
  friend bool operator==(const AccessibilitySection&,
                         const AccessibilitySection&) = default;
};

struct ProvenanceSection {
  std::vector<std::string> source_organizations;
  std::string collecting_organization;
  std::string contact;
  std::string purpose;
  std::string methodology;
  std::string collection_method;
  std::string preprocessing;
  std::vector<std::string> donors;
  std::string collection_date;
  std::string dataset_name;
  std::string version;
  friend bool operator==(const ProvenanceSection&, const ProvenanceSection&) = default;
};

struct AttributeDecl {
  std::string name;
  std::optional<AttributeKind> kind;
  std::optional<AttributeRole> role;
  std::string unit;
  std::vector<std::string> missing_markers;
  std::string date_format;
  std::vector<std::string> alternate_date_formats;
  std::string measures;  // rubric concept: size, effort, start_date, ...
  friend bool operator==(const AttributeDecl&, const AttributeDecl&) = default;
};

struct TemplateManifest {
  std::string name;
  std::string version;
  std::vector<AttributeDecl> attributes;
  std::optional<NoiseSection> noise;
  std::optional<OutlierSection> outliers;
  std::optional<InconsistencySection> inconsistency;
  std::optional<IncompletenessSection> incompleteness;
  std::optional<RedundancySection> redundancy;
  std::optional<AmountSection> amount_of_data;
  std::optional<HeterogeneitySection> heterogeneity;
  std::optional<TimelinessSection> timeliness;
  std::optional<SensitivitySection> commercial_sensitivity;
  std::optional<AccessibilitySection> accessibility;
  std::optional<ProvenanceSection> provenance;
  friend bool operator==(const TemplateManifest&, const TemplateManifest&) = default;
};

namespace detail {

class Reader {
 public:
  Reader(const json& j, std::string path, std::vector<std::string>* warnings)
      : j_(j), path_(std::move(path)), warnings_(warnings) {
    if (!j_.is_object()) fail("expected an object");
  }

  ~Reader() {
    if (!warnings_) return;
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!consumed_.count(it.key()))
        warnings_->push_back("unknown key '" + join(it.key()) + "' ignored");
  }

  Reader(const Reader&) = delete;
  Reader& operator=(const Reader&) = delete;

  bool has(const std::string& key) {
    consumed_.insert(key);
    return j_.contains(key);
  }

  const json* get(const std::string& key) {
    consumed_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string string_or(const std::string& key, std::string fallback = "") {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_string()) fail_at(key, "expected a string");
    return v->get<std::string>();
  }

  std::optional<double> number_opt(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) fail_at(key, "expected a number");
    return v->get<double>();
  }

  std::optional<std::size_t> count_opt(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer() || v->get<double>() < 0)
      fail_at(key, "expected a non-negative integer");
    return v->get<std::size_t>();
  }

  std::optional<int> int_opt(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) fail_at(key, "expected an integer");
    return v->get<int>();
  }

  std::optional<bool> bool_opt(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) fail_at(key, "expected a boolean");
    return v->get<bool>();
  }

  std::vector<std::string> string_list(const std::string& key) {
    const json* v = get(key);
    std::vector<std::string> out;
    if (!v) return out;
    if (!v->is_array()) fail_at(key, "expected an array of strings");
    for (const auto& item : *v) {
      if (!item.is_string()) fail_at(key, "expected an array of strings");
      out.push_back(item.get<std::string>());
    }
    return out;
  }

  std::vector<int> int_list(const std::string& key) {
    const json* v = get(key);
    std::vector<int> out;
    if (!v) return out;
    if (!v->is_array()) fail_at(key, "expected an array of integers");
    for (const auto& item : *v) {
      if (!item.is_number_integer()) fail_at(key, "expected an array of integers");
      out.push_back(item.get<int>());
    }
    return out;
  }

  std::map<std::string, double> number_map(const std::string& key) {
    const json* v = get(key);
    std::map<std::string, double> out;
    if (!v) return out;
    if (!v->is_object()) fail_at(key, "expected an object of numbers");
    for (auto it = v->begin(); it != v->end(); ++it) {
      if (!it.value().is_number()) fail_at(key, "expected an object of numbers");
      out[it.key()] = it.value().get<double>();
    }
    return out;
  }

  std::map<std::string, std::size_t> count_map(const std::string& key) {
    const json* v = get(key);
    std::map<std::string, std::size_t> out;
    if (!v) return out;
    if (!v->is_object()) fail_at(key, "expected an object of counts");
    for (auto it = v->begin(); it != v->end(); ++it) {
      if (!it.value().is_number_integer() || it.value().get<double>() < 0)
        fail_at(key, "expected an object of non-negative integers");
      out[it.key()] = it.value().get<std::size_t>();
    }
    return out;
  }

  std::map<std::string, std::string> string_map(const std::string& key) {
    const json* v = get(key);
    std::map<std::string, std::string> out;
    if (!v) return out;
    if (!v->is_object()) fail_at(key, "expected an object of strings");
    for (auto it = v->begin(); it != v->end(); ++it) {
      if (!it.value().is_string()) fail_at(key, "expected an object of strings");
      out[it.key()] = it.value().get<std::string>();
    }
    return out;
  }

  std::string join(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("manifest error at " + (path_.empty() ? "top level" : path_) +
                          ": " + what);
  }

  [[noreturn]] void fail_at(const std::string& key, const std::string& what) const {
    throw ValidationError("manifest error at " + join(key) + ": " + what);
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string>* warnings_;
  std::set<std::string> consumed_;
};

inline void set_if(json& j, const char* key, const std::string& value) {
  if (!value.empty()) j[key] = value;
}

template <typename T>
inline void set_if(json& j, const char* key, const std::vector<T>& value) {
  if (!value.empty()) j[key] = value;
}

template <typename T>
inline void set_if(json& j, const char* key, const std::map<std::string, T>& value) {
  if (!value.empty()) j[key] = value;
}

template <typename T>
inline void set_if(json& j, const char* key, const std::optional<T>& value) {
  if (value) j[key] = *value;
}

}  // namespace detail

struct ParseResult {
  TemplateManifest manifest;
  std::vector<std::string> warnings;
};

inline ParseResult parse_manifest(const std::string& text) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded())
    throw ValidationError("manifest error: not well-formed JSON");

  ParseResult result;
  TemplateManifest& m = result.manifest;
  auto* warn = &result.warnings;
  detail::Reader top(root, "", warn);

  m.name = top.string_or("name");
  m.version = top.string_or("version");

  if (const json* attrs = top.get("attributes")) {
    if (!attrs->is_array()) top.fail_at("attributes", "expected an array");
    for (std::size_t i = 0; i < attrs->size(); ++i) {
      std::string path = "attributes[" + std::to_string(i) + "]";
      detail::Reader r((*attrs)[i], path, warn);
      AttributeDecl decl;
      decl.name = r.string_or("name");
      if (decl.name.empty()) r.fail("attribute declarations need a name");
      if (r.has("kind"))
        decl.kind = attribute_kind_from_string(r.string_or("kind"));
      if (r.has("role"))
        decl.role = attribute_role_from_string(r.string_or("role"));
      decl.unit = r.string_or("unit");
      decl.missing_markers = r.string_list("missing_markers");
      decl.date_format = r.string_or("date_format");
      decl.alternate_date_formats = r.string_list("alternate_date_formats");
      decl.measures = r.string_or("measures");
      m.attributes.push_back(std::move(decl));
    }
  }

  if (const json* sec = top.get("noise")) {
    detail::Reader r(*sec, "noise", warn);
    NoiseSection s;
    if (const json* formulas = r.get("formulas")) {
      if (!formulas->is_array()) r.fail_at("formulas", "expected an array");
      for (std::size_t i = 0; i < formulas->size(); ++i) {
        std::string path = "noise.formulas[" + std::to_string(i) + "]";
        detail::Reader fr((*formulas)[i], path, warn);
        FormulaDecl f;
        f.attribute = fr.string_or("attribute");
        f.expression = fr.string_or("expression");
        if (f.attribute.empty() || f.expression.empty())
          fr.fail("formula declarations need attribute and expression");
        if (const json* tol = fr.get("tolerance")) {
          detail::Reader tr(*tol, path + ".tolerance", warn);
          f.tolerance.relative = tr.number_opt("relative");
          f.tolerance.absolute = tr.number_opt("absolute");
        }
        s.formulas.push_back(std::move(f));
      }
    }
    s.method = r.string_or("method");
    s.tool = r.string_or("tool");
    if (const json* steps = r.get("pre_steps")) {
      if (!steps->is_array()) r.fail_at("pre_steps", "expected an array");
      for (std::size_t i = 0; i < steps->size(); ++i) {
        std::string path = "noise.pre_steps[" + std::to_string(i) + "]";
        detail::Reader sr((*steps)[i], path, warn);
        PreStep step;
        step.action = sr.string_or("action");
        step.rule = sr.string_or("rule");
        if (step.action != "drop" && step.action != "keep" &&
            step.action != "drop_missing_target")
          sr.fail("action must be drop, keep, or drop_missing_target");
        if (step.action != "drop_missing_target" && step.rule.empty())
          sr.fail("drop/keep steps need a rule");
        s.pre_steps.push_back(std::move(step));
      }
    }
    m.noise = std::move(s);
  }

  if (const json* sec = top.get("outliers")) {
    detail::Reader r(*sec, "outliers", warn);
    OutlierSection s;
    s.method = r.string_or("method");
    if (!s.method.empty() && s.method != "linear_interpolation" &&
        s.method != "tukey_hinges")
      r.fail_at("method", "must be linear_interpolation or tukey_hinges");
    s.excluded_attributes = r.string_list("excluded_attributes");
    s.known_percentages = r.number_map("known_percentages");
    s.notes = r.string_or("notes");
    m.outliers = std::move(s);
  }

  if (const json* sec = top.get("inconsistency")) {
    detail::Reader r(*sec, "inconsistency", warn);
    InconsistencySection s;
    s.explanations = r.string_map("explanations");
    if (const json* ranges = r.get("ranges")) {
      if (!ranges->is_object()) r.fail_at("ranges", "expected an object");
      for (auto it = ranges->begin(); it != ranges->end(); ++it) {
        std::string path = "inconsistency.ranges." + it.key();
        detail::Reader rr(it.value(), path, warn);
        Range range;
        auto lo = rr.number_opt("min");
        auto hi = rr.number_opt("max");
        if (!lo || !hi) rr.fail("ranges need min and max");
        range.min = *lo;
        range.max = *hi;
        if (range.min > range.max)
          rr.fail("min exceeds max for attribute '" + it.key() + "'");
        s.ranges[it.key()] = range;
      }
    }
    if (const json* stats = r.get("summary_stats")) {
      detail::Reader sr(*stats, "inconsistency.summary_stats", warn);
      SummaryStats ss;
      ss.means = sr.number_map("means");
      ss.sds = sr.number_map("sds");
      s.summary_stats = std::move(ss);
    }
    s.notes = r.string_or("notes");
    m.inconsistency = std::move(s);
  }

  if (const json* sec = top.get("incompleteness")) {
    detail::Reader r(*sec, "incompleteness", warn);
    IncompletenessSection s;
    s.markers = r.string_list("markers");
    s.marker_semantics = r.string_or("marker_semantics");
    s.affected_attributes = r.string_list("affected_attributes");
    s.reasons = r.string_or("reasons");
    s.notes = r.string_or("notes");
    m.incompleteness = std::move(s);
  }

  if (const json* sec = top.get("redundancy")) {
    detail::Reader r(*sec, "redundancy", warn);
    RedundancySection s;
    s.notes = r.string_or("notes");
    m.redundancy = std::move(s);
  }

  if (const json* sec = top.get("amount_of_data")) {
    detail::Reader r(*sec, "amount_of_data", warn);
    AmountSection s;
    s.expected_records = r.count_opt("expected_records");
    m.amount_of_data = std::move(s);
  }

  if (const json* sec = top.get("heterogeneity")) {
    detail::Reader r(*sec, "heterogeneity", warn);
    HeterogeneitySection s;
    s.organization_count = r.count_opt("organization_count");
    s.organizations = r.string_list("organizations");
    s.per_org_record_counts = r.count_map("per_org_record_counts");
    s.notes = r.string_or("notes");
    m.heterogeneity = std::move(s);
  }

  if (const json* sec = top.get("timeliness")) {
    detail::Reader r(*sec, "timeliness", warn);
    TimelinessSection s;
    if (const json* dates = r.get("dates")) {
      detail::Reader dr(*dates, "timeliness.dates", warn);
      CollectionDates d;
      d.start_attribute = dr.string_or("start_attribute");
      d.completion_attribute = dr.string_or("completion_attribute");
      d.start_years = dr.int_list("start_years");
      d.completion_years = dr.int_list("completion_years");
      s.dates = std::move(d);
    }
    s.period = r.string_or("period");
    s.first_publication_year = r.int_opt("first_publication_year");
    s.effort_distribution = r.string_or("effort_distribution");
    m.timeliness = std::move(s);
  }

  if (const json* sec = top.get("commercial_sensitivity")) {
    detail::Reader r(*sec, "commercial_sensitivity", warn);
    SensitivitySection s;
    s.anonymized_attributes = r.string_list("anonymized_attributes");
    s.notes = r.string_or("notes");
    m.commercial_sensitivity = std::move(s);
  }

  if (const json* sec = top.get("accessibility")) {
    detail::Reader r(*sec, "accessibility", warn);
    AccessibilitySection s;
    s.location = r.string_or("location");
    s.restricted = r.bool_opt("restricted");
    m.accessibility = std::move(s);
  }

  if (const json* sec = top.get("provenance")) {
    detail::Reader r(*sec, "provenance", warn);
    ProvenanceSection s;
    s.source_organizations = r.string_list("source_organizations");
    s.collecting_organization = r.string_or("collecting_organization");
    s.contact = r.string_or("contact");
    s.purpose = r.string_or("purpose");
    s.methodology = r.string_or("methodology");
    s.collection_method = r.string_or("collection_method");
    s.preprocessing = r.string_or("preprocessing");
    s.donors = r.string_list("donors");
    s.collection_date = r.string_or("collection_date");
    s.dataset_name = r.string_or("dataset_name");
    s.version = r.string_or("version");
    m.provenance = std::move(s);
    if (m.name.empty() || m.version.empty())
      throw ValidationError("manifest error: name and version must be non-empty "
                            "when provenance is declared");
  }

  return result;
}

inline ParseResult parse_manifest_file(const std::filesystem::path& path) {
  return parse_manifest(io::read_file(path));
}

inline std::string serialize_manifest(const TemplateManifest& m) {
  using detail::set_if;
  json j = json::object();
  set_if(j, "name", m.name);
  set_if(j, "version", m.version);
  if (!m.attributes.empty()) {
    json arr = json::array();
    for (const auto& a : m.attributes) {
      json d = json::object();
      d["name"] = a.name;
      if (a.kind) d["kind"] = to_string(*a.kind);
      if (a.role) d["role"] = to_string(*a.role);
      set_if(d, "unit", a.unit);
      set_if(d, "missing_markers", a.missing_markers);
      set_if(d, "date_format", a.date_format);
      set_if(d, "alternate_date_formats", a.alternate_date_formats);
      set_if(d, "measures", a.measures);
      arr.push_back(std::move(d));
    }
    j["attributes"] = std::move(arr);
  }
  if (m.noise) {
    json s = json::object();
    if (!m.noise->formulas.empty()) {
      json arr = json::array();
      for (const auto& f : m.noise->formulas) {
        json d = json::object();
        d["attribute"] = f.attribute;
        d["expression"] = f.expression;
        if (f.tolerance.relative || f.tolerance.absolute) {
          json t = json::object();
          set_if(t, "relative", f.tolerance.relative);
          set_if(t, "absolute", f.tolerance.absolute);
          d["tolerance"] = std::move(t);
        }
        arr.push_back(std::move(d));
      }
      s["formulas"] = std::move(arr);
    }
    set_if(s, "method", m.noise->method);
    set_if(s, "tool", m.noise->tool);
    if (!m.noise->pre_steps.empty()) {
      json arr = json::array();
      for (const auto& step : m.noise->pre_steps) {
        json d = json::object();
        d["action"] = step.action;
        set_if(d, "rule", step.rule);
        arr.push_back(std::move(d));
      }
      s["pre_steps"] = std::move(arr);
    }
    j["noise"] = std::move(s);
  }
  if (m.outliers) {
    json s = json::object();
    set_if(s, "method", m.outliers->method);
    set_if(s, "excluded_attributes", m.outliers->excluded_attributes);
    set_if(s, "known_percentages", m.outliers->known_percentages);
    set_if(s, "notes", m.outliers->notes);
    j["outliers"] = std::move(s);
  }
  if (m.inconsistency) {
    json s = json::object();
    set_if(s, "explanations", m.inconsistency->explanations);
    if (!m.inconsistency->ranges.empty()) {
      json r = json::object();
      for (const auto& [attr, range] : m.inconsistency->ranges)
        r[attr] = json{{"min", range.min}, {"max", range.max}};
      s["ranges"] = std::move(r);
    }
    if (m.inconsistency->summary_stats) {
      json ss = json::object();
      set_if(ss, "means", m.inconsistency->summary_stats->means);
      set_if(ss, "sds", m.inconsistency->summary_stats->sds);
      s["summary_stats"] = std::move(ss);
    }
    set_if(s, "notes", m.inconsistency->notes);
    j["inconsistency"] = std::move(s);
  }
  if (m.incompleteness) {
    json s = json::object();
    set_if(s, "markers", m.incompleteness->markers);
    set_if(s, "marker_semantics", m.incompleteness->marker_semantics);
    set_if(s, "affected_attributes", m.incompleteness->affected_attributes);
    set_if(s, "reasons", m.incompleteness->reasons);
    set_if(s, "notes", m.incompleteness->notes);
    j["incompleteness"] = std::move(s);
  }
  if (m.redundancy) {
    json s = json::object();
    set_if(s, "notes", m.redundancy->notes);
    j["redundancy"] = std::move(s);
  }
  if (m.amount_of_data) {
    json s = json::object();
    set_if(s, "expected_records", m.amount_of_data->expected_records);
    j["amount_of_data"] = std::move(s);
  }
  if (m.heterogeneity) {
    json s = json::object();
    set_if(s, "organization_count", m.heterogeneity->organization_count);
    set_if(s, "organizations", m.heterogeneity->organizations);
    set_if(s, "per_org_record_counts", m.heterogeneity->per_org_record_counts);
    set_if(s, "notes", m.heterogeneity->notes);
    j["heterogeneity"] = std::move(s);
  }
  if (m.timeliness) {
    json s = json::object();
    if (m.timeliness->dates) {
      json d = json::object();
      set_if(d, "start_attribute", m.timeliness->dates->start_attribute);
      set_if(d, "completion_attribute", m.timeliness->dates->completion_attribute);
      set_if(d, "start_years", m.timeliness->dates->start_years);
      set_if(d, "completion_years", m.timeliness->dates->completion_years);
      s["dates"] = std::move(d);
    }
    set_if(s, "period", m.timeliness->period);
    set_if(s, "first_publication_year", m.timeliness->first_publication_year);
    set_if(s, "effort_distribution", m.timeliness->effort_distribution);
    j["timeliness"] = std::move(s);
  }
  if (m.commercial_sensitivity) {
    json s = json::object();
    set_if(s, "anonymized_attributes",
           m.commercial_sensitivity->anonymized_attributes);
    set_if(s, "notes", m.commercial_sensitivity->notes);
    j["commercial_sensitivity"] = std::move(s);
  }
  if (m.accessibility) {
    json s = json::object();
    set_if(s, "location", m.accessibility->location);
    set_if(s, "restricted", m.accessibility->restricted);
    j["accessibility"] = std::move(s);
  }
  if (m.provenance) {
    json s = json::object();
    set_if(s, "source_organizations", m.provenance->source_organizations);
    set_if(s, "collecting_organization", m.provenance->collecting_organization);
    set_if(s, "contact", m.provenance->contact);
    set_if(s, "purpose", m.provenance->purpose);
    set_if(s, "methodology", m.provenance->methodology);
    set_if(s, "collection_method", m.provenance->collection_method);
    set_if(s, "preprocessing", m.provenance->preprocessing);
    set_if(s, "donors", m.provenance->donors);
    set_if(s, "collection_date", m.provenance->collection_date);
    set_if(s, "dataset_name", m.provenance->dataset_name);
    set_if(s, "version", m.provenance->version);
    j["provenance"] = std::move(s);
  }
  return j.dump(2) + "\n";
}

// 38 leaf parameters of the collection template count toward completeness;
// the effort-distribution series is excluded (no defined representation).
inline constexpr std::size_t completeness_denominator = 38;

inline double completeness(const TemplateManifest& m) {
  std::size_t populated = 0;
  auto str = [&](const std::string& s) { populated += s.empty() ? 0 : 1; };
  auto list = [&](const auto& v) { populated += v.empty() ? 0 : 1; };
  if (m.noise) {
    list(m.noise->formulas);
    str(m.noise->method);
    str(m.noise->tool);
  }
  if (m.outliers) {
    str(m.outliers->method);
    list(m.outliers->excluded_attributes);
    list(m.outliers->known_percentages);
    str(m.outliers->notes);
  }
  if (m.inconsistency) {
    list(m.inconsistency->explanations);
    list(m.inconsistency->ranges);
    if (m.inconsistency->summary_stats &&
        (!m.inconsistency->summary_stats->means.empty() ||
         !m.inconsistency->summary_stats->sds.empty()))
      ++populated;
    str(m.inconsistency->notes);
  }
  if (m.incompleteness) {
    list(m.incompleteness->markers);
    str(m.incompleteness->marker_semantics);
    list(m.incompleteness->affected_attributes);
    str(m.incompleteness->reasons);
    str(m.incompleteness->notes);
  }
  if (m.redundancy) str(m.redundancy->notes);
  if (m.amount_of_data && m.amount_of_data->expected_records) ++populated;
  if (m.heterogeneity) {
    if (m.heterogeneity->organization_count) ++populated;
    list(m.heterogeneity->organizations);
    list(m.heterogeneity->per_org_record_counts);
    str(m.heterogeneity->notes);
  }
  if (m.timeliness) {
    if (m.timeliness->dates && m.timeliness->dates->any()) ++populated;
    str(m.timeliness->period);
  }
  if (m.commercial_sensitivity) {
    list(m.commercial_sensitivity->anonymized_attributes);
    str(m.commercial_sensitivity->notes);
  }
  if (m.accessibility) str(m.accessibility->location);
  if (m.provenance) {
    list(m.provenance->source_organizations);
    str(m.provenance->collecting_organization);
    str(m.provenance->contact);
    str(m.provenance->purpose);
    str(m.provenance->methodology);
    str(m.provenance->collection_method);
    str(m.provenance->preprocessing);
    list(m.provenance->donors);
    str(m.provenance->collection_date);
    str(m.provenance->dataset_name);
    str(m.provenance->version);
  }
  return static_cast<double>(populated) /
         static_cast<double>(completeness_denominator);
}

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  double completeness = 0.0;
};

// Cross-checks a manifest against its dataset (when supplied): record-count
// drift, attribute-list drift, declared summary statistics vs recomputed,
// range violations. Findings are warnings; with no dataset there is nothing
// to drift against, so only the completeness fraction is reported.
inline ValidationReport validate_manifest(const TemplateManifest& m,
                                          const Dataset* ds = nullptr) {
  ValidationReport report;
  report.completeness = completeness(m);
  if (!ds) return report;

  auto drift = [&](const std::string& what) {
    report.warnings.push_back("possible version drift: " + what);
  };

  if (m.amount_of_data && m.amount_of_data->expected_records) {
    std::size_t declared = *m.amount_of_data->expected_records;
    if (declared != ds->records.size())
      drift("manifest declares " + std::to_string(declared) +
            " records, dataset has " + std::to_string(ds->records.size()));
  }

  std::vector<std::string> undeclared;
  for (const auto& spec : ds->attributes) {
    bool found = false;
    for (const auto& decl : m.attributes)
      if (decl.name == spec.name) found = true;
    if (!found) undeclared.push_back(spec.name);
  }
  if (!m.attributes.empty() && !undeclared.empty()) {
    std::string joined;
    for (const auto& n : undeclared) joined += (joined.empty() ? "" : ", ") + n;
    report.warnings.push_back("dataset attributes not declared in the manifest: " +
                              joined);
  }
  for (const auto& decl : m.attributes) {
    auto idx = ds->attribute_index(decl.name);
    if (!idx) {
      report.warnings.push_back("manifest declares attribute '" + decl.name +
                                "' which the dataset does not have");
      continue;
    }
    if (decl.kind && ds->attributes[*idx].kind != *decl.kind)
      report.warnings.push_back("attribute '" + decl.name + "' declared " +
                                to_string(*decl.kind) + " but parsed as " +
                                to_string(ds->attributes[*idx].kind));
  }

  if (m.inconsistency) {
    auto summaries = io::summarize_attributes(*ds);
    auto find = [&](const std::string& name) -> const io::AttributeSummary* {
      for (const auto& s : summaries)
        if (s.name == name) return &s;
      return nullptr;
    };
    if (m.inconsistency->summary_stats) {
      auto check = [&](const std::map<std::string, double>& declared,
                       bool is_mean, const char* what) {
        for (const auto& [attr, value] : declared) {
          const auto* s = find(attr);
          if (!s) {
            report.warnings.push_back("summary statistic declared for unknown "
                                      "attribute '" + attr + "'");
            continue;
          }
          std::optional<double> actual = is_mean ? s->mean : s->sd;
          if (!actual) {
            drift("declared " + std::string(what) + " for '" + attr +
                  "' but the column has no computable value");
            continue;
          }
          double tol = 1e-6 * std::max(1.0, std::abs(value));
          if (std::abs(*actual - value) > tol)
            drift("declared " + std::string(what) + " of '" + attr + "' is " +
                  format_number(value) + ", recomputed " + format_number(*actual));
        }
      };
      check(m.inconsistency->summary_stats->means, true, "mean");
      check(m.inconsistency->summary_stats->sds, false, "sd");
    }
    for (const auto& [attr, range] : m.inconsistency->ranges) {
      auto idx = ds->attribute_index(attr);
      if (!idx) {
        report.warnings.push_back("range declared for unknown attribute '" + attr +
                                  "'");
        continue;
      }
      std::size_t outside = 0;
      for (const auto& record : ds->records) {
        const Cell& cell = record[*idx];
        if (is_number(cell) &&
            (as_number(cell) < range.min || as_number(cell) > range.max))
          ++outside;
      }
      if (outside > 0)
        report.warnings.push_back("attribute '" + attr + "' has " +
                                  std::to_string(outside) +
                                  " value(s) outside the declared range [" +
                                  format_number(range.min) + ", " +
                                  format_number(range.max) + "]");
    }
  }
  return report;
}

// Attribute declarations that carry a kind become the parse-time schema
// (their date formats and markers must be known before cell building).
inline std::vector<AttributeSpec> parse_schema(const TemplateManifest& m) {
  std::vector<AttributeSpec> schema;
  for (const auto& decl : m.attributes) {
    if (!decl.kind) continue;
    AttributeSpec spec;
    spec.name = decl.name;
    spec.kind = *decl.kind;
    if (decl.role) spec.role = *decl.role;
    spec.unit = decl.unit;
    spec.missing_markers = decl.missing_markers;
    spec.date_format = decl.date_format;
    spec.alternate_date_formats = decl.alternate_date_formats;
    spec.measures = decl.measures;
    schema.push_back(std::move(spec));
  }
  return schema;
}

// Applies declarations to an already-parsed dataset (the ARFF path, or
// kind-less declarations): roles, units, measures tags, marker policy.
inline Dataset apply_declarations(const Dataset& ds, const TemplateManifest& m,
                                  std::vector<std::string>* warnings = nullptr) {
  Dataset out = ds;
  io::MissingPolicy policy;
  for (const auto& decl : m.attributes) {
    auto idx = out.attribute_index(decl.name);
    if (!idx) {
      if (warnings)
        warnings->push_back("manifest declares attribute '" + decl.name +
                            "' which the dataset does not have");
      continue;
    }
    AttributeSpec& spec = out.attributes[*idx];
    if (decl.role) spec.role = *decl.role;
    if (!decl.unit.empty()) spec.unit = decl.unit;
    if (!decl.measures.empty()) spec.measures = decl.measures;
    if (!decl.date_format.empty() && spec.date_format.empty())
      spec.date_format = decl.date_format;
    if (!decl.alternate_date_formats.empty())
      spec.alternate_date_formats = decl.alternate_date_formats;
    if (!decl.missing_markers.empty()) {
      spec.missing_markers = decl.missing_markers;
      policy.rules.emplace_back(decl.name, decl.missing_markers);
    }
  }
  if (!policy.rules.empty()) out = io::apply_missing_policy(out, policy).dataset;
  return out;
}

// Runs the declared noise pre-steps in order. `keep` retains matching
// records, `drop` removes them, `drop_missing_target` removes records with
// a missing target cell.
inline Dataset apply_pre_steps(const Dataset& ds, const TemplateManifest& m,
                               const std::string& target,
                               std::vector<std::string>* log = nullptr) {
  if (!m.noise || m.noise->pre_steps.empty()) return ds;
  Dataset current = ds;
  for (const auto& step : m.noise->pre_steps) {
    if (step.action == "drop_missing_target") {
      if (target.empty())
        throw ConfigError("pre-step drop_missing_target needs a target attribute");
      auto result =
          io::filter_records(current, "`" + target + "` is not missing", true);
      if (log && result.dropped > 0)
        log->push_back("pre-step drop_missing_target removed " +
                       std::to_string(result.dropped) + " record(s)");
      current = std::move(result.dataset);
      continue;
    }
    bool keep = step.action == "keep";
    auto result = io::filter_records(current, step.rule, keep);
    if (log && result.dropped > 0)
      log->push_back("pre-step " + step.action + " '" + step.rule + "' removed " +
                     std::to_string(result.dropped) + " record(s)");
    current = std::move(result.dataset);
  }
  return current;
}

}  // namespace dqbench::manifest
