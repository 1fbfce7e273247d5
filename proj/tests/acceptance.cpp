// Acceptance gate over the bundled reference corpus. Each numbered check
// prints exactly one PASS/FAIL line; the exit code is nonzero when any
// check fails. Checks that need no fixtures still run when loading fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dqbench/corpus.hpp"
#include "dqbench/tree.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace dqbench;

namespace {

struct Outcome {
  int id = 0;
  bool pass = false;
  std::string note;
};

struct Fixture {
  std::string name;
  Dataset ds;  // declarations already applied
  manifest::TemplateManifest m;
};

// Reference assessment values for the bundled corpus fixtures.
struct Expected {
  double outlier_pct = 0.0;  // Effort attribute, boxplot fences
  double noise_pct = 0.0;    // default classifier settings
  bool missing = false;      // any missing cells
  std::string era;           // timeliness verdict
};

const std::map<std::string, Expected>& expected_values() {
  static const std::map<std::string, Expected> table = {
      {"albrecht", {8.0, 25.0, true, "1974-1979"}},
      {"china", {11.0, 6.6, true, "2011[P]"}},
      {"cocomo81", {14.0, 6.3, false, "1981[P]"}},
      {"desharnais", {9.0, 18.2, true, "1982-1988"}},
      {"finnish", {3.0, 50.0, false, "1997[P]"}},
      {"kemerer", {7.0, 20.0, false, "1981-1985"}},
      {"kitchenham", {8.0, 12.5, true, "1994-1998"}},
      {"maxwell", {8.0, 12.9, false, "1993"}},
      {"miyazaki94", {13.0, 2.1, false, "1994[P]"}},
      {"nasa93", {11.0, 9.7, false, "1971-1987"}},
      {"sdr", {17.0, 25.0, false, "2000s"}},
      {"telecom", {6.0, 27.8, false, "1997[P]"}},
  };
  return table;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string fmt(double v, int digits = 2) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << v;
  return out.str();
}

std::string target_of(const Dataset& ds) {
  for (const auto& spec : ds.attributes)
    if (spec.role == AttributeRole::target) return spec.name;
  return "";
}

accuracy::QuartileMethod method_of(const manifest::TemplateManifest& m) {
  if (m.outliers && m.outliers->method == "tukey_hinges")
    return accuracy::QuartileMethod::tukey_hinges;
  return accuracy::QuartileMethod::linear_interpolation;
}

const accuracy::AttributeMissing* find_attribute(
    const accuracy::IncompletenessSummary& summary, const std::string& name) {
  for (const auto& pa : summary.per_attribute)
    if (pa.name == name) return &pa;
  return nullptr;
}

Dataset single_column(const std::vector<double>& values) {
  Dataset ds;
  ds.name = "probe";
  AttributeSpec spec;
  spec.name = "x";
  spec.kind = AttributeKind::numeric;
  spec.role = AttributeRole::feature;
  ds.attributes.push_back(spec);
  for (double v : values) ds.records.push_back({Cell{v}});
  return ds;
}

}  // namespace

int main() {
  std::vector<Outcome> outcomes;
  auto record = [&](int id, bool pass, const std::string& note) {
    outcomes.push_back({id, pass, note});
  };

  const std::filesystem::path data_dir = DQBENCH_DATA_DIR;
  corpus::CorpusConfig config;
  std::vector<Fixture> fixtures;
  std::string load_error;
  try {
    config = corpus::load_corpus_config(data_dir / "corpus.json");
    for (const auto& entry : config.entries) {
      Fixture f;
      f.name = entry.name;
      auto parsed = manifest::parse_manifest_file(entry.manifest);
      f.m = std::move(parsed.manifest);
      Dataset raw = corpus::load_dataset(entry.data, f.m);
      f.ds = manifest::apply_declarations(raw, f.m);
      fixtures.push_back(std::move(f));
    }
    if (fixtures.size() != expected_values().size())
      load_error = "corpus lists " + std::to_string(fixtures.size()) +
                   " datasets, expected " +
                   std::to_string(expected_values().size());
    for (const auto& f : fixtures)
      if (!load_error.empty() || !expected_values().count(f.name))
        load_error = load_error.empty() ? "unexpected dataset '" + f.name + "'"
                                        : load_error;
  } catch (const std::exception& e) {
    load_error = e.what();
  }
  auto corpus_unusable = [&](int id) {
    record(id, false, "corpus fixtures unusable: " + load_error);
  };

  // 1. Effort outlier percentages against the reference values, within
  //    two percentage points, in under a second for the whole corpus.
  if (!load_error.empty()) {
    corpus_unusable(1);
  } else {
    auto start = std::chrono::steady_clock::now();
    int hits = 0;
    std::string misses;
    for (const auto& f : fixtures) {
      double want = expected_values().at(f.name).outlier_pct;
      std::optional<accuracy::OutlierSummary> summary;
      try {
        summary = accuracy::detect_outliers(f.ds, target_of(f.ds), method_of(f.m));
      } catch (const Error&) {
      }
      double got = summary ? summary->outlier_percent() : -1.0;
      if (summary && std::abs(got - want) <= 2.0) {
        ++hits;
      } else {
        misses += " " + f.name + "=" + fmt(got, 1) + "(want " + fmt(want, 1) + ")";
      }
    }
    double secs = seconds_since(start);
    bool pass = hits == 12 && secs < 1.0;
    record(1, pass,
           std::to_string(hits) + "/12 Effort outlier percentages within 2pp in " +
               fmt(secs) + "s" + (misses.empty() ? "" : ";" + misses));
  }

  // 2. Default-settings noise within ten percentage points for at least
  //    eight datasets, negative rank correlation between record count and
  //    noise, all inside ten seconds.
  if (!load_error.empty()) {
    corpus_unusable(2);
  } else {
    auto start = std::chrono::steady_clock::now();
    int hits = 0;
    std::vector<double> sizes, noise_pcts;
    std::string detail;
    for (const auto& f : fixtures) {
      double want = expected_values().at(f.name).noise_pct;
      try {
        Dataset cleaned = manifest::apply_pre_steps(f.ds, f.m, target_of(f.ds));
        auto result =
            classifier::misclassification_rate(cleaned, target_of(f.ds), {});
        sizes.push_back(static_cast<double>(f.ds.records.size()));
        noise_pcts.push_back(result.noisy_percent);
        if (std::abs(result.noisy_percent - want) <= 10.0)
          ++hits;
        else
          detail += " " + f.name + "=" + fmt(result.noisy_percent, 1) + "(want " +
                    fmt(want, 1) + ")";
      } catch (const Error& e) {
        detail += " " + f.name + ": " + e.what();
      }
    }
    double secs = seconds_since(start);
    auto rho = corpus::spearman(sizes, noise_pcts);
    bool pass = hits >= 8 && rho.has_value() && *rho < 0.0 && secs < 10.0;
    record(2, pass,
           std::to_string(hits) + "/12 noise percentages within 10pp, "
           "spearman(records, noise) = " +
               (rho ? fmt(*rho) : std::string("n/a")) + ", " + fmt(secs) + "s" +
               (detail.empty() ? "" : ";" + detail));
  }

  // 3. Missing-data flags for every dataset, plus the documented spot
  //    percentages for Albrecht, Desharnais, and Kitchenham.
  if (!load_error.empty()) {
    corpus_unusable(3);
  } else {
    std::string detail;
    int flag_hits = 0;
    std::map<std::string, accuracy::IncompletenessSummary> summaries;
    for (const auto& f : fixtures) {
      auto summary = accuracy::assess_incompleteness(f.ds);
      bool want = expected_values().at(f.name).missing;
      if (summary.any_missing() == want)
        ++flag_hits;
      else
        detail += " " + f.name + (want ? " should have" : " should not have") +
                  " missing cells";
      summaries.emplace(f.name, std::move(summary));
    }
    bool spots = true;
    auto spot_pct = [&](const std::string& ds_name, const std::string& attr,
                        double want, double tol) {
      const auto* pa = find_attribute(summaries.at(ds_name), attr);
      bool ok = pa && std::abs(pa->percent - want) <= tol;
      if (!ok)
        detail += " " + ds_name + "." + attr + "=" +
                  (pa ? fmt(pa->percent, 1) : std::string("absent")) + "(want " +
                  fmt(want, 1) + ")";
      spots = spots && ok;
    };
    spot_pct("albrecht", "Inquiry", 20.8, 0.5);
    spot_pct("kitchenham", "Project.Type", 10.0, 1.0);
    spot_pct("kitchenham", "Estimated.completion.date", 2.0, 1.0);
    if (summaries.at("desharnais").records_with_missing != 4) {
      spots = false;
      detail += " desharnais has " +
                std::to_string(summaries.at("desharnais").records_with_missing) +
                " records with missing cells (want 4)";
    }
    record(3, flag_hits == 12 && spots,
           std::to_string(flag_hits) +
               "/12 missing-data flags correct, spot percentages " +
               (spots ? "correct" : "off") + (detail.empty() ? "" : ";" + detail));
  }

  // 4. No duplicate records in any fixture, and agreement with the
  //    quadratic duplicate oracle over 1,000 randomized datasets with
  //    planted copies.
  {
    bool clean = true;
    std::string detail;
    if (!load_error.empty()) {
      clean = false;
      detail = " corpus fixtures unusable: " + load_error;
    } else {
      for (const auto& f : fixtures) {
        auto groups = accuracy::detect_duplicates(f.ds);
        if (!groups.empty()) {
          clean = false;
          detail += " " + f.name + " has " + std::to_string(groups.size()) +
                    " duplicate group(s)";
        }
      }
    }
    oracles::DatasetGen gen(424242);
    int agreements = 0;
    const int rounds = 1000;
    for (int round = 0; round < rounds; ++round) {
      std::size_t records = 2 + gen.index(30);
      Dataset ds = gen.numeric(records, 1 + gen.index(4), 2, false);
      std::size_t plants = gen.index(4);
      for (std::size_t p = 0; p < plants; ++p)
        ds.records[gen.index(records)] = ds.records[gen.index(records)];
      auto got = accuracy::detect_duplicates(ds);
      auto want = oracles::duplicate_groups(ds);
      bool same = got.size() == want.size();
      for (std::size_t g = 0; same && g < got.size(); ++g)
        same = got[g].records == want[g];
      agreements += same;
    }
    record(4, clean && agreements == rounds,
           std::string(clean ? "no duplicates in the corpus" : "duplicates found") +
               ", oracle agreement " + std::to_string(agreements) + "/" +
               std::to_string(rounds) + (detail.empty() ? "" : ";" + detail));
  }

  // 5. Rating bands over the boundary totals, and rejection whenever a
  //    mandatory concept is missing.
  {
    const std::pair<double, std::string> bands[] = {
        {39, "X"}, {40, "D"}, {49, "D"}, {50, "C"}, {59, "C"},
        {60, "B"}, {69, "B"}, {70, "A"}, {79, "A"}, {80, "AA"},
        {89, "AA"}, {90, "AAA"}, {100, "AAA"}};
    int hits = 0;
    std::string detail;
    for (const auto& [total, want] : bands) {
      std::string got = provenance::fisma_rating(total, false);
      if (got == want)
        ++hits;
      else
        detail += " " + fmt(total, 0) + "->" + got + "(want " + want + ")";
    }
    bool reject = provenance::fisma_rating(100.0, true) == "X" &&
                  provenance::fisma_rating(55.0, true) == "X";
    record(5, hits == 13 && reject,
           std::to_string(hits) + "/13 rating bands correct, mandatory-missing "
           "rejection " +
               (reject ? "holds" : "broken") + (detail.empty() ? "" : ";" + detail));
  }

  // 6. Era strings, verbatim, for every fixture.
  if (!load_error.empty()) {
    corpus_unusable(6);
  } else {
    int hits = 0;
    std::string detail;
    for (const auto& f : fixtures) {
      const std::string& want = expected_values().at(f.name).era;
      std::string got;
      try {
        got = relevance::assess_timeliness(f.m, &f.ds).era;
      } catch (const Error& e) {
        got = std::string("error: ") + e.what();
      }
      if (got == want)
        ++hits;
      else
        detail += " " + f.name + "='" + got + "'(want '" + want + "')";
    }
    record(6, hits == 12,
           std::to_string(hits) + "/12 era strings verbatim" +
               (detail.empty() ? "" : ";" + detail));
  }

  // 7. Chosen root splits equal the exhaustive gain-ratio search on 500
  //    random small datasets, with entropy and gain invariants intact.
  {
    oracles::DatasetGen gen(1729);
    int agreements = 0;
    bool invariants = true;
    const int rounds = 500;
    for (int round = 0; round < rounds; ++round) {
      std::size_t records = 4 + gen.index(12);  // at most 15
      std::size_t classes = 2 + gen.index(2);
      std::size_t min_leaf = 1 + gen.index(2);
      Dataset ds = gen.numeric(records, 1 + gen.index(3), classes, false);
      std::vector<std::size_t> labels;
      for (const auto& rec : ds.records)
        labels.push_back(static_cast<std::size_t>(as_number(rec.back())));

      classifier::TreeParams params;
      params.min_leaf = min_leaf;
      params.prune_confidence = 0.0;
      classifier::DecisionTree tree = classifier::DecisionTree::build(
          ds, oracles::all_feature_attrs(ds), labels, classes, params);

      std::vector<std::size_t> counts(classes, 0);
      for (auto y : labels) ++counts[y];
      bool pure =
          *std::max_element(counts.begin(), counts.end()) == labels.size();
      std::optional<oracles::OracleSplit> expected;
      if (!pure)
        expected = oracles::oracle_root_split(ds, labels, classes, min_leaf);
      bool same;
      if (!expected) {
        same = tree.root().leaf;
      } else {
        same = !tree.root().leaf && tree.root().feature == expected->feature &&
               tree.root().threshold == expected->threshold;
        double parent = oracles::entropy(counts);
        invariants = invariants && expected->gain >= -1e-12 &&
                     expected->gain <= parent + 1e-9 && expected->ratio >= -1e-12;
      }
      agreements += same;
    }
    record(7, agreements == rounds && invariants,
           "root split oracle agreement " + std::to_string(agreements) + "/" +
               std::to_string(rounds) + ", entropy/gain invariants " +
               (invariants ? "hold" : "violated"));
  }

  // 8. Quartiles against the sort-and-interpolate reference on 1,000
  //    random lists, and the frozen five-value example.
  {
    oracles::DatasetGen gen(8128);
    int agreements = 0;
    const int rounds = 1000;
    for (int round = 0; round < rounds; ++round) {
      std::size_t n = 4 + gen.index(40);
      std::vector<double> values;
      for (std::size_t i = 0; i < n; ++i)
        values.push_back(std::floor(gen.uniform(-200.0, 200.0)) / 4.0);
      auto summary = accuracy::detect_outliers(single_column(values), "x");
      auto fences = oracles::boxplot_fences(values);
      bool same = summary && std::abs(summary->q1 - fences.q1) <= 1e-12 &&
                  std::abs(summary->q3 - fences.q3) <= 1e-12 &&
                  std::abs(summary->lower_fence - fences.lower) <= 1e-12 &&
                  std::abs(summary->upper_fence - fences.upper) <= 1e-12;
      agreements += same;
    }
    auto frozen = accuracy::detect_outliers(single_column({1, 2, 3, 4, 100}), "x");
    bool frozen_ok = frozen && frozen->q1 == 2.0 && frozen->q3 == 4.0 &&
                     frozen->lower_fence == -1.0 && frozen->upper_fence == 7.0 &&
                     frozen->outlier_indices == std::vector<std::size_t>{4};
    record(8, agreements == rounds && frozen_ok,
           "quartile oracle agreement " + std::to_string(agreements) + "/" +
               std::to_string(rounds) + ", five-value example " +
               (frozen_ok ? "exact" : "wrong"));
  }

  // 9. Two complete corpus runs produce byte-identical outputs.
  if (!load_error.empty()) {
    corpus_unusable(9);
  } else {
    auto first = corpus::run_corpus(config);
    auto second = corpus::run_corpus(config);
    bool same_json = first.matrix_json == second.matrix_json;
    bool same_csv = first.matrix_csv == second.matrix_csv;
    record(9, same_json && same_csv,
           std::string("repeated corpus runs ") +
               (same_json && same_csv ? "byte-identical"
                                      : "diverged (json " +
                                            std::string(same_json ? "ok" : "differs") +
                                            ", csv " +
                                            std::string(same_csv ? "ok" : "differs") +
                                            ")"));
  }

  // 10. Serialize-parse identity over 500 randomized manifests, and drift
  //     warnings that fire exactly when declared statistics disagree.
  {
    oracles::DatasetGen gen(31337);
    int round_trips = 0;
    const int rounds = 500;
    for (int round = 0; round < rounds; ++round) {
      auto m = generators::random_manifest(gen);
      std::string text = manifest::serialize_manifest(m);
      auto back = manifest::parse_manifest(text);
      bool ok = back.warnings.empty() && back.manifest == m &&
                manifest::serialize_manifest(back.manifest) == text;
      round_trips += ok;
    }

    auto ds = io::parse_csv("a\n1\n2\n3\n", "probe");
    auto drift_warnings = [&](double declared_mean) {
      manifest::TemplateManifest m;
      m.inconsistency = manifest::InconsistencySection{};
      m.inconsistency->summary_stats = manifest::SummaryStats{};
      m.inconsistency->summary_stats->means["a"] = declared_mean;
      return manifest::validate_manifest(m, &ds).warnings;
    };
    bool quiet_exact = drift_warnings(2.0).empty();
    bool quiet_close = drift_warnings(2.0 + 5e-8).empty();
    bool loud_off = !drift_warnings(2.1).empty();

    manifest::TemplateManifest counted;
    counted.amount_of_data = manifest::AmountSection{std::size_t{3}};
    bool quiet_count = manifest::validate_manifest(counted, &ds).warnings.empty();
    counted.amount_of_data->expected_records = 5;
    bool loud_count = !manifest::validate_manifest(counted, &ds).warnings.empty();

    bool drift_iff = quiet_exact && quiet_close && loud_off && quiet_count &&
                     loud_count;
    record(10, round_trips == rounds && drift_iff,
           "manifest round trips " + std::to_string(round_trips) + "/" +
               std::to_string(rounds) + ", drift warnings " +
               (drift_iff ? "fire exactly when expected" : "misfire"));
  }

  bool all_pass = true;
  for (const auto& o : outcomes) {
    all_pass = all_pass && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << o.id << " — "
              << o.note << "\n";
  }
  return all_pass ? 0 : 1;
}
