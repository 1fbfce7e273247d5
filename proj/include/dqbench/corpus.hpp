#pragma once

#include <cctype>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dqbench/core.hpp"
#include "dqbench/dataset_io.hpp"
#include "dqbench/manifest.hpp"
#include "dqbench/report.hpp"

namespace dqbench::corpus {

using json = nlohmann::ordered_json;

// Reads a data file through its manifest: CSV columns get their declared
// kinds, markers, and date formats at parse time; ARFF brings its own
// typing and the declarations are applied afterwards.
inline Dataset load_dataset(const std::filesystem::path& data_path,
                            const manifest::TemplateManifest& m,
                            std::vector<std::string>* warnings = nullptr) {
  std::string ext = data_path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".arff") return io::parse_arff_file(data_path, warnings);
  return io::parse_csv_file(data_path, manifest::parse_schema(m), warnings);
}

struct CorpusEntry {
  std::string name;
  std::filesystem::path data;
  std::filesystem::path manifest;
  std::string target;  // overrides the declared target role
};

struct CorpusConfig {
  std::vector<CorpusEntry> entries;
  report::AssessParams defaults;
  bool seed_declared = false;  // config carried an explicit seed
};

inline CorpusConfig parse_corpus_config(const std::string& text,
                                        const std::filesystem::path& base_dir) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded() || !root.is_object())
    throw ConfigError("corpus config must be a JSON object");

  CorpusConfig config;
  if (root.contains("defaults")) {
    const json& d = root["defaults"];
    if (!d.is_object()) throw ConfigError("corpus defaults must be an object");
    auto count = [&](const char* key, std::size_t& into) {
      if (!d.contains(key)) return;
      if (!d[key].is_number_integer() || d[key].get<double>() < 0)
        throw ConfigError(std::string("corpus default '") + key +
                          "' must be a non-negative integer");
      into = d[key].get<std::size_t>();
    };
    count("folds", config.defaults.noise.folds);
    count("classes", config.defaults.noise.class_count);
    count("min_leaf", config.defaults.noise.min_leaf);
    if (d.contains("seed")) {
      if (!d["seed"].is_number_integer() || d["seed"].get<double>() < 0)
        throw ConfigError("corpus default 'seed' must be a non-negative integer");
      config.defaults.noise.seed = d["seed"].get<std::uint64_t>();
      config.seed_declared = true;
    }
    if (d.contains("prune_confidence")) {
      if (!d["prune_confidence"].is_number())
        throw ConfigError("corpus default 'prune_confidence' must be a number");
      config.defaults.noise.prune_confidence = d["prune_confidence"].get<double>();
    }
    if (d.contains("discretization")) {
      std::string v = d["discretization"].is_string()
                          ? d["discretization"].get<std::string>()
                          : "";
      if (v != "equal_frequency" && v != "equal_width")
        throw ConfigError(
            "corpus default 'discretization' must be equal_frequency or "
            "equal_width");
      config.defaults.noise.equal_width = v == "equal_width";
    }
    if (d.contains("quartile_method")) {
      std::string v = d["quartile_method"].is_string()
                          ? d["quartile_method"].get<std::string>()
                          : "";
      if (v == "linear_interpolation")
        config.defaults.quartile_method =
            accuracy::QuartileMethod::linear_interpolation;
      else if (v == "tukey_hinges")
        config.defaults.quartile_method = accuracy::QuartileMethod::tukey_hinges;
      else
        throw ConfigError(
            "corpus default 'quartile_method' must be linear_interpolation or "
            "tukey_hinges");
    }
  }

  if (!root.contains("entries") || !root["entries"].is_array() ||
      root["entries"].empty())
    throw ConfigError("corpus config needs a non-empty entries array");
  for (const json& e : root["entries"]) {
    if (!e.is_object() || !e.contains("data") || !e["data"].is_string() ||
        !e.contains("manifest") || !e["manifest"].is_string())
      throw ConfigError("corpus entries need data and manifest paths");
    CorpusEntry entry;
    entry.data = base_dir / e["data"].get<std::string>();
    entry.manifest = base_dir / e["manifest"].get<std::string>();
    if (e.contains("name")) {
      if (!e["name"].is_string())
        throw ConfigError("corpus entry name must be a string");
      entry.name = e["name"].get<std::string>();
    } else {
      entry.name = entry.data.stem().string();
    }
    if (e.contains("target")) {
      if (!e["target"].is_string())
        throw ConfigError("corpus entry target must be a string");
      entry.target = e["target"].get<std::string>();
    }
    config.entries.push_back(std::move(entry));
  }
  return config;
}

inline CorpusConfig load_corpus_config(const std::filesystem::path& path) {
  return parse_corpus_config(io::read_file(path), path.parent_path());
}

// --- rank correlation ----------------------------------------------------

namespace detail {

inline std::vector<double> average_ranks(const std::vector<double>& values) {
  std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace detail

// Spearman rank correlation with average ranks for ties. Fewer than two
// pairs, or a constant series, has no defined correlation.
inline std::optional<double> spearman(const std::vector<double>& x,
                                      const std::vector<double>& y) {
  invariant(x.size() == y.size(), "spearman input sizes");
  std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  auto rx = detail::average_ranks(x);
  auto ry = detail::average_ranks(y);
  double mean = (static_cast<double>(n) + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = rx[i] - mean;
    double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

// --- the corpus runner ----------------------------------------------------

struct CorpusEntryResult {
  std::string name;
  bool ok = false;
  report::QualityReport report;  // valid when ok
  std::string error;             // set when not ok
};

struct CorpusResult {
  std::vector<CorpusEntryResult> entries;  // config order
  std::optional<double> spearman_records_noise;
  json matrix;             // the machine-readable matrix document
  std::string matrix_json; // canonical text of `matrix`
  std::string matrix_csv;  // one summary row per dataset
};

// One dataset failing must not take the whole corpus down: its error is
// recorded and the run continues. Output depends only on the inputs, the
// parameters, and the seed, so repeated runs are byte-identical.
inline CorpusResult run_corpus(const CorpusConfig& config) {
  CorpusResult result;

  for (const auto& entry : config.entries) {
    CorpusEntryResult er;
    er.name = entry.name;
    try {
      auto parsed = manifest::parse_manifest_file(entry.manifest);
      std::vector<std::string> warnings = std::move(parsed.warnings);
      Dataset ds = load_dataset(entry.data, parsed.manifest, &warnings);
      report::AssessParams params = config.defaults;
      if (!entry.target.empty()) params.target = entry.target;
      er.report = report::assess(ds, parsed.manifest, params);
      er.report.dataset_name = entry.name;
      er.report.warnings.insert(er.report.warnings.begin(), warnings.begin(),
                                warnings.end());
      er.ok = true;
    } catch (const Error& e) {
      er.error = e.what();
    }
    result.entries.push_back(std::move(er));
  }

  std::vector<double> sizes, noise;
  for (const auto& er : result.entries) {
    if (!er.ok || !er.report.noise.ok()) continue;
    sizes.push_back(static_cast<double>(er.report.records));
    noise.push_back(er.report.noise->noisy_percent);
  }
  result.spearman_records_noise = spearman(sizes, noise);

  json matrix = json::object();
  matrix["tool"] = {{"name", "dqbench"}, {"version", version}};
  matrix["parameters"] = {
      {"folds", config.defaults.noise.folds},
      {"classes", config.defaults.noise.class_count},
      {"seed", config.defaults.noise.seed},
      {"min_leaf", config.defaults.noise.min_leaf},
      {"prune_confidence", config.defaults.noise.prune_confidence},
      {"discretization", config.defaults.noise.equal_width ? "equal_width"
                                                           : "equal_frequency"}};
  matrix["columns"] = report::summary_columns();
  json rows = json::array();
  json errors = json::array();
  for (const auto& er : result.entries) {
    if (er.ok) {
      json row = json::object();
      auto cells = report::summary_cells(er.report);
      const auto& columns = report::summary_columns();
      for (std::size_t i = 0; i < columns.size(); ++i) row[columns[i]] = cells[i];
      rows.push_back(std::move(row));
    } else {
      rows.push_back(json{{"Dataset", er.name}, {"error", er.error}});
      errors.push_back(json{{"dataset", er.name}, {"message", er.error}});
    }
  }
  matrix["rows"] = std::move(rows);
  matrix["errors"] = std::move(errors);
  if (result.spearman_records_noise)
    matrix["spearman_records_vs_noise"] = *result.spearman_records_noise;
  else
    matrix["spearman_records_vs_noise"] = "n/a";
  result.matrix = std::move(matrix);
  result.matrix_json = result.matrix.dump(2) + "\n";

  std::string csv_text = report::csv_header_row();
  for (const auto& er : result.entries) {
    if (er.ok) {
      csv_text += report::csv_row(er.report);
    } else {
      std::string row;
      csv::write_field(row, er.name, false);
      for (std::size_t i = 1; i < report::summary_columns().size(); ++i)
        row += ",error";
      csv_text += row + "\n";
    }
  }
  result.matrix_csv = std::move(csv_text);
  return result;
}

}  // namespace dqbench::corpus
