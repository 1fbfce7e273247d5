#include <charconv>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <dqbench.hpp>

namespace {

using namespace dqbench;

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("DQBENCH_SEED");
  if (!raw || !*raw) return std::nullopt;
  std::uint64_t value = 0;
  const char* end = raw + std::string_view(raw).size();
  auto [ptr, ec] = std::from_chars(raw, end, value);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("DQBENCH_SEED must be a non-negative integer, got '" +
                      std::string(raw) + "'");
  return value;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    io::write_file(out_path, text);
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

struct AssessOptions {
  std::string data;
  std::string manifest_path;
  std::string target;
  std::size_t folds = 5;
  std::size_t classes = 4;
  std::uint64_t seed = 42;
  bool seed_given = false;
  std::size_t min_leaf = 2;
  double prune_confidence = 0.25;
  std::string discretization = "equal_frequency";
  std::string quartiles = "linear_interpolation";
  std::string format = "json";
  std::string out;
};

int run_assess(const AssessOptions& opts) {
  auto parsed = manifest::parse_manifest_file(opts.manifest_path);
  print_warnings(parsed.warnings);

  std::vector<std::string> load_warnings;
  Dataset ds = corpus::load_dataset(opts.data, parsed.manifest, &load_warnings);
  print_warnings(load_warnings);

  report::AssessParams params;
  params.target = opts.target;
  params.noise.folds = opts.folds;
  params.noise.class_count = opts.classes;
  params.noise.min_leaf = opts.min_leaf;
  params.noise.prune_confidence = opts.prune_confidence;
  params.noise.equal_width = opts.discretization == "equal_width";
  params.noise.seed = opts.seed;
  if (!opts.seed_given)
    if (auto env = seed_from_env()) params.noise.seed = *env;
  params.quartile_method = opts.quartiles == "tukey_hinges"
                               ? accuracy::QuartileMethod::tukey_hinges
                               : accuracy::QuartileMethod::linear_interpolation;

  auto rep = report::assess(ds, parsed.manifest, params);
  emit(opts.format == "markdown" ? report::render_markdown(rep)
                                 : report::render_json_text(rep),
       opts.out);
  return 0;
}

struct ValidateOptions {
  std::string manifest_path;
  std::string data;
};

int run_validate(const ValidateOptions& opts) {
  auto parsed = manifest::parse_manifest_file(opts.manifest_path);
  print_warnings(parsed.warnings);

  manifest::ValidationReport report;
  if (!opts.data.empty()) {
    std::vector<std::string> load_warnings;
    Dataset ds =
        corpus::load_dataset(opts.data, parsed.manifest, &load_warnings);
    print_warnings(load_warnings);
    report = manifest::validate_manifest(parsed.manifest, &ds);
  } else {
    report = manifest::validate_manifest(parsed.manifest);
  }

  for (const auto& e : report.errors) std::cout << "error: " << e << "\n";
  for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
  std::size_t populated = static_cast<std::size_t>(
      report.completeness * manifest::completeness_denominator + 0.5);
  std::cout << "completeness: " << format_fixed(100.0 * report.completeness, 1)
            << "% (" << populated << " of " << manifest::completeness_denominator
            << " template parameters populated)\n";
  return report.errors.empty() ? 0 : 1;
}

struct FismaOptions {
  std::string manifest_path;
  std::string rubric_path;
  std::string format = "text";
};

int run_fisma(const FismaOptions& opts) {
  auto parsed = manifest::parse_manifest_file(opts.manifest_path);
  print_warnings(parsed.warnings);

  provenance::Rubric rubric = opts.rubric_path.empty()
                                  ? provenance::default_rubric()
                                  : provenance::parse_rubric(
                                        io::read_file(opts.rubric_path));
  auto score = provenance::fisma_score(parsed.manifest, nullptr, rubric);

  if (opts.format == "json") {
    nlohmann::ordered_json j;
    j["total"] = score.total;
    j["rating"] = score.rating;
    j["mandatory_missing"] = score.mandatory_missing;
    nlohmann::ordered_json items = nlohmann::ordered_json::array();
    for (const auto& item : score.items)
      items.push_back({{"measures", item.measures},
                       {"points_possible", item.points_possible},
                       {"points_awarded", item.points_awarded},
                       {"mandatory", item.mandatory},
                       {"covered", item.covered},
                       {"evidence", item.evidence}});
    j["items"] = std::move(items);
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  for (const auto& item : score.items)
    std::cout << item.measures << ": " << format_number(item.points_awarded)
              << "/" << format_number(item.points_possible)
              << (item.mandatory ? " (mandatory)" : "") << " — " << item.evidence
              << "\n";
  std::cout << "total: " << format_number(score.total) << " of 100, rating "
            << score.rating << "\n";
  return 0;
}

struct CorpusOptions {
  std::string config_path;
  std::string out_dir;
  std::string matrix_csv;
};

int run_corpus_cmd(const CorpusOptions& opts) {
  auto config = corpus::load_corpus_config(opts.config_path);
  if (!config.seed_declared)
    if (auto env = seed_from_env()) config.defaults.noise.seed = *env;

  auto result = corpus::run_corpus(config);
  for (const auto& entry : result.entries)
    if (!entry.ok)
      std::cerr << "error: " << entry.name << ": " << entry.error << "\n";

  if (!opts.out_dir.empty()) {
    std::filesystem::create_directories(opts.out_dir);
    for (const auto& entry : result.entries)
      if (entry.ok)
        io::write_file(std::filesystem::path(opts.out_dir) /
                           (entry.name + ".json"),
                       report::render_json_text(entry.report));
    io::write_file(std::filesystem::path(opts.out_dir) / "matrix.json",
                   result.matrix_json);
  }
  if (!opts.matrix_csv.empty()) io::write_file(opts.matrix_csv, result.matrix_csv);
  if (opts.out_dir.empty() && opts.matrix_csv.empty())
    std::cout << result.matrix_json;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"data quality benchmarking for effort-estimation datasets"};
  app.set_version_flag("--version", std::string("dqbench ") + dqbench::version);
  app.require_subcommand(1);

  AssessOptions assess_opts;
  auto* assess = app.add_subcommand("assess", "assess one dataset");
  assess->add_option("--data", assess_opts.data, "data file (.csv or .arff)")
      ->required();
  assess->add_option("--manifest", assess_opts.manifest_path, "manifest JSON")
      ->required();
  assess->add_option("--target", assess_opts.target,
                     "target attribute (default: declared target role)");
  assess->add_option("--folds", assess_opts.folds, "cross-validation folds");
  assess->add_option("--classes", assess_opts.classes, "effort classes");
  auto* seed_opt =
      assess->add_option("--seed", assess_opts.seed, "fold-shuffle seed");
  assess->add_option("--min-leaf", assess_opts.min_leaf,
                     "minimum records per tree leaf");
  assess->add_option("--prune-confidence", assess_opts.prune_confidence,
                     "pessimistic pruning confidence (<=0 disables)");
  assess
      ->add_option("--discretization", assess_opts.discretization,
                   "target binning")
      ->check(CLI::IsMember({"equal_frequency", "equal_width"}));
  assess
      ->add_option("--quartile-method", assess_opts.quartiles,
                   "boxplot quartiles")
      ->check(CLI::IsMember({"linear_interpolation", "tukey_hinges"}));
  assess->add_option("--format", assess_opts.format, "report format")
      ->check(CLI::IsMember({"json", "markdown"}));
  assess->add_option("--out", assess_opts.out, "output path (default: stdout)");

  ValidateOptions validate_opts;
  auto* validate =
      app.add_subcommand("validate-manifest", "check a manifest file");
  validate->add_option("manifest", validate_opts.manifest_path, "manifest JSON")
      ->required();
  validate->add_option("--data", validate_opts.data,
                       "cross-check against this data file");

  FismaOptions fisma_opts;
  auto* fisma =
      app.add_subcommand("fisma", "score situation completeness from a manifest");
  fisma->add_option("--manifest", fisma_opts.manifest_path, "manifest JSON")
      ->required();
  fisma->add_option("--rubric", fisma_opts.rubric_path,
                    "rubric JSON (default: built-in 100-point rubric)");
  fisma->add_option("--format", fisma_opts.format, "output format")
      ->check(CLI::IsMember({"text", "json"}));

  CorpusOptions corpus_opts;
  auto* corpus_cmd =
      app.add_subcommand("corpus", "assess every dataset in a config");
  corpus_cmd->add_option("--config", corpus_opts.config_path, "corpus config JSON")
      ->required();
  corpus_cmd->add_option("--out", corpus_opts.out_dir,
                         "directory for per-dataset reports and matrix.json");
  corpus_cmd->add_option("--matrix", corpus_opts.matrix_csv,
                         "write the summary matrix as CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*assess) {
      assess_opts.seed_given = seed_opt->count() > 0;
      return run_assess(assess_opts);
    }
    if (*validate) return run_validate(validate_opts);
    if (*fisma) return run_fisma(fisma_opts);
    if (*corpus_cmd) return run_corpus_cmd(corpus_opts);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
