#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dqbench/core.hpp"
#include "dqbench/discretize.hpp"
#include "dqbench/folds.hpp"
#include "dqbench/tree.hpp"

namespace dqbench::classifier {

struct NoiseParams {
  std::size_t class_count = 4;
  bool equal_width = false;  // default is equal-frequency binning
  std::size_t folds = 5;
  std::uint64_t seed = 42;
  std::size_t min_leaf = 2;
  double prune_confidence = 0.25;
};

struct FoldOutcome {
  std::size_t fold = 0;
  std::size_t records = 0;
  std::size_t misclassified = 0;
};

struct NoiseResult {
  double noisy_percent = 0.0;  // misclassified / records_used, as a percentage
  std::size_t records_used = 0;
  std::size_t misclassified = 0;
  std::size_t excluded_missing_target = 0;
  std::vector<FoldOutcome> per_fold;
  std::vector<std::size_t> flagged_records;  // indices into the input dataset
  std::vector<double> class_boundaries;
  std::vector<std::size_t> class_sizes;
  std::vector<std::string> feature_names;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string record_key(const Dataset& ds, std::size_t record) {
  std::string buf;
  for (const Cell& cell : ds.records[record]) {
    buf += cell_token(cell);
    buf += '\x1f';
  }
  return hex64(fnv1a64(buf));
}

}  // namespace detail

// The cross-validated noise proxy: discretize the target into effort
// classes, stratify into folds keyed to record content (so record order
// never changes the outcome), train a gain-ratio tree on k-1 folds and
// score the held-out fold. Misclassified records are the "noisy" ones.
//
// Feature columns are the attributes with role `feature` and a numeric or
// categorical kind; identifier/derived/excluded roles and date/text kinds
// are dropped (the latter with a warning). Records with a missing target
// cannot be labeled and are excluded, counted in the result.
inline NoiseResult misclassification_rate(const Dataset& ds, const std::string& target,
                                          const NoiseParams& params = {}) {
  NoiseResult result;
  std::size_t target_idx = ds.require_attribute(target);
  if (ds.attributes[target_idx].kind != AttributeKind::numeric)
    throw ValidationError("target attribute '" + target + "' must be numeric");
  if (params.folds < 2) throw ValidationError("fold count must be at least 2");

  std::vector<std::size_t> feature_attrs;
  for (std::size_t a = 0; a < ds.attributes.size(); ++a) {
    const auto& spec = ds.attributes[a];
    if (a == target_idx || spec.role != AttributeRole::feature) continue;
    if (spec.kind == AttributeKind::numeric ||
        spec.kind == AttributeKind::categorical) {
      feature_attrs.push_back(a);
      result.feature_names.push_back(spec.name);
    } else {
      result.warnings.push_back("attribute '" + spec.name + "' (" +
                                to_string(spec.kind) +
                                ") cannot be a classifier feature; dropped");
    }
  }
  if (feature_attrs.empty())
    throw ValidationError("no usable feature attributes for the classifier");

  std::vector<std::size_t> usable;  // indices into ds
  std::vector<double> target_values;
  for (std::size_t r = 0; r < ds.records.size(); ++r) {
    const Cell& cell = ds.records[r][target_idx];
    if (is_missing(cell)) {
      ++result.excluded_missing_target;
    } else {
      usable.push_back(r);
      target_values.push_back(as_number(cell));
    }
  }
  if (result.excluded_missing_target > 0)
    result.warnings.push_back(std::to_string(result.excluded_missing_target) +
                              " record(s) have a missing target value and were "
                              "excluded from the noise assessment");
  if (usable.size() < params.folds)
    throw ValidationError("only " + std::to_string(usable.size()) +
                          " records with a target value for " +
                          std::to_string(params.folds) +
                          " folds; use leave-one-out (folds = record count)");

  Discretizer disc = params.equal_width
                         ? discretize_equal_width(target_values, params.class_count)
                         : discretize_equal_frequency(target_values,
                                                      params.class_count);
  result.class_boundaries = disc.boundaries;
  result.class_sizes = disc.class_sizes;

  std::vector<std::size_t> labels(usable.size());
  std::vector<std::string> keys(usable.size());
  for (std::size_t i = 0; i < usable.size(); ++i) {
    labels[i] = disc.classify(target_values[i]);
    keys[i] = detail::record_key(ds, usable[i]);
  }

  FoldPlan plan = stratified_folds(labels, params.folds, params.seed, keys,
                                   &result.warnings);

  // Training views reuse the original dataset; each fold gets a dataset of
  // the training records so the tree sees the same schema throughout.
  TreeParams tree_params;
  tree_params.min_leaf = params.min_leaf;
  tree_params.prune_confidence = params.prune_confidence;
  tree_params.seed = params.seed;

  result.records_used = usable.size();
  auto folds = plan.folds();
  for (std::size_t f = 0; f < folds.size(); ++f) {
    Dataset train;
    train.name = ds.name;
    train.attributes = ds.attributes;
    std::vector<std::size_t> train_labels;
    for (std::size_t i = 0; i < usable.size(); ++i) {
      if (plan.assignment[i] == f) continue;
      train.records.push_back(ds.records[usable[i]]);
      train_labels.push_back(labels[i]);
    }
    DecisionTree tree = DecisionTree::build(train, feature_attrs, train_labels,
                                            params.class_count, tree_params);
    FoldOutcome outcome;
    outcome.fold = f;
    for (std::size_t i : folds[f]) {
      ++outcome.records;
      if (tree.classify(ds, usable[i]) != labels[i]) {
        ++outcome.misclassified;
        result.flagged_records.push_back(usable[i]);
      }
    }
    result.misclassified += outcome.misclassified;
    result.per_fold.push_back(outcome);
  }
  std::sort(result.flagged_records.begin(), result.flagged_records.end());
  result.noisy_percent = 100.0 * static_cast<double>(result.misclassified) /
                         static_cast<double>(result.records_used);
  return result;
}

}  // namespace dqbench::classifier
