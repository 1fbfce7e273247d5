#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dqbench/core.hpp"

namespace dqbench::classifier {

struct TreeParams {
  std::size_t min_leaf = 2;
  double prune_confidence = 0.25;  // <= 0 disables pruning
  std::uint64_t seed = 42;         // recorded for the report echo
};

struct FeatureRef {
  std::size_t attribute = 0;  // index into the training dataset's attributes
  std::string name;
  AttributeKind kind = AttributeKind::numeric;
};

struct TreeNode {
  std::vector<std::size_t> class_counts;  // training distribution routed here
  std::size_t records = 0;
  std::size_t predicted = 0;  // argmax of class_counts, lowest index on ties
  bool leaf = true;
  std::size_t feature = 0;         // position in the tree's feature list
  double threshold = 0.0;          // numeric split: <= goes to children[0]
  std::vector<std::string> levels;  // categorical split: one child per level
  std::size_t majority_child = 0;  // routing for missing/unseen values
  std::vector<std::unique_ptr<TreeNode>> children;

  bool numeric_split() const { return levels.empty(); }
};

namespace detail {

inline double entropy(const std::vector<std::size_t>& counts, std::size_t total) {
  if (total == 0) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

inline double log_choose(std::size_t n, std::size_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

inline double binomial_cdf(std::size_t e, std::size_t n, double p) {
  double sum = 0.0;
  for (std::size_t i = 0; i <= e; ++i) {
    double log_term = log_choose(n, i);
    if (i > 0) log_term += static_cast<double>(i) * std::log(p);
    if (n - i > 0) log_term += static_cast<double>(n - i) * std::log1p(-p);
    sum += std::exp(log_term);
  }
  return std::min(sum, 1.0);
}

// Upper confidence bound on the true error rate given e errors in n trials:
// the p solving P(X <= e | n, p) = cf, found by bisection (closed form for
// e = 0). This is the pessimistic-error estimate behind confidence pruning.
inline double error_upper_bound(std::size_t e, std::size_t n, double cf) {
  if (n == 0) return 0.0;
  if (e >= n) return 1.0;
  if (e == 0) return 1.0 - std::pow(cf, 1.0 / static_cast<double>(n));
  double lo = static_cast<double>(e) / static_cast<double>(n);
  double hi = 1.0;
  for (int iter = 0; iter < 80; ++iter) {
    double mid = (lo + hi) / 2.0;
    if (binomial_cdf(e, n, mid) > cf)
      lo = mid;
    else
      hi = mid;
  }
  return (lo + hi) / 2.0;
}

}  // namespace detail

// Gain-ratio decision tree over numeric (binary, midpoint threshold) and
// categorical (multiway, once per path) splits.
//
// Split selection at a node: for every usable feature, the best split is
// scored by information gain over the records where that feature is present;
// structurally a split needs at least two branches holding >= min_leaf
// records. Among candidates with positive gain at least the candidates' mean
// gain, the highest gain ratio wins; ties go to the lowest feature index
// (and, within a numeric feature, the lowest threshold). Records missing the
// split value are routed to the majority child. Pruning is bottom-up
// subtree replacement using the binomial upper confidence bound at
// prune_confidence, with the customary 0.1-error slack.
class DecisionTree {
 public:
  static DecisionTree build(const Dataset& ds,
                            const std::vector<std::size_t>& feature_attributes,
                            const std::vector<std::size_t>& labels,
                            std::size_t class_count, const TreeParams& params = {}) {
    if (labels.size() != ds.records.size())
      throw ValidationError("one class label per record required");
    if (feature_attributes.empty())
      throw ValidationError("at least one feature attribute required");
    if (class_count < 1) throw ValidationError("class_count must be positive");
    if (params.min_leaf < 1) throw ValidationError("min_leaf must be at least 1");
    for (auto label : labels)
      if (label >= class_count)
        throw ValidationError("class label out of range");

    DecisionTree tree;
    tree.params_ = params;
    tree.class_count_ = class_count;
    for (auto idx : feature_attributes) {
      if (idx >= ds.attributes.size())
        throw ValidationError("feature attribute index out of range");
      const auto& spec = ds.attributes[idx];
      if (spec.kind != AttributeKind::numeric &&
          spec.kind != AttributeKind::categorical)
        throw ValidationError("attribute '" + spec.name +
                              "' is not numeric or categorical; it cannot be a "
                              "tree feature");
      tree.features_.push_back({idx, spec.name, spec.kind});
    }

    std::vector<std::size_t> all(ds.records.size());
    for (std::size_t r = 0; r < all.size(); ++r) all[r] = r;
    std::vector<bool> used_categorical(tree.features_.size(), false);
    tree.root_ = tree.grow(ds, labels, all, used_categorical);
    if (params.prune_confidence > 0.0)
      prune(*tree.root_, params.prune_confidence);
    return tree;
  }

  std::size_t classify(const Dataset& ds, std::size_t record) const {
    check_schema(ds);
    if (record >= ds.records.size())
      throw UsageError("record index out of range");
    const TreeNode* node = root_.get();
    while (!node->leaf) {
      const FeatureRef& f = features_[node->feature];
      const Cell& cell = ds.records[record][f.attribute];
      std::size_t branch = node->majority_child;
      if (!is_missing(cell)) {
        if (node->numeric_split()) {
          branch = as_number(cell) <= node->threshold ? 0 : 1;
        } else {
          const std::string& level = as_text(cell);
          auto it = std::find(node->levels.begin(), node->levels.end(), level);
          if (it != node->levels.end())
            branch = static_cast<std::size_t>(it - node->levels.begin());
        }
      }
      node = node->children[branch].get();
    }
    return node->predicted;
  }

  std::string serialize() const {
    std::string out;
    if (root_->leaf) {
      out += leaf_text(*root_) + "\n";
      return out;
    }
    write_node(*root_, 0, out);
    return out;
  }

  const TreeNode& root() const { return *root_; }
  const std::vector<FeatureRef>& features() const { return features_; }
  std::size_t class_count() const { return class_count_; }
  const TreeParams& params() const { return params_; }

 private:
  TreeParams params_;
  std::size_t class_count_ = 0;
  std::vector<FeatureRef> features_;
  std::unique_ptr<TreeNode> root_;

  struct Candidate {
    std::size_t feature = 0;
    bool numeric = false;
    double threshold = 0.0;
    std::vector<std::string> levels;
    double gain = 0.0;
    double ratio = 0.0;
  };

  void check_schema(const Dataset& ds) const {
    for (const auto& f : features_) {
      if (f.attribute >= ds.attributes.size() ||
          ds.attributes[f.attribute].name != f.name ||
          ds.attributes[f.attribute].kind != f.kind)
        throw UsageError("record schema does not match the training schema "
                         "(attribute '" + f.name + "')");
    }
  }

  static void count_labels(const std::vector<std::size_t>& labels,
                           const std::vector<std::size_t>& records,
                           std::size_t class_count,
                           std::vector<std::size_t>& counts) {
    counts.assign(class_count, 0);
    for (auto r : records) ++counts[labels[r]];
  }

  static std::size_t argmax_lowest(const std::vector<std::size_t>& counts) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < counts.size(); ++i)
      if (counts[i] > counts[best]) best = i;
    return best;
  }

  std::optional<Candidate> numeric_candidate(
      const Dataset& ds, const std::vector<std::size_t>& labels,
      const std::vector<std::size_t>& records, std::size_t feature) const {
    const FeatureRef& f = features_[feature];
    std::vector<std::pair<double, std::size_t>> points;
    points.reserve(records.size());
    for (auto r : records) {
      const Cell& cell = ds.records[r][f.attribute];
      if (!is_missing(cell)) points.emplace_back(as_number(cell), labels[r]);
    }
    std::size_t n = points.size();
    if (n < 2 * params_.min_leaf || n < 2) return std::nullopt;
    std::sort(points.begin(), points.end());
    if (points.front().first == points.back().first) return std::nullopt;

    std::vector<std::size_t> total(class_count_, 0), left(class_count_, 0);
    for (const auto& [v, c] : points) ++total[c];
    double parent = detail::entropy(total, n);

    std::optional<Candidate> best;
    std::vector<std::size_t> right = total;
    for (std::size_t i = 1; i < n; ++i) {
      ++left[points[i - 1].second];
      --right[points[i - 1].second];
      if (points[i].first == points[i - 1].first) continue;
      std::size_t nl = i, nr = n - i;
      if (nl < params_.min_leaf || nr < params_.min_leaf) continue;
      double weighted =
          (static_cast<double>(nl) * detail::entropy(left, nl) +
           static_cast<double>(nr) * detail::entropy(right, nr)) /
          static_cast<double>(n);
      double gain = parent - weighted;
      if (!best || gain > best->gain + 1e-12) {
        double pl = static_cast<double>(nl) / static_cast<double>(n);
        double pr = static_cast<double>(nr) / static_cast<double>(n);
        double split_info = -pl * std::log2(pl) - pr * std::log2(pr);
        Candidate c;
        c.feature = feature;
        c.numeric = true;
        c.threshold = (points[i - 1].first + points[i].first) / 2.0;
        c.gain = gain;
        c.ratio = gain / split_info;
        best = c;
      }
    }
    if (best && best->gain > 1e-12) return best;
    return std::nullopt;
  }

  std::optional<Candidate> categorical_candidate(
      const Dataset& ds, const std::vector<std::size_t>& labels,
      const std::vector<std::size_t>& records, std::size_t feature) const {
    const FeatureRef& f = features_[feature];
    std::map<std::string, std::vector<std::size_t>> branch_counts;
    std::size_t n = 0;
    std::vector<std::size_t> total(class_count_, 0);
    for (auto r : records) {
      const Cell& cell = ds.records[r][f.attribute];
      if (is_missing(cell)) continue;
      auto& counts = branch_counts[as_text(cell)];
      if (counts.empty()) counts.assign(class_count_, 0);
      ++counts[labels[r]];
      ++total[labels[r]];
      ++n;
    }
    if (branch_counts.size() < 2) return std::nullopt;
    std::size_t branches_with_min = 0;
    for (const auto& [level, counts] : branch_counts) {
      std::size_t size = 0;
      for (auto c : counts) size += c;
      if (size >= params_.min_leaf) ++branches_with_min;
    }
    if (branches_with_min < 2) return std::nullopt;

    double parent = detail::entropy(total, n);
    double weighted = 0.0, split_info = 0.0;
    for (const auto& [level, counts] : branch_counts) {
      std::size_t size = 0;
      for (auto c : counts) size += c;
      double p = static_cast<double>(size) / static_cast<double>(n);
      weighted += p * detail::entropy(counts, size);
      split_info -= p * std::log2(p);
    }
    double gain = parent - weighted;
    if (gain <= 1e-12 || split_info <= 0.0) return std::nullopt;

    Candidate c;
    c.feature = feature;
    c.numeric = false;
    for (const auto& [level, counts] : branch_counts) c.levels.push_back(level);
    c.gain = gain;
    c.ratio = gain / split_info;
    return c;
  }

  std::unique_ptr<TreeNode> grow(const Dataset& ds,
                                 const std::vector<std::size_t>& labels,
                                 const std::vector<std::size_t>& records,
                                 std::vector<bool>& used_categorical) const {
    auto node = std::make_unique<TreeNode>();
    count_labels(labels, records, class_count_, node->class_counts);
    node->records = records.size();
    node->predicted = argmax_lowest(node->class_counts);

    bool pure = node->class_counts[node->predicted] == node->records;
    if (pure || node->records < params_.min_leaf) return node;

    std::vector<Candidate> candidates;
    for (std::size_t feat = 0; feat < features_.size(); ++feat) {
      std::optional<Candidate> c;
      if (features_[feat].kind == AttributeKind::numeric) {
        c = numeric_candidate(ds, labels, records, feat);
      } else if (!used_categorical[feat]) {
        c = categorical_candidate(ds, labels, records, feat);
      }
      if (c) candidates.push_back(std::move(*c));
    }
    if (candidates.empty()) return node;

    double mean_gain = 0.0;
    for (const auto& c : candidates) mean_gain += c.gain;
    mean_gain /= static_cast<double>(candidates.size());

    const Candidate* winner = nullptr;
    for (const auto& c : candidates) {
      if (c.gain + 1e-12 < mean_gain) continue;
      if (!winner || c.ratio > winner->ratio + 1e-12) winner = &c;
    }
    invariant(winner != nullptr, "mean-gain filter keeps at least one candidate");
    invariant(winner->gain >= -1e-9, "information gain of the chosen split is "
                                     "non-negative");

    node->leaf = false;
    node->feature = winner->feature;
    node->threshold = winner->threshold;
    node->levels = winner->levels;

    std::size_t branch_count = winner->numeric ? 2 : winner->levels.size();
    std::vector<std::vector<std::size_t>> routed(branch_count);
    std::vector<std::size_t> missing;
    const FeatureRef& f = features_[winner->feature];
    for (auto r : records) {
      const Cell& cell = ds.records[r][f.attribute];
      if (is_missing(cell)) {
        missing.push_back(r);
        continue;
      }
      if (winner->numeric) {
        routed[as_number(cell) <= winner->threshold ? 0 : 1].push_back(r);
      } else {
        auto it = std::find(winner->levels.begin(), winner->levels.end(),
                            as_text(cell));
        invariant(it != winner->levels.end(), "level seen during split scan");
        routed[static_cast<std::size_t>(it - winner->levels.begin())].push_back(r);
      }
    }
    std::size_t majority = 0;
    for (std::size_t b = 1; b < branch_count; ++b)
      if (routed[b].size() > routed[majority].size()) majority = b;
    node->majority_child = majority;
    for (auto r : missing) routed[majority].push_back(r);

    bool was_used = used_categorical[winner->feature];
    if (!winner->numeric) used_categorical[winner->feature] = true;
    for (std::size_t b = 0; b < branch_count; ++b)
      node->children.push_back(grow(ds, labels, routed[b], used_categorical));
    if (!winner->numeric) used_categorical[winner->feature] = was_used;
    return node;
  }

  static double prune(TreeNode& node, double cf) {
    std::size_t errors = node.records - node.class_counts[node.predicted];
    double as_leaf = static_cast<double>(node.records) *
                     detail::error_upper_bound(errors, node.records, cf);
    if (node.leaf) return as_leaf;
    double as_subtree = 0.0;
    for (auto& child : node.children) as_subtree += prune(*child, cf);
    if (as_leaf <= as_subtree + 0.1) {
      node.leaf = true;
      node.levels.clear();
      node.children.clear();
      return as_leaf;
    }
    return as_subtree;
  }

  std::string leaf_text(const TreeNode& node) const {
    std::string out = "class " + std::to_string(node.predicted) + " [";
    for (std::size_t i = 0; i < node.class_counts.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(node.class_counts[i]);
    }
    out += ']';
    return out;
  }

  void write_node(const TreeNode& node, int depth, std::string& out) const {
    const FeatureRef& f = features_[node.feature];
    for (std::size_t b = 0; b < node.children.size(); ++b) {
      std::string line;
      for (int d = 0; d < depth; ++d) line += "|   ";
      if (node.numeric_split())
        line += f.name + (b == 0 ? " <= " : " > ") + format_number(node.threshold);
      else
        line += f.name + " = " + node.levels[b];
      const TreeNode& child = *node.children[b];
      if (child.leaf) {
        line += ": " + leaf_text(child);
        out += line + "\n";
      } else {
        out += line + "\n";
        write_node(child, depth + 1, out);
      }
    }
  }
};

}  // namespace dqbench::classifier
