#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "dqbench/discretize.hpp"
#include "dqbench/folds.hpp"
#include "dqbench/noise.hpp"
#include "dqbench/tree.hpp"
#include "oracles.hpp"

using namespace dqbench;
using classifier::DecisionTree;
using classifier::Discretizer;
using classifier::FoldPlan;
using classifier::NoiseParams;
using classifier::TreeParams;
using Catch::Matchers::ContainsSubstring;

// ---------------------------------------------------------------- discretizer

TEST_CASE("equal-frequency binning splits evenly when values are distinct") {
  Discretizer d = classifier::discretize_equal_frequency(
      {1, 2, 3, 4, 5, 6, 7, 8}, 4);
  CHECK(d.boundaries == std::vector<double>{2.5, 4.5, 6.5});
  CHECK(d.class_sizes == std::vector<std::size_t>{2, 2, 2, 2});
}

TEST_CASE("equal-frequency binning never splits a tie run") {
  std::vector<double> values{1, 1, 1, 1, 2, 3, 4, 5};
  Discretizer d = classifier::discretize_equal_frequency(values, 4);
  CHECK(d.boundaries == std::vector<double>{1.5, 2.5, 3.5});
  CHECK(d.class_sizes == std::vector<std::size_t>{4, 1, 1, 2});

  auto oracle = oracles::equal_frequency(values, 4);
  REQUIRE(oracle.has_value());
  CHECK(d.boundaries == oracle->boundaries);
  CHECK(d.class_sizes == oracle->sizes);
}

TEST_CASE("equal-frequency binning rejects impossible class counts") {
  CHECK_THROWS_WITH(classifier::discretize_equal_frequency({1, 1, 2, 2, 3}, 4),
                    ContainsSubstring("lower the class count to at most 3"));
  CHECK_THROWS_AS(classifier::discretize_equal_frequency({}, 4),
                  classifier::DiscretizationError);
  CHECK_THROWS_WITH(classifier::discretize_equal_frequency({1, 2, 3}, 1),
                    ContainsSubstring("at least 2"));
}

TEST_CASE("classify sends boundary-equal values to the right class") {
  Discretizer d = classifier::discretize_equal_frequency(
      {1, 2, 3, 4, 5, 6, 7, 8}, 4);
  CHECK(d.classify(2.5) == 1);
  CHECK(d.classify(0.0) == 0);
  CHECK(d.classify(100.0) == 3);
  CHECK(d.classify(4.4999) == 1);
  CHECK(d.classify(4.5001) == 2);
}

TEST_CASE("equal-width binning cuts the range uniformly") {
  std::vector<double> values;
  for (int i = 0; i <= 10; ++i) values.push_back(i);
  Discretizer d = classifier::discretize_equal_width(values, 2);
  CHECK(d.boundaries == std::vector<double>{5.0});
  CHECK(d.class_sizes == std::vector<std::size_t>{5, 6});  // 5 lands right

  CHECK_THROWS_WITH(classifier::discretize_equal_width({3, 3, 3}, 2),
                    ContainsSubstring("identical"));
}

TEST_CASE("equal-frequency binning matches the exhaustive oracle") {
  oracles::DatasetGen gen(20260815);
  for (int round = 0; round < 400; ++round) {
    std::size_t n = 1 + gen.index(40);
    std::size_t k = 2 + gen.index(4);
    std::vector<double> values;
    for (std::size_t i = 0; i < n; ++i)
      values.push_back(std::floor(gen.uniform(0.0, 32.0)) / 4.0);

    auto oracle = oracles::equal_frequency(values, k);
    if (!oracle) {
      CHECK_THROWS_AS(classifier::discretize_equal_frequency(values, k),
                      classifier::DiscretizationError);
      continue;
    }
    Discretizer d = classifier::discretize_equal_frequency(values, k);
    CHECK(d.boundaries == oracle->boundaries);
    CHECK(d.class_sizes == oracle->sizes);

    // internal consistency: sizes cover every value, boundaries increase,
    // and classifying the inputs reproduces the fitted sizes
    CHECK(std::accumulate(d.class_sizes.begin(), d.class_sizes.end(),
                          std::size_t{0}) == n);
    CHECK(std::is_sorted(d.boundaries.begin(), d.boundaries.end()));
    std::vector<std::size_t> recount(k, 0);
    for (double v : values) ++recount[d.classify(v)];
    CHECK(recount == d.class_sizes);
  }
}

// ---------------------------------------------------------------------- folds

TEST_CASE("stratified folds spread every class evenly") {
  std::vector<std::size_t> classes;
  for (int i = 0; i < 10; ++i) classes.push_back(i % 2);
  FoldPlan plan = classifier::stratified_folds(classes, 5, 42);
  auto folds = plan.folds();
  REQUIRE(folds.size() == 5);
  for (const auto& fold : folds) {
    REQUIRE(fold.size() == 2);
    CHECK(classes[fold[0]] + classes[fold[1]] == 1);  // one of each class
  }
}

TEST_CASE("fold sizes stay within one of each other") {
  std::vector<std::size_t> classes(11, 0);
  FoldPlan plan = classifier::stratified_folds(classes, 5, 7);
  auto sizes = plan.fold_sizes();
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  CHECK(sizes == std::vector<std::size_t>{3, 2, 2, 2, 2});
}

TEST_CASE("fold balance holds for random class vectors") {
  oracles::DatasetGen gen(91);
  for (int round = 0; round < 300; ++round) {
    std::size_t k = 2 + gen.index(7);
    std::size_t n = k + gen.index(60);
    std::vector<std::size_t> classes;
    for (std::size_t i = 0; i < n; ++i) classes.push_back(gen.index(4));

    FoldPlan plan = classifier::stratified_folds(classes, k, gen.rng());
    REQUIRE(plan.assignment.size() == n);
    for (auto f : plan.assignment) REQUIRE(f < k);

    auto sizes = plan.fold_sizes();
    auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    CHECK(*hi - *lo <= 1);

    // per-class spread is also within one
    for (std::size_t label = 0; label < 4; ++label) {
      std::vector<std::size_t> per_fold(k, 0);
      for (std::size_t r = 0; r < n; ++r)
        if (classes[r] == label) ++per_fold[plan.assignment[r]];
      auto [clo, chi] = std::minmax_element(per_fold.begin(), per_fold.end());
      CHECK(*chi - *clo <= 1);
    }
  }
}

TEST_CASE("fold validation points at leave-one-out when records run short") {
  std::vector<std::size_t> classes{0, 1, 0, 1};
  CHECK_THROWS_WITH(classifier::stratified_folds(classes, 5, 42),
                    ContainsSubstring("leave-one-out"));
  CHECK_THROWS_WITH(classifier::stratified_folds(classes, 1, 42),
                    ContainsSubstring("at least 2"));
  CHECK_THROWS_WITH(classifier::stratified_folds(classes, 2, 42, {"a", "b"}),
                    ContainsSubstring("keys"));
}

TEST_CASE("a class smaller than the fold count draws a warning") {
  std::vector<std::size_t> classes{0, 0, 0, 0, 0, 1};
  std::vector<std::string> warnings;
  classifier::stratified_folds(classes, 5, 42, {}, &warnings);
  REQUIRE(warnings.size() == 1);
  CHECK_THAT(warnings[0], ContainsSubstring("class 1") &&
                              ContainsSubstring("cannot appear in every fold"));
}

TEST_CASE("content keys make fold plans order-independent") {
  oracles::DatasetGen gen(4242);
  std::size_t n = 23;
  std::vector<std::size_t> classes;
  std::vector<std::string> keys;
  for (std::size_t i = 0; i < n; ++i) {
    classes.push_back(gen.index(3));
    keys.push_back("rec-" + std::to_string(gen.rng()));
  }

  FoldPlan base = classifier::stratified_folds(classes, 5, 42, keys);

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), gen.rng);

  std::vector<std::size_t> classes2(n);
  std::vector<std::string> keys2(n);
  for (std::size_t i = 0; i < n; ++i) {
    classes2[i] = classes[perm[i]];
    keys2[i] = keys[perm[i]];
  }
  FoldPlan shuffled = classifier::stratified_folds(classes2, 5, 42, keys2);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(shuffled.assignment[i] == base.assignment[perm[i]]);

  // and the same call reproduces itself exactly
  FoldPlan again = classifier::stratified_folds(classes, 5, 42, keys);
  CHECK(again.assignment == base.assignment);
}

// ----------------------------------------------------------------------- tree

namespace {

using oracles::all_feature_attrs;
using oracles::oracle_root_split;

std::size_t count_nodes(const classifier::TreeNode& node) {
  std::size_t total = 1;
  for (const auto& child : node.children) total += count_nodes(*child);
  return total;
}

}  // namespace

TEST_CASE("the root split matches an exhaustive gain-ratio search") {
  oracles::DatasetGen gen(1337);
  for (int round = 0; round < 500; ++round) {
    std::size_t records = 6 + gen.index(10);
    std::size_t features = 1 + gen.index(3);
    std::size_t classes = 2 + gen.index(2);
    std::size_t min_leaf = 1 + gen.index(3);

    Dataset ds = gen.numeric(records, features, classes, false);
    std::vector<std::size_t> labels;
    for (const auto& rec : ds.records)
      labels.push_back(static_cast<std::size_t>(as_number(rec.back())));

    TreeParams params;
    params.min_leaf = min_leaf;
    params.prune_confidence = 0.0;
    DecisionTree tree = DecisionTree::build(ds, all_feature_attrs(ds), labels,
                                            classes, params);

    std::vector<std::size_t> counts(classes, 0);
    for (auto y : labels) ++counts[y];
    bool pure = *std::max_element(counts.begin(), counts.end()) == records;

    auto expected = pure ? std::nullopt
                         : oracle_root_split(ds, labels, classes, min_leaf);
    if (!expected) {
      CHECK(tree.root().leaf);
    } else {
      REQUIRE_FALSE(tree.root().leaf);
      CHECK(tree.root().feature == expected->feature);
      CHECK(tree.root().threshold == expected->threshold);
    }
  }
}

TEST_CASE("an unpruned tree with a unique key memorizes the training set") {
  oracles::DatasetGen gen(7);
  Dataset ds = gen.numeric(40, 3, 3, true);
  std::vector<std::size_t> labels;
  for (const auto& rec : ds.records)
    labels.push_back(static_cast<std::size_t>(as_number(rec.back())));

  TreeParams params;
  params.min_leaf = 1;
  params.prune_confidence = 0.0;
  DecisionTree tree = DecisionTree::build(ds, all_feature_attrs(ds), labels, 3,
                                          params);
  for (std::size_t r = 0; r < ds.records.size(); ++r)
    CHECK(tree.classify(ds, r) == labels[r]);
}

TEST_CASE("leaf prediction ties break to the lowest class") {
  Dataset ds;
  AttributeSpec f0;
  f0.name = "f0";
  f0.kind = AttributeKind::numeric;
  f0.role = AttributeRole::feature;
  ds.attributes.push_back(f0);
  for (int i = 0; i < 5; ++i) ds.records.push_back({Cell{1.0}});

  // constant feature -> no split; counts {1, 2, 2} predict class 1
  DecisionTree tree = DecisionTree::build(ds, {0}, {0, 1, 1, 2, 2}, 3);
  CHECK(tree.root().leaf);
  CHECK(tree.root().predicted == 1);

  Dataset two;
  two.attributes = ds.attributes;
  two.records = {{Cell{1.0}}, {Cell{1.0}}};
  DecisionTree even = DecisionTree::build(two, {0}, {0, 1}, 2,
                                          TreeParams{1, 0.0, 42});
  CHECK(even.root().predicted == 0);
}

TEST_CASE("tree serialization spells out the split structure") {
  Dataset ds;
  AttributeSpec f0;
  f0.name = "f0";
  f0.kind = AttributeKind::numeric;
  f0.role = AttributeRole::feature;
  ds.attributes.push_back(f0);
  for (double v : {1.0, 2.0, 3.0, 4.0}) ds.records.push_back({Cell{v}});

  DecisionTree tree = DecisionTree::build(ds, {0}, {0, 0, 1, 1}, 2,
                                          TreeParams{1, 0.0, 42});
  CHECK(tree.serialize() ==
        "f0 <= 2.5: class 0 [2 0]\n"
        "f0 > 2.5: class 1 [0 2]\n");

  Dataset flat;
  flat.attributes = ds.attributes;
  flat.records = {{Cell{1.0}}, {Cell{1.0}}};
  DecisionTree leaf = DecisionTree::build(flat, {0}, {1, 1}, 2);
  CHECK(leaf.serialize() == "class 1 [0 2]\n");
}

TEST_CASE("categorical splits branch per level and read back in level order") {
  Dataset ds;
  AttributeSpec g;
  g.name = "lang";
  g.kind = AttributeKind::categorical;
  g.role = AttributeRole::feature;
  ds.attributes.push_back(g);
  ds.records = {{Cell{std::string("ada")}},
                {Cell{std::string("ada")}},
                {Cell{std::string("cobol")}},
                {Cell{std::string("cobol")}}};

  DecisionTree tree = DecisionTree::build(ds, {0}, {0, 0, 1, 1}, 2,
                                          TreeParams{1, 0.0, 42});
  CHECK(tree.serialize() ==
        "lang = ada: class 0 [2 0]\n"
        "lang = cobol: class 1 [0 2]\n");
  CHECK(tree.classify(ds, 0) == 0);
  CHECK(tree.classify(ds, 2) == 1);
}

TEST_CASE("missing split values follow the majority child") {
  Dataset ds;
  AttributeSpec f0;
  f0.name = "f0";
  f0.kind = AttributeKind::numeric;
  f0.role = AttributeRole::feature;
  ds.attributes.push_back(f0);
  for (double v : {1.0, 2.0, 3.0, 4.0}) ds.records.push_back({Cell{v}});
  ds.records.push_back({Cell{}});  // missing feature value

  DecisionTree tree = DecisionTree::build(ds, {0}, {0, 0, 1, 1, 1}, 2,
                                          TreeParams{1, 0.0, 42});
  REQUIRE_FALSE(tree.root().leaf);
  // branch sizes tie at 2-2 before the missing record lands, so the
  // majority child stays the left branch and the unseen record follows it
  CHECK(tree.root().majority_child == 0);
  CHECK(tree.classify(ds, 4) == tree.root().children[0]->predicted);
}

TEST_CASE("pruning never grows the tree and keeps real structure") {
  // clearly separated blobs survive pruning
  Dataset ds;
  AttributeSpec f0;
  f0.name = "f0";
  f0.kind = AttributeKind::numeric;
  f0.role = AttributeRole::feature;
  ds.attributes.push_back(f0);
  std::vector<std::size_t> labels;
  for (int i = 0; i < 10; ++i) {
    ds.records.push_back({Cell{static_cast<double>(i)}});
    labels.push_back(0);
  }
  for (int i = 0; i < 10; ++i) {
    ds.records.push_back({Cell{static_cast<double>(100 + i)}});
    labels.push_back(1);
  }
  DecisionTree pruned = DecisionTree::build(ds, {0}, labels, 2,
                                            TreeParams{2, 0.25, 42});
  REQUIRE_FALSE(pruned.root().leaf);
  CHECK(pruned.root().threshold == 54.5);

  oracles::DatasetGen gen(99);
  for (int round = 0; round < 60; ++round) {
    Dataset rnd = gen.numeric(8 + gen.index(20), 2, 3, false);
    std::vector<std::size_t> ys;
    for (const auto& rec : rnd.records)
      ys.push_back(static_cast<std::size_t>(as_number(rec.back())));
    auto attrs = all_feature_attrs(rnd);
    DecisionTree raw = DecisionTree::build(rnd, attrs, ys, 3,
                                           TreeParams{1, 0.0, 42});
    DecisionTree cut = DecisionTree::build(rnd, attrs, ys, 3,
                                           TreeParams{1, 0.25, 42});
    CHECK(count_nodes(cut.root()) <= count_nodes(raw.root()));
  }
}

TEST_CASE("tree building validates its inputs") {
  Dataset ds;
  AttributeSpec f0;
  f0.name = "f0";
  f0.kind = AttributeKind::numeric;
  f0.role = AttributeRole::feature;
  AttributeSpec note;
  note.name = "note";
  note.kind = AttributeKind::text;
  note.role = AttributeRole::feature;
  ds.attributes = {f0, note};
  ds.records = {{Cell{1.0}, Cell{std::string("x")}},
                {Cell{2.0}, Cell{std::string("y")}}};

  CHECK_THROWS_WITH(DecisionTree::build(ds, {0}, {0}, 2),
                    ContainsSubstring("one class label per record"));
  CHECK_THROWS_WITH(DecisionTree::build(ds, {}, {0, 1}, 2),
                    ContainsSubstring("at least one feature attribute"));
  CHECK_THROWS_WITH(DecisionTree::build(ds, {0}, {0, 1}, 0),
                    ContainsSubstring("class_count"));
  CHECK_THROWS_WITH(DecisionTree::build(ds, {0}, {0, 1}, 2, TreeParams{0, 0.25, 42}),
                    ContainsSubstring("min_leaf"));
  CHECK_THROWS_WITH(DecisionTree::build(ds, {0}, {0, 2}, 2),
                    ContainsSubstring("out of range"));
  CHECK_THROWS_WITH(DecisionTree::build(ds, {5}, {0, 1}, 2),
                    ContainsSubstring("out of range"));
  CHECK_THROWS_WITH(DecisionTree::build(ds, {1}, {0, 1}, 2),
                    ContainsSubstring("cannot be a tree feature"));
}

TEST_CASE("classifying against a different schema is refused") {
  Dataset ds;
  AttributeSpec f0;
  f0.name = "f0";
  f0.kind = AttributeKind::numeric;
  f0.role = AttributeRole::feature;
  ds.attributes.push_back(f0);
  ds.records = {{Cell{1.0}}, {Cell{2.0}}};
  DecisionTree tree = DecisionTree::build(ds, {0}, {0, 1}, 2,
                                          TreeParams{1, 0.0, 42});

  Dataset other = ds;
  other.attributes[0].name = "g0";
  CHECK_THROWS_AS(tree.classify(other, 0), UsageError);
  CHECK_THROWS_WITH(tree.classify(other, 0),
                    ContainsSubstring("does not match the training schema"));
  CHECK_THROWS_WITH(tree.classify(ds, 2), ContainsSubstring("out of range"));
}

// ---------------------------------------------------------------------- noise

namespace {

// target follows the first feature, so the tree has signal to find
Dataset ordered_dataset(std::size_t n) {
  Dataset ds;
  AttributeSpec f0;
  f0.name = "f0";
  f0.kind = AttributeKind::numeric;
  f0.role = AttributeRole::feature;
  AttributeSpec y;
  y.name = "effort";
  y.kind = AttributeKind::numeric;
  y.role = AttributeRole::target;
  ds.attributes = {f0, y};
  for (std::size_t i = 0; i < n; ++i)
    ds.records.push_back({Cell{static_cast<double>(i)},
                          Cell{static_cast<double>(i * 10)}});
  return ds;
}

}  // namespace

TEST_CASE("the noise harness books its totals consistently") {
  Dataset ds = ordered_dataset(50);
  auto result = classifier::misclassification_rate(ds, "effort");

  CHECK(result.records_used == 50);
  CHECK(result.excluded_missing_target == 0);
  CHECK(result.per_fold.size() == 5);
  std::size_t scored = 0, missed = 0;
  for (const auto& fold : result.per_fold) {
    scored += fold.records;
    missed += fold.misclassified;
  }
  CHECK(scored == 50);
  CHECK(missed == result.misclassified);
  CHECK(result.flagged_records.size() == result.misclassified);
  CHECK(std::is_sorted(result.flagged_records.begin(),
                       result.flagged_records.end()));
  CHECK(result.noisy_percent ==
        100.0 * static_cast<double>(result.misclassified) / 50.0);
  CHECK(result.feature_names == std::vector<std::string>{"f0"});
  CHECK(result.class_sizes ==
        std::vector<std::size_t>{12, 12, 13, 13});  // smallest cuts win ties
}

TEST_CASE("records without a target value sit out of the noise assessment") {
  Dataset ds = ordered_dataset(30);
  ds.records[3][1] = Cell{};
  ds.records[17][1] = Cell{};
  ds.records[29][1] = Cell{};

  auto result = classifier::misclassification_rate(ds, "effort");
  CHECK(result.records_used == 27);
  CHECK(result.excluded_missing_target == 3);
  REQUIRE_FALSE(result.warnings.empty());
  CHECK_THAT(result.warnings.front(),
             ContainsSubstring("3 record(s) have a missing target value"));
}

TEST_CASE("the noise harness validates target, folds, and features") {
  Dataset ds = ordered_dataset(10);

  NoiseParams too_many;
  too_many.folds = 11;
  CHECK_THROWS_WITH(classifier::misclassification_rate(ds, "effort", too_many),
                    ContainsSubstring("leave-one-out"));

  NoiseParams one_fold;
  one_fold.folds = 1;
  CHECK_THROWS_WITH(classifier::misclassification_rate(ds, "effort", one_fold),
                    ContainsSubstring("at least 2"));

  CHECK_THROWS_AS(classifier::misclassification_rate(ds, "absent"),
                  UsageError);

  Dataset text_target = ds;
  text_target.attributes[1].kind = AttributeKind::text;
  CHECK_THROWS_WITH(classifier::misclassification_rate(text_target, "effort"),
                    ContainsSubstring("must be numeric"));

  Dataset no_features = ds;
  no_features.attributes[0].role = AttributeRole::identifier;
  CHECK_THROWS_WITH(classifier::misclassification_rate(no_features, "effort"),
                    ContainsSubstring("no usable feature attributes"));
}

TEST_CASE("text columns are dropped from the feature set with a warning") {
  Dataset ds = ordered_dataset(20);
  AttributeSpec note;
  note.name = "note";
  note.kind = AttributeKind::text;
  note.role = AttributeRole::feature;
  ds.attributes.push_back(note);
  for (auto& rec : ds.records) rec.push_back(Cell{std::string("n")});

  auto result = classifier::misclassification_rate(ds, "effort");
  CHECK(result.feature_names == std::vector<std::string>{"f0"});
  bool warned = false;
  for (const auto& w : result.warnings)
    warned = warned || w.find("cannot be a classifier feature") != std::string::npos;
  CHECK(warned);
}

TEST_CASE("shuffling the records does not move the noise estimate") {
  oracles::DatasetGen gen(314159);
  Dataset ds = gen.numeric(40, 3, 6, true);
  // promote the generated label column into a spread-out numeric target
  for (auto& rec : ds.records) {
    double label = as_number(rec.back());
    rec.back() = Cell{label * 25.0 + gen.uniform(0.0, 10.0)};
  }

  auto base = classifier::misclassification_rate(ds, "y");

  std::vector<std::size_t> perm(ds.records.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), gen.rng);
  Dataset shuffled = ds;
  for (std::size_t i = 0; i < perm.size(); ++i)
    shuffled.records[i] = ds.records[perm[i]];

  auto moved = classifier::misclassification_rate(shuffled, "y");
  CHECK(moved.noisy_percent == base.noisy_percent);
  CHECK(moved.misclassified == base.misclassified);

  // flagged indices name the same record contents in both orders
  std::vector<std::size_t> where(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) where[perm[i]] = i;
  std::vector<std::size_t> mapped;
  for (auto r : base.flagged_records) mapped.push_back(where[r]);
  std::sort(mapped.begin(), mapped.end());
  CHECK(mapped == moved.flagged_records);

  // and the identical call reproduces itself bit for bit
  auto again = classifier::misclassification_rate(ds, "y");
  CHECK(again.noisy_percent == base.noisy_percent);
  CHECK(again.flagged_records == base.flagged_records);
  CHECK(again.class_boundaries == base.class_boundaries);
}

TEST_CASE("width-based binning is available as an alternative") {
  Dataset ds = ordered_dataset(40);
  NoiseParams params;
  params.equal_width = true;
  auto result = classifier::misclassification_rate(ds, "effort", params);
  CHECK(result.class_boundaries.size() == 3);
  CHECK(std::accumulate(result.class_sizes.begin(), result.class_sizes.end(),
                        std::size_t{0}) == 40);
}
