#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "dqbench/core.hpp"

namespace dqbench::classifier {

struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> assignment;  // record index -> fold index

  std::vector<std::vector<std::size_t>> folds() const {
    std::vector<std::vector<std::size_t>> out(k);
    for (std::size_t r = 0; r < assignment.size(); ++r)
      out[assignment[r]].push_back(r);
    return out;
  }

  std::vector<std::size_t> fold_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (auto f : assignment) ++sizes[f];
    return sizes;
  }
};

namespace detail {

// std::shuffle's draw sequence is implementation-defined, so fold plans use
// an explicit Fisher-Yates over the seeded generator to stay reproducible
// across standard libraries.
inline void fisher_yates(std::vector<std::size_t>& items, std::mt19937_64& gen) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(gen() % i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace detail

// Stratified assignment: per class, members are ordered by `keys` (a stable
// content-derived identity; record index when omitted), shuffled with the
// seeded generator, then dealt round-robin by a cursor that carries across
// classes. That keeps fold sizes within 1 globally and per class, and makes
// the plan a function of record *content* rather than record order whenever
// keys are supplied.
inline FoldPlan stratified_folds(const std::vector<std::size_t>& classes,
                                 std::size_t k, std::uint64_t seed,
                                 const std::vector<std::string>& keys = {},
                                 std::vector<std::string>* warnings = nullptr) {
  if (k < 2) throw ValidationError("fold count must be at least 2");
  if (classes.size() < k)
    throw ValidationError("only " + std::to_string(classes.size()) +
                          " records for " + std::to_string(k) +
                          " folds; use leave-one-out (folds = record count)");
  if (!keys.empty() && keys.size() != classes.size())
    throw ValidationError("fold keys must match record count");

  std::size_t class_count = 0;
  for (auto c : classes) class_count = std::max(class_count, c + 1);

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignment.assign(classes.size(), 0);

  std::mt19937_64 gen(seed);
  std::size_t cursor = 0;
  for (std::size_t label = 0; label < class_count; ++label) {
    std::vector<std::size_t> members;
    for (std::size_t r = 0; r < classes.size(); ++r)
      if (classes[r] == label) members.push_back(r);
    if (members.empty()) continue;
    if (members.size() < k && warnings)
      warnings->push_back("class " + std::to_string(label) + " has " +
                          std::to_string(members.size()) +
                          " records, fewer than the fold count; it cannot appear "
                          "in every fold");
    if (!keys.empty())
      std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
        if (keys[a] != keys[b]) return keys[a] < keys[b];
        return a < b;
      });
    detail::fisher_yates(members, gen);
    for (std::size_t r : members) {
      plan.assignment[r] = cursor % k;
      ++cursor;
    }
  }
  return plan;
}

}  // namespace dqbench::classifier
