#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

#include "dqbench/core.hpp"

namespace dqbench::classifier {

class DiscretizationError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct Discretizer {
  std::vector<double> boundaries;        // strictly increasing cut points
  std::size_t class_count = 0;
  std::vector<std::size_t> class_sizes;  // over the values it was fit on

  // Values equal to a boundary fall in the class to its right; in-sample
  // values never coincide with a boundary (boundaries sit between distinct
  // values), so this only matters for out-of-sample queries.
  std::size_t classify(double value) const {
    auto it = std::upper_bound(boundaries.begin(), boundaries.end(), value);
    return static_cast<std::size_t>(it - boundaries.begin());
  }
};

namespace detail {

struct DistinctRuns {
  std::vector<double> values;        // ascending distinct values
  std::vector<std::size_t> counts;   // multiplicity per distinct value
};

inline DistinctRuns distinct_runs(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  DistinctRuns runs;
  for (double v : values) {
    if (runs.values.empty() || v != runs.values.back()) {
      runs.values.push_back(v);
      runs.counts.push_back(1);
    } else {
      ++runs.counts.back();
    }
  }
  return runs;
}

}  // namespace detail

// Equal-frequency binning that never splits a run of tied values: cut points
// go between distinct values, chosen to minimize the sum of squared class
// sizes (equivalently the size variance). Ties between optimal placements
// resolve to the lexicographically smallest boundary vector, so the result
// is unique and reproducible.
inline Discretizer discretize_equal_frequency(const std::vector<double>& values,
                                              std::size_t class_count) {
  if (values.empty()) throw DiscretizationError("no values to discretize");
  if (class_count < 2) throw DiscretizationError("class_count must be at least 2");
  auto runs = detail::distinct_runs(values);
  std::size_t m = runs.values.size();
  if (m < class_count)
    throw DiscretizationError(
        "only " + std::to_string(m) + " distinct values for " +
        std::to_string(class_count) + " classes; lower the class count to at most " +
        std::to_string(m));

  std::vector<std::size_t> prefix(m + 1, 0);
  for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] + runs.counts[i];

  auto group_cost = [&](std::size_t from, std::size_t to_excl) {
    double size = static_cast<double>(prefix[to_excl] - prefix[from]);
    return size * size;
  };

  // best[i][j]: minimal cost splitting distinct runs [i, m) into j groups.
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best(m + 1,
                                        std::vector<double>(class_count + 1, inf));
  for (std::size_t i = 0; i < m; ++i) best[i][1] = group_cost(i, m);
  for (std::size_t j = 2; j <= class_count; ++j) {
    for (std::size_t i = 0; i + j <= m; ++i) {
      for (std::size_t t = i; t + (j - 1) < m; ++t) {
        double c = group_cost(i, t + 1) + best[t + 1][j - 1];
        if (c < best[i][j]) best[i][j] = c;
      }
    }
  }

  Discretizer d;
  d.class_count = class_count;
  std::size_t i = 0;
  for (std::size_t j = class_count; j >= 2; --j) {
    // Greedy reconstruction: the smallest feasible cut keeps the boundary
    // vector lexicographically minimal among equal-cost solutions.
    for (std::size_t t = i;; ++t) {
      invariant(t + (j - 1) < m, "discretizer reconstruction stays feasible");
      double c = group_cost(i, t + 1) + best[t + 1][j - 1];
      if (c <= best[i][j] + 1e-9) {
        d.boundaries.push_back((runs.values[t] + runs.values[t + 1]) / 2.0);
        d.class_sizes.push_back(prefix[t + 1] - prefix[i]);
        i = t + 1;
        break;
      }
    }
  }
  d.class_sizes.push_back(prefix[m] - prefix[i]);
  return d;
}

// Equal-width alternative: cut points at min + i·(max−min)/k. Classes may be
// empty on skewed data; sizes are reported so callers can see that.
inline Discretizer discretize_equal_width(const std::vector<double>& values,
                                          std::size_t class_count) {
  if (values.empty()) throw DiscretizationError("no values to discretize");
  if (class_count < 2) throw DiscretizationError("class_count must be at least 2");
  auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  if (*min_it == *max_it)
    throw DiscretizationError("all values are identical; width-based binning "
                              "needs a nonzero range");
  Discretizer d;
  d.class_count = class_count;
  double width = (*max_it - *min_it) / static_cast<double>(class_count);
  for (std::size_t i = 1; i < class_count; ++i)
    d.boundaries.push_back(*min_it + width * static_cast<double>(i));
  d.class_sizes.assign(class_count, 0);
  for (double v : values) {
    std::size_t c = std::min(d.classify(v), class_count - 1);
    ++d.class_sizes[c];
  }
  return d;
}

}  // namespace dqbench::classifier
