#pragma once

#include <cstdint>
#include <vector>

namespace bm {

// Observed visible configurations with multiplicities. Visible nodes are the
// leading nodes 0..n_visible-1 of the network they are used with.
struct PatternSet {
  struct Item {
    std::vector<std::int8_t> values;  // +/-1, length n_visible
    int multiplicity = 1;
    int label = -1;  // class id for generated image data, -1 otherwise
  };

  int n_visible = 0;
  int grid_rows = 0;  // 0 when the data has no image structure
  int grid_cols = 0;
  std::vector<Item> items;

  int total_count() const;
  void validate() const;
};

// Collapse duplicate visible vectors into one item with summed multiplicity,
// keeping first-seen order.
PatternSet dedupe(const PatternSet& patterns);

}  // namespace bm
