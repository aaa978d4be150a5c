#pragma once

#include <string>
#include <vector>

#include "tlds/dataset.hpp"
#include "tlds/model.hpp"

namespace tlds {

struct DiscretizeParams {
  std::size_t n_bins = 4;
};

// Records per-feature cut points so future instances discretize identically
// and so bin thresholds can render as raw values.
class DiscretizationSpec {
 public:
  struct Entry {
    std::string feature;
    FeatureKind kind = FeatureKind::numeric;
    std::vector<double> cuts;  // strictly increasing; empty for categorical
    bool excluded = false;     // constant numeric column, no predicates
  };

  std::vector<Entry> entries;
  std::vector<std::string> warnings;

  const Entry* find(const std::string& feature) const;

  // Bin index of a raw value: number of cuts <= value.
  static double bin_of(const Entry& e, double raw);

  // Applies the recorded cuts to another raw table.
  TabularDataset apply(const TabularDataset& raw) const;

  std::string to_json() const;
  static DiscretizationSpec from_json(const std::string& text);
};

struct DiscretizeResult {
  TabularDataset data;
  DiscretizationSpec spec;
};

// Quantile-bins every numeric feature into n_bins (cells become bin indices)
// and passes categorical features through. Constant numeric columns are kept
// but flagged excluded and generate no predicates.
DiscretizeResult discretize(const TabularDataset& raw,
                            const DiscretizeParams& params);

// Every predicate expressible on the dataset: EQ per observed categorical
// level; GEQ/LEQ thresholds between consecutive observed numeric values.
// Excluded (single-valued) features contribute nothing.
std::vector<Predicate> predicate_universe(const TabularDataset& data);

}  // namespace tlds
