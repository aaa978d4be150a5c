#pragma once

#include <map>
#include <string>
#include <vector>

#include "tlds/dataset.hpp"
#include "tlds/discretize.hpp"
#include "tlds/model.hpp"
#include "tlds/policy.hpp"

namespace tlds {

// Candidate conjunction pools: nd feeds outer neighborhood descriptors, dl
// feeds inner antecedents. Both are duplicate-free and canonically ordered.
struct CandidatePools {
  std::vector<Conjunction> nd;
  std::vector<Conjunction> dl;
  std::map<std::string, double> support;  // conjunction key -> fraction

  std::string to_json() const;
  static CandidatePools from_json(const std::string& text);
};

// Level-wise apriori over the dataset's predicate universe. Returns every
// conjunction with support >= min_support and width <= max_width; by default
// nd and dl are the same full pool. Conjunctions never hold two predicates
// on one feature, so no two-sided numeric intervals are generated.
CandidatePools mine_candidates(const TabularDataset& data, double min_support,
                               std::size_t max_width);

// Restricts nd to conjunctions of width <= max_outer_width (0 = no cap).
CandidatePools cap_outer_width(CandidatePools pools, std::size_t max_outer_width);

// Drops every conjunction that touches a prohibited feature from both pools.
CandidatePools filter_pools(const CandidatePools& pools,
                            const FeaturePolicy& policy);

}  // namespace tlds
