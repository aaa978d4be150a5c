#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tlds/bitset.hpp"
#include "tlds/dataset.hpp"
#include "tlds/mining.hpp"
#include "tlds/model.hpp"
#include "tlds/policy.hpp"

namespace tlds {

// Objective weights and matroid constraint bounds.
struct ObjectiveConfig {
  std::array<double, 6> lambdas{1, 1, 1, 1, 1, 1};
  std::int64_t eps1 = 10;  // max size
  std::int64_t eps2 = 4;   // max width
  std::int64_t eps3 = 5;   // max distinct descriptors
  double delta = 0.1;      // local-search improvement slack

  void validate() const;
  std::string to_json() const;
  static ObjectiveConfig from_json(const std::string& text);
};

struct RawMeasures {
  std::int64_t size = 0;
  std::int64_t maxwidth = 0;
  std::int64_t numpreds = 0;
  std::int64_t numdsets = 0;
  std::int64_t featureoverlap = 0;
  std::int64_t ruleoverlap = 0;
  std::int64_t cover = 0;
  std::int64_t disagreement = 0;
  std::int64_t coverdesired = 0;
};

// Shared evaluation state: dataset, target labels the model is scored
// against, candidate pools, and the policy. Precomputes row masks per pool
// conjunction and the joint maximum width over both pools.
class MeasureContext {
 public:
  MeasureContext(const TabularDataset& data,
                 const std::vector<std::string>& target_labels,
                 CandidatePools pools, FeaturePolicy policy, LabelSet labels);

  const TabularDataset& data() const { return *data_; }
  const CandidatePools& pools() const { return pools_; }
  const FeaturePolicy& policy() const { return policy_; }
  const LabelSet& labels() const { return labels_; }
  const std::vector<std::size_t>& target_indices() const { return target_idx_; }

  std::int64_t n_rows() const { return static_cast<std::int64_t>(data_->n_rows()); }
  std::int64_t nd_size() const { return static_cast<std::int64_t>(pools_.nd.size()); }
  std::int64_t dl_size() const { return static_cast<std::int64_t>(pools_.dl.size()); }
  std::int64_t w_max() const { return w_max_; }

  // Position of a conjunction in the nd/dl pool; throws when the rule is not
  // expressible from the pools.
  std::size_t nd_index(const Conjunction& c) const;
  std::size_t dl_index(const Conjunction& c) const;
  const RowMask& nd_bits(std::size_t i) const { return nd_bits_[i]; }
  const RowMask& dl_bits(std::size_t i) const { return dl_bits_[i]; }

  // Rows satisfying q & s for a rule drawn from the pools.
  RowMask rule_bits(const Rule& r) const;

  // Per-row mask of target label == labels()[k].
  const RowMask& label_bits(std::size_t k) const { return label_bits_[k]; }

  // Index of each desired feature, for coverdesired masks (at most 64).
  std::uint64_t desired_mask(const Conjunction& q, const Conjunction& s) const;
  std::int64_t desired_count() const { return static_cast<std::int64_t>(desired_order_.size()); }

 private:
  const TabularDataset* data_;
  CandidatePools pools_;
  FeaturePolicy policy_;
  LabelSet labels_;
  std::vector<std::size_t> target_idx_;
  std::int64_t w_max_ = 0;
  std::map<std::string, std::size_t> nd_pos_, dl_pos_;
  std::vector<RowMask> nd_bits_, dl_bits_;
  std::vector<RowMask> label_bits_;
  std::vector<std::string> desired_order_;
};

// The nine raw quantities from the measure table. Every rule must be drawn
// from the context's pools.
RawMeasures raw_measures(const TwoLevelDecisionSet& model,
                         const MeasureContext& ctx);

// The six objective terms, each measure subtracted from its upper bound so
// the objective is non-negative:
//   f1 = 2*Wmax*|ND|*|DL| - numpreds
//   f2 =   Wmax*|ND|*|DL| - featureoverlap
//   f3 = N*(|ND|*|DL|)^2  - ruleoverlap
//   f4 = cover
//   f5 = N*|ND|*|DL|      - disagreement
//   f6 = coverdesired
// Computed in exact integer arithmetic (overflow-checked).
std::array<std::int64_t, 6> objective_terms(const RawMeasures& raw,
                                            const MeasureContext& ctx);

double objective_value(const std::array<std::int64_t, 6>& terms,
                       const ObjectiveConfig& cfg);

double objective(const TwoLevelDecisionSet& model, const MeasureContext& ctx,
                 const ObjectiveConfig& cfg);

// size <= eps1 && maxwidth <= eps2 && numdsets <= eps3 (bounds inclusive).
bool constraints_ok(const TwoLevelDecisionSet& model, const MeasureContext& ctx,
                    const ObjectiveConfig& cfg);

std::string measures_to_json(const RawMeasures& raw,
                             const std::array<std::int64_t, 6>& terms);

}  // namespace tlds
