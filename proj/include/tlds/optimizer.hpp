#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tlds/measures.hpp"

namespace tlds {

struct MoveRecord {
  std::string kind;  // "init", "add", "delete", "swap"
  double objective = 0;
};

struct RunReport {
  double final_objective = 0;
  std::array<std::int64_t, 6> terms{};
  std::int64_t iterations = 0;  // accepted moves
  bool feasible = true;
  bool budget_exhausted = false;
  std::vector<std::string> warnings;
  std::uint64_t seed = 0;
  std::vector<MoveRecord> move_log;

  std::string to_json() const;
};

constexpr std::int64_t kDefaultBudget = 10000;

// Approximate local search over R subseteq ND x DL x labels maximizing the
// weighted objective under the three matroid constraints. Starts from the
// best feasible singleton, then repeatedly applies the best feasible
// single-triple addition/deletion/swap that improves the objective by a
// factor of at least (1 + delta/n^4), n = |ND|*|DL|*K. Returns the better of
// the local optimum and the empty set, fitted against the context's target
// labels. Deterministic given inputs and seed.
TwoLevelDecisionSet optimize(const MeasureContext& ctx,
                             const ObjectiveConfig& cfg, std::uint64_t seed,
                             std::int64_t budget = kDefaultBudget,
                             RunReport* report = nullptr);

// Same search, but scored against the ground-truth label column: trains an
// interpretable classifier usable as the study's black box. Pools are
// policy-filtered here.
TwoLevelDecisionSet train_interpretable_blackbox(
    const TabularDataset& data, const CandidatePools& pools,
    const LabelSet& labels, const FeaturePolicy& policy,
    const ObjectiveConfig& cfg, std::uint64_t seed,
    std::int64_t budget = kDefaultBudget, RunReport* report = nullptr);

struct TuneTargets {
  double min_fidelity = 0.0;
  std::int64_t max_size = 1 << 30;
};

struct TuneResult {
  ObjectiveConfig config;
  double validation_fidelity = 0;
  std::int64_t size = 0;
  bool targets_met = false;
  std::vector<std::string> warnings;
};

// Coordinate descent over per-lambda grids: cycles through the six lambda
// indices, picking the grid value with the best validation fidelity subject
// to the size target, until a full cycle changes nothing. Falls back to the
// best-fidelity config with a warning when no grid point meets the targets.
TuneResult tune_lambdas(const TabularDataset& train,
                        const TabularDataset& validation,
                        const CandidatePools& pools, const LabelSet& labels,
                        const FeaturePolicy& policy,
                        const std::array<std::vector<double>, 6>& grid,
                        const TuneTargets& targets, const ObjectiveConfig& base,
                        std::uint64_t seed,
                        std::int64_t budget = kDefaultBudget);

}  // namespace tlds
