#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tlds/audit.hpp"
#include "tlds/dataset.hpp"
#include "tlds/mining.hpp"
#include "tlds/optimizer.hpp"
#include "tlds/synth.hpp"

namespace tlds {

struct DataSourceConfig {
  // Either a generator spec or a csv + schema pair.
  std::optional<SynthSpec> synth;
  std::string csv_path;
  std::string schema_path;
  std::optional<std::size_t> discretize_bins;  // applied to csv input
};

struct VariantConfig {
  std::string name;
  FeaturePolicy policy;
};

struct ExperimentConfig {
  std::string name = "experiment";
  DataSourceConfig data;
  SplitRatios split;
  std::uint64_t seed = 13;
  double min_support = 0.05;
  std::size_t max_width = 3;
  std::size_t outer_max_width = 0;  // 0 = uncapped
  ObjectiveConfig objective;
  std::int64_t budget = kDefaultBudget;
  FeaturePolicy blackbox_policy;   // build policy for the black box
  std::vector<VariantConfig> variants;  // build policies per explanation
  FeaturePolicy audit_policy;      // trust policy every variant is audited under
  double eps_plus = 0.05;
  bool estimate_eps = false;       // also compute eps_r/eps_a per variant

  void validate() const;
  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);

  // Ready-made configurations for the two synthetic benchmarks.
  static ExperimentConfig theorem1_default();
  static ExperimentConfig correlated_bail_default();
};

struct VariantOutcome {
  std::string name;
  TwoLevelDecisionSet model;
  AuditReport audit;
};

struct ExperimentResult {
  ExperimentConfig config;
  DatasetSplit splits;
  LabelSet labels;
  CandidatePools pools;
  TwoLevelDecisionSet blackbox;
  AuditReport blackbox_self_audit;
  double blackbox_train_accuracy = 0;
  double blackbox_test_accuracy = 0;
  std::vector<VariantOutcome> variants;
  std::vector<std::string> failures;  // per-variant failure messages

  std::string summary_json() const;
  std::string summary_text() const;
};

// Full pipeline: data, split, mine, train the black box against ground
// truth, build each explanation variant against the black box, audit on the
// test split. With a non-empty out_dir, writes model/report/summary files as
// it goes; variant failures are recorded in a failure manifest and the error
// rethrown after partial results are written.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir = "");

}  // namespace tlds
