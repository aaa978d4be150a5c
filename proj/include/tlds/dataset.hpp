#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tlds/cell.hpp"
#include "tlds/rng.hpp"

namespace tlds {

enum class FeatureKind { categorical, numeric };
enum class ColumnRole { feature, label, blackbox, ignore };

std::string to_string(FeatureKind k);
std::string to_string(ColumnRole r);
FeatureKind feature_kind_from_string(const std::string& s);
ColumnRole column_role_from_string(const std::string& s);

struct ColumnSpec {
  std::string name;
  FeatureKind kind = FeatureKind::categorical;
  ColumnRole role = ColumnRole::feature;
};

// Declares every CSV column's kind and role. Loaded from / saved to JSON:
// {"columns":[{"name":...,"kind":"numeric","role":"feature"}, ...]}
struct SchemaConfig {
  std::vector<ColumnSpec> columns;

  std::string to_json() const;
  static SchemaConfig from_json(const std::string& text);
};

// Rectangular table of feature columns plus optional ground-truth label and
// black-box label columns. Immutable once built; column-major storage.
class TabularDataset {
 public:
  struct FeatureColumn {
    std::string name;
    FeatureKind kind;
    std::vector<Cell> values;
  };

  TabularDataset() = default;

  std::size_t n_rows() const { return n_rows_; }
  const std::vector<FeatureColumn>& features() const { return features_; }

  bool has_feature(const std::string& name) const;
  // Index into features(); throws Error naming the feature when absent.
  std::size_t feature_index(const std::string& name) const;

  bool has_label() const { return !label_.empty(); }
  bool has_blackbox() const { return !blackbox_.empty(); }
  const std::vector<std::string>& label() const;
  const std::vector<std::string>& blackbox() const;

  void add_feature(FeatureColumn col);
  void set_label(std::vector<std::string> values);
  void set_blackbox(std::vector<std::string> values);

  TabularDataset select_rows(const std::vector<std::size_t>& idx) const;

  SchemaConfig schema() const;

  std::string to_csv() const;
  void save_csv(const std::string& path) const;

 private:
  void check_rows(std::size_t n) ;

  std::size_t n_rows_ = 0;
  bool n_rows_set_ = false;
  std::vector<FeatureColumn> features_;
  std::vector<std::string> label_;
  std::vector<std::string> blackbox_;
};

// Parses a CSV file against a schema config. Errors cite 1-based line
// numbers (header included) and the offending column.
TabularDataset load_csv(const std::string& path, const SchemaConfig& schema);
TabularDataset parse_csv(const std::string& text, const SchemaConfig& schema);

struct SplitRatios {
  double train = 0.70;
  double test = 0.25;
  double validation = 0.05;
};

struct DatasetSplit {
  TabularDataset train;
  TabularDataset test;
  TabularDataset validation;
};

// Seeded shuffle followed by a train/test/validation cut.
DatasetSplit split_dataset(const TabularDataset& data, const SplitRatios& ratios,
                           std::uint64_t seed);

}  // namespace tlds
