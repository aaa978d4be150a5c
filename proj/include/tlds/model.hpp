#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "tlds/cell.hpp"
#include "tlds/dataset.hpp"

namespace tlds {

enum class Op { EQ, GEQ, LEQ };

std::string to_string(Op op);
Op op_from_string(const std::string& s);

// Single condition "feature ~ value" with ~ in {==, >=, <=}. EQ compares a
// categorical level; GEQ/LEQ compare numerically (raw values or bin indices,
// whichever space the dataset is in).
struct Predicate {
  std::string feature;
  Op op = Op::EQ;
  Cell value;

  std::string text() const;
  bool operator==(const Predicate& o) const;
};

// Total order: (feature, op, value); fixes serialization and tie-breaking.
bool predicate_less(const Predicate& a, const Predicate& b);

// Conjunction of predicates in canonical order. The empty conjunction is
// satisfied by every instance.
class Conjunction {
 public:
  Conjunction() = default;
  // Sorts into canonical order; rejects two predicates on the same
  // (feature, op) pair.
  explicit Conjunction(std::vector<Predicate> preds);

  const std::vector<Predicate>& predicates() const { return preds_; }
  std::size_t width() const { return preds_.size(); }
  std::set<std::string> features() const;

  // Canonical text form, e.g. "age>=2 & race==black"; "true" when empty.
  std::string key() const;

  bool operator==(const Conjunction& o) const { return preds_ == o.preds_; }
  bool operator<(const Conjunction& o) const { return key() < o.key(); }

 private:
  std::vector<Predicate> preds_;
};

// One two-level rule: outer neighborhood descriptor q, inner antecedent s,
// consequent label c.
struct Rule {
  Conjunction q;
  Conjunction s;
  std::string c;

  std::string key() const;
  std::set<std::string> features() const;
  bool operator==(const Rule& o) const;
  bool operator<(const Rule& o) const { return key() < o.key(); }
};

// Ordered class label identifiers, K >= 2.
class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(std::vector<std::string> labels);

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  bool contains(const std::string& l) const;
  std::size_t index_of(const std::string& l) const;

  // Distinct values of a label column, sorted.
  static LabelSet from_column(const std::vector<std::string>& column);

 private:
  std::vector<std::string> labels_;
};

bool satisfies(const TabularDataset& data, std::size_t row,
               const Predicate& pred);
bool satisfies(const TabularDataset& data, std::size_t row,
               const Conjunction& conj);

class DiscretizationSpec;

// Unordered set of rules with most-accurate-rule tie-breaking and a default
// label for uncovered instances.
class TwoLevelDecisionSet {
 public:
  TwoLevelDecisionSet() = default;
  // Deduplicates and sorts rules canonically. The model is unfitted until
  // fit_rule_accuracies runs.
  explicit TwoLevelDecisionSet(std::vector<Rule> rules);

  const std::vector<Rule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }
  bool fitted() const { return fitted_; }
  const std::string& default_label() const;
  double rule_accuracy(std::size_t i) const;
  std::set<std::string> features() const;

  std::string predict(const TabularDataset& data, std::size_t row) const;
  std::vector<std::string> predict_all(const TabularDataset& data) const;

  std::string to_json() const;
  static TwoLevelDecisionSet from_json(const std::string& text);

  // Nested if-then rendering grouped by descriptor. When a discretization
  // spec is given, numeric bin thresholds render as raw cut values.
  std::string to_text(const DiscretizationSpec* spec = nullptr) const;

  bool operator==(const TwoLevelDecisionSet& o) const;

  friend TwoLevelDecisionSet fit_rule_accuracies(
      const TwoLevelDecisionSet& model, const TabularDataset& data,
      const std::vector<std::string>& target);

 private:
  std::vector<Rule> rules_;
  std::vector<double> accuracy_;
  std::string default_label_;
  bool fitted_ = false;
};

// Freezes per-rule accuracy against a target label column and sets the
// default label to the majority target label (ties by label order).
TwoLevelDecisionSet fit_rule_accuracies(const TwoLevelDecisionSet& model,
                                        const TabularDataset& data,
                                        const std::vector<std::string>& target);

}  // namespace tlds
