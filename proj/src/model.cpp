#include "tlds/model.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "json.hpp"
#include "tlds/discretize.hpp"

namespace tlds {

using nlohmann::ordered_json;

std::string to_string(Op op) {
  switch (op) {
    case Op::EQ: return "EQ";
    case Op::GEQ: return "GEQ";
    case Op::LEQ: return "LEQ";
  }
  return "EQ";
}

Op op_from_string(const std::string& s) {
  if (s == "EQ") return Op::EQ;
  if (s == "GEQ") return Op::GEQ;
  if (s == "LEQ") return Op::LEQ;
  throw Error("unknown operator '" + s + "'");
}

std::string Predicate::text() const {
  const char* sym = op == Op::EQ ? "==" : (op == Op::GEQ ? ">=" : "<=");
  return feature + sym + format_cell(value);
}

bool Predicate::operator==(const Predicate& o) const {
  return feature == o.feature && op == o.op && value == o.value;
}

bool predicate_less(const Predicate& a, const Predicate& b) {
  if (a.feature != b.feature) return a.feature < b.feature;
  if (a.op != b.op) return static_cast<int>(a.op) < static_cast<int>(b.op);
  if (a.value.index() != b.value.index())
    return a.value.index() < b.value.index();
  if (is_numeric(a.value))
    return std::get<double>(a.value) < std::get<double>(b.value);
  return std::get<std::string>(a.value) < std::get<std::string>(b.value);
}

Conjunction::Conjunction(std::vector<Predicate> preds)
    : preds_(std::move(preds)) {
  std::sort(preds_.begin(), preds_.end(), predicate_less);
  for (std::size_t i = 1; i < preds_.size(); ++i) {
    if (preds_[i].feature == preds_[i - 1].feature &&
        preds_[i].op == preds_[i - 1].op)
      throw Error("conjunction has two predicates on (" + preds_[i].feature +
                  ", " + to_string(preds_[i].op) + ")");
  }
}

std::set<std::string> Conjunction::features() const {
  std::set<std::string> out;
  for (const auto& p : preds_) out.insert(p.feature);
  return out;
}

std::string Conjunction::key() const {
  if (preds_.empty()) return "true";
  std::string out;
  for (std::size_t i = 0; i < preds_.size(); ++i) {
    if (i) out += " & ";
    out += preds_[i].text();
  }
  return out;
}

std::string Rule::key() const {
  return "[" + q.key() + "] / [" + s.key() + "] => " + c;
}

std::set<std::string> Rule::features() const {
  std::set<std::string> out = q.features();
  for (const auto& f : s.features()) out.insert(f);
  return out;
}

bool Rule::operator==(const Rule& o) const {
  return q == o.q && s == o.s && c == o.c;
}

LabelSet::LabelSet(std::vector<std::string> labels)
    : labels_(std::move(labels)) {
  if (labels_.empty()) throw Error("label set is empty");
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size())
    throw Error("label set contains duplicates");
}

bool LabelSet::contains(const std::string& l) const {
  return std::find(labels_.begin(), labels_.end(), l) != labels_.end();
}

std::size_t LabelSet::index_of(const std::string& l) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == l) return i;
  throw Error("label '" + l + "' not in label set");
}

LabelSet LabelSet::from_column(const std::vector<std::string>& column) {
  std::set<std::string> distinct(column.begin(), column.end());
  return LabelSet(std::vector<std::string>(distinct.begin(), distinct.end()));
}

bool satisfies(const TabularDataset& data, std::size_t row,
               const Predicate& pred) {
  std::size_t col = data.feature_index(pred.feature);
  const auto& feature = data.features()[col];
  const Cell& cell = feature.values[row];
  if (pred.op == Op::EQ) {
    if (feature.kind != FeatureKind::categorical)
      throw Error("operator EQ applied to non-categorical feature '" +
                  pred.feature + "'");
    return std::get<std::string>(cell) == std::get<std::string>(pred.value);
  }
  if (feature.kind != FeatureKind::numeric)
    throw Error("ordered operator applied to categorical feature '" +
                pred.feature + "'");
  double x = std::get<double>(cell);
  double v = std::get<double>(pred.value);
  return pred.op == Op::GEQ ? x >= v : x <= v;
}

bool satisfies(const TabularDataset& data, std::size_t row,
               const Conjunction& conj) {
  for (const auto& p : conj.predicates())
    if (!satisfies(data, row, p)) return false;
  return true;
}

TwoLevelDecisionSet::TwoLevelDecisionSet(std::vector<Rule> rules)
    : rules_(std::move(rules)) {
  std::sort(rules_.begin(), rules_.end());
  rules_.erase(std::unique(rules_.begin(), rules_.end()), rules_.end());
}

const std::string& TwoLevelDecisionSet::default_label() const {
  if (!fitted_) throw Error("model is not fitted");
  return default_label_;
}

double TwoLevelDecisionSet::rule_accuracy(std::size_t i) const {
  if (!fitted_) throw Error("model is not fitted");
  return accuracy_[i];
}

std::set<std::string> TwoLevelDecisionSet::features() const {
  std::set<std::string> out;
  for (const auto& r : rules_)
    for (const auto& f : r.features()) out.insert(f);
  return out;
}

std::string TwoLevelDecisionSet::predict(const TabularDataset& data,
                                         std::size_t row) const {
  if (!fitted_) throw Error("predict requires a fitted model");
  int best = -1;
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    if (satisfies(data, row, rules_[i].q) && satisfies(data, row, rules_[i].s)) {
      // Rules are in canonical order, so strict > keeps the earliest rule
      // among accuracy ties.
      if (best < 0 || accuracy_[i] > accuracy_[best]) best = static_cast<int>(i);
    }
  }
  if (best < 0) return default_label_;
  return rules_[best].c;
}

std::vector<std::string> TwoLevelDecisionSet::predict_all(
    const TabularDataset& data) const {
  std::vector<std::string> out;
  out.reserve(data.n_rows());
  for (std::size_t r = 0; r < data.n_rows(); ++r) out.push_back(predict(data, r));
  return out;
}

namespace {

ordered_json conjunction_to_json(const Conjunction& c) {
  ordered_json preds = ordered_json::array();
  for (const auto& p : c.predicates()) {
    ordered_json jp{{"feature", p.feature}, {"op", to_string(p.op)}};
    if (is_numeric(p.value))
      jp["value"] = std::get<double>(p.value);
    else
      jp["value"] = std::get<std::string>(p.value);
    preds.push_back(std::move(jp));
  }
  return preds;
}

Conjunction conjunction_from_json(const ordered_json& j) {
  std::vector<Predicate> preds;
  for (const auto& jp : j) {
    Predicate p;
    p.feature = jp.at("feature").get<std::string>();
    p.op = op_from_string(jp.at("op").get<std::string>());
    if (jp.at("value").is_number())
      p.value = jp.at("value").get<double>();
    else
      p.value = jp.at("value").get<std::string>();
    preds.push_back(std::move(p));
  }
  return Conjunction(std::move(preds));
}

}  // namespace

std::string TwoLevelDecisionSet::to_json() const {
  ordered_json rules = ordered_json::array();
  ordered_json acc = ordered_json::object();
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const Rule& r = rules_[i];
    rules.push_back({{"q", conjunction_to_json(r.q)},
                     {"s", conjunction_to_json(r.s)},
                     {"c", r.c}});
    if (fitted_) acc[r.key()] = accuracy_[i];
  }
  ordered_json j{{"rules", rules}};
  if (fitted_) {
    j["default_label"] = default_label_;
    j["per_rule_accuracy"] = acc;
  }
  return j.dump(2) + "\n";
}

TwoLevelDecisionSet TwoLevelDecisionSet::from_json(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  std::vector<Rule> rules;
  for (const auto& jr : j.at("rules")) {
    Rule r;
    r.q = conjunction_from_json(jr.at("q"));
    r.s = conjunction_from_json(jr.at("s"));
    r.c = jr.at("c").get<std::string>();
    rules.push_back(std::move(r));
  }
  TwoLevelDecisionSet model(std::move(rules));
  if (j.contains("default_label")) {
    model.default_label_ = j.at("default_label").get<std::string>();
    const auto& acc = j.at("per_rule_accuracy");
    model.accuracy_.resize(model.rules_.size(), 0.0);
    for (std::size_t i = 0; i < model.rules_.size(); ++i) {
      const std::string key = model.rules_[i].key();
      if (!acc.contains(key))
        throw Error("per_rule_accuracy missing entry for rule " + key);
      model.accuracy_[i] = acc.at(key).get<double>();
    }
    model.fitted_ = true;
  }
  return model;
}

namespace {

// Renders one predicate, mapping bin thresholds back through the
// discretization cuts when available.
std::string render_predicate(const Predicate& p, const DiscretizationSpec* spec) {
  if (spec != nullptr && p.op != Op::EQ) {
    const auto* entry = spec->find(p.feature);
    if (entry != nullptr && !entry->cuts.empty()) {
      auto bin = static_cast<long long>(std::get<double>(p.value));
      if (p.op == Op::GEQ && bin >= 1 &&
          bin <= static_cast<long long>(entry->cuts.size()))
        return p.feature + " >= " + format_double(entry->cuts[bin - 1]);
      if (p.op == Op::LEQ && bin >= 0 &&
          bin < static_cast<long long>(entry->cuts.size()))
        return p.feature + " < " + format_double(entry->cuts[bin]);
    }
  }
  const char* sym = p.op == Op::EQ ? " == " : (p.op == Op::GEQ ? " >= " : " <= ");
  return p.feature + sym + format_cell(p.value);
}

std::string render_conjunction(const Conjunction& c,
                               const DiscretizationSpec* spec) {
  if (c.width() == 0) return "(true)";
  std::string out;
  for (std::size_t i = 0; i < c.predicates().size(); ++i) {
    if (i) out += " and ";
    out += "(" + render_predicate(c.predicates()[i], spec) + ")";
  }
  return out;
}

}  // namespace

std::string TwoLevelDecisionSet::to_text(const DiscretizationSpec* spec) const {
  // Group inner rules under their shared neighborhood descriptor.
  std::map<Conjunction, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < rules_.size(); ++i) groups[rules_[i].q].push_back(i);

  std::ostringstream out;
  for (const auto& [q, members] : groups) {
    out << "if " << render_conjunction(q, spec) << ":\n";
    for (std::size_t i : members) {
      out << "    if " << render_conjunction(rules_[i].s, spec) << " then "
          << rules_[i].c;
      if (fitted_) out << "   [accuracy " << format_double(accuracy_[i]) << "]";
      out << "\n";
    }
  }
  if (fitted_) out << "default: " << default_label_ << "\n";
  return out.str();
}

bool TwoLevelDecisionSet::operator==(const TwoLevelDecisionSet& o) const {
  return rules_ == o.rules_ && fitted_ == o.fitted_ && accuracy_ == o.accuracy_ &&
         (!fitted_ || default_label_ == o.default_label_);
}

TwoLevelDecisionSet fit_rule_accuracies(const TwoLevelDecisionSet& model,
                                        const TabularDataset& data,
                                        const std::vector<std::string>& target) {
  if (data.n_rows() == 0) throw Error("cannot fit on an empty dataset");
  if (target.size() != data.n_rows())
    throw Error("target column length does not match dataset");

  TwoLevelDecisionSet out = model;
  out.accuracy_.assign(out.rules_.size(), 0.0);
  for (std::size_t i = 0; i < out.rules_.size(); ++i) {
    std::size_t covered = 0, agree = 0;
    for (std::size_t r = 0; r < data.n_rows(); ++r) {
      if (satisfies(data, r, out.rules_[i].q) &&
          satisfies(data, r, out.rules_[i].s)) {
        ++covered;
        if (target[r] == out.rules_[i].c) ++agree;
      }
    }
    // Rules covering nothing get accuracy 0 and lose every tie-break.
    out.accuracy_[i] =
        covered == 0 ? 0.0
                     : static_cast<double>(agree) / static_cast<double>(covered);
  }

  std::map<std::string, std::size_t> counts;
  for (const auto& l : target) ++counts[l];
  std::size_t best = 0;
  std::string best_label;
  for (const auto& [label, count] : counts) {
    if (count > best) {
      best = count;
      best_label = label;
    }
  }
  out.default_label_ = best_label;
  out.fitted_ = true;
  return out;
}

}  // namespace tlds
