#include "tlds/measures.hpp"

#include <algorithm>
#include <limits>

#include "json.hpp"

namespace tlds {

using nlohmann::ordered_json;

void ObjectiveConfig::validate() const {
  for (double l : lambdas)
    if (l < 0) throw Error("lambda weights must be non-negative");
  if (eps1 < 1 || eps2 < 1 || eps3 < 1)
    throw Error("constraint bounds eps1..eps3 must be at least 1");
  if (delta <= 0) throw Error("delta must be positive");
}

std::string ObjectiveConfig::to_json() const {
  ordered_json j{{"lambdas", lambdas},
                 {"eps1", eps1},
                 {"eps2", eps2},
                 {"eps3", eps3},
                 {"delta", delta}};
  return j.dump(2) + "\n";
}

ObjectiveConfig ObjectiveConfig::from_json(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  ObjectiveConfig cfg;
  if (j.contains("lambdas")) {
    auto v = j.at("lambdas").get<std::vector<double>>();
    if (v.size() != 6) throw Error("objective config needs six lambdas");
    std::copy(v.begin(), v.end(), cfg.lambdas.begin());
  }
  if (j.contains("eps1")) cfg.eps1 = j.at("eps1").get<std::int64_t>();
  if (j.contains("eps2")) cfg.eps2 = j.at("eps2").get<std::int64_t>();
  if (j.contains("eps3")) cfg.eps3 = j.at("eps3").get<std::int64_t>();
  if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
  cfg.validate();
  return cfg;
}

MeasureContext::MeasureContext(const TabularDataset& data,
                               const std::vector<std::string>& target_labels,
                               CandidatePools pools, FeaturePolicy policy,
                               LabelSet labels)
    : data_(&data),
      pools_(std::move(pools)),
      policy_(std::move(policy)),
      labels_(std::move(labels)) {
  if (target_labels.size() != data.n_rows())
    throw Error("target label column length does not match dataset");
  target_idx_.reserve(target_labels.size());
  for (const auto& l : target_labels) target_idx_.push_back(labels_.index_of(l));

  // w_max is recomputed over both pools, never trusted from input.
  for (const auto& c : pools_.nd)
    w_max_ = std::max<std::int64_t>(w_max_, static_cast<std::int64_t>(c.width()));
  for (const auto& c : pools_.dl)
    w_max_ = std::max<std::int64_t>(w_max_, static_cast<std::int64_t>(c.width()));

  auto build_bits = [&](const std::vector<Conjunction>& pool,
                        std::map<std::string, std::size_t>& pos,
                        std::vector<RowMask>& bits) {
    for (std::size_t i = 0; i < pool.size(); ++i) {
      pos.emplace(pool[i].key(), i);
      RowMask m(data.n_rows());
      for (std::size_t r = 0; r < data.n_rows(); ++r)
        if (satisfies(data, r, pool[i])) m.set(r);
      bits.push_back(std::move(m));
    }
  };
  build_bits(pools_.nd, nd_pos_, nd_bits_);
  build_bits(pools_.dl, dl_pos_, dl_bits_);

  label_bits_.assign(labels_.size(), RowMask(data.n_rows()));
  for (std::size_t r = 0; r < target_idx_.size(); ++r)
    label_bits_[target_idx_[r]].set(r);

  desired_order_.assign(policy_.desired.begin(), policy_.desired.end());
  if (desired_order_.size() > 64)
    throw Error("more than 64 desired features are not supported");
}

std::size_t MeasureContext::nd_index(const Conjunction& c) const {
  auto it = nd_pos_.find(c.key());
  if (it == nd_pos_.end())
    throw Error("descriptor [" + c.key() + "] is not in the ND candidate pool");
  return it->second;
}

std::size_t MeasureContext::dl_index(const Conjunction& c) const {
  auto it = dl_pos_.find(c.key());
  if (it == dl_pos_.end())
    throw Error("antecedent [" + c.key() + "] is not in the DL candidate pool");
  return it->second;
}

RowMask MeasureContext::rule_bits(const Rule& r) const {
  return nd_bits_[nd_index(r.q)] & dl_bits_[dl_index(r.s)];
}

std::uint64_t MeasureContext::desired_mask(const Conjunction& q,
                                           const Conjunction& s) const {
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < desired_order_.size(); ++i) {
    const std::string& d = desired_order_[i];
    for (const auto& p : q.predicates())
      if (p.feature == d) mask |= (std::uint64_t{1} << i);
    for (const auto& p : s.predicates())
      if (p.feature == d) mask |= (std::uint64_t{1} << i);
  }
  return mask;
}

namespace {

std::int64_t conj_width(const Conjunction& c) {
  return static_cast<std::int64_t>(c.width());
}

// Features shared between an outer descriptor and an inner antecedent.
std::int64_t feature_overlap(const Conjunction& q, const Conjunction& s) {
  std::int64_t n = 0;
  auto qf = q.features();
  for (const auto& f : s.features())
    if (qf.count(f)) ++n;
  return n;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  __int128 r = static_cast<__int128>(a) * b;
  if (r > std::numeric_limits<std::int64_t>::max())
    throw Error("objective normalizer overflows 64-bit range; candidate pools "
                "are too large");
  return static_cast<std::int64_t>(r);
}

}  // namespace

RawMeasures raw_measures(const TwoLevelDecisionSet& model,
                         const MeasureContext& ctx) {
  RawMeasures m;
  const auto& rules = model.rules();
  m.size = static_cast<std::int64_t>(rules.size());

  std::vector<RowMask> bits;
  bits.reserve(rules.size());
  std::set<std::string> dset;
  std::uint64_t desired = 0;
  for (const auto& r : rules) {
    if (!ctx.labels().contains(r.c))
      throw Error("rule label '" + r.c + "' is not in the label set");
    bits.push_back(ctx.rule_bits(r));
    m.maxwidth = std::max({m.maxwidth, conj_width(r.q), conj_width(r.s)});
    m.numpreds += conj_width(r.q) + conj_width(r.s);
    m.featureoverlap += feature_overlap(r.q, r.s);
    dset.insert(r.q.key());
    desired |= ctx.desired_mask(r.q, r.s);
  }
  m.numdsets = static_cast<std::int64_t>(dset.size());
  m.coverdesired = std::popcount(desired);

  if (!rules.empty()) {
    RowMask all(ctx.data().n_rows());
    for (const auto& b : bits) all |= b;
    m.cover = static_cast<std::int64_t>(all.count());
  }
  for (std::size_t i = 0; i < rules.size(); ++i) {
    for (std::size_t j = 0; j < rules.size(); ++j)
      if (j != i)
        m.ruleoverlap +=
            static_cast<std::int64_t>(RowMask::count_and(bits[i], bits[j]));
    std::size_t label = ctx.labels().index_of(rules[i].c);
    std::size_t agree = RowMask::count_and(bits[i], ctx.label_bits(label));
    m.disagreement += static_cast<std::int64_t>(bits[i].count() - agree);
  }
  return m;
}

std::array<std::int64_t, 6> objective_terms(const RawMeasures& raw,
                                            const MeasureContext& ctx) {
  const std::int64_t pool_product = checked_mul(ctx.nd_size(), ctx.dl_size());
  const std::int64_t w = ctx.w_max();
  const std::int64_t n = ctx.n_rows();
  std::array<std::int64_t, 6> f;
  f[0] = 2 * checked_mul(w, pool_product) - raw.numpreds;
  f[1] = checked_mul(w, pool_product) - raw.featureoverlap;
  f[2] = checked_mul(n, checked_mul(pool_product, pool_product)) -
         raw.ruleoverlap;
  f[3] = raw.cover;
  f[4] = checked_mul(n, pool_product) - raw.disagreement;
  f[5] = raw.coverdesired;
  // Guaranteed when the rule set is drawn from the pools and its size stays
  // within |ND|*|DL|; feasible sets are far below that.
  if (raw.size <= pool_product)
    for (std::size_t i = 0; i < 6; ++i)
      if (f[i] < 0)
        throw std::logic_error("objective term f" + std::to_string(i + 1) +
                               " is negative");
  return f;
}

double objective_value(const std::array<std::int64_t, 6>& terms,
                       const ObjectiveConfig& cfg) {
  double v = 0;
  for (std::size_t i = 0; i < 6; ++i)
    v += cfg.lambdas[i] * static_cast<double>(terms[i]);
  return v;
}

double objective(const TwoLevelDecisionSet& model, const MeasureContext& ctx,
                 const ObjectiveConfig& cfg) {
  return objective_value(objective_terms(raw_measures(model, ctx), ctx), cfg);
}

bool constraints_ok(const TwoLevelDecisionSet& model, const MeasureContext& ctx,
                    const ObjectiveConfig& cfg) {
  RawMeasures m = raw_measures(model, ctx);
  return m.size <= cfg.eps1 && m.maxwidth <= cfg.eps2 && m.numdsets <= cfg.eps3;
}

std::string measures_to_json(const RawMeasures& raw,
                             const std::array<std::int64_t, 6>& terms) {
  ordered_json j{{"raw",
                  {{"size", raw.size},
                   {"maxwidth", raw.maxwidth},
                   {"numpreds", raw.numpreds},
                   {"numdsets", raw.numdsets},
                   {"featureoverlap", raw.featureoverlap},
                   {"ruleoverlap", raw.ruleoverlap},
                   {"cover", raw.cover},
                   {"disagreement", raw.disagreement},
                   {"coverdesired", raw.coverdesired}}},
                 {"terms",
                  {{"f1", terms[0]},
                   {"f2", terms[1]},
                   {"f3", terms[2]},
                   {"f4", terms[3]},
                   {"f5", terms[4]},
                   {"f6", terms[5]}}}};
  return j.dump(2) + "\n";
}

}  // namespace tlds
