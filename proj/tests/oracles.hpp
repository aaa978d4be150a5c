// Test-only oracles: exhaustive enumerations kept independent of the library
// code paths they check.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tlds/audit.hpp"
#include "tlds/discretize.hpp"
#include "tlds/measures.hpp"
#include "tlds/mining.hpp"
#include "tlds/model.hpp"
#include "tlds/rng.hpp"

namespace oracle {

using namespace tlds;

// Direct per-definition recount of every raw measure via satisfies() row
// loops; no pool bitsets or caches involved.
inline RawMeasures recount_measures(const TwoLevelDecisionSet& model,
                                    const TabularDataset& data,
                                    const std::vector<std::string>& target,
                                    const FeaturePolicy& policy) {
  RawMeasures m;
  const auto& rules = model.rules();
  m.size = static_cast<std::int64_t>(rules.size());

  std::set<std::string> dset;
  for (const auto& r : rules) {
    m.maxwidth = std::max<std::int64_t>(
        m.maxwidth, std::max(r.q.width(), r.s.width()));
    m.numpreds += static_cast<std::int64_t>(r.q.width() + r.s.width());
    dset.insert(r.q.key());
    const auto qf = r.q.features();
    for (const auto& f : r.s.features())
      if (qf.count(f)) ++m.featureoverlap;
  }
  m.numdsets = static_cast<std::int64_t>(dset.size());

  auto covered = [&](const Rule& r, std::size_t row) {
    return satisfies(data, row, r.q) && satisfies(data, row, r.s);
  };
  for (std::size_t row = 0; row < data.n_rows(); ++row) {
    bool any = false;
    for (const auto& r : rules)
      if (covered(r, row)) any = true;
    if (any) ++m.cover;
  }
  for (std::size_t i = 0; i < rules.size(); ++i) {
    for (std::size_t j = 0; j < rules.size(); ++j) {
      if (i == j) continue;
      for (std::size_t row = 0; row < data.n_rows(); ++row)
        if (covered(rules[i], row) && covered(rules[j], row)) ++m.ruleoverlap;
    }
    for (std::size_t row = 0; row < data.n_rows(); ++row)
      if (covered(rules[i], row) && target[row] != rules[i].c)
        ++m.disagreement;
  }
  for (const auto& d : policy.desired) {
    bool present = false;
    for (const auto& r : rules)
      if (r.features().count(d)) present = true;
    if (present) ++m.coverdesired;
  }
  return m;
}

// All frequent conjunctions by direct subset enumeration over the predicate
// universe (at most one predicate per feature), support recounted per row.
inline std::map<std::string, double> enumerate_frequent(
    const TabularDataset& data, double min_support, std::size_t max_width) {
  const std::vector<Predicate> universe = predicate_universe(data);
  std::map<std::string, double> result;
  const std::size_t n = data.n_rows();

  std::vector<std::size_t> chosen;
  std::function<void(std::size_t)> recurse = [&](std::size_t start) {
    if (!chosen.empty()) {
      std::vector<Predicate> preds;
      for (std::size_t i : chosen) preds.push_back(universe[i]);
      Conjunction conj(preds);
      std::size_t count = 0;
      for (std::size_t row = 0; row < n; ++row)
        if (satisfies(data, row, conj)) ++count;
      double support = static_cast<double>(count) / static_cast<double>(n);
      if (support >= min_support) result[conj.key()] = support;
      // Apriori property makes pruning safe for the oracle too, but keep the
      // enumeration exhaustive: only width limits recursion.
    }
    if (chosen.size() == max_width) return;
    for (std::size_t i = start; i < universe.size(); ++i) {
      bool dup_feature = false;
      for (std::size_t j : chosen)
        if (universe[j].feature == universe[i].feature) dup_feature = true;
      if (dup_feature) continue;
      chosen.push_back(i);
      recurse(i + 1);
      chosen.pop_back();
    }
  };
  recurse(0);
  return result;
}

// Ground set of candidate triples in canonical order.
inline std::vector<Rule> ground_set(const CandidatePools& pools,
                                    const LabelSet& labels) {
  std::vector<Rule> triples;
  for (const auto& q : pools.nd)
    for (const auto& s : pools.dl)
      for (const auto& c : labels.labels()) triples.push_back({q, s, c});
  return triples;
}

// Exhaustive search over all feasible rule sets of size <= eps1, scored by an
// arbitrary callback (higher is better). Ties keep the first subset in
// enumeration order.
inline TwoLevelDecisionSet brute_force_best(
    const MeasureContext& ctx, const ObjectiveConfig& cfg,
    const std::function<double(const TwoLevelDecisionSet&)>& score,
    double* best_score = nullptr) {
  const std::vector<Rule> triples = ground_set(ctx.pools(), ctx.labels());
  TwoLevelDecisionSet best;
  double best_val = 0;
  bool found = false;

  std::vector<std::size_t> chosen;
  std::function<void(std::size_t)> recurse = [&](std::size_t start) {
    std::vector<Rule> rules;
    for (std::size_t i : chosen) rules.push_back(triples[i]);
    TwoLevelDecisionSet model(rules);
    if (constraints_ok(model, ctx, cfg)) {
      double val = score(model);
      if (!found || val > best_val) {
        found = true;
        best_val = val;
        best = model;
      }
    }
    if (chosen.size() == static_cast<std::size_t>(cfg.eps1)) return;
    for (std::size_t i = start; i < triples.size(); ++i) {
      chosen.push_back(i);
      recurse(i + 1);
      chosen.pop_back();
    }
  };
  recurse(0);
  if (best_score != nullptr) *best_score = best_val;
  return best;
}

inline TwoLevelDecisionSet brute_force_max_objective(const MeasureContext& ctx,
                                                     const ObjectiveConfig& cfg,
                                                     double* best_score
                                                     = nullptr) {
  return brute_force_best(
      ctx, cfg,
      [&](const TwoLevelDecisionSet& m) { return objective(m, ctx, cfg); },
      best_score);
}

// Minimum 0-1 loss against target labels; optionally restricted to
// policy-acceptable rule sets. Returns the fitted model.
inline TwoLevelDecisionSet brute_force_min_loss(
    const MeasureContext& ctx, const ObjectiveConfig& cfg,
    const TabularDataset& data, const std::vector<std::string>& target,
    const FeaturePolicy* acceptability = nullptr) {
  auto score = [&](const TwoLevelDecisionSet& m) -> double {
    if (acceptability != nullptr && !is_acceptable(m, *acceptability))
      return -2.0;  // below every real score
    TwoLevelDecisionSet fitted = fit_rule_accuracies(m, data, target);
    RelError l = relative_error(fitted.predict_all(data), target);
    return -l.value();
  };
  TwoLevelDecisionSet best = brute_force_best(ctx, cfg, score);
  return fit_rule_accuracies(best, data, target);
}

// Small random instance: a handful of binary features, random labels, pools
// of single-predicate conjunctions, |ND|*|DL|*K <= 12 candidate triples.
struct TinyInstance {
  TabularDataset data;
  CandidatePools pools;
  LabelSet labels;
  FeaturePolicy policy;
  ObjectiveConfig cfg;
  std::vector<std::string> target;
};

// Richer variant: wider pools (up to width-2 conjunctions), up to three
// labels, varied constraint bounds. Ground set stays small enough for
// exhaustive search with eps1 <= 3.
inline TinyInstance random_rich_instance(Rng& rng) {
  TinyInstance t;
  const std::size_t n = 10 + rng.uniform_int(10);

  std::vector<Cell> a(n), b(n), c(n), d(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = std::string(rng.bernoulli(0.5) ? "yes" : "no");
    b[i] = static_cast<double>(rng.uniform_int(2));
    c[i] = static_cast<double>(rng.uniform_int(3));
    d[i] = std::string(rng.bernoulli(0.5) ? "u" : "v");
  }
  t.data.add_feature({"alpha", FeatureKind::categorical, a});
  t.data.add_feature({"beta", FeatureKind::numeric, b});
  t.data.add_feature({"gamma", FeatureKind::numeric, c});
  t.data.add_feature({"delta", FeatureKind::categorical, d});

  const std::size_t k = 2 + rng.uniform_int(2);
  std::vector<std::string> names = {"0", "1", "2"};
  t.labels = LabelSet(std::vector<std::string>(names.begin(),
                                               names.begin() + k));
  t.target.resize(n);
  std::vector<std::string> label_col(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.target[i] = names[rng.uniform_int(k)];
    label_col[i] = t.target[i];
  }
  t.data.set_label(label_col);

  std::vector<Predicate> universe = predicate_universe(t.data);
  auto pick = [&](std::size_t count) {
    std::vector<Conjunction> pool;
    std::set<std::string> used;
    int guard = 0;
    while (pool.size() < count && ++guard < 200) {
      std::vector<Predicate> preds;
      preds.push_back(universe[rng.uniform_int(universe.size())]);
      if (rng.bernoulli(0.4)) {
        const Predicate& extra = universe[rng.uniform_int(universe.size())];
        if (extra.feature != preds[0].feature) preds.push_back(extra);
      }
      try {
        Conjunction conj(preds);
        if (used.insert(conj.key()).second) pool.push_back(conj);
      } catch (const Error&) {
      }
    }
    std::sort(pool.begin(), pool.end());
    return pool;
  };
  t.pools.nd = pick(2 + rng.uniform_int(2));
  t.pools.dl = pick(2 + rng.uniform_int(3));

  t.cfg.eps1 = 2 + rng.uniform_int(2);
  t.cfg.eps2 = 2;
  t.cfg.eps3 = 1 + rng.uniform_int(2);
  t.cfg.delta = 0.1;
  for (std::size_t i = 0; i < 6; ++i)
    t.cfg.lambdas[i] = rng.bernoulli(0.3) ? 0.0 : rng.uniform() * 2.0;
  if (rng.bernoulli(0.5)) t.policy.desired = {"beta"};
  return t;
}

inline TinyInstance random_tiny_instance(Rng& rng, bool with_policy = false) {
  TinyInstance t;
  const std::size_t n = 8 + rng.uniform_int(8);

  std::vector<Cell> a(n), b(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = std::string(rng.bernoulli(0.5) ? "yes" : "no");
    b[i] = static_cast<double>(rng.uniform_int(2));
    c[i] = static_cast<double>(rng.uniform_int(3));
  }
  t.data.add_feature({"alpha", FeatureKind::categorical, a});
  t.data.add_feature({"beta", FeatureKind::numeric, b});
  t.data.add_feature({"gamma", FeatureKind::numeric, c});

  t.target.resize(n);
  std::vector<std::string> label_col(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.target[i] = rng.bernoulli(0.5) ? "1" : "0";
    label_col[i] = t.target[i];
  }
  t.data.set_label(label_col);
  t.labels = LabelSet({"0", "1"});

  // Pools from single predicates; 2 x 3 x 2 = 12 candidate triples.
  std::vector<Predicate> universe = predicate_universe(t.data);
  auto pick = [&](std::size_t count) {
    std::vector<Conjunction> pool;
    std::set<std::string> used;
    while (pool.size() < count && used.size() < universe.size()) {
      std::size_t i = rng.uniform_int(universe.size());
      Conjunction conj({universe[i]});
      if (used.insert(conj.key()).second) pool.push_back(conj);
    }
    std::sort(pool.begin(), pool.end());
    return pool;
  };
  t.pools.nd = pick(2);
  t.pools.dl = pick(3);

  t.cfg.eps1 = 2;
  t.cfg.eps2 = 2;
  t.cfg.eps3 = 2;
  t.cfg.delta = 0.1;
  for (std::size_t i = 0; i < 6; ++i)
    t.cfg.lambdas[i] = rng.bernoulli(0.3) ? 0.0 : rng.uniform() * 2.0;

  if (with_policy) {
    t.policy.desired = {"beta"};
    if (rng.bernoulli(0.5)) t.policy.prohibited = {"alpha"};
  }
  return t;
}

}  // namespace oracle
