#include "tlds/optimizer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>

#include "json.hpp"

namespace tlds {

using nlohmann::ordered_json;

std::string RunReport::to_json() const {
  ordered_json moves = ordered_json::array();
  for (const auto& m : move_log)
    moves.push_back({{"kind", m.kind}, {"objective", m.objective}});
  ordered_json j{{"final_objective", final_objective},
                 {"per_term_values",
                  {{"f1", terms[0]},
                   {"f2", terms[1]},
                   {"f3", terms[2]},
                   {"f4", terms[3]},
                   {"f5", terms[4]},
                   {"f6", terms[5]}}},
                 {"iterations", iterations},
                 {"feasible", feasible},
                 {"budget_exhausted", budget_exhausted},
                 {"warnings", warnings},
                 {"seed", seed},
                 {"move_log", moves}};
  return j.dump(2) + "\n";
}

namespace {

// Local-search engine. Candidate triples are (qi, si, ci) indices into the
// nd pool, dl pool, and label set; the canonical triple id (qi*|DL|+si)*K+ci
// fixes enumeration order and all tie-breaks.
class LocalSearch {
 public:
  LocalSearch(const MeasureContext& ctx, const ObjectiveConfig& cfg)
      : ctx_(ctx),
        cfg_(cfg),
        nd_(ctx.pools().nd.size()),
        dl_(ctx.pools().dl.size()),
        k_(ctx.labels().size()),
        scratch_(ctx.data().n_rows()),
        union_bits_(ctx.data().n_rows()) {
    precompute_pairs();
  }

  TwoLevelDecisionSet run(std::int64_t budget, RunReport& report);

 private:
  struct Member {
    std::size_t triple, pair, qi, si, ci;
    RowMask bits;
  };

  struct Move {
    bool found = false;
    double obj = 0;
    int kind = 0;  // 0 add, 1 delete, 2 swap
    std::size_t a = 0, b = 0;
  };

  std::size_t pair_of(std::size_t qi, std::size_t si) const {
    return qi * dl_ + si;
  }
  std::size_t triple_of(std::size_t pair, std::size_t ci) const {
    return pair * k_ + ci;
  }

  void precompute_pairs();
  double objective_of_raw(const RawMeasures& raw) const;
  RawMeasures singleton_raw(std::size_t pair, std::size_t ci) const;
  void rebuild_state();
  bool is_member(std::size_t triple) const;
  bool improves(double obj) const;
  void consider(Move& best, double obj, int kind, std::size_t a,
                std::size_t b) const;
  Move scan_moves();
  void apply(const Move& m);

  const MeasureContext& ctx_;
  const ObjectiveConfig& cfg_;
  std::size_t nd_, dl_, k_;

  // Per-pair data, independent of the current solution.
  std::vector<std::int32_t> pair_cover_;
  std::vector<std::int32_t> pair_agree_;  // [pair * k + c]
  std::vector<std::int16_t> pair_numpreds_;
  std::vector<std::int16_t> pair_maxw_;
  std::vector<std::int16_t> pair_fo_;
  std::vector<std::uint64_t> pair_desired_;
  std::vector<std::int32_t> dset_count_;  // members per nd descriptor

  std::vector<Member> members_;  // sorted by triple id
  RawMeasures cur_;
  double obj_cur_ = 0;
  std::uint64_t desired_union_ = 0;
  RowMask scratch_, union_bits_;
  std::vector<RowMask> union_without_;
  std::vector<std::int64_t> cover_without_;
  std::vector<std::int64_t> pair_sum_;  // sum of intersections with others
  std::vector<std::int64_t> maxw_without_;
  std::vector<std::uint64_t> desired_without_;
  long double accept_factor_ = 1.0L;
};

void LocalSearch::precompute_pairs() {
  const std::size_t pairs = nd_ * dl_;
  pair_cover_.resize(pairs);
  pair_agree_.resize(pairs * k_);
  pair_numpreds_.resize(pairs);
  pair_maxw_.resize(pairs);
  pair_fo_.resize(pairs);
  pair_desired_.resize(pairs);
  dset_count_.assign(nd_, 0);

  const auto& nd = ctx_.pools().nd;
  const auto& dl = ctx_.pools().dl;
  for (std::size_t qi = 0; qi < nd_; ++qi) {
    const auto qf = nd[qi].features();
    for (std::size_t si = 0; si < dl_; ++si) {
      const std::size_t p = pair_of(qi, si);
      RowMask::and_into(scratch_, ctx_.nd_bits(qi), ctx_.dl_bits(si));
      pair_cover_[p] = static_cast<std::int32_t>(scratch_.count());
      for (std::size_t c = 0; c < k_; ++c)
        pair_agree_[p * k_ + c] = static_cast<std::int32_t>(
            RowMask::count_and(scratch_, ctx_.label_bits(c)));
      pair_numpreds_[p] =
          static_cast<std::int16_t>(nd[qi].width() + dl[si].width());
      pair_maxw_[p] = static_cast<std::int16_t>(
          std::max(nd[qi].width(), dl[si].width()));
      std::int16_t fo = 0;
      for (const auto& f : dl[si].features())
        if (qf.count(f)) ++fo;
      pair_fo_[p] = fo;
      pair_desired_[p] = ctx_.desired_mask(nd[qi], dl[si]);
    }
  }

  long double n_ground = static_cast<long double>(nd_) * dl_ * k_;
  accept_factor_ =
      1.0L + static_cast<long double>(cfg_.delta) /
                 (n_ground * n_ground * n_ground * n_ground);
}

double LocalSearch::objective_of_raw(const RawMeasures& raw) const {
  return objective_value(objective_terms(raw, ctx_), cfg_);
}

RawMeasures LocalSearch::singleton_raw(std::size_t pair, std::size_t ci) const {
  RawMeasures raw;
  raw.size = 1;
  raw.maxwidth = pair_maxw_[pair];
  raw.numpreds = pair_numpreds_[pair];
  raw.numdsets = 1;
  raw.featureoverlap = pair_fo_[pair];
  raw.ruleoverlap = 0;
  raw.cover = pair_cover_[pair];
  raw.disagreement = pair_cover_[pair] - pair_agree_[pair * k_ + ci];
  raw.coverdesired = std::popcount(pair_desired_[pair]);
  return raw;
}

bool LocalSearch::is_member(std::size_t triple) const {
  for (const auto& m : members_)
    if (m.triple == triple) return true;
  return false;
}

bool LocalSearch::improves(double obj) const {
  return obj > obj_cur_ &&
         static_cast<long double>(obj) >=
             static_cast<long double>(obj_cur_) * accept_factor_;
}

void LocalSearch::consider(Move& best, double obj, int kind, std::size_t a,
                           std::size_t b) const {
  if (!improves(obj)) return;
  if (best.found) {
    if (obj < best.obj) return;
    if (obj == best.obj) {
      // Deterministic tie-break: add < delete < swap, then indices.
      if (kind > best.kind) return;
      if (kind == best.kind && (a > best.a || (a == best.a && b >= best.b)))
        return;
    }
  }
  best = {true, obj, kind, a, b};
}

// Rebuilds every solution-dependent cache after an accepted move.
void LocalSearch::rebuild_state() {
  const std::size_t m = members_.size();
  const std::size_t n = ctx_.data().n_rows();

  dset_count_.assign(nd_, 0);
  cur_ = RawMeasures{};
  cur_.size = static_cast<std::int64_t>(m);
  desired_union_ = 0;
  union_bits_ = RowMask(n);
  union_without_.assign(m, RowMask(n));
  cover_without_.assign(m, 0);
  pair_sum_.assign(m, 0);
  maxw_without_.assign(m, 0);
  desired_without_.assign(m, 0);

  std::set<std::string> dset_keys;
  for (std::size_t i = 0; i < m; ++i) {
    const Member& mi = members_[i];
    ++dset_count_[mi.qi];
    dset_keys.insert(ctx_.pools().nd[mi.qi].key());
    cur_.maxwidth = std::max<std::int64_t>(cur_.maxwidth, pair_maxw_[mi.pair]);
    cur_.numpreds += pair_numpreds_[mi.pair];
    cur_.featureoverlap += pair_fo_[mi.pair];
    cur_.disagreement +=
        pair_cover_[mi.pair] - pair_agree_[mi.pair * k_ + mi.ci];
    desired_union_ |= pair_desired_[mi.pair];
    union_bits_ |= mi.bits;
  }
  cur_.numdsets = static_cast<std::int64_t>(dset_keys.size());
  cur_.cover = static_cast<std::int64_t>(union_bits_.count());
  cur_.coverdesired = std::popcount(desired_union_);

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      std::int64_t inter = static_cast<std::int64_t>(
          RowMask::count_and(members_[i].bits, members_[j].bits));
      cur_.ruleoverlap += inter;
      pair_sum_[i] += inter;
      union_without_[i] |= members_[j].bits;
      maxw_without_[i] =
          std::max<std::int64_t>(maxw_without_[i], pair_maxw_[members_[j].pair]);
      desired_without_[i] |= pair_desired_[members_[j].pair];
    }
    cover_without_[i] = static_cast<std::int64_t>(union_without_[i].count());
  }
  obj_cur_ = objective_of_raw(cur_);
}

LocalSearch::Move LocalSearch::scan_moves() {
  Move best;
  const std::size_t m = members_.size();
  const std::int64_t size = static_cast<std::int64_t>(m);

  // Deletions: subsets of feasible sets stay feasible.
  for (std::size_t i = 0; i < m; ++i) {
    const Member& mi = members_[i];
    RawMeasures raw = cur_;
    raw.size -= 1;
    raw.maxwidth = maxw_without_[i];
    raw.numpreds -= pair_numpreds_[mi.pair];
    raw.featureoverlap -= pair_fo_[mi.pair];
    raw.numdsets -= (dset_count_[mi.qi] == 1) ? 1 : 0;
    raw.ruleoverlap -= 2 * pair_sum_[i];
    raw.cover = cover_without_[i];
    raw.disagreement -= pair_cover_[mi.pair] - pair_agree_[mi.pair * k_ + mi.ci];
    raw.coverdesired = std::popcount(desired_without_[i]);
    consider(best, objective_of_raw(raw), 1, i, 0);
  }

  // Additions and swaps share the per-pair scan.
  std::vector<std::int64_t> inter_p(m), swap_cover(m);
  for (std::size_t qi = 0; qi < nd_; ++qi) {
    for (std::size_t si = 0; si < dl_; ++si) {
      const std::size_t p = pair_of(qi, si);
      if (pair_maxw_[p] > cfg_.eps2) continue;
      RowMask::and_into(scratch_, ctx_.nd_bits(qi), ctx_.dl_bits(si));

      std::int64_t sum_inter = 0;
      for (std::size_t j = 0; j < m; ++j) {
        inter_p[j] = static_cast<std::int64_t>(
            RowMask::count_and(scratch_, members_[j].bits));
        sum_inter += inter_p[j];
      }
      const std::int64_t add_cover =
          cur_.cover +
          static_cast<std::int64_t>(RowMask::count_and_not(scratch_, union_bits_));
      for (std::size_t i = 0; i < m; ++i)
        swap_cover[i] = static_cast<std::int64_t>(
            RowMask::count_or(union_without_[i], scratch_));

      const bool q_in_dset = dset_count_[qi] > 0;
      for (std::size_t ci = 0; ci < k_; ++ci) {
        const std::size_t t = triple_of(p, ci);
        if (is_member(t)) continue;  // adds would duplicate, swaps collide
        const std::int64_t dis_t =
            pair_cover_[p] - pair_agree_[p * k_ + ci];

        if (size < cfg_.eps1 &&
            cur_.numdsets + (q_in_dset ? 0 : 1) <= cfg_.eps3) {
          RawMeasures raw = cur_;
          raw.size += 1;
          raw.maxwidth = std::max<std::int64_t>(raw.maxwidth, pair_maxw_[p]);
          raw.numpreds += pair_numpreds_[p];
          raw.featureoverlap += pair_fo_[p];
          raw.numdsets += q_in_dset ? 0 : 1;
          raw.ruleoverlap += 2 * sum_inter;
          raw.cover = add_cover;
          raw.disagreement += dis_t;
          raw.coverdesired = std::popcount(desired_union_ | pair_desired_[p]);
          consider(best, objective_of_raw(raw), 0, t, 0);
        }

        for (std::size_t i = 0; i < m; ++i) {
          const Member& mi = members_[i];
          // Distinct descriptors after replacing member i's q with qi.
          std::int64_t dsets = cur_.numdsets - (dset_count_[mi.qi] == 1 ? 1 : 0);
          bool q_present_after =
              (dset_count_[qi] - (qi == mi.qi ? 1 : 0)) > 0;
          dsets += q_present_after ? 0 : 1;
          if (dsets > cfg_.eps3) continue;

          RawMeasures raw = cur_;
          raw.maxwidth = std::max<std::int64_t>(maxw_without_[i], pair_maxw_[p]);
          raw.numpreds += pair_numpreds_[p] - pair_numpreds_[mi.pair];
          raw.featureoverlap += pair_fo_[p] - pair_fo_[mi.pair];
          raw.numdsets = dsets;
          raw.ruleoverlap +=
              2 * (sum_inter - inter_p[i]) - 2 * pair_sum_[i];
          raw.cover = swap_cover[i];
          raw.disagreement +=
              dis_t - (pair_cover_[mi.pair] - pair_agree_[mi.pair * k_ + mi.ci]);
          raw.coverdesired = std::popcount(desired_without_[i] | pair_desired_[p]);
          consider(best, objective_of_raw(raw), 2, i, t);
        }
      }
    }
  }
  return best;
}

void LocalSearch::apply(const Move& m) {
  if (m.kind == 0) {
    const std::size_t pair = m.a / k_;
    Member mem{m.a, pair, pair / dl_, pair % dl_, m.a % k_, RowMask()};
    RowMask::and_into(mem.bits, ctx_.nd_bits(mem.qi), ctx_.dl_bits(mem.si));
    members_.push_back(std::move(mem));
  } else if (m.kind == 1) {
    members_.erase(members_.begin() + static_cast<std::ptrdiff_t>(m.a));
  } else {
    members_.erase(members_.begin() + static_cast<std::ptrdiff_t>(m.a));
    const std::size_t pair = m.b / k_;
    Member mem{m.b, pair, pair / dl_, pair % dl_, m.b % k_, RowMask()};
    RowMask::and_into(mem.bits, ctx_.nd_bits(mem.qi), ctx_.dl_bits(mem.si));
    members_.push_back(std::move(mem));
  }
  std::sort(members_.begin(), members_.end(),
            [](const Member& x, const Member& y) { return x.triple < y.triple; });
  rebuild_state();
}

TwoLevelDecisionSet LocalSearch::run(std::int64_t budget, RunReport& report) {
  rebuild_state();
  const double obj_empty = obj_cur_;

  // Start from the single feasible triple of maximal objective.
  Move init;
  for (std::size_t p = 0; p < nd_ * dl_; ++p) {
    if (pair_maxw_[p] > cfg_.eps2) continue;
    for (std::size_t ci = 0; ci < k_; ++ci) {
      double obj = objective_of_raw(singleton_raw(p, ci));
      if (!init.found || obj > init.obj) init = {true, obj, 0, triple_of(p, ci), 0};
    }
  }
  if (init.found) {
    apply(Move{true, init.obj, 0, init.a, 0});
    if (obj_cur_ != init.obj)
      throw std::logic_error("incremental singleton evaluation diverged");
    report.move_log.push_back({"init", obj_cur_});
  }

  while (true) {
    if (report.iterations >= budget) {
      report.budget_exhausted = true;
      report.warnings.push_back("move budget exhausted before local optimum");
      break;
    }
    Move best = scan_moves();
    if (!best.found) break;
    apply(best);
    // The incrementally predicted objective must match the rebuilt state.
    if (obj_cur_ != best.obj)
      throw std::logic_error("incremental move evaluation diverged");
    ++report.iterations;
    report.move_log.push_back(
        {best.kind == 0 ? "add" : (best.kind == 1 ? "delete" : "swap"),
         obj_cur_});
  }

  // The local optimum competes with the empty set.
  if (obj_empty > obj_cur_) {
    members_.clear();
    rebuild_state();
    report.move_log.push_back({"reset_to_empty", obj_cur_});
  }

  std::vector<Rule> rules;
  rules.reserve(members_.size());
  for (const auto& mem : members_)
    rules.push_back(Rule{ctx_.pools().nd[mem.qi], ctx_.pools().dl[mem.si],
                         ctx_.labels().labels()[mem.ci]});
  TwoLevelDecisionSet model(std::move(rules));

  report.final_objective = obj_cur_;
  report.terms = objective_terms(cur_, ctx_);
  report.feasible = true;
  return model;
}

}  // namespace

TwoLevelDecisionSet optimize(const MeasureContext& ctx,
                             const ObjectiveConfig& cfg, std::uint64_t seed,
                             std::int64_t budget, RunReport* report) {
  cfg.validate();
  if (budget < 1) throw Error("optimizer budget must be at least 1");
  if (ctx.pools().nd.empty() || ctx.pools().dl.empty()) {
    std::string p;
    for (const auto& f : ctx.policy().prohibited) p += (p.empty() ? "" : ", ") + f;
    throw Error("candidate pools are empty after policy filtering (prohibited: [" +
                p + "]); the policy leaves no expressible rules");
  }

  RunReport local;
  RunReport& rep = report ? *report : local;
  rep = RunReport{};
  rep.seed = seed;

  LocalSearch search(ctx, cfg);
  TwoLevelDecisionSet model = search.run(budget, rep);

  // Post-hoc guarantees: feasibility and the hard prohibited-feature bar.
  if (!constraints_ok(model, ctx, cfg))
    throw std::logic_error("optimizer returned an infeasible rule set");
  for (const auto& f : model.features())
    if (ctx.policy().is_prohibited(f))
      throw std::logic_error("optimizer returned a prohibited feature: " + f);

  std::vector<std::string> target;
  target.reserve(ctx.target_indices().size());
  for (std::size_t idx : ctx.target_indices())
    target.push_back(ctx.labels().labels()[idx]);
  return fit_rule_accuracies(model, ctx.data(), target);
}

TwoLevelDecisionSet train_interpretable_blackbox(
    const TabularDataset& data, const CandidatePools& pools,
    const LabelSet& labels, const FeaturePolicy& policy,
    const ObjectiveConfig& cfg, std::uint64_t seed, std::int64_t budget,
    RunReport* report) {
  if (!data.has_label())
    throw Error("training requires a ground-truth label column");
  policy.validate_against(data);
  MeasureContext ctx(data, data.label(), filter_pools(pools, policy), policy,
                     labels);
  return optimize(ctx, cfg, seed, budget, report);
}

namespace {

std::size_t count_mismatches(const std::vector<std::string>& a,
                             const std::vector<std::string>& b) {
  std::size_t m = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) ++m;
  return m;
}

}  // namespace

TuneResult tune_lambdas(const TabularDataset& train,
                        const TabularDataset& validation,
                        const CandidatePools& pools, const LabelSet& labels,
                        const FeaturePolicy& policy,
                        const std::array<std::vector<double>, 6>& grid,
                        const TuneTargets& targets, const ObjectiveConfig& base,
                        std::uint64_t seed, std::int64_t budget) {
  if (!train.has_blackbox() || !validation.has_blackbox())
    throw Error("lambda tuning requires blackbox label columns");

  CandidatePools filtered = filter_pools(pools, policy);
  MeasureContext ctx(train, train.blackbox(), filtered, policy, labels);

  struct Eval {
    double fidelity;
    std::int64_t size;
  };
  std::map<std::array<double, 6>, Eval> cache;
  auto evaluate = [&](const ObjectiveConfig& cfg) -> Eval {
    auto it = cache.find(cfg.lambdas);
    if (it != cache.end()) return it->second;
    TwoLevelDecisionSet model = optimize(ctx, cfg, seed, budget);
    auto preds = model.predict_all(validation);
    double loss = static_cast<double>(count_mismatches(preds, validation.blackbox())) /
                  static_cast<double>(validation.n_rows());
    Eval e{1.0 - loss, static_cast<std::int64_t>(model.size())};
    cache.emplace(cfg.lambdas, e);
    return e;
  };

  ObjectiveConfig cur = base;
  for (std::size_t i = 0; i < 6; ++i)
    if (!grid[i].empty()) cur.lambdas[i] = grid[i][0];

  ObjectiveConfig best_overall = cur;
  Eval best_eval = evaluate(cur);

  auto track = [&](const ObjectiveConfig& cfg, const Eval& e) {
    if (e.fidelity > best_eval.fidelity) {
      best_eval = e;
      best_overall = cfg;
    }
  };
  track(cur, evaluate(cur));

  bool changed = true;
  int cycles = 0;
  while (changed && cycles < 25) {
    changed = false;
    ++cycles;
    for (std::size_t i = 0; i < 6; ++i) {
      if (grid[i].size() < 2) continue;
      double chosen = cur.lambdas[i];
      Eval chosen_eval{-1.0, 0};
      bool chosen_meets = false;
      for (double v : grid[i]) {
        ObjectiveConfig cfg = cur;
        cfg.lambdas[i] = v;
        Eval e = evaluate(cfg);
        track(cfg, e);
        bool meets = e.size <= targets.max_size;
        // Prefer configs meeting the size target; then fidelity; then grid order.
        bool better = (meets && !chosen_meets) ||
                      (meets == chosen_meets && e.fidelity > chosen_eval.fidelity);
        if (better) {
          chosen = v;
          chosen_eval = e;
          chosen_meets = meets;
        }
      }
      if (chosen != cur.lambdas[i]) {
        cur.lambdas[i] = chosen;
        changed = true;
      }
    }
  }

  TuneResult result;
  Eval final_eval = evaluate(cur);
  result.config = cur;
  result.validation_fidelity = final_eval.fidelity;
  result.size = final_eval.size;
  result.targets_met = final_eval.fidelity >= targets.min_fidelity &&
                       final_eval.size <= targets.max_size;
  if (!result.targets_met) {
    result.config = best_overall;
    result.validation_fidelity = best_eval.fidelity;
    result.size = best_eval.size;
    result.targets_met = best_eval.fidelity >= targets.min_fidelity &&
                         best_eval.size <= targets.max_size;
    if (!result.targets_met)
      result.warnings.push_back(
          "no grid point met the tuning targets; returning the best-fidelity "
          "configuration");
  }
  return result;
}

}  // namespace tlds
