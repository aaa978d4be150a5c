#include "tlds/mining.hpp"

#include <algorithm>

#include "json.hpp"
#include "tlds/bitset.hpp"

namespace tlds {

using nlohmann::ordered_json;

namespace {

// Itemsets are sorted vectors of indices into the predicate universe.
using ItemSet = std::vector<std::size_t>;

bool same_feature(const Predicate& a, const Predicate& b) {
  return a.feature == b.feature;
}

}  // namespace

CandidatePools mine_candidates(const TabularDataset& data, double min_support,
                               std::size_t max_width) {
  if (min_support <= 0.0 || min_support > 1.0)
    throw Error("min_support must be in (0, 1]");
  if (max_width < 1) throw Error("max_width must be at least 1");
  if (data.n_rows() == 0) throw Error("cannot mine an empty dataset");

  const std::vector<Predicate> items = predicate_universe(data);
  const std::size_t n = data.n_rows();

  // Row masks per item.
  std::vector<RowMask> item_bits;
  item_bits.reserve(items.size());
  for (const auto& p : items) {
    RowMask m(n);
    for (std::size_t r = 0; r < n; ++r)
      if (satisfies(data, r, p)) m.set(r);
    item_bits.push_back(std::move(m));
  }

  auto frequent = [&](std::size_t count) {
    return static_cast<double>(count) / static_cast<double>(n) >= min_support;
  };

  struct Mined {
    ItemSet items;
    RowMask bits;
    std::size_t count;
  };

  std::vector<Mined> level;
  std::vector<std::pair<ItemSet, double>> result;

  for (std::size_t i = 0; i < items.size(); ++i) {
    std::size_t c = item_bits[i].count();
    if (frequent(c)) {
      level.push_back({{i}, item_bits[i], c});
      result.push_back({{i}, static_cast<double>(c) / n});
    }
  }

  for (std::size_t width = 2; width <= max_width && level.size() > 1; ++width) {
    // Frequent (width-1)-itemsets, for the subset prune.
    std::set<ItemSet> prev;
    for (const auto& m : level) prev.insert(m.items);

    std::vector<Mined> next;
    for (std::size_t a = 0; a < level.size(); ++a) {
      for (std::size_t b = a + 1; b < level.size(); ++b) {
        // Join itemsets sharing all but the last item.
        if (!std::equal(level[a].items.begin(), level[a].items.end() - 1,
                        level[b].items.begin(), level[b].items.end() - 1))
          continue;
        std::size_t ia = level[a].items.back();
        std::size_t ib = level[b].items.back();
        if (same_feature(items[ia], items[ib])) continue;

        ItemSet candidate = level[a].items;
        candidate.push_back(std::max(ia, ib));
        candidate[candidate.size() - 2] = std::min(ia, ib);

        // Apriori prune: every (width-1)-subset must be frequent.
        bool prune = false;
        for (std::size_t drop = 0; drop + 2 < candidate.size() && !prune;
             ++drop) {
          ItemSet sub;
          for (std::size_t k = 0; k < candidate.size(); ++k)
            if (k != drop) sub.push_back(candidate[k]);
          if (!prev.count(sub)) prune = true;
        }
        if (prune) continue;

        RowMask bits = level[a].bits & level[b].bits;
        std::size_t c = bits.count();
        if (!frequent(c)) continue;
        next.push_back({std::move(candidate), std::move(bits), c});
        result.push_back({next.back().items, static_cast<double>(c) / n});
      }
    }
    level = std::move(next);
  }

  if (result.empty())
    throw Error("no frequent conjunctions at min_support=" +
                format_double(min_support) +
                "; lower the threshold or coarsen the discretization");

  CandidatePools pools;
  for (const auto& [itemset, support] : result) {
    std::vector<Predicate> preds;
    preds.reserve(itemset.size());
    for (std::size_t i : itemset) preds.push_back(items[i]);
    Conjunction conj(std::move(preds));
    pools.support[conj.key()] = support;
    pools.nd.push_back(std::move(conj));
  }
  std::sort(pools.nd.begin(), pools.nd.end());
  pools.dl = pools.nd;
  return pools;
}

CandidatePools cap_outer_width(CandidatePools pools,
                               std::size_t max_outer_width) {
  if (max_outer_width == 0) return pools;
  std::vector<Conjunction> nd;
  for (auto& c : pools.nd)
    if (c.width() <= max_outer_width) nd.push_back(std::move(c));
  pools.nd = std::move(nd);
  return pools;
}

CandidatePools filter_pools(const CandidatePools& pools,
                            const FeaturePolicy& policy) {
  auto clean = [&](const Conjunction& c) {
    for (const auto& p : c.predicates())
      if (policy.is_prohibited(p.feature)) return false;
    return true;
  };
  CandidatePools out;
  for (const auto& c : pools.nd)
    if (clean(c)) out.nd.push_back(c);
  for (const auto& c : pools.dl)
    if (clean(c)) out.dl.push_back(c);
  for (const auto& c : out.nd) {
    auto it = pools.support.find(c.key());
    if (it != pools.support.end()) out.support[it->first] = it->second;
  }
  for (const auto& c : out.dl) {
    auto it = pools.support.find(c.key());
    if (it != pools.support.end()) out.support[it->first] = it->second;
  }
  return out;
}

namespace {

ordered_json pool_to_json(const std::vector<Conjunction>& pool) {
  ordered_json out = ordered_json::array();
  for (const auto& c : pool) {
    ordered_json preds = ordered_json::array();
    for (const auto& p : c.predicates()) {
      ordered_json jp{{"feature", p.feature}, {"op", to_string(p.op)}};
      if (is_numeric(p.value))
        jp["value"] = std::get<double>(p.value);
      else
        jp["value"] = std::get<std::string>(p.value);
      preds.push_back(std::move(jp));
    }
    out.push_back(std::move(preds));
  }
  return out;
}

std::vector<Conjunction> pool_from_json(const ordered_json& j) {
  std::vector<Conjunction> out;
  for (const auto& jc : j) {
    std::vector<Predicate> preds;
    for (const auto& jp : jc) {
      Predicate p;
      p.feature = jp.at("feature").get<std::string>();
      p.op = op_from_string(jp.at("op").get<std::string>());
      if (jp.at("value").is_number())
        p.value = jp.at("value").get<double>();
      else
        p.value = jp.at("value").get<std::string>();
      preds.push_back(std::move(p));
    }
    out.push_back(Conjunction(std::move(preds)));
  }
  return out;
}

}  // namespace

std::string CandidatePools::to_json() const {
  ordered_json j{{"nd", pool_to_json(nd)},
                 {"dl", pool_to_json(dl)},
                 {"support", support}};
  return j.dump(2) + "\n";
}

CandidatePools CandidatePools::from_json(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  CandidatePools pools;
  pools.nd = pool_from_json(j.at("nd"));
  pools.dl = pool_from_json(j.at("dl"));
  if (j.contains("support"))
    pools.support = j.at("support").get<std::map<std::string, double>>();
  return pools;
}

}  // namespace tlds
