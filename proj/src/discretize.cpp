#include "tlds/discretize.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"

namespace tlds {

using nlohmann::ordered_json;

const DiscretizationSpec::Entry* DiscretizationSpec::find(
    const std::string& feature) const {
  for (const auto& e : entries)
    if (e.feature == feature) return &e;
  return nullptr;
}

double DiscretizationSpec::bin_of(const Entry& e, double raw) {
  std::size_t bin = 0;
  for (double c : e.cuts)
    if (raw >= c) ++bin;
  return static_cast<double>(bin);
}

TabularDataset DiscretizationSpec::apply(const TabularDataset& raw) const {
  TabularDataset out;
  for (const auto& f : raw.features()) {
    const Entry* e = find(f.name);
    if (e == nullptr)
      throw Error("discretization spec has no entry for feature '" + f.name +
                  "'");
    if (f.kind == FeatureKind::categorical) {
      out.add_feature(f);
      continue;
    }
    TabularDataset::FeatureColumn col{f.name, FeatureKind::numeric, {}};
    col.values.reserve(f.values.size());
    for (const auto& cell : f.values)
      col.values.push_back(bin_of(*e, std::get<double>(cell)));
    out.add_feature(std::move(col));
  }
  if (raw.has_label()) out.set_label(raw.label());
  if (raw.has_blackbox()) out.set_blackbox(raw.blackbox());
  return out;
}

std::string DiscretizationSpec::to_json() const {
  ordered_json feats = ordered_json::array();
  for (const auto& e : entries) {
    ordered_json je{{"feature", e.feature}, {"kind", to_string(e.kind)}};
    if (e.kind == FeatureKind::numeric) {
      je["cuts"] = e.cuts;
      je["excluded"] = e.excluded;
    }
    feats.push_back(std::move(je));
  }
  ordered_json j{{"features", feats}, {"warnings", warnings}};
  return j.dump(2) + "\n";
}

DiscretizationSpec DiscretizationSpec::from_json(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  DiscretizationSpec spec;
  for (const auto& je : j.at("features")) {
    Entry e;
    e.feature = je.at("feature").get<std::string>();
    e.kind = feature_kind_from_string(je.at("kind").get<std::string>());
    if (e.kind == FeatureKind::numeric) {
      e.cuts = je.at("cuts").get<std::vector<double>>();
      e.excluded = je.at("excluded").get<bool>();
    }
    spec.entries.push_back(std::move(e));
  }
  if (j.contains("warnings"))
    spec.warnings = j.at("warnings").get<std::vector<std::string>>();
  return spec;
}

DiscretizeResult discretize(const TabularDataset& raw,
                            const DiscretizeParams& params) {
  if (raw.n_rows() == 0) throw Error("cannot discretize an empty table");
  if (params.n_bins < 2) throw Error("n_bins must be at least 2");

  DiscretizationSpec spec;
  for (const auto& f : raw.features()) {
    DiscretizationSpec::Entry e;
    e.feature = f.name;
    e.kind = f.kind;
    if (f.kind == FeatureKind::numeric) {
      std::vector<double> sorted;
      sorted.reserve(f.values.size());
      for (const auto& cell : f.values) sorted.push_back(std::get<double>(cell));
      std::sort(sorted.begin(), sorted.end());

      std::set<double> cuts;
      for (std::size_t b = 1; b < params.n_bins; ++b) {
        std::size_t idx = b * sorted.size() / params.n_bins;
        double cut = sorted[idx];
        // A cut at the minimum would leave bin 0 empty.
        if (cut > sorted.front()) cuts.insert(cut);
      }
      e.cuts.assign(cuts.begin(), cuts.end());
      if (e.cuts.empty()) {
        e.excluded = true;
        spec.warnings.push_back("feature '" + f.name +
                                "' is constant or near-constant; no "
                                "predicates will be generated");
      }
    }
    spec.entries.push_back(std::move(e));
  }
  return {spec.apply(raw), spec};
}

std::vector<Predicate> predicate_universe(const TabularDataset& data) {
  std::vector<Predicate> out;
  for (const auto& f : data.features()) {
    if (f.kind == FeatureKind::categorical) {
      std::set<std::string> levels;
      for (const auto& cell : f.values)
        levels.insert(std::get<std::string>(cell));
      if (levels.size() < 2) continue;  // single level satisfies every row
      for (const auto& level : levels)
        out.push_back({f.name, Op::EQ, Cell{level}});
    } else {
      std::set<double> distinct;
      for (const auto& cell : f.values) distinct.insert(std::get<double>(cell));
      if (distinct.size() < 2) continue;
      std::vector<double> values(distinct.begin(), distinct.end());
      for (std::size_t k = 1; k < values.size(); ++k)
        out.push_back({f.name, Op::GEQ, Cell{values[k]}});
      for (std::size_t k = 0; k + 1 < values.size(); ++k)
        out.push_back({f.name, Op::LEQ, Cell{values[k]}});
    }
  }
  std::sort(out.begin(), out.end(), predicate_less);
  return out;
}

}  // namespace tlds
