#include "tlds/policy.hpp"

#include "json.hpp"

namespace tlds {

using nlohmann::ordered_json;

void FeaturePolicy::validate() const {
  for (const auto& f : desired) {
    if (prohibited.count(f))
      throw Error("feature '" + f + "' is both desired and prohibited");
    if (ambivalent.count(f))
      throw Error("feature '" + f + "' is both desired and ambivalent");
  }
  for (const auto& f : ambivalent)
    if (prohibited.count(f))
      throw Error("feature '" + f + "' is both ambivalent and prohibited");
}

void FeaturePolicy::validate_against(const TabularDataset& data) const {
  validate();
  for (const auto* group : {&desired, &ambivalent, &prohibited})
    for (const auto& f : *group)
      if (!data.has_feature(f))
        throw Error("policy references unknown feature '" + f + "'");
}

std::string FeaturePolicy::to_json() const {
  ordered_json j{{"desired", desired},
                 {"ambivalent", ambivalent},
                 {"prohibited", prohibited}};
  return j.dump(2) + "\n";
}

FeaturePolicy FeaturePolicy::from_json(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  FeaturePolicy p;
  if (j.contains("desired"))
    p.desired = j.at("desired").get<std::set<std::string>>();
  if (j.contains("ambivalent"))
    p.ambivalent = j.at("ambivalent").get<std::set<std::string>>();
  if (j.contains("prohibited"))
    p.prohibited = j.at("prohibited").get<std::set<std::string>>();
  p.validate();
  return p;
}

}  // namespace tlds
