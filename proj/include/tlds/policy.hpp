#pragma once

#include <set>
#include <string>

#include "tlds/dataset.hpp"

namespace tlds {

// User-declared partition of features into desired (must appear), ambivalent,
// and prohibited (must not appear). Features left unlisted are ambivalent.
struct FeaturePolicy {
  std::set<std::string> desired;
  std::set<std::string> ambivalent;
  std::set<std::string> prohibited;

  bool is_prohibited(const std::string& feature) const {
    return prohibited.count(feature) > 0;
  }

  // Rejects overlapping sets; with a dataset, also rejects unknown features.
  void validate() const;
  void validate_against(const TabularDataset& data) const;

  std::string to_json() const;
  static FeaturePolicy from_json(const std::string& text);
};

}  // namespace tlds
