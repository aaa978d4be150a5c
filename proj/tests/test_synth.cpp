#include "tlds/synth.hpp"

#include <cmath>
#include <map>

#include "doctest.h"

using namespace tlds;

TEST_CASE("theorem-1 generator") {
  SynthResult r = generate_theorem1(10000, 7);
  const auto& x1 = r.data.features()[0].values;
  const auto& x2 = r.data.features()[1].values;

  std::size_t positives = 0;
  for (std::size_t i = 0; i < r.data.n_rows(); ++i) {
    CHECK(std::get<double>(x1[i]) == std::get<double>(x2[i]));
    bool hot = std::get<double>(x2[i]) == 1.0;
    CHECK(r.data.label()[i] == (hot ? "1" : "0"));
    if (r.data.label()[i] == "1") ++positives;
  }
  double p = static_cast<double>(positives) / r.data.n_rows();
  CHECK(p >= 0.45);
  CHECK(p <= 0.55);

  // Cut point 0 recorded for both features.
  CHECK(r.dspec.find("x1")->cuts == std::vector<double>{0.0});
  CHECK(r.dspec.find("x2")->cuts == std::vector<double>{0.0});

  // Byte-identical regeneration.
  SynthResult again = generate_theorem1(10000, 7);
  CHECK(again.data.to_csv() == r.data.to_csv());
  SynthResult other = generate_theorem1(10000, 8);
  CHECK(other.data.to_csv() != r.data.to_csv());
}

TEST_CASE("correlated-bail generator") {
  SUBCASE("rho = 1 makes the proxy a deterministic function of race") {
    SynthSpec spec{Generator::correlated_bail, 4000, 11, 1.0, 0.1};
    SynthResult r = generate_correlated_bail(spec);
    std::size_t race_col = r.data.feature_index("race");
    std::size_t zip_col = r.data.feature_index("zip_region");
    std::map<std::string, std::set<std::string>> mapping;
    for (std::size_t i = 0; i < r.data.n_rows(); ++i) {
      mapping[std::get<std::string>(r.data.features()[race_col].values[i])]
          .insert(std::get<std::string>(r.data.features()[zip_col].values[i]));
    }
    for (const auto& [level, images] : mapping) CHECK(images.size() == 1);
  }

  SUBCASE("rho = 0 leaves the proxy independent (mutual information)") {
    SynthSpec spec{Generator::correlated_bail, 10000, 11, 0.0, 0.1};
    SynthResult r = generate_correlated_bail(spec);
    std::size_t race_col = r.data.feature_index("race");
    std::size_t zip_col = r.data.feature_index("zip_region");
    std::map<std::pair<std::string, std::string>, double> joint;
    std::map<std::string, double> pa, pb;
    const double n = static_cast<double>(r.data.n_rows());
    for (std::size_t i = 0; i < r.data.n_rows(); ++i) {
      auto a = std::get<std::string>(r.data.features()[race_col].values[i]);
      auto b = std::get<std::string>(r.data.features()[zip_col].values[i]);
      joint[{a, b}] += 1.0 / n;
      pa[a] += 1.0 / n;
      pb[b] += 1.0 / n;
    }
    double mi = 0;
    for (const auto& [key, pab] : joint)
      mi += pab * std::log2(pab / (pa[key.first] * pb[key.second]));
    CHECK(mi < 0.01);
  }

  SUBCASE("zero noise: planted rules reach training accuracy 1") {
    SynthSpec spec{Generator::correlated_bail, 3000, 11, 0.9, 0.0};
    SynthResult r = generate_correlated_bail(spec);
    REQUIRE(r.planted.has_value());
    auto preds = r.planted->predict_all(r.data);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < preds.size(); ++i)
      if (preds[i] == r.data.label()[i]) ++agree;
    CHECK(agree == preds.size());
  }

  SUBCASE("planted predictions reproduce the planted formula") {
    SynthSpec spec{Generator::correlated_bail, 2000, 13, 0.5, 0.2};
    SynthResult r = generate_correlated_bail(spec);
    std::size_t race = r.data.feature_index("race");
    std::size_t gender = r.data.feature_index("gender");
    std::size_t pji = r.data.feature_index("PJI");
    std::size_t priors = r.data.feature_index("priors");
    auto preds = r.planted->predict_all(r.data);
    for (std::size_t i = 0; i < r.data.n_rows(); ++i) {
      bool black =
          std::get<std::string>(r.data.features()[race].values[i]) == "black";
      bool male =
          std::get<std::string>(r.data.features()[gender].values[i]) == "male";
      double vp = std::get<double>(r.data.features()[priors].values[i]);
      double vj = std::get<double>(r.data.features()[pji].values[i]);
      bool risky = (black && vp >= 2) || (male && vj >= 2) || vp >= 4;
      CHECK(preds[i] == (risky ? "1" : "0"));
    }
  }

  SUBCASE("generation is deterministic given the seed") {
    SynthSpec spec{Generator::correlated_bail, 1500, 29, 0.9, 0.1};
    SynthResult a = generate_correlated_bail(spec);
    SynthResult b = generate_correlated_bail(spec);
    CHECK(a.data.to_csv() == b.data.to_csv());
    CHECK(a.planted->to_json() == b.planted->to_json());
  }

  SUBCASE("spec validation") {
    SynthSpec bad{Generator::correlated_bail, 0, 1, 0.9, 0.1};
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = {Generator::correlated_bail, 10, 1, 1.5, 0.1};
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = {Generator::correlated_bail, 10, 1, 0.9, 0.5};
    CHECK_THROWS_AS(bad.validate(), Error);
  }
}

TEST_CASE("generated data round-trips through csv save/load") {
  SynthSpec spec{Generator::correlated_bail, 200, 3, 0.9, 0.1};
  SynthResult r = generate_correlated_bail(spec);
  TabularDataset back = parse_csv(r.data.to_csv(), r.data.schema());
  CHECK(back.to_csv() == r.data.to_csv());
  CHECK(back.n_rows() == r.data.n_rows());
}
