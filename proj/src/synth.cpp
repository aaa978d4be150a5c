#include "tlds/synth.hpp"

#include "tlds/rng.hpp"

namespace tlds {

Generator generator_from_string(const std::string& s) {
  if (s == "theorem1") return Generator::theorem1;
  if (s == "correlated-bail") return Generator::correlated_bail;
  throw Error("unknown generator '" + s + "'");
}

std::string to_string(Generator g) {
  return g == Generator::theorem1 ? "theorem1" : "correlated-bail";
}

void SynthSpec::validate() const {
  if (n_rows < 1) throw Error("n_rows must be at least 1");
  if (rho < 0 || rho > 1) throw Error("rho must be in [0, 1]");
  if (noise < 0 || noise >= 0.5) throw Error("noise must be in [0, 0.5)");
}

SynthResult generate_theorem1(std::size_t n_rows, std::uint64_t seed) {
  if (n_rows < 1) throw Error("n_rows must be at least 1");
  Rng rng(seed);
  std::vector<Cell> x1, x2;
  std::vector<std::string> y;
  x1.reserve(n_rows);
  x2.reserve(n_rows);
  y.reserve(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) {
    double z = rng.normal();
    double bin = z >= 0 ? 1.0 : 0.0;  // x2 = x1, both cut at 0
    x1.push_back(bin);
    x2.push_back(bin);
    y.push_back(bin == 1.0 ? "1" : "0");
  }
  SynthResult out;
  out.data.add_feature({"x1", FeatureKind::numeric, std::move(x1)});
  out.data.add_feature({"x2", FeatureKind::numeric, std::move(x2)});
  out.data.set_label(std::move(y));
  out.dspec.entries.push_back({"x1", FeatureKind::numeric, {0.0}, false});
  out.dspec.entries.push_back({"x2", FeatureKind::numeric, {0.0}, false});
  return out;
}

namespace {

// Single-uniform draw over a small discrete distribution.
double discrete(Rng& rng, const std::vector<double>& probs) {
  double u = rng.uniform();
  double acc = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<double>(i);
  }
  return static_cast<double>(probs.size() - 1);
}

}  // namespace

SynthResult generate_correlated_bail(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t n = spec.n_rows;

  std::vector<Cell> race(n), gender(n), zip_region(n), employment(n);
  std::vector<Cell> pji(n), pfta(n), priors(n), age_group(n), education(n);
  std::vector<Cell> offense_felony(n), married(n), pays_rent(n);
  std::vector<Cell> lives_with_children(n), drug_history(n), owns_car(n);
  std::vector<std::string> label(n), planted_label(n);

  for (std::size_t i = 0; i < n; ++i) {
    const bool is_black = rng.bernoulli(0.5);
    const bool is_male = rng.bernoulli(0.5);
    race[i] = std::string(is_black ? "black" : "white");
    gender[i] = std::string(is_male ? "male" : "female");

    // Proxies mirror race/gender with probability rho, else draw uniformly.
    bool zip_south = rng.bernoulli(spec.rho) ? is_black : rng.bernoulli(0.5);
    bool unemployed = rng.bernoulli(spec.rho) ? is_male : rng.bernoulli(0.5);
    zip_region[i] = std::string(zip_south ? "south" : "north");
    employment[i] = std::string(unemployed ? "unemployed" : "employed");

    double v_pji = discrete(rng, {0.45, 0.25, 0.20, 0.10});
    double v_pfta = discrete(rng, {0.50, 0.25, 0.15, 0.10});
    double v_priors = discrete(rng, {0.30, 0.20, 0.20, 0.10, 0.10, 0.10});
    pji[i] = v_pji;
    pfta[i] = v_pfta;
    priors[i] = v_priors;
    age_group[i] = discrete(rng, {0.30, 0.30, 0.20, 0.20});
    education[i] = discrete(rng, {0.25, 0.25, 0.25, 0.25});
    offense_felony[i] = std::string(rng.bernoulli(0.4) ? "yes" : "no");
    married[i] = std::string(rng.bernoulli(0.35) ? "yes" : "no");
    pays_rent[i] = std::string(rng.bernoulli(0.5) ? "yes" : "no");
    lives_with_children[i] = std::string(rng.bernoulli(0.4) ? "yes" : "no");
    drug_history[i] = std::string(rng.bernoulli(0.3) ? "yes" : "no");
    owns_car[i] = std::string(rng.bernoulli(0.5) ? "yes" : "no");

    const bool risky = (is_black && v_priors >= 2) || (is_male && v_pji >= 2) ||
                       (v_priors >= 4);
    planted_label[i] = risky ? "1" : "0";
    const bool flipped = rng.bernoulli(spec.noise);
    label[i] = (risky != flipped) ? "1" : "0";
  }

  SynthResult out;
  out.data.add_feature({"race", FeatureKind::categorical, std::move(race)});
  out.data.add_feature({"gender", FeatureKind::categorical, std::move(gender)});
  out.data.add_feature({"zip_region", FeatureKind::categorical, std::move(zip_region)});
  out.data.add_feature({"employment", FeatureKind::categorical, std::move(employment)});
  out.data.add_feature({"PJI", FeatureKind::numeric, std::move(pji)});
  out.data.add_feature({"PFTA", FeatureKind::numeric, std::move(pfta)});
  out.data.add_feature({"priors", FeatureKind::numeric, std::move(priors)});
  out.data.add_feature({"age_group", FeatureKind::numeric, std::move(age_group)});
  out.data.add_feature({"education", FeatureKind::numeric, std::move(education)});
  out.data.add_feature({"offense_felony", FeatureKind::categorical, std::move(offense_felony)});
  out.data.add_feature({"married", FeatureKind::categorical, std::move(married)});
  out.data.add_feature({"pays_rent", FeatureKind::categorical, std::move(pays_rent)});
  out.data.add_feature({"lives_with_children", FeatureKind::categorical, std::move(lives_with_children)});
  out.data.add_feature({"drug_history", FeatureKind::categorical, std::move(drug_history)});
  out.data.add_feature({"owns_car", FeatureKind::categorical, std::move(owns_car)});
  out.data.set_label(std::move(label));

  for (const auto& f : out.data.features()) {
    DiscretizationSpec::Entry e;
    e.feature = f.name;
    e.kind = f.kind;
    out.dspec.entries.push_back(std::move(e));
  }

  std::vector<Rule> planted_rules;
  planted_rules.push_back(
      {Conjunction({{"priors", Op::GEQ, Cell{2.0}}}),
       Conjunction({{"race", Op::EQ, Cell{std::string("black")}}}), "1"});
  planted_rules.push_back(
      {Conjunction({{"PJI", Op::GEQ, Cell{2.0}}}),
       Conjunction({{"gender", Op::EQ, Cell{std::string("male")}}}), "1"});
  planted_rules.push_back(
      {Conjunction({{"priors", Op::GEQ, Cell{4.0}}}), Conjunction(), "1"});
  TwoLevelDecisionSet planted(std::move(planted_rules));
  // Fit against the noiseless planted labels: predictions then reproduce the
  // planted function exactly (all rules agree on "1", default "0").
  out.planted = fit_rule_accuracies(planted, out.data, planted_label);
  return out;
}

SynthResult generate(const SynthSpec& spec) {
  spec.validate();
  if (spec.generator == Generator::theorem1)
    return generate_theorem1(spec.n_rows, spec.seed);
  return generate_correlated_bail(spec);
}

}  // namespace tlds
