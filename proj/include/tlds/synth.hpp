#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tlds/dataset.hpp"
#include "tlds/discretize.hpp"
#include "tlds/model.hpp"

namespace tlds {

enum class Generator { theorem1, correlated_bail };

Generator generator_from_string(const std::string& s);
std::string to_string(Generator g);

struct SynthSpec {
  Generator generator = Generator::theorem1;
  std::size_t n_rows = 10000;
  std::uint64_t seed = 7;
  double rho = 0.9;    // proxy correlation (correlated-bail only)
  double noise = 0.1;  // label flip probability

  void validate() const;
};

struct SynthResult {
  TabularDataset data;
  DiscretizationSpec dspec;
  // Rule set the labels were planted from (correlated-bail only), fitted so
  // its predictions reproduce the noiseless planted labels.
  std::optional<TwoLevelDecisionSet> planted;
};

// Two perfectly correlated features x1 = x2 ~ N(0,1), label = [x2 >= 0],
// emitted pre-discretized at the cut point 0 (cells are bins {0,1}).
SynthResult generate_theorem1(std::size_t n_rows, std::uint64_t seed);

// Bail-style table: race/gender, desired-style PJI/PFTA, proxy features
// correlated with race/gender at level rho, assorted ambivalent features,
// and labels planted from rules over race/gender plus noise.
SynthResult generate_correlated_bail(const SynthSpec& spec);

SynthResult generate(const SynthSpec& spec);

}  // namespace tlds
