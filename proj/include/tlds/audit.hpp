#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tlds/measures.hpp"
#include "tlds/optimizer.hpp"

namespace tlds {

// Relative error kept as exact counts; value() is the 0-1 loss fraction.
struct RelError {
  std::int64_t mismatches = 0;
  std::int64_t n = 0;

  double value() const { return static_cast<double>(mismatches) / n; }
};

RelError relative_error(const std::vector<std::string>& a,
                        const std::vector<std::string>& b);
RelError relative_error(const TwoLevelDecisionSet& e,
                        const TwoLevelDecisionSet& b,
                        const TabularDataset& data);

// A model is acceptable when every desired feature appears in some rule and
// no prohibited feature appears anywhere. Serves both explanations and
// interpretable black boxes.
bool is_acceptable(const TwoLevelDecisionSet& model,
                   const FeaturePolicy& policy);

struct TrustEstimate {
  bool o_hat = false;
  std::optional<bool> o_star_hat;
  std::optional<bool> potentially_misleading;
  double relative_error = 0;
};

// o_hat = acceptable(E) and L(E,B) <= eps_plus; o_star_hat = acceptable(B).
TrustEstimate estimated_trust(const TwoLevelDecisionSet& explanation,
                              const TwoLevelDecisionSet* blackbox,
                              const TabularDataset& data,
                              const FeaturePolicy& policy, double eps_plus);

// Black box known only through its predictions: o_star_hat and
// misleadingness stay undecided.
TrustEstimate estimated_trust(const TwoLevelDecisionSet& explanation,
                              const std::vector<std::string>& blackbox_preds,
                              const TabularDataset& data,
                              const FeaturePolicy& policy, double eps_plus);

// Acceptability-enforced search: optimizes over policy-filtered pools and,
// if desired features are missing from the result, retries with lambda6
// doubled up to three times. Throws listing the uncovered desired features
// when enforcement fails.
TwoLevelDecisionSet optimize_acceptable(const TabularDataset& data,
                                        const std::vector<std::string>& target,
                                        const CandidatePools& pools,
                                        const LabelSet& labels,
                                        const FeaturePolicy& policy,
                                        const ObjectiveConfig& cfg,
                                        std::uint64_t seed, std::int64_t budget,
                                        RunReport* report = nullptr);

struct RestrictionResult {
  RelError eps_r;
  TwoLevelDecisionSet b_plus;
};

// b_plus approximates the best acceptable black box for B; eps_r = L(b_plus, B).
RestrictionResult restriction_error(const TwoLevelDecisionSet& blackbox,
                                    const TabularDataset& data,
                                    const CandidatePools& pools,
                                    const LabelSet& labels,
                                    const FeaturePolicy& policy,
                                    const ObjectiveConfig& cfg,
                                    std::uint64_t seed,
                                    std::int64_t budget = kDefaultBudget);

struct AcceptableErrorResult {
  double eps_a = 0;
  RelError loss_unrestricted;  // L(E', B+)
  RelError loss_acceptable;    // L(E+, B+)
  TwoLevelDecisionSet e_prime;
  TwoLevelDecisionSet e_plus;
};

// E' = best unrestricted explanation of B+, E+ = best acceptable explanation
// of B+; eps_a = max(0, L(E',B+) - L(E+,B+)), clamped because approximate
// optimization can invert the sign exact optima guarantee.
AcceptableErrorResult acceptable_relative_error(
    const TwoLevelDecisionSet& b_plus, const TabularDataset& data,
    const CandidatePools& pools, const LabelSet& labels,
    const FeaturePolicy& policy, const ObjectiveConfig& cfg, std::uint64_t seed,
    std::int64_t budget = kDefaultBudget);

struct Theorem2Check {
  double lhs = 0;  // L(E+, B)
  double rhs = 0;  // L(E, B) + 2*eps_r + eps_a
  bool bound_holds = false;
  bool premise_holds = false;        // rhs <= eps_plus
  bool misleading_predicted = false;
};

Theorem2Check theorem2_check(double l_eb, double eps_r, double eps_a,
                             double eps_plus, double l_eplus_b);

// Exact variant over shared-denominator counts; eps_a enters as counts of
// the two losses it is defined from.
Theorem2Check theorem2_check_exact(const RelError& l_eb, const RelError& eps_r,
                                   const RelError& l_eprime_bplus,
                                   const RelError& l_eplus_bplus,
                                   double eps_plus, const RelError& l_eplus_b);

struct AuditReport {
  double relative_error = 0;
  double fidelity = 0;
  bool acceptable_explanation = false;
  bool acceptable_blackbox = false;
  bool o_hat = false;
  bool o_star_hat = false;
  bool potentially_misleading = false;
  double eps_plus = 0;
  std::optional<double> eps_r;
  std::optional<double> eps_a;
  std::optional<Theorem2Check> theorem2;
  bool approximate = true;  // optimizer-backed eps_r / eps_a legs

  std::string to_json() const;
  std::string verdict_line() const;
};

// Fidelity, acceptability, and trust estimates on the supplied evaluation
// split.
AuditReport run_audit(const TwoLevelDecisionSet& explanation,
                      const TwoLevelDecisionSet& blackbox,
                      const TabularDataset& data, const FeaturePolicy& policy,
                      double eps_plus);

// Adds the optimizer-approximated eps_r, eps_a, and the Theorem-2 bound
// status.
AuditReport run_audit_full(const TwoLevelDecisionSet& explanation,
                           const TwoLevelDecisionSet& blackbox,
                           const TabularDataset& data,
                           const CandidatePools& pools, const LabelSet& labels,
                           const FeaturePolicy& policy,
                           const ObjectiveConfig& cfg, double eps_plus,
                           std::uint64_t seed,
                           std::int64_t budget = kDefaultBudget);

}  // namespace tlds
