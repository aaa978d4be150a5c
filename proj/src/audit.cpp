#include "tlds/audit.hpp"

#include <algorithm>

#include "json.hpp"
#include "tlds/mining.hpp"

namespace tlds {

using nlohmann::ordered_json;

RelError relative_error(const std::vector<std::string>& a,
                        const std::vector<std::string>& b) {
  if (a.empty()) throw Error("relative error is undefined on an empty dataset");
  if (a.size() != b.size())
    throw Error("prediction vectors have different lengths");
  RelError e;
  e.n = static_cast<std::int64_t>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) ++e.mismatches;
  return e;
}

RelError relative_error(const TwoLevelDecisionSet& e,
                        const TwoLevelDecisionSet& b,
                        const TabularDataset& data) {
  if (data.n_rows() == 0)
    throw Error("relative error is undefined on an empty dataset");
  return relative_error(e.predict_all(data), b.predict_all(data));
}

bool is_acceptable(const TwoLevelDecisionSet& model,
                   const FeaturePolicy& policy) {
  const auto used = model.features();
  for (const auto& d : policy.desired)
    if (!used.count(d)) return false;
  for (const auto& f : used)
    if (policy.is_prohibited(f)) return false;
  return true;
}

TrustEstimate estimated_trust(const TwoLevelDecisionSet& explanation,
                              const TwoLevelDecisionSet* blackbox,
                              const TabularDataset& data,
                              const FeaturePolicy& policy, double eps_plus) {
  if (blackbox == nullptr)
    throw Error("estimated trust requires black-box predictions");
  TrustEstimate t = estimated_trust(explanation, blackbox->predict_all(data),
                                    data, policy, eps_plus);
  t.o_star_hat = is_acceptable(*blackbox, policy);
  t.potentially_misleading = (t.o_hat != *t.o_star_hat);
  return t;
}

TrustEstimate estimated_trust(const TwoLevelDecisionSet& explanation,
                              const std::vector<std::string>& blackbox_preds,
                              const TabularDataset& data,
                              const FeaturePolicy& policy, double eps_plus) {
  if (eps_plus < 0 || eps_plus > 1) throw Error("eps_plus must be in [0, 1]");
  TrustEstimate t;
  t.relative_error =
      relative_error(explanation.predict_all(data), blackbox_preds).value();
  t.o_hat = is_acceptable(explanation, policy) && t.relative_error <= eps_plus;
  return t;
}

TwoLevelDecisionSet optimize_acceptable(const TabularDataset& data,
                                        const std::vector<std::string>& target,
                                        const CandidatePools& pools,
                                        const LabelSet& labels,
                                        const FeaturePolicy& policy,
                                        const ObjectiveConfig& cfg,
                                        std::uint64_t seed, std::int64_t budget,
                                        RunReport* report) {
  CandidatePools filtered = filter_pools(pools, policy);
  MeasureContext ctx(data, target, std::move(filtered), policy, labels);

  ObjectiveConfig attempt = cfg;
  TwoLevelDecisionSet model = optimize(ctx, attempt, seed, budget, report);
  for (int retry = 0; retry < 3 && !is_acceptable(model, policy); ++retry) {
    attempt.lambdas[5] = std::max(attempt.lambdas[5], 1.0) * 2.0;
    model = optimize(ctx, attempt, seed, budget, report);
  }
  if (!is_acceptable(model, policy)) {
    const auto used = model.features();
    std::string missing;
    for (const auto& d : policy.desired)
      if (!used.count(d)) missing += (missing.empty() ? "" : ", ") + d;
    throw Error("no acceptable model found after boosting lambda6; desired "
                "features never covered: [" +
                missing + "]");
  }
  return model;
}

RestrictionResult restriction_error(const TwoLevelDecisionSet& blackbox,
                                    const TabularDataset& data,
                                    const CandidatePools& pools,
                                    const LabelSet& labels,
                                    const FeaturePolicy& policy,
                                    const ObjectiveConfig& cfg,
                                    std::uint64_t seed, std::int64_t budget) {
  const std::vector<std::string> target = blackbox.predict_all(data);
  TwoLevelDecisionSet b_plus = optimize_acceptable(data, target, pools, labels,
                                                   policy, cfg, seed, budget);
  RelError eps_r = relative_error(b_plus.predict_all(data), target);
  return {eps_r, std::move(b_plus)};
}

AcceptableErrorResult acceptable_relative_error(
    const TwoLevelDecisionSet& b_plus, const TabularDataset& data,
    const CandidatePools& pools, const LabelSet& labels,
    const FeaturePolicy& policy, const ObjectiveConfig& cfg, std::uint64_t seed,
    std::int64_t budget) {
  const std::vector<std::string> target = b_plus.predict_all(data);

  // E': unrestricted pools, no acceptability pressure.
  FeaturePolicy open;
  MeasureContext ctx(data, target, pools, open, labels);
  TwoLevelDecisionSet e_prime = optimize(ctx, cfg, seed, budget);

  // E+: policy-filtered pools with desired-coverage enforcement.
  TwoLevelDecisionSet e_plus = optimize_acceptable(data, target, pools, labels,
                                                   policy, cfg, seed, budget);

  AcceptableErrorResult out;
  out.loss_unrestricted = relative_error(e_prime.predict_all(data), target);
  out.loss_acceptable = relative_error(e_plus.predict_all(data), target);
  out.eps_a = std::max(
      0.0, out.loss_unrestricted.value() - out.loss_acceptable.value());
  out.e_prime = std::move(e_prime);
  out.e_plus = std::move(e_plus);
  return out;
}

Theorem2Check theorem2_check(double l_eb, double eps_r, double eps_a,
                             double eps_plus, double l_eplus_b) {
  Theorem2Check c;
  c.lhs = l_eplus_b;
  c.rhs = l_eb + 2 * eps_r + eps_a;
  c.bound_holds = c.lhs <= c.rhs;
  c.premise_holds = c.rhs <= eps_plus;
  c.misleading_predicted = c.premise_holds;
  return c;
}

Theorem2Check theorem2_check_exact(const RelError& l_eb, const RelError& eps_r,
                                   const RelError& l_eprime_bplus,
                                   const RelError& l_eplus_bplus,
                                   double eps_plus, const RelError& l_eplus_b) {
  const std::int64_t n = l_eb.n;
  if (eps_r.n != n || l_eplus_b.n != n || l_eprime_bplus.n != n ||
      l_eplus_bplus.n != n)
    throw Error("exact theorem-2 check needs losses over the same dataset");
  // eps_a = max(0, L(E',B+) - L(E+,B+)) as integer mismatch counts.
  const std::int64_t eps_a_num =
      std::max<std::int64_t>(0, l_eprime_bplus.mismatches -
                                    l_eplus_bplus.mismatches);
  Theorem2Check c;
  c.lhs = l_eplus_b.value();
  c.rhs = static_cast<double>(l_eb.mismatches + 2 * eps_r.mismatches +
                              eps_a_num) /
          static_cast<double>(n);
  c.bound_holds =
      l_eplus_b.mismatches <= l_eb.mismatches + 2 * eps_r.mismatches + eps_a_num;
  // Premise compared in exact count space: rhs <= eps_plus.
  c.premise_holds = static_cast<double>(l_eb.mismatches + 2 * eps_r.mismatches +
                                        eps_a_num) <=
                    eps_plus * static_cast<double>(n);
  c.misleading_predicted = c.premise_holds;
  return c;
}

namespace {

ordered_json theorem2_to_json(const Theorem2Check& c) {
  return ordered_json{{"lhs", c.lhs},
                      {"rhs", c.rhs},
                      {"holds", c.bound_holds},
                      {"premise_holds", c.premise_holds},
                      {"misleading_predicted", c.misleading_predicted}};
}

}  // namespace

std::string AuditReport::to_json() const {
  ordered_json j{{"relative_error", relative_error},
                 {"fidelity", fidelity},
                 {"acceptable_explanation", acceptable_explanation},
                 {"acceptable_blackbox", acceptable_blackbox},
                 {"o_hat", o_hat},
                 {"o_star_hat", o_star_hat},
                 {"potentially_misleading", potentially_misleading},
                 {"eps_plus", eps_plus}};
  if (eps_r) j["eps_r"] = *eps_r;
  if (eps_a) j["eps_a"] = *eps_a;
  if (theorem2) j["theorem2_bound"] = theorem2_to_json(*theorem2);
  j["approximate"] = approximate;
  return j.dump(2) + "\n";
}

std::string AuditReport::verdict_line() const {
  std::string verdict = potentially_misleading
                            ? "POTENTIALLY MISLEADING"
                            : "not flagged as misleading";
  return "audit: " + verdict + " (o_hat=" + std::to_string(o_hat ? 1 : 0) +
         ", o_star_hat=" + std::to_string(o_star_hat ? 1 : 0) +
         ", fidelity=" + format_double(fidelity) + ")";
}

AuditReport run_audit(const TwoLevelDecisionSet& explanation,
                      const TwoLevelDecisionSet& blackbox,
                      const TabularDataset& data, const FeaturePolicy& policy,
                      double eps_plus) {
  if (eps_plus < 0 || eps_plus > 1) throw Error("eps_plus must be in [0, 1]");
  AuditReport r;
  RelError l = relative_error(explanation, blackbox, data);
  r.relative_error = l.value();
  r.fidelity = 1.0 - r.relative_error;
  r.acceptable_explanation = is_acceptable(explanation, policy);
  r.acceptable_blackbox = is_acceptable(blackbox, policy);
  r.o_hat = r.acceptable_explanation && r.relative_error <= eps_plus;
  r.o_star_hat = r.acceptable_blackbox;
  r.potentially_misleading = (r.o_hat != r.o_star_hat);
  r.eps_plus = eps_plus;
  return r;
}

AuditReport run_audit_full(const TwoLevelDecisionSet& explanation,
                           const TwoLevelDecisionSet& blackbox,
                           const TabularDataset& data,
                           const CandidatePools& pools, const LabelSet& labels,
                           const FeaturePolicy& policy,
                           const ObjectiveConfig& cfg, double eps_plus,
                           std::uint64_t seed, std::int64_t budget) {
  AuditReport r = run_audit(explanation, blackbox, data, policy, eps_plus);

  RestrictionResult restriction = restriction_error(
      blackbox, data, pools, labels, policy, cfg, seed, budget);
  r.eps_r = restriction.eps_r.value();

  AcceptableErrorResult acc = acceptable_relative_error(
      restriction.b_plus, data, pools, labels, policy, cfg, seed, budget);
  r.eps_a = acc.eps_a;

  RelError l_eplus_b = relative_error(acc.e_plus, blackbox, data);
  r.theorem2 = theorem2_check(r.relative_error, *r.eps_r, *r.eps_a, eps_plus,
                              l_eplus_b.value());
  return r;
}

}  // namespace tlds
