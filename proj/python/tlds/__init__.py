"""Two-level decision-set explanations of black-box classifiers, with
policy-aware synthesis (desired features in, prohibited features out) and
misleadingness audits."""

import json as _json

from tlds._core import (
    CandidatePools,
    Dataset,
    DecisionSet,
    FeaturePolicy,
    ObjectiveConfig,
    SynthResult,
    TldsError,
    cap_outer_width,
    correlated_bail_experiment_config,
    discretize,
    explain,
    filter_pools,
    generate_correlated_bail,
    generate_theorem1,
    is_acceptable,
    load_csv,
    measures_json,
    mine_candidates,
    relative_error,
    run_audit,
    run_audit_full,
    run_experiment,
    split_dataset,
    theorem1_experiment_config,
    train_blackbox,
)

__all__ = [
    "CandidatePools",
    "Dataset",
    "DecisionSet",
    "FeaturePolicy",
    "ObjectiveConfig",
    "SynthResult",
    "TldsError",
    "audit",
    "audit_full",
    "cap_outer_width",
    "correlated_bail_experiment_config",
    "discretize",
    "explain",
    "filter_pools",
    "generate_correlated_bail",
    "generate_theorem1",
    "is_acceptable",
    "load_csv",
    "measures",
    "measures_json",
    "mine_candidates",
    "relative_error",
    "run_audit",
    "run_audit_full",
    "run_experiment",
    "split_dataset",
    "theorem1_experiment_config",
    "train_blackbox",
]


def audit(explanation, blackbox, data, policy, eps_plus=0.05):
    """run_audit with the report decoded to a dict."""
    return _json.loads(run_audit(explanation, blackbox, data, policy, eps_plus))


def audit_full(explanation, blackbox, data, pools, policy, config,
               eps_plus=0.05, seed=0, budget=10000):
    """run_audit_full with the report decoded to a dict."""
    return _json.loads(
        run_audit_full(explanation, blackbox, data, pools, policy, config,
                       eps_plus, seed, budget))


def measures(model, data, target, pools, policy=None):
    """Raw measures and objective terms as a dict."""
    if policy is None:
        policy = FeaturePolicy()
    return _json.loads(measures_json(model, data, target, pools, policy))
