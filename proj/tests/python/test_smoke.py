"""Smoke tests for the python module: end-to-end theorem-1 flow, determinism,
and report plumbing."""

import json

import pytest

tlds = pytest.importorskip("tlds")


def obj_config():
    return tlds.ObjectiveConfig.from_json(json.dumps({
        "lambdas": [0.01, 0.01, 0.01, 1, 1, 1],
        "eps1": 4, "eps2": 2, "eps3": 4, "delta": 0.1,
    }))


def test_theorem1_end_to_end():
    synth = tlds.generate_theorem1(1500, seed=7)
    data = synth.data
    assert data.n_rows() == 1500
    assert data.feature_names() == ["x1", "x2"]

    pools = tlds.mine_candidates(data, min_support=0.05, max_width=2)
    assert pools.nd_size() > 0

    bb_policy = tlds.FeaturePolicy(desired=["x2"], prohibited=["x1"])
    blackbox = tlds.train_blackbox(data, pools, bb_policy, obj_config(),
                                   seed=1, enforce_acceptable=True)
    assert "x2" in blackbox.features()
    assert "x1" not in blackbox.features()

    e_policy = tlds.FeaturePolicy(desired=["x1"], prohibited=["x2"])
    explanation = tlds.explain(data, blackbox, pools, e_policy, obj_config(),
                               seed=1)
    mismatches, n, loss = tlds.relative_error(explanation, blackbox, data)
    assert mismatches == 0 and n == 1500 and loss == 0.0

    report = tlds.audit(explanation, blackbox, data, e_policy, eps_plus=0.05)
    assert report["fidelity"] == 1.0
    assert report["o_hat"] is True
    assert report["o_star_hat"] is False
    assert report["potentially_misleading"] is True

    assert tlds.is_acceptable(explanation, e_policy)
    assert not tlds.is_acceptable(blackbox, e_policy)


def test_model_json_round_trip_and_predict():
    synth = tlds.generate_theorem1(400, seed=3)
    pools = tlds.mine_candidates(synth.data, 0.05, 2)
    model = tlds.train_blackbox(synth.data, pools, tlds.FeaturePolicy(),
                                obj_config(), seed=2)
    back = tlds.DecisionSet.from_json(model.to_json())
    assert back == model
    assert back.predict_all(synth.data) == model.predict_all(synth.data)
    assert "if" in model.to_text()


def test_synth_determinism_and_planted_model():
    a = tlds.generate_correlated_bail(500, seed=11, rho=0.9, noise=0.1)
    b = tlds.generate_correlated_bail(500, seed=11, rho=0.9, noise=0.1)
    assert a.data.to_csv() == b.data.to_csv()
    assert a.planted is not None
    assert a.planted.to_json() == b.planted.to_json()
    assert "race" in a.planted.features()


def test_policy_filtering_is_hard():
    synth = tlds.generate_correlated_bail(800, seed=5, rho=0.9, noise=0.1)
    pools = tlds.cap_outer_width(tlds.mine_candidates(synth.data, 0.1, 2), 1)
    policy = tlds.FeaturePolicy(prohibited=["race", "gender"])
    filtered = tlds.filter_pools(pools, policy)
    assert filtered.nd_size() < pools.nd_size()

    model = tlds.train_blackbox(synth.data, pools, policy, obj_config(), seed=1)
    assert "race" not in model.features()
    assert "gender" not in model.features()


def test_experiment_summary():
    cfg = json.loads(tlds.theorem1_experiment_config())
    cfg["data"]["rows"] = 800
    summary = json.loads(tlds.run_experiment(json.dumps(cfg)))
    assert summary["blackbox"]["test_accuracy"] == 1.0
    assert summary["variants"][0]["audit"]["potentially_misleading"] is True


def test_errors_surface_as_exceptions():
    synth = tlds.generate_theorem1(100, seed=1)
    with pytest.raises(tlds.TldsError):
        tlds.mine_candidates(synth.data, min_support=1.0, max_width=2)
