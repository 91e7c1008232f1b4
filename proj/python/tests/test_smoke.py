import math

import pytest

import seqmatch as sm


def flat(rows):
    return [v for row in rows for v in row]


def test_orca_example():
    r = sm.rewards("orca", [[0], [1], [2]], [[0], [2]])
    assert r["rewards"] == pytest.approx([math.exp(-2), math.exp(-1), 1.0])
    assert r["converged"]


def test_coverage_matches_closed_form():
    p = [[1.0, math.exp(-2)], [math.exp(-1), math.exp(-1)], [math.exp(-2), 1.0]]
    c = sm.coverage_matrix(p)
    assert flat(c) == pytest.approx([1.0, math.exp(-2), 1.0, math.exp(-1), 1.0, 1.0])
    assert c == sm.coverage_oracle(p)


def test_sinkhorn_and_mask():
    res = sm.sinkhorn([[0.0, 0.0], [0.0, 0.0]])
    assert res["converged"]
    assert flat(res["coupling"]) == pytest.approx([0.25] * 4)
    band = sm.build_mask(3, 3, 0)
    assert band == [[True, False, False], [False, True, False], [False, False, True]]
    masked = sm.sinkhorn([[1.0, 2.0, 3.0]] * 3, k_w=0)
    assert masked["coupling"][0][1] == 0.0


def test_dtw_and_threshold():
    path, total = sm.dtw_align([[0, 2], [0, 2], [2, 0]])
    assert path == [(0, 0), (1, 0), (2, 1)]
    assert total == 0.0
    rewards, tracked, completed = sm.threshold_trace([[1.0, 0.1], [0.1, 1.0]], 0.9)
    assert rewards == [1.0, 2.0]
    assert completed == 2


def test_scenarios_pass():
    for name in sm.scenario_names():
        report = sm.evaluate_scenario(name)
        assert report["passed"], name
        assert len(report["claims"]) == 3


def test_misalignment():
    demo = [[float(i)] for i in range(50)]
    assert len(sm.subsample_tail(demo, 0.2, 5)) == 18
    batch = sm.perturbation_batch(demo, "slower", 3)
    assert sorted(b["level"] for b in batch) == ["High"] * 3 + ["Low"] * 3


def test_training_and_expert():
    assert sm.evaluate_expert("two_phase")["mean_normalized"] == 1.0
    out = sm.train("two_phase", episodes=200, eval_interval=100, pretrain_fraction=0.5)
    assert [p["reward_source"] for p in out["curve"]] == ["tot", "orca"]


def test_invalid_input_raises():
    with pytest.raises(ValueError):
        sm.rewards("orca", [], [[0]])
    with pytest.raises(ValueError):
        sm.rewards("nope", [[0]], [[0]])
