import math

import numpy as np
import pytest

import adaptcb


def test_igw_small_example():
    np.testing.assert_allclose(adaptcb.igw(np.array([0.0, 1.0]), 2.0), [0.75, 0.25])


def test_log_barrier_two_arms():
    p, lam = adaptcb.log_barrier(np.array([0.0, 1.0]), 2.0)
    assert lam == pytest.approx(math.sqrt(2.0))
    np.testing.assert_allclose(p, [1 / math.sqrt(2.0), 1 - 1 / math.sqrt(2.0)], rtol=1e-9)
    value = adaptcb.minimax_value(p, np.array([0.0, 1.0]), 2.0, np.eye(2))
    assert value == pytest.approx(0.5)


def test_logdet_barrier_rounding():
    rng = np.random.default_rng(0)
    acts = rng.normal(size=(40, 4))
    acts /= np.maximum(1.0, np.linalg.norm(acts, axis=1))[:, None]
    theta = np.array([0.3, -0.2, 0.1, 0.5])
    p, report = adaptcb.logdet_barrier(acts, theta, 20.0, 0.5)
    assert p.sum() == pytest.approx(1.0)
    assert not report["cap_hit"]
    passed, _ = adaptcb.eta_rounding_check(p, acts, theta, 20.0, 0.5)
    assert passed
    trace = np.array(report["objective_trace"])
    assert np.all(np.diff(trace) <= 0)


def test_one_dim_logdet():
    p, _ = adaptcb.logdet_barrier(np.array([[-1.0], [1.0]]), np.array([1.0]), 2.0, 0.01)
    assert p[1] - p[0] == pytest.approx((1 - math.sqrt(5)) / 2, abs=0.02)


def test_affine_dimension():
    assert adaptcb.affine_dimension(np.eye(4)) == 3


def test_master_round_trip():
    master = adaptcb.HedgedTsallisInf(3, 0.1, 0.5, 5.0)
    rng = adaptcb.RngStream(1)
    for _ in range(100):
        arm, prob, rho = master.sample(rng)
        assert 0 <= arm < 3 and 0 < prob <= 1 and rho >= 1
        master.update(0.0 if arm == 0 else 2.0)
    assert master.play_distribution.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(adaptcb.tsallis_solve(np.zeros(4), 0.5), np.full(4, 0.25))


def test_run_and_rows():
    config = {
        "algorithm": "corral",
        "T": 100,
        "seeds": [1, 2],
        "env": {"kind": "linear_bandit", "d": 3, "action_count": 8},
        "per_round": False,
    }
    summary = adaptcb.run(config)
    assert len(summary["seeds"]) == 2
    rows = adaptcb.round_rows(__import__("json").dumps(config))
    assert len(rows) == 200
    assert rows[-1][5] == summary["seeds"][1]["final_regret"]


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        adaptcb.run({"algorithm": "nope"})
    with pytest.raises(RuntimeError):
        adaptcb.log_barrier(np.array([0.0, 1.0]), 0.0)


def test_checks_pass():
    results = adaptcb.check("selectors")
    assert results and all(r[2] for r in results)
