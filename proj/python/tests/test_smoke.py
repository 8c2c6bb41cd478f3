import json
import math

import numpy as np
import pytest

import sketchmom as sm


def test_linear_system_and_projection():
    sys = sm.gen_gaussian_system(10, 6, 3)
    assert sys.rows == 10
    assert sys.cols == 6
    x = np.zeros(6)
    p = sm.project_onto_solution_set(sys, x)
    assert np.linalg.norm(sys.A @ p - sys.b) < 1e-8 * np.linalg.norm(sys.b)

    with pytest.raises(ValueError):
        sm.LinearSystem(np.array([[1.0], [1.0]]), np.array([1.0, 2.0]))


def test_pinv_psd_rank_one():
    a = np.array([3.0, 4.0])
    m = np.outer(a, a)
    assert np.allclose(sm.pinv_psd(m), m / 625.0)


def test_solve_converges_and_is_deterministic():
    sys = sm.gen_gaussian_system(30, 10, 7)
    x0 = np.zeros(10)
    tr1 = sm.solve(sys, x0, momentum="deterministic", beta=0.2,
                   max_iters=5000, target_rel_err=1e-10, seed=1)
    tr2 = sm.solve(sys, x0, momentum="deterministic", beta=0.2,
                   max_iters=5000, target_rel_err=1e-10, seed=1)
    assert tr1.converged
    assert tr1.final_rel_err < 1e-10
    assert np.array_equal(tr1.x_final, tr2.x_final)
    assert tr1.checkpoints[0].k == 0
    assert tr1.checkpoints[0].rel_err_b == pytest.approx(1.0)


def test_rates_frozen_values():
    r = sm.rate_constants(1.0, 0.03, 0.25, 1.0)
    assert r.a1 == pytest.approx(0.8343)
    assert r.a2 == pytest.approx(0.0618)
    assert r.q == pytest.approx(0.9027570, abs=1e-6)
    assert r.admissible
    assert sm.beta_max(1.0, 0.25, 1.0) == pytest.approx(0.0504853, abs=1e-6)
    omega, beta = sm.accelerated_params(0.01, 1.0)
    assert omega == 1.0
    assert beta == pytest.approx((1 - math.sqrt(0.0099)) ** 2)


def test_spectrum_in_unit_interval():
    sys = sm.gen_gaussian_system(20, 8, 11)
    eigs, lmin, lmax = sm.spectrum(sys)
    assert eigs.min() >= -1e-9
    assert eigs.max() <= 1 + 1e-9
    assert 0 < lmin <= lmax <= 1 + 1e-9


def test_gossip_reaches_consensus():
    c = np.arange(12, dtype=float)
    tr = sm.gossip("cycle", 12, 0.0, 0, c, beta=0.2, max_iters=200000,
                   target_rel_err=1e-10, seed=5)
    assert tr.converged
    assert np.allclose(tr.x_final, c.mean(), atol=1e-4)

    numeric, closed = sm.algebraic_connectivity("line", 100)
    assert numeric == pytest.approx(closed, rel=1e-9)
    assert 1.0 / numeric == pytest.approx(1013.3, abs=0.1)


def test_run_experiment_json(tmp_path):
    cfg = {
        "problem": {"type": "gaussian", "m": 20, "n": 8},
        "solvers": [{"method": "sgd", "beta": 0.0, "omega": 1.0,
                     "max_iters": 200, "checkpoint_stride": 100}],
        "trials": 2,
        "seed_base": 9,
    }
    files = sm.run_experiment_json(json.dumps(cfg), str(tmp_path))
    assert len(files) == 3  # 2 trials + mean
    header = open(files[0]).readline().strip()
    assert header == "k,rel_err_B,f_val,bound,op_count,wall_ns"
