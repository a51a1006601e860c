import numpy as np
import pytest

from rlra import constraints as cs
from rlra.admm import RlraProblem, Termination
from rlra.baselines import adp_solve, nmf_factors, nmf_solve, tsvd_baseline
from rlra.errors import ValidationError
from rlra.linalg import numerical_rank


def test_adp_feasible_target_one_step(rng):
    T = np.outer(rng.random(5), rng.random(4))
    report = adp_solve(RlraProblem(T, 1, cs.NonNegative()))
    assert report.termination is Termination.CONVERGED
    assert len(report.trace) == 1
    np.testing.assert_allclose(report.x_final, T, atol=1e-12)
    assert report.feasible


def test_adp_one_by_one():
    report = adp_solve(RlraProblem([[-2.0]], 1, cs.NonNegative()), max_iters=1)
    assert report.x_final[0, 0] == 0.0
    assert report.trace == [2.0]


def test_adp_plateaus_once_feasible(rng):
    T = rng.random((20, 15))
    report = adp_solve(RlraProblem(T, 4, cs.NonNegative()))
    assert report.termination is Termination.CONVERGED
    tail = report.trace[-3:]
    assert max(tail) - min(tail) <= 1e-6
    assert report.feasible


def test_tsvd_feasible_target(rng):
    T = np.outer(rng.random(4), rng.random(3))
    report = tsvd_baseline(RlraProblem(T, 1, cs.NonNegative()))
    np.testing.assert_allclose(report.x_final, T, atol=1e-12)
    assert report.feasible


def test_tsvd_drops_pin():
    pin = cs.FixedEntries.from_entries((2, 2), [(1, 1, 1.0)])
    report = tsvd_baseline(RlraProblem(np.diag([3.0, 1.0]), 1, pin))
    np.testing.assert_allclose(report.x_final, np.diag([3.0, 0.0]), atol=1e-15)
    assert not report.feasible


def test_tsvd_negative_truncation_flagged():
    # search seeds for a non-negative target whose rank-1 truncation goes negative
    for seed in range(1000):
        T = np.random.default_rng(seed).random((4, 4)) ** 4
        report = tsvd_baseline(RlraProblem(T, 2, cs.NonNegative()))
        if np.any(report.x_final < -1e-6):
            assert not report.feasible
            return
    pytest.fail("no instance found")


def test_nmf_exact_factorization(rng):
    T = np.outer(rng.random(6) + 0.1, rng.random(5) + 0.1)
    report = nmf_solve(T, 1, max_iters=2000)
    assert report.objective <= 1e-6


def test_nmf_properties(rng):
    T = rng.random((15, 12))
    report = nmf_solve(T, 3, max_iters=300)
    assert np.all(np.diff(report.trace) <= 1e-12)
    assert np.all(report.x_final >= 0)
    assert numerical_rank(report.x_final, 1e-9) <= 3
    assert report.feasible


def test_nmf_factors_positive_and_seeded(rng):
    T = rng.random((6, 5))
    A, B = nmf_factors(T, 2, seed=4)
    assert np.all(A > 0) and np.all(B > 0)
    A2, B2 = nmf_factors(T, 2, seed=4)
    np.testing.assert_array_equal(A, A2)
    np.testing.assert_array_equal(B, B2)


def test_nmf_validation():
    with pytest.raises(ValidationError):
        nmf_solve([[1.0, -1.0]], 1)
    with pytest.raises(ValidationError):
        nmf_solve([[1.0, 1.0]], 2)
    with pytest.raises(ValidationError):
        nmf_solve([[1.0, 1.0]], 1, max_iters=0)
