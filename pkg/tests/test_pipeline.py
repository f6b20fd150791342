import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capkm.generate import ring_instance
from capkm.lp import solve_ckm_relaxation
from capkm.model import FractionalSolution, Instance, InvalidInstanceError
from capkm.pipeline import EASY, FULL, TRIVIAL, solve
from capkm.verify import verify_guarantees

from conftest import plane_instance


def test_cluster_example_end_to_end(cluster_example):
    inst = Instance(cluster_example, [1, 1, 1], 2, 2)
    res = solve(inst, 4.0, check=True)
    assert res.clusters.cores == (0, 1)
    assert res.solution.centers == [0, 1]
    assert res.solution.cost == pytest.approx(1.0)
    assert verify_guarantees(inst, res.frac, res.solution, 4.0).ok


def test_single_location_trivial():
    inst = Instance([[0.0]], [1.0], 1.0, 1)
    res = solve(inst)
    assert res.path == TRIVIAL
    assert res.solution.centers == [0] and res.solution.cost == 0.0


def test_invalid_rejected():
    with pytest.raises(InvalidInstanceError):
        solve(Instance([[0, 1], [2, 0]], [1, 1], 2, 1))


def test_alpha_rejected(two_far):
    with pytest.raises(ValueError, match="alpha must be ≥ 4"):
        solve(Instance(two_far, [1, 1], 2, 1), alpha=3)


def test_easy_path_bounds():
    inst = plane_instance(8, 5)
    res = solve(inst, 4.0, check=True)
    assert res.path in (EASY, TRIVIAL)
    if res.path == EASY:
        assert res.solution.max_load_ratio <= 2.0 + 1e-9
        assert res.solution.cost <= 19 * res.lp_cost * (1 + 1e-7) + 1e-9


@pytest.mark.parametrize("sizes, seed", [((9, 9), 2), ((10, 10), 1), ((9, 10), 2)])
def test_full_path_on_ring_lp_optimum(sizes, seed):
    inst = ring_instance(sizes, jitter=0.03, seed=seed)
    res = solve(inst, 4.0, check=True)
    assert res.path == FULL
    assert res.stars.roundings
    rep = verify_guarantees(inst, res.frac, res.solution, 4.0)
    assert rep.ok, rep.failures()
    assert {"clustering", "consolidation", "redistribution", "stars"} <= set(res.checks)


def test_full_path_from_supplied_fractional_point():
    # regular decagon, every location 0.9 open and passing a tenth of its
    # demand to the next one; any feasible LP point is a valid input
    m = 10
    theta = 2 * np.pi * np.arange(m) / m
    pts = np.c_[np.cos(theta), np.sin(theta)]
    cost = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
    inst = Instance(cost, np.ones(m), m / (m - 1), m - 1)
    x = 0.9 * np.eye(m) + 0.1 * np.roll(np.eye(m), -1, axis=0)
    frac = FractionalSolution.from_xy(inst, x, np.full(m, 0.9))
    assert frac.violations(inst) == []
    res = solve(inst, 4.0, check=True, frac=frac)
    assert res.path == FULL
    assert len(res.conc.N2) == m
    assert verify_guarantees(inst, frac, res.solution, 4.0).ok


def test_supplied_point_matches_internal():
    inst = plane_instance(7, 3)
    frac = solve_ckm_relaxation(inst)
    a = solve(inst, 4.0)
    b = solve(inst, 4.0, frac=frac)
    np.testing.assert_array_equal(a.solution.assign, b.solution.assign)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 10), st.sampled_from([4.0, 6.0, 10.0, 20.0]))
def test_guarantees_property(seed, n, alpha):
    inst = plane_instance(n, seed)
    res = solve(inst, alpha, check=True)
    rep = verify_guarantees(inst, res.frac, res.solution, alpha)
    assert rep.ok, (rep.failures(), rep.numbers)
