import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capkm.generate import gen_instance
from capkm.lp import (
    IterationLimitError,
    LpProblem,
    build_ckm_lp,
    solve_ckm_relaxation,
    solve_lp,
    solve_transportation,
    transport,
)
from capkm.model import InfeasibleError, Instance

from conftest import line_metric, plane_instance


@pytest.mark.parametrize("n, rows", [(1, 1 + 1 + 1 + 1), (2, 2 + 2 + 1 + 4), (3, 3 + 3 + 1 + 9)])
def test_ckm_lp_shape(n, rows):
    inst = Instance(line_metric(range(n)), np.ones(n), n, 1)
    p = build_ckm_lp(inst)
    assert p.c.size == n * n + n
    assert len(p.rows) == rows
    assert p.count("=") == n
    # y <= 1 is a bound, not a row
    assert np.all(p.upper[n * n :] == 1.0) and np.all(np.isinf(p.upper[: n * n]))


def test_single_location_lp():
    frac = solve_ckm_relaxation(Instance([[0.0]], [3.0], 3.0, 1))
    assert frac.objective == 0.0
    assert frac.y[0] == 1.0 and frac.x[0, 0] == 1.0


def test_two_far_one_center(two_far):
    frac = solve_ckm_relaxation(Instance(two_far, [1, 1], 2, 1))
    assert frac.objective == pytest.approx(10.0, abs=1e-9)


def test_two_far_both_open(two_far):
    frac = solve_ckm_relaxation(Instance(two_far, [1, 1], 1, 2))
    assert frac.objective == pytest.approx(0.0, abs=1e-12)


def test_relaxation_is_feasible_and_consistent():
    inst = plane_instance(8, 3)
    frac = solve_ckm_relaxation(inst)
    assert frac.violations(inst) == []
    # objective recomputed from the primal vector
    assert frac.objective == pytest.approx(float(((inst.cost * frac.x) @ inst.demand).sum()), rel=1e-12)
    np.testing.assert_array_equal(frac.x.sum(axis=0), np.ones(8))


def test_relaxation_infeasible(two_far):
    with pytest.raises(InfeasibleError):
        solve_ckm_relaxation(Instance(two_far, [2, 2], 1, 1))


def test_small_lp_textbook():
    # max 3a + 5b st a <= 4, 2b <= 12, 3a + 2b <= 18  -> optimum 36 at (2, 6)
    p = LpProblem(c=np.array([-3.0, -5.0]))
    p.add_row({0: 1.0}, "<=", 4.0)
    p.add_row({1: 2.0}, "<=", 12.0)
    p.add_row({0: 3.0, 1: 2.0}, "<=", 18.0)
    res = solve_lp(p)
    assert res.objective == pytest.approx(-36.0)
    np.testing.assert_allclose(res.x, [2.0, 6.0], atol=1e-12)


def test_equality_and_negative_rhs():
    # min a + b st a - b = -1, a + b >= 3 (as -a - b <= -3) -> (1, 2)
    p = LpProblem(c=np.array([1.0, 1.0]))
    p.add_row({0: 1.0, 1: -1.0}, "=", -1.0)
    p.add_row({0: -1.0, 1: -1.0}, "<=", -3.0)
    res = solve_lp(p)
    assert res.objective == pytest.approx(3.0)
    assert res.x[1] - res.x[0] == pytest.approx(1.0)


def test_degenerate_instance_stays_feasible():
    # long degenerate pivot runs here used to drift into an infeasible point
    inst = gen_instance(14, 20017)
    frac = solve_ckm_relaxation(inst)
    assert frac.y.max() <= 1.0 and frac.y.sum() <= inst.k + 1e-9
    assert np.all(frac.x <= frac.y[:, None] + 1e-9)
    assert np.all(frac.x @ inst.demand <= inst.capacity * frac.y + 1e-7)


def test_infeasible_lp():
    p = LpProblem(c=np.array([1.0]))
    p.add_row({0: 1.0}, "<=", 1.0)
    p.add_row({0: -1.0}, "<=", -2.0)
    with pytest.raises(InfeasibleError):
        solve_lp(p)


def test_iteration_cap():
    p = LpProblem(c=np.array([-1.0, -1.0]))
    p.add_row({0: 1.0, 1: 2.0}, "<=", 4.0)
    p.add_row({0: 3.0, 1: 1.0}, "<=", 6.0)
    with pytest.raises(IterationLimitError):
        solve_lp(p, max_iter=1)


def test_transportation_examples(two_far):
    inst = Instance(line_metric([0, 1, 2]), [1, 1, 1], 2, 2)
    t = solve_transportation(inst, [0, 2])
    assert t.cost == pytest.approx(1.0)
    np.testing.assert_allclose(t.assign.sum(axis=0), 1.0)
    assert np.all(t.assign[1] == 0)

    every = solve_transportation(Instance(line_metric([0, 1, 2]), [1, 1, 1], 1, 3), [0, 1, 2])
    assert every.cost == 0.0
    np.testing.assert_array_equal(every.assign, np.eye(3))

    forced = solve_transportation(Instance(two_far, [1, 1], 2, 1), [0])
    assert forced.cost == pytest.approx(10.0)


def test_transportation_errors(two_far):
    inst = Instance(two_far, [1, 1], 1, 2)
    with pytest.raises(InfeasibleError):
        solve_transportation(inst, [0])
    with pytest.raises(ValueError):
        solve_transportation(inst, [])
    with pytest.raises(ValueError):
        solve_transportation(inst, [0], cap_scale=0.5)


def test_transport_respects_limit():
    frac, cost = transport([[0.0, 1.0, 2.0], [2.0, 1.0, 0.0]], [2.0, 2.0, 2.0], 3.0)
    loads = frac @ np.array([2.0, 2.0, 2.0])
    assert np.all(loads <= 3.0 + 1e-9)
    assert cost == pytest.approx(2.0)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 100_000), st.integers(3, 7))
def test_k_subset_transport_upper_bounds_lp(seed, n):
    inst = plane_instance(n, seed)
    frac = solve_ckm_relaxation(inst)
    rng = np.random.default_rng(seed)
    S = rng.choice(n, size=inst.k, replace=False)
    try:
        t = solve_transportation(inst, S)
    except InfeasibleError:
        return
    assert frac.objective <= t.cost + 1e-9
