import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capkm.lp import solve_ckm_relaxation, solve_transportation
from capkm.model import InfeasibleError, Instance
from capkm.oracle import best_subset, exact_lp_check, exact_opt

from conftest import line_metric, plane_instance


def test_two_far_single_center(two_far):
    sol = exact_opt(Instance(two_far, [1, 1], 2, 1))
    assert sol.cost == pytest.approx(10.0)
    assert int(sol.open.sum()) == 1


def test_all_open_is_free():
    inst = Instance(line_metric([0, 1, 2, 3]), [1, 2, 1, 2], 2, 4)
    assert exact_opt(inst).cost == 0.0


def test_collinear_two_centers():
    sol = exact_opt(Instance(line_metric([0, 1, 2]), [1, 1, 1], 2, 2))
    assert sol.cost == pytest.approx(1.0)


def test_guards():
    with pytest.raises(ValueError):
        exact_opt(Instance(np.zeros((17, 17)), np.ones(17), 17, 1))
    with pytest.raises(ValueError):
        exact_lp_check(Instance(np.zeros((7, 7)), np.ones(7), 7, 1))
    with pytest.raises(InfeasibleError):
        exact_opt(Instance(line_metric([0, 1]), [2, 2], 1.5, 2), cap_scale=1.0)


def test_lp_check_examples(two_far):
    assert exact_lp_check(Instance([[0.0]], [1.0], 1, 1)) == pytest.approx(0.0, abs=1e-12)
    assert exact_lp_check(Instance(two_far, [1, 1], 2, 1)) == pytest.approx(10.0)
    inst = plane_instance(3, 7, k=1)
    assert exact_lp_check(inst) == pytest.approx(solve_ckm_relaxation(inst).objective, rel=1e-6)


def test_pruned_search_matches_full_enumeration():
    from itertools import combinations

    inst = plane_instance(9, 4, k=3, slack=1.05)
    full = min(
        solve_transportation(inst, S).cost for S in combinations(range(9), 3)
    )
    assert best_subset(inst.cost, inst.demand, inst.capacity, 3)[0] == pytest.approx(full, rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 100_000), st.integers(2, 8), st.sampled_from([4.0, 10.0]))
def test_sandwich(seed, n, alpha):
    inst = plane_instance(n, seed)
    lp = solve_ckm_relaxation(inst).objective
    opt1 = exact_opt(inst, 1.0).cost
    opt2 = exact_opt(inst, 2 + 2 / alpha).cost
    assert lp <= opt1 * (1 + 1e-9) + 1e-12
    assert 0 <= opt2 <= opt1 + 1e-12
