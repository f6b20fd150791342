import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from capkm.model import Instance, IntegralSolution
from capkm.verify import approx_ratio, best_ratio_for_violation, load_factor, verify_guarantees

from conftest import line_metric


def test_identity_solution_passes():
    inst = Instance(line_metric([0, 1, 2]), [1, 1, 1], 1, 3)
    sol = IntegralSolution.build(inst, [1, 1, 1], np.eye(3))
    rep = verify_guarantees(inst, 0.0, sol, 4.0)
    assert rep.ok
    assert rep.numbers["cost_ratio"] == 0.0


def test_overload_detected():
    inst = Instance(np.zeros((3, 3)), [1, 1, 1], 1, 3)
    sol = IntegralSolution.build(inst, [1, 0, 0], [[1, 1, 1], [0, 0, 0], [0, 0, 0]])
    rep = verify_guarantees(inst, 0.0, sol, 4.0)
    assert not rep.load_ok and rep.failures() == ["load_ok"]
    assert rep.numbers["max_load_ratio"] == 3.0


def test_other_flags():
    inst = Instance(line_metric([0, 1]), [1, 1], 2, 1)
    too_many = IntegralSolution.build(inst, [1, 1], np.eye(2))
    assert verify_guarantees(inst, 1.0, too_many, 4.0).failures() == ["centers_ok"]
    costly = IntegralSolution.build(inst, [1, 0], [[1, 1], [0, 0]])
    assert not verify_guarantees(inst, 1 / 47, costly, 4.0).cost_ok
    assert verify_guarantees(inst, 1 / 46, costly, 4.0).cost_ok
    partial = IntegralSolution.build(inst, [1, 0], [[1, 0.5], [0, 0]])
    assert not verify_guarantees(inst, 1.0, partial, 4.0).coverage_ok
    stray = IntegralSolution.build(inst, [1, 0], [[1, 0.5], [0, 0.5]])
    assert not verify_guarantees(inst, 1.0, stray, 4.0).coverage_ok


@pytest.mark.parametrize(
    "v, alpha, ratio",
    [(2.1, 20.0, 206.0), (2.5, 4.0, 46.0), (2.75, 4.0, 46.0), (3.0, 4.0, 46.0)],
)
def test_tradeoff_table(v, alpha, ratio):
    a, r = best_ratio_for_violation(v)
    assert a == pytest.approx(alpha) and r == pytest.approx(ratio)


def test_tradeoff_2_3():
    a, r = best_ratio_for_violation(2.3)
    assert a == pytest.approx(20 / 3)
    assert r == pytest.approx(72.67, abs=0.01)


@pytest.mark.parametrize("v", [2.0, 1.5, 0.0])
def test_tradeoff_rejects(v):
    with pytest.raises(ValueError):
        best_ratio_for_violation(v)


@given(st.floats(2.001, 50), st.floats(2.001, 50))
def test_tradeoff_monotone(v1, v2):
    lo, hi = sorted((v1, v2))
    a_lo, r_lo = best_ratio_for_violation(lo)
    a_hi, r_hi = best_ratio_for_violation(hi)
    assert r_hi <= r_lo
    assert load_factor(a_lo) <= lo + 1e-12
    if hi >= 2.5:
        assert r_hi == 46.0


def test_factors():
    assert load_factor(4) == 2.5 and approx_ratio(4) == 46
