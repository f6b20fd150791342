import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capkm import io
from capkm.ckl import CklInstance
from capkm.generate import gen_ckl_instance, gen_instance, ring_instance
from capkm.model import Instance, InvalidInstanceError, validate_instance
from capkm.pipeline import solve
from capkm.verify import verify_guarantees


def test_generator_deterministic():
    a, b = gen_instance(8, 1), gen_instance(8, 1)
    np.testing.assert_array_equal(a.cost, b.cost)
    np.testing.assert_array_equal(a.demand, b.demand)
    assert a.capacity == b.capacity and a.k == b.k == 2
    assert io.dumps(io.instance_to_dict(a)) == io.dumps(io.instance_to_dict(b))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 16), st.integers(0, 10**6), st.sampled_from(["plane", "uniform-matrix"]))
def test_generated_instances_valid(n, seed, geometry):
    inst = gen_instance(n, seed, geometry=geometry)
    assert validate_instance(inst) == []
    assert np.all(inst.demand >= 1) and np.all(inst.demand == np.round(inst.demand))


def test_explicit_k_and_capacity():
    inst = gen_instance(12, 3, k=4)
    assert inst.k == 4 and validate_instance(inst) == []
    fixed = gen_instance(6, 3, demand_max=2, capacity=4.0, k=3)
    assert fixed.capacity == 4.0 and fixed.total_demand <= 12.0


def test_generator_rejects():
    with pytest.raises(InvalidInstanceError):
        gen_instance(6, 0, demand_max=10, capacity=1.0, k=1)
    with pytest.raises(ValueError):
        gen_instance(5, 0, geometry="sphere")
    with pytest.raises(ValueError):
        gen_instance(0, 0)


def test_ring_instance_shape():
    inst = ring_instance((9, 10))
    assert inst.n == 19 and inst.k == 17
    assert inst.total_demand == pytest.approx(inst.k * inst.capacity)


def test_instance_round_trip(tmp_path):
    inst = gen_instance(7, 5)
    p = tmp_path / "i.json"
    io.write_instance(inst, p)
    back = io.read_instance(p)
    np.testing.assert_array_equal(back.cost, inst.cost)
    np.testing.assert_array_equal(back.demand, inst.demand)
    assert (back.capacity, back.k) == (inst.capacity, inst.k)
    data = json.loads(p.read_text())
    assert list(data) == ["n", "cost", "demand", "capacity", "k"]


def test_ckl_round_trip(tmp_path):
    ckl = gen_ckl_instance(3, 5, 2)
    p = tmp_path / "c.json"
    io.write_instance(ckl, p)
    data = json.loads(p.read_text())
    assert data["facilities"] == 3 and data["n"] == 5
    assert np.array(data["cost"]).shape == (3, 8)
    back = io.read_instance(p)
    assert isinstance(back, CklInstance)
    np.testing.assert_array_equal(back.cost_fd, ckl.cost_fd)
    np.testing.assert_array_equal(back.cost_ff, ckl.cost_ff)


@pytest.mark.parametrize(
    "payload",
    [
        "not json",
        "[1, 2]",
        '{"n": 2, "cost": [[0, 1], [1, 0]], "demand": [1, 1], "capacity": 2}',
        '{"n": 2, "cost": [[0, 1]], "demand": [1, 1], "capacity": 2, "k": 1}',
        '{"n": 2, "cost": [[0, 1], [1, 0]], "demand": [1, 1], "capacity": 2, "k": 1.5}',
        '{"n": 1, "facilities": 2, "cost": [[0, 1], [1, 0]], "demand": [1], "capacity": 2, "k": 1}',
    ],
)
def test_malformed_instances(tmp_path, payload):
    p = tmp_path / "bad.json"
    p.write_text(payload)
    with pytest.raises(InvalidInstanceError):
        io.read_instance(p)


def test_solution_round_trip_verifies(tmp_path):
    inst = gen_instance(9, 4)
    res = solve(inst, 4.0)
    p = tmp_path / "s.json"
    io.write_solution(res.solution, 4.0, res.path, p)
    data = io.read_solution(p)
    assert data["path"] == res.path and data["alpha"] == 4.0
    np.testing.assert_array_equal(data["assign"], res.solution.assign)
    assert data["cost"] == res.solution.cost
    rebuilt = type(res.solution).build(inst, data["open"], data["assign"])
    assert verify_guarantees(inst, res.frac, rebuilt, 4.0).ok
    entries = json.loads(p.read_text())["assign"]
    assert entries == sorted(entries)


def test_exact_float_repr():
    inst = Instance([[0.0, 0.1 + 0.2], [0.1 + 0.2, 0.0]], [1 / 3, 2 / 3], 1.0, 1)
    back = io.instance_from_dict(json.loads(io.dumps(io.instance_to_dict(inst))))
    assert back.cost[0, 1] == 0.1 + 0.2 and back.demand[0] == 1 / 3
