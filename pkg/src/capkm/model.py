"""Instance and solution types shared by every stage of the solver."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

TOL = 1e-9


class CapkmError(Exception):
    """Base class for solver errors."""


class InvalidInstanceError(CapkmError):
    pass


class InfeasibleError(CapkmError):
    pass


class NumericalMarginError(CapkmError):
    """A strict inequality the rounding relies on collapsed to within ``TOL``."""


class InvariantError(CapkmError, AssertionError):
    """A property that the algorithm guarantees was observed to fail."""


class Check(NamedTuple):
    """One invariant evaluation: computed ``value`` against ``bound``."""

    name: str
    value: float
    bound: float
    ok: bool


def require(checks, stage: str) -> None:
    bad = [ch for ch in checks if not ch.ok]
    if bad:
        detail = "; ".join(f"{ch.name} = {ch.value!r} (bound {ch.bound!r})" for ch in bad)
        raise InvariantError(f"{stage}: {detail}")


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Instance:
    """Uniform capacitated k-median instance.

    ``cost[i, j]`` is the per-unit cost of serving location ``j`` from ``i``.
    Every location may host a center of capacity ``capacity``.
    """

    cost: np.ndarray
    demand: np.ndarray
    capacity: float
    k: int

    def __post_init__(self):
        cost = _frozen(self.cost)
        demand = _frozen(self.demand)
        if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
            raise InvalidInstanceError(f"cost must be square, got shape {cost.shape}")
        if demand.shape != (cost.shape[0],):
            raise InvalidInstanceError(
                f"demand has length {demand.size}, expected {cost.shape[0]}"
            )
        object.__setattr__(self, "cost", cost)
        object.__setattr__(self, "demand", demand)
        object.__setattr__(self, "capacity", float(self.capacity))
        object.__setattr__(self, "k", int(self.k))

    @property
    def n(self) -> int:
        return self.cost.shape[0]

    @property
    def total_demand(self) -> float:
        return float(self.demand.sum())


@dataclass(frozen=True, eq=False)
class FractionalSolution:
    """A feasible point of the LP relaxation.

    ``x[i, j]`` is the fraction of location ``j``'s demand served by ``i``;
    ``conn_cost[j]`` is the per-unit connection cost ``sum_i c_ij x_ij`` and
    ``objective`` is ``sum_j d_j conn_cost[j]``.
    """

    x: np.ndarray
    y: np.ndarray
    conn_cost: np.ndarray
    objective: float

    @classmethod
    def from_xy(cls, inst: Instance, x, y) -> "FractionalSolution":
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        conn = (inst.cost * x).sum(axis=0)
        return cls(_frozen(x), _frozen(y), _frozen(conn), float(inst.demand @ conn))

    def violations(self, inst: Instance, tol: float = TOL) -> list[str]:
        out = []
        col = self.x.sum(axis=0)
        bad = np.flatnonzero(np.abs(col - 1.0) > tol)
        if bad.size:
            out.append(f"demand not fully assigned at locations {bad.tolist()}")
        load = self.x @ inst.demand
        bad = np.flatnonzero(load > inst.capacity * self.y + tol)
        if bad.size:
            out.append(f"capacity exceeded at {bad.tolist()}")
        if np.any(self.x > self.y[:, None] + tol):
            out.append("x_ij > y_i for some pair")
        if np.any(self.x < -tol) or np.any(self.y < -tol) or np.any(self.y > 1 + tol):
            out.append("variable out of bounds")
        if self.y.sum() > inst.k + tol:
            out.append(f"sum y = {self.y.sum()!r} exceeds k = {inst.k}")
        return out


@dataclass(frozen=True, eq=False)
class IntegralSolution:
    """Open centers plus a splittable assignment of every location's demand."""

    open: np.ndarray
    assign: np.ndarray
    cost: float
    max_load_ratio: float

    @classmethod
    def build(cls, inst: Instance, open_mask, assign) -> "IntegralSolution":
        open_arr = np.asarray(open_mask, dtype=int)
        assign = np.asarray(assign, dtype=float)
        return cls(
            _frozen(open_arr, int),
            _frozen(assign),
            solution_cost(inst, assign),
            max_load_ratio(inst.demand, inst.capacity, open_arr, assign),
        )

    @property
    def centers(self) -> list[int]:
        return np.flatnonzero(self.open).tolist()


def max_load_ratio(demand, capacity, open_mask, assign) -> float:
    load = np.asarray(assign) @ np.asarray(demand, dtype=float)
    mask = np.asarray(open_mask).astype(bool)
    if not mask.any():
        return 0.0
    return float(load[mask].max() / capacity)


def validate_instance(inst: Instance, tol: float = TOL) -> list[str]:
    """Return a list of human-readable invariant violations (empty if valid)."""
    report = []
    c, d = inst.cost, inst.demand
    if inst.n < 1:
        return ["instance has no locations"]
    if not np.all(np.isfinite(c)) or not np.all(np.isfinite(d)):
        report.append("non-finite cost or demand entry")
        return report
    if np.any(c < 0):
        report.append("negative cost entry")
    if np.any(np.abs(np.diag(c)) > tol):
        report.append("nonzero diagonal cost")
    if np.any(np.abs(c - c.T) > tol):
        report.append("cost matrix is not symmetric")
    # c[i,t] + c[t,j] >= c[i,j] for all triples
    via = (c[:, :, None] + c[None, :, :]).min(axis=1)
    if np.any(via < c - tol):
        i, j = np.argwhere(via < c - tol)[0]
        report.append(f"triangle inequality violated for pair ({i}, {j})")
    if np.any(d < 0):
        report.append("negative demand")
    if not inst.capacity > 0:
        report.append("capacity must be positive")
    if inst.k < 1:
        report.append("budget k must be a positive integer")
    if inst.total_demand > inst.k * inst.capacity + tol:
        report.append(
            f"total demand {inst.total_demand!r} exceeds k*M = {inst.k * inst.capacity!r}"
        )
    return report


def raise_for_problems(problems: list[str]) -> None:
    """Raise for a non-empty validation report: demand over the ``k*M``
    budget is :class:`InfeasibleError`, anything else invalid input."""
    other = [p for p in problems if not p.startswith("total demand")]
    if other:
        raise InvalidInstanceError("; ".join(other))
    if problems:
        raise InfeasibleError(problems[0])


def solution_cost(inst: Instance, assign) -> float:
    """Total service cost ``sum_ij d_j c_ij assign_ij``."""
    a = np.asarray(assign, dtype=float)
    if a.shape != inst.cost.shape:
        raise ValueError(f"assignment shape {a.shape} does not match {inst.cost.shape}")
    return float(((inst.cost * a) @ inst.demand).sum())
