"""Facility/client variant: reduce to the location model, solve, compose back.

Facilities ``F`` may host centers; clients ``D`` carry demand. The LP
relaxation over ``F x D`` gives ``x0``; each facility then inherits the
demand it serves fractionally, and the location-model pipeline rounds the
resulting instance on ``F``. Composing the two assignments yields a
client assignment whose loads and cost inherit the rounding guarantees.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lp import build_ckl_lp, solve_lp, split_solution
from .model import (
    TOL,
    Check,
    InfeasibleError,
    Instance,
    InvalidInstanceError,
    _frozen,
    raise_for_problems,
    require,
)
from .pipeline import SolveResult, solve


@dataclass(frozen=True, eq=False)
class CklInstance:
    """``cost_ff`` is facilities x facilities, ``cost_fd`` facilities x clients."""

    cost_ff: np.ndarray
    cost_fd: np.ndarray
    demand: np.ndarray
    capacity: float
    k: int

    def __post_init__(self):
        ff = _frozen(self.cost_ff)
        fd = _frozen(self.cost_fd)
        d = _frozen(self.demand)
        if ff.ndim != 2 or ff.shape[0] != ff.shape[1]:
            raise InvalidInstanceError(f"facility costs must be square, got {ff.shape}")
        if fd.ndim != 2 or fd.shape[0] != ff.shape[0]:
            raise InvalidInstanceError(
                f"facility-client costs have shape {fd.shape}, expected ({ff.shape[0]}, |D|)"
            )
        if d.shape != (fd.shape[1],):
            raise InvalidInstanceError(f"demand has length {d.size}, expected {fd.shape[1]}")
        object.__setattr__(self, "cost_ff", ff)
        object.__setattr__(self, "cost_fd", fd)
        object.__setattr__(self, "demand", d)
        object.__setattr__(self, "capacity", float(self.capacity))
        object.__setattr__(self, "k", int(self.k))

    @property
    def n_facilities(self) -> int:
        return self.cost_fd.shape[0]

    @property
    def n_clients(self) -> int:
        return self.cost_fd.shape[1]

    @property
    def total_demand(self) -> float:
        return float(self.demand.sum())


def validate_ckl(ckl: CklInstance, tol: float = TOL) -> list[str]:
    """Metric checks on ``F x F`` and the mixed triangles through a facility."""
    ff, fd, d = ckl.cost_ff, ckl.cost_fd, ckl.demand
    if ckl.n_facilities < 1:
        return ["instance has no facilities"]
    if not (np.all(np.isfinite(ff)) and np.all(np.isfinite(fd)) and np.all(np.isfinite(d))):
        return ["non-finite cost or demand entry"]
    out = []
    if np.any(ff < 0) or np.any(fd < 0):
        out.append("negative cost entry")
    if np.any(np.abs(np.diag(ff)) > tol):
        out.append("nonzero diagonal facility cost")
    if np.any(np.abs(ff - ff.T) > tol):
        out.append("facility cost matrix is not symmetric")
    if np.any((ff[:, :, None] + ff[None, :, :]).min(axis=1) < ff - tol):
        out.append("triangle inequality violated among facilities")
    # c(i, j) <= c(i, i') + c(i', j) for facilities i, i' and client j
    if fd.size and np.any((ff[:, :, None] + fd[None, :, :]).min(axis=1) < fd - tol):
        out.append("triangle inequality violated through a facility")
    if np.any(d < 0):
        out.append("negative demand")
    if not ckl.capacity > 0:
        out.append("capacity must be positive")
    if ckl.k < 1:
        out.append("budget k must be a positive integer")
    if ckl.total_demand > ckl.k * ckl.capacity + tol:
        out.append(f"total demand {ckl.total_demand!r} exceeds k*M = {ckl.k * ckl.capacity!r}")
    return out


@dataclass(frozen=True, eq=False)
class Reduction:
    instance: Instance  # location model on F with induced demands
    x0: np.ndarray  # F x D fractional assignment
    y0: np.ndarray
    lp_cost: float


def reduce_to_ckm(ckl: CklInstance) -> Reduction:
    """Solve the facility/client LP and build the induced location instance.

    Zero-demand clients are left out of the LP; their column of ``x0`` points
    at their nearest facility (lowest index on ties) and adds nothing to the
    induced demands.
    """
    if ckl.total_demand > ckl.k * ckl.capacity + TOL:
        raise InfeasibleError(
            f"total demand {ckl.total_demand!r} exceeds k*M = {ckl.k * ckl.capacity!r}"
        )
    nf, nd = ckl.cost_fd.shape
    active = np.flatnonzero(ckl.demand > 0)
    x0 = np.zeros((nf, nd))
    y0 = np.zeros(nf)
    lp_cost = 0.0
    if active.size:
        cost = ckl.cost_fd[:, active]
        res = solve_lp(build_ckl_lp(cost, ckl.demand[active], ckl.capacity, ckl.k))
        xa, y0 = split_solution(res.x, nf, active.size)
        x0[:, active] = xa
        lp_cost = float(((cost * xa) @ ckl.demand[active]).sum())
    for j in np.flatnonzero(ckl.demand <= 0):
        x0[int(np.argmin(ckl.cost_fd[:, j])), j] = 1.0
    inst = Instance(ckl.cost_ff, x0 @ ckl.demand, ckl.capacity, ckl.k)
    return Reduction(inst, x0, y0, lp_cost)


def compose_back(x1, x0) -> np.ndarray:
    """``x*[i, j] = sum_i' x1[i, i'] x0[i', j]``."""
    return np.asarray(x1, dtype=float) @ np.asarray(x0, dtype=float)


@dataclass(frozen=True, eq=False)
class CklSolution:
    open: np.ndarray
    assign: np.ndarray  # F x D
    cost: float
    max_load_ratio: float

    @classmethod
    def build(cls, ckl: CklInstance, open_mask, assign) -> "CklSolution":
        open_arr = np.asarray(open_mask, dtype=int)
        assign = np.asarray(assign, dtype=float)
        load = assign @ ckl.demand
        mask = open_arr.astype(bool)
        ratio = float(load[mask].max() / ckl.capacity) if mask.any() else 0.0
        return cls(_frozen(open_arr, int), _frozen(assign), ckl_cost(ckl, assign), ratio)

    @property
    def centers(self) -> list[int]:
        return np.flatnonzero(self.open).tolist()


def ckl_cost(ckl: CklInstance, assign) -> float:
    return float(((ckl.cost_fd * np.asarray(assign)) @ ckl.demand).sum())


@dataclass(eq=False)
class CklResult:
    ckl: CklInstance
    alpha: float
    reduction: Reduction
    inner: SolveResult
    solution: CklSolution
    checks: list[Check] = field(default_factory=list)

    @property
    def path(self) -> str:
        return self.inner.path

    @property
    def lp_cost(self) -> float:
        return self.reduction.lp_cost


def ckl_checks(ckl: CklInstance, red: Reduction, inner: SolveResult, sol: CklSolution, alpha: float) -> list[Check]:
    """Composition identities, relaxed loads, and the cost telescoping bound."""
    x, y = sol.assign, sol.open.astype(float)
    col_err = float(np.abs(x.sum(axis=0) - 1.0).max()) if x.size else 0.0
    coupling = float((x - y[:, None]).max()) if x.size else 0.0
    M = ckl.capacity
    load = x @ ckl.demand
    limit = (2 + 2 / alpha) * M
    worst = float(load.max()) if load.size else 0.0
    over = float((load - limit * y).max()) if load.size else 0.0
    bound = inner.solution.cost + red.lp_cost
    n_open = int(sol.open.sum())
    return [
        Check("max |sum_i x*_ij - 1|", col_err, 0.0, col_err <= TOL),
        Check("max(x*_ij - y*_i)", coupling, 0.0, coupling <= TOL),
        Check("max load", worst, limit, worst <= limit + TOL * max(1.0, M)),
        Check("max(load_i - (2+2/a) M y*_i)", over, 0.0, over <= TOL * max(1.0, M)),
        Check("cost(x*) <= cost(x1) + cost(x0)", sol.cost, bound,
              sol.cost <= bound * (1 + 1e-7) + TOL),
        Check("centers <= k", float(n_open), float(ckl.k), n_open <= ckl.k),
    ]


def solve_ckl(ckl: CklInstance, alpha: float = 4.0, check: bool = False) -> CklResult:
    """Round the facility/client model with loads at most ``(2 + 2/alpha) M``."""
    raise_for_problems(validate_ckl(ckl))
    red = reduce_to_ckm(ckl)
    inner = solve(red.instance, alpha, check=check)
    x_star = compose_back(inner.solution.assign, red.x0)
    sol = CklSolution.build(ckl, inner.solution.open, x_star)
    checks = ckl_checks(ckl, red, inner, sol, inner.alpha)
    if check:
        require(checks, "composition")
    return CklResult(ckl, inner.alpha, red, inner, sol, checks)


def ckl_ratio(alpha: float) -> float:
    """Approximation factor of the composed solution against the CKL optimum."""
    return 13.0 + 20.0 * alpha
