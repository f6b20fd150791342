"""Brute-force ground truth for small instances."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .lp import LpProblem, solve_lp, transport
from .model import TOL, InfeasibleError, Instance, IntegralSolution

MAX_ENUM = 16
MAX_LP_CHECK = 6


def best_subset(cost_rows, demand, capacity: float, k: int, cap_scale: float = 1.0):
    """Cheapest choice of at most ``k`` sources plus its optimal assignment.

    Adding a source never raises the optimal transport cost, so only subsets
    of size ``min(k, n_sources)`` need enumerating. Subsets are visited in
    order of their uncapacitated cost, a lower bound on their transport cost,
    and the scan stops once that bound reaches the incumbent.
    """
    cost_rows = np.asarray(cost_rows, dtype=float)
    demand = np.asarray(demand, dtype=float)
    ns = cost_rows.shape[0]
    size = min(k, ns)
    limit = cap_scale * capacity
    if demand.sum() > size * limit + TOL:
        raise InfeasibleError(f"no {size} centers can carry demand {demand.sum()!r}")
    weighted = cost_rows * demand[None, :]
    subsets = list(combinations(range(ns), size))
    lower = [float(weighted[list(S)].min(axis=0).sum()) for S in subsets]
    best = None
    for idx in sorted(range(len(subsets)), key=lambda t: (lower[t], t)):
        S = subsets[idx]
        if best is not None and lower[idx] >= best[0] - 1e-12:
            break
        rows = cost_rows[list(S)]
        near = rows.argmin(axis=0)
        frac = np.zeros_like(rows)
        frac[near, np.arange(rows.shape[1])] = 1.0
        if np.all(frac @ demand <= limit + TOL):
            cost = lower[idx]
        else:
            frac, cost = transport(rows, demand, limit)
        if best is None or cost < best[0] - 1e-12:
            best = (cost, S, frac)
    return best


def exact_opt(inst: Instance, cap_scale: float = 1.0) -> IntegralSolution:
    """Optimal integral solution with loads at most ``cap_scale * M``."""
    if inst.n > MAX_ENUM:
        raise ValueError(f"exact_opt enumerates subsets; n = {inst.n} exceeds {MAX_ENUM}")
    cost, S, frac = best_subset(inst.cost, inst.demand, inst.capacity, inst.k, cap_scale)
    opened = np.zeros(inst.n, dtype=int)
    opened[list(S)] = 1
    assign = np.zeros((inst.n, inst.n))
    assign[list(S)] = frac
    return IntegralSolution.build(inst, opened, assign)


def exact_lp_check(inst: Instance) -> float:
    """LP-relaxation optimum obtained by solving the dual program instead.

    Dual variables: ``u_j`` (free, split as ``u+ - u-``) for coverage,
    ``v_i >= 0`` for capacity, ``w >= 0`` for the budget, ``z_ij >= 0`` for
    ``x_ij <= y_i`` and ``t_i >= 0`` for ``y_i <= 1``.
    """
    n = inst.n
    if n > MAX_LP_CHECK:
        raise ValueError(f"exact_lp_check is for n <= {MAX_LP_CHECK}, got {n}")
    d, c, M = inst.demand, inst.cost, inst.capacity
    up = lambda j: j  # noqa: E731
    um = lambda j: n + j  # noqa: E731
    v = lambda i: 2 * n + i  # noqa: E731
    w = 3 * n
    z = lambda i, j: 3 * n + 1 + i * n + j  # noqa: E731
    t = lambda i: 3 * n + 1 + n * n + i  # noqa: E731
    nv = 4 * n + 1 + n * n
    obj = np.zeros(nv)
    for j in range(n):
        obj[up(j)] = -1.0
        obj[um(j)] = 1.0
    obj[w] = float(inst.k)
    for i in range(n):
        obj[t(i)] = 1.0
    p = LpProblem(c=obj)
    for i in range(n):
        for j in range(n):
            p.add_row({up(j): 1.0, um(j): -1.0, v(i): -float(d[j]), z(i, j): -1.0}, "<=", float(d[j] * c[i, j]))
    for i in range(n):
        row = {v(i): float(M), w: -1.0, t(i): -1.0}
        for j in range(n):
            row[z(i, j)] = 1.0
        p.add_row(row, "<=", 0.0)
    return -solve_lp(p).objective


def exact_ckl_opt(ckl) -> tuple[float, tuple[int, ...]]:
    """Optimal facility/client cost at capacity ``M``, with the chosen facilities."""
    if ckl.n_facilities > MAX_ENUM:
        raise ValueError(f"exact_ckl_opt enumerates subsets; |F| = {ckl.n_facilities} exceeds {MAX_ENUM}")
    cost, S, _ = best_subset(ckl.cost_fd, ckl.demand, ckl.capacity, ckl.k)
    return cost, S
