"""Greedy clustering of locations around well-separated cores."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import TOL, Check, FractionalSolution, Instance


@dataclass(frozen=True)
class ClusterStructure:
    cores: tuple[int, ...]
    member_of: tuple[int, ...]
    members: dict[int, tuple[int, ...]]
    mass: dict[int, float]
    alpha: float

    def is_terminal(self, core: int) -> bool:
        return self.mass[core] >= 1.0


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha >= 4:
        raise ValueError("alpha must be ≥ 4")
    return alpha


def run_clustering(inst: Instance, frac: FractionalSolution, alpha: float = 4.0) -> ClusterStructure:
    """Pick cores greedily in nondecreasing connection cost, then attach
    every location to its nearest core.

    A location becomes a core only if no earlier core lies within
    ``2 * alpha * C_j`` of it. Ties in ``C_j`` go to the lower index; a
    location equidistant from two cores joins the lower-indexed one.
    """
    alpha = check_alpha(alpha)
    c = inst.cost
    conn = np.asarray(frac.conn_cost, dtype=float)
    order = sorted(range(inst.n), key=lambda j: (conn[j], j))
    cores: list[int] = []
    for j in order:
        radius = 2 * alpha * conn[j]
        if not any(c[l, j] <= radius + TOL for l in cores):
            cores.append(j)

    core_arr = np.array(sorted(cores))
    member_of = []
    for j in range(inst.n):
        dist = c[core_arr, j]
        # argmin returns the first minimum, i.e. the lowest core index
        member_of.append(int(core_arr[int(np.argmin(dist))]))
    members = {l: tuple(j for j in range(inst.n) if member_of[j] == l) for l in cores}
    mass = {l: float(sum(frac.y[j] for j in members[l])) for l in cores}
    return ClusterStructure(tuple(cores), tuple(member_of), members, mass, alpha)


def cluster_invariants(inst: Instance, frac: FractionalSolution, cl: ClusterStructure) -> list[Check]:
    """Evaluate the four clustering properties."""
    c, conn, a = inst.cost, frac.conn_cost, cl.alpha
    rows = []
    worst = max(
        (c[cl.member_of[j], j] - 2 * a * conn[j] for j in range(inst.n)), default=0.0
    )
    rows.append(Check("member radius: max c_lj - 2a*C_j", worst, 0.0, worst <= TOL))
    gap = np.inf
    for p, l in enumerate(cl.cores):
        for l2 in cl.cores[p + 1 :]:
            gap = min(gap, c[l, l2] - 2 * a * max(conn[l], conn[l2]))
    gap = float(gap) if np.isfinite(gap) else 0.0
    rows.append(Check("core separation: min c_ll' - 2a*max(C)", gap, 0.0, len(cl.cores) < 2 or gap > 0))
    low = min(cl.mass.values())
    bound = (a - 1) / a
    rows.append(Check("min cluster mass", low, bound, low >= bound - TOL))
    seen = sorted(j for m in cl.members.values() for j in m)
    rows.append(Check("clusters partition locations", len(seen), inst.n, seen == list(range(inst.n))))
    return rows

