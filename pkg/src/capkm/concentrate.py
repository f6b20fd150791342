"""Consolidate opening mass inside each cluster.

After this stage every location has opening value 0 or in
``[(alpha-1)/alpha, 2)``; the demand each location served travels with the
mass that moved out of it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cluster import ClusterStructure
from .model import TOL, Check, FractionalSolution, Instance, IntegralSolution, InvariantError, require


@dataclass
class ConcentrateState:
    """Mutable working copy of ``(x', y')``.

    With ``check`` set, the move-level guarantees are asserted after every
    transfer; ``log`` collects ``(kind, to, from, delta)`` tuples.
    """

    x: np.ndarray
    y: np.ndarray
    inst: Instance | None = None
    conn: np.ndarray | None = None
    alpha: float = 4.0
    check: bool = False
    log: list = field(default_factory=list)

    @classmethod
    def start(cls, inst: Instance, frac: FractionalSolution, alpha: float, check: bool = False):
        return cls(
            np.array(frac.x, dtype=float),
            np.array(frac.y, dtype=float),
            inst,
            np.asarray(frac.conn_cost),
            alpha,
            check,
        )


def move(state: ConcentrateState, a: int, b: int) -> float:
    """Shift ``min(1 - y'_a, y'_b)`` opening mass, and the matching share of
    ``b``'s served demand, from ``b`` to ``a``. Returns the amount moved."""
    x, y = state.x, state.y
    delta = min(1.0 - y[a], y[b])
    if not delta > 0:
        raise ValueError(f"nothing to move from {b} to {a} (delta = {delta!r})")
    if y[b] - delta <= TOL:
        # b is emptied completely
        x[a] += x[b]
        x[b] = 0.0
        y[a] += y[b]
        y[b] = 0.0
        if abs(y[a] - 1.0) <= TOL:
            y[a] = 1.0
    else:
        share = delta / y[b]
        x[a] += share * x[b]
        x[b] *= 1.0 - share
        y[a] = 1.0
        y[b] -= delta
    state.log.append(("move", a, b, float(delta)))
    return float(delta)


def _reassign_bound(state, frm: int, to: int, core: int, terminal: bool) -> float:
    """Worst slack of the per-unit reassignment bound for demand moving ``frm -> to``."""
    c, conn, a = state.inst.cost, state.conn, state.alpha
    served = np.flatnonzero(state.x[frm] > 0)
    if served.size == 0:
        return -np.inf
    if terminal:
        excess = c[to, served] - (3 * c[frm, served] + 4 * a * conn[served])
    else:
        excess = c[core, served] - (2 * c[frm, served] + 2 * a * conn[served])
    return float(excess.max())


def _check_after_move(state, members, mass_before) -> None:
    inst = state.inst
    checks = [
        Check("cluster mass", float(state.y[list(members)].sum()), mass_before,
              abs(state.y[list(members)].sum() - mass_before) <= TOL),
        Check("column sums", float(np.abs(state.x.sum(axis=0) - 1).max()), 0.0,
              bool(np.all(np.abs(state.x.sum(axis=0) - 1) <= TOL))),
        Check("capacity coupling", float((state.x @ inst.demand - inst.capacity * state.y).max()),
              0.0, bool(np.all(state.x @ inst.demand <= inst.capacity * state.y + TOL * max(1.0, inst.capacity)))),
    ]
    require(checks, "after move")


def cluster_order(inst: Instance, core: int, members) -> list[int]:
    """Members by distance from the core (core first, ties by index)."""
    return sorted(members, key=lambda j: (j != core, inst.cost[core, j], j))


def concentrate_cluster(state: ConcentrateState, core: int, members, terminal: bool | None = None) -> None:
    """Run the in-cluster consolidation loop for the cluster around ``core``.

    ``members`` must already be in :func:`cluster_order`.
    """
    x, y = state.x, state.y
    order = list(members)
    if terminal is None:
        terminal = y[order].sum() >= 1.0 - TOL
    mass = float(y[order].sum())
    while any(0.0 < y[j] < 1.0 for j in order):
        pa = next((p for p, j in enumerate(order) if y[j] < 1.0), None)
        pb = next((p for p in range(pa + 1, len(order)) if 0.0 < y[order[p]] <= 1.0), None)
        if pb is not None:
            ja, jb = order[pa], order[pb]
            if state.check:
                slack = _reassign_bound(state, jb, ja, core, terminal)
                if slack > TOL:
                    raise InvariantError(f"reassignment {jb}->{ja} exceeds per-unit bound by {slack!r}")
            move(state, ja, jb)
            if state.check:
                _check_after_move(state, order, mass)
            continue
        if terminal:
            if pa < 1 or y[order[pa - 1]] != 1.0:
                raise InvariantError(f"terminal cluster {core}: final merge without a full predecessor")
            ja, prev = order[pa], order[pa - 1]
            if state.check:
                slack = _reassign_bound(state, ja, prev, core, True)
                if slack > TOL:
                    raise InvariantError(f"merge {ja}->{prev} exceeds per-unit bound by {slack!r}")
            state.log.append(("merge", prev, ja, float(y[ja])))
            y[prev] += y[ja]
            y[ja] = 0.0
            x[prev] += x[ja]
            x[ja] = 0.0
            if state.check:
                _check_after_move(state, order, mass)
        break


@dataclass(frozen=True, eq=False)
class ConcentratedSolution:
    xprime: np.ndarray
    yprime: np.ndarray
    N1: tuple[int, ...]
    N2: tuple[int, ...]
    dprime: np.ndarray
    Y: float
    alpha: float
    log: tuple = ()

    @property
    def candidates(self) -> tuple[int, ...]:
        return tuple(sorted(self.N1 + self.N2))


def concentrate_all(
    inst: Instance,
    frac: FractionalSolution,
    clusters: ClusterStructure,
    check: bool = False,
) -> ConcentratedSolution:
    """Consolidate every cluster and derive the induced demands ``d'``."""
    alpha = clusters.alpha
    state = ConcentrateState.start(inst, frac, alpha, check)
    for core in clusters.cores:
        order = cluster_order(inst, core, clusters.members[core])
        concentrate_cluster(state, core, order, clusters.mass[core] >= 1.0 - TOL)
    low = (alpha - 1) / alpha
    y = state.y
    N1 = tuple(int(i) for i in np.flatnonzero(y >= 1.0))
    N2 = tuple(int(i) for i in np.flatnonzero((y >= low - TOL) & (y < 1.0)))
    dprime = state.x @ inst.demand
    return ConcentratedSolution(
        state.x, y.copy(), N1, N2, dprime, float(y[list(N2)].sum()), alpha, tuple(state.log)
    )


def concentrate_invariants(inst: Instance, frac: FractionalSolution, conc: ConcentratedSolution) -> list[Check]:
    """Evaluate the consolidated-solution properties."""
    y, x, a = conc.yprime, conc.xprime, conc.alpha
    low = (a - 1) / a
    in_range = (y == 0) | ((y >= low - TOL) & (y < 2))
    load_gap = float((x @ inst.demand - inst.capacity * y).max())
    return [
        Check("opening values in {0} U [(a-1)/a, 2)", float(np.count_nonzero(~in_range)), 0.0,
              bool(in_range.all())),
        Check("max(sum_j d_j x'_ij - M y'_i)", load_gap, 0.0, load_gap <= TOL * max(1.0, inst.capacity)),
        Check("total opening preserved", float(y.sum()), float(frac.y.sum()),
              abs(y.sum() - frac.y.sum()) <= TOL * max(1, inst.n) and y.sum() <= inst.k + TOL),
        Check("max(x'_ij - y'_i)", float((x - y[:, None]).max()), 0.0,
              bool(np.all(x <= y[:, None] + TOL))),
        Check("column sums of x'", float(np.abs(x.sum(axis=0) - 1).max()), 0.0,
              bool(np.all(np.abs(x.sum(axis=0) - 1) <= TOL))),
        Check("sum d' = sum d", float(conc.dprime.sum()), inst.total_demand,
              abs(conc.dprime.sum() - inst.total_demand) <= TOL * max(1.0, inst.total_demand)),
    ]


def easy_case_applies(conc: ConcentratedSolution) -> bool:
    """True when ``sum_{N2} y' > |N2| - 1`` (with ``TOL`` margin)."""
    return conc.Y > len(conc.N2) - 1 + TOL


def try_easy_case(inst: Instance, conc: ConcentratedSolution) -> IntegralSolution | None:
    """Open every location of ``N1 U N2`` if that fits the budget, else ``None``."""
    if not easy_case_applies(conc):
        return None
    opened = np.zeros(inst.n, dtype=int)
    opened[list(conc.candidates)] = 1
    if opened.sum() > inst.k:
        raise InvariantError(f"easy case opens {opened.sum()} > k = {inst.k} centers")
    assign = np.where(opened[:, None] == 1, conc.xprime, 0.0)
    return IntegralSolution.build(inst, opened, assign)
