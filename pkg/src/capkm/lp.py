"""LP relaxation builders and a dense two-phase simplex solver.

The solver works on a full tableau and pivots with Bland's rule (lowest
eligible index enters, ties in the ratio test leave by lowest basic index),
which rules out cycling and makes every run reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import TOL, FractionalSolution, InfeasibleError, Instance, CapkmError

PIVOT_EPS = 1e-7
COST_EPS = 1e-10
REFACTOR_EVERY = 100
RESIDUAL_TOL = 1e-7


class IterationLimitError(CapkmError):
    pass


@dataclass
class LpProblem:
    """``min c.x`` subject to sparse rows and ``0 <= x <= upper``.

    Each row is ``(coefs, sense, rhs)`` where ``coefs`` maps variable index to
    coefficient and ``sense`` is ``"<="`` or ``"="``.
    """

    c: np.ndarray
    rows: list[tuple[dict[int, float], str, float]] = field(default_factory=list)
    upper: np.ndarray | None = None
    names: list[str] | None = None

    @property
    def num_vars(self) -> int:
        return self.c.size

    def add_row(self, coefs: dict[int, float], sense: str, rhs: float) -> None:
        if sense not in ("<=", "="):
            raise ValueError(f"unsupported sense {sense!r}")
        self.rows.append((coefs, sense, float(rhs)))

    def count(self, sense: str) -> int:
        return sum(1 for _, s, _ in self.rows if s == sense)

    def value(self, x: np.ndarray) -> float:
        return float(self.c @ x)


@dataclass(frozen=True)
class LpResult:
    x: np.ndarray
    objective: float
    iterations: int


def _pivot(T: np.ndarray, basis: list[int], r: int, col: int) -> None:
    T[r] /= T[r, col]
    factor = T[:, col].copy()
    factor[r] = 0.0
    T -= np.outer(factor, T[r])
    T[:, col] = 0.0
    T[r, col] = 1.0
    basis[r] = col
    # round-off can push a degenerate basic value just below zero
    rhs = T[:-1, -1]
    rhs[(rhs < 0) & (rhs > -1e-9)] = 0.0


def _tableau(A: np.ndarray, b: np.ndarray, basis: list[int], cost: np.ndarray) -> np.ndarray:
    """Rebuild ``[B^-1 A | B^-1 b]`` and the reduced-cost row from scratch.

    Called periodically so pivoting round-off never accumulates.
    """
    m, ncols = A.shape
    B = A[:, basis]
    body = np.linalg.solve(B, np.hstack([A, b[:, None]]))
    body[np.abs(body) <= 1e-12] = 0.0
    rhs = body[:, -1]
    rhs[(rhs < 0) & (rhs > -1e-9)] = 0.0
    T = np.zeros((m + 1, ncols + 1))
    T[:m] = body
    T[-1, :ncols] = cost
    T[-1] -= cost[basis] @ body
    for r, v in enumerate(basis):
        T[:m, v] = 0.0
        T[r, v] = 1.0
        T[-1, v] = 0.0
    return T


def _run_simplex(A, b, basis: list[int], cost: np.ndarray, limit: int) -> tuple[np.ndarray, int]:
    """Pivot with Bland's rule until no reduced cost is negative.

    Returns the final tableau (objective row ``T[-1]``, rhs column
    ``T[:, -1]``) and the pivot count.
    """
    m = A.shape[0]
    ncols = cost.size
    T = _tableau(A, b, basis, cost)
    it = 0
    while True:
        red = T[-1, :ncols]
        cand = np.flatnonzero(red < -COST_EPS)
        if cand.size == 0:
            return T, it
        col = int(cand[0])
        colvals = T[:m, col]
        pos = np.flatnonzero(colvals > PIVOT_EPS)
        if pos.size == 0:
            raise CapkmError("LP is unbounded")
        ratios = np.maximum(T[pos, -1], 0.0) / colvals[pos]
        best = ratios.min()
        ties = pos[ratios <= best + 1e-12]
        r = int(min(ties, key=lambda i: basis[i]))
        _pivot(T, basis, r, col)
        it += 1
        if it > limit:
            raise IterationLimitError(f"simplex exceeded {limit} pivots")
        if it % REFACTOR_EVERY == 0:
            T = _tableau(A, b, basis, cost)


def solve_lp(p: LpProblem, max_iter: int | None = None) -> LpResult:
    """Solve ``p`` to optimality; raise :class:`InfeasibleError` if it has no feasible point."""
    nv = p.num_vars
    rows = list(p.rows)
    if p.upper is not None:
        for v in np.flatnonzero(np.isfinite(p.upper)):
            rows.append(({int(v): 1.0}, "<=", float(p.upper[v])))
    m = len(rows)
    n_slack = sum(1 for _, s, _ in rows if s == "<=")

    # Columns: structural | slacks | artificials
    A = np.zeros((m, nv + n_slack))
    b = np.zeros(m)
    need_art = []
    basis = [-1] * m
    k = nv
    for r, (coefs, sense, rhs) in enumerate(rows):
        for v, a in coefs.items():
            A[r, v] += a
        if sense == "<=":
            A[r, k] = 1.0
            slack = k
            k += 1
        else:
            slack = None
        b[r] = rhs
        if rhs < 0:
            A[r] *= -1.0
            b[r] = -rhs
            need_art.append(r)
        elif slack is None:
            need_art.append(r)
        else:
            basis[r] = slack
    A_orig, b_orig = A, b.copy()

    n_art = len(need_art)
    ncols = nv + n_slack + n_art
    limit = max_iter if max_iter is not None else 50 * (m + ncols) + 1000

    it = 0
    if n_art:
        # Phase 1: minimise the sum of artificials.
        A = np.hstack([A, np.zeros((m, n_art))])
        for a, r in enumerate(need_art):
            A[r, nv + n_slack + a] = 1.0
            basis[r] = nv + n_slack + a
        cost1 = np.zeros(ncols)
        cost1[nv + n_slack :] = 1.0
        T, it = _run_simplex(A, b, basis, cost1, limit)
        infeas = -T[-1, -1]
        if infeas > TOL * max(1.0, np.abs(b).max()):
            raise InfeasibleError(f"LP infeasible (phase-1 residual {infeas:.3g})")
        # Drive remaining artificials out of the basis on their largest
        # structural entry; rows with no usable entry are redundant.
        keep = []
        for r in range(m):
            if basis[r] >= nv + n_slack:
                entries = np.abs(T[r, : nv + n_slack])
                entries[[v for v in basis if v < nv + n_slack]] = 0.0
                col = int(np.argmax(entries))
                if entries[col] > PIVOT_EPS:
                    _pivot(T, basis, r, col)
                    keep.append(r)
            else:
                keep.append(r)
        A = A[keep, : nv + n_slack]
        b = b[keep]
        basis = [basis[r] for r in keep]
        ncols = nv + n_slack

    cost = np.zeros(ncols)
    cost[:nv] = p.c
    T, it2 = _run_simplex(A, b, basis, cost, limit)
    it += it2

    x = np.zeros(ncols)
    x[basis] = T[:-1, -1]
    x = np.maximum(x, 0.0)
    resid = float(np.abs(A_orig @ x - b_orig).max()) if m else 0.0
    if resid > RESIDUAL_TOL * max(1.0, float(np.abs(b_orig).max())):
        raise CapkmError(f"simplex lost accuracy (row residual {resid:.3g})")
    x = x[:nv]
    return LpResult(x, p.value(x), it)


def build_ckm_lp(inst: Instance) -> LpProblem:
    """LP relaxation over variables ``x_ij`` (index ``i*n + j``) then ``y_i``."""
    return _build_capacitated_lp(inst.cost, inst.demand, inst.capacity, inst.k)


def build_ckl_lp(cost_fd, demand, capacity: float, k: int) -> LpProblem:
    """Facility/client relaxation: ``cost_fd`` is facilities x clients."""
    return _build_capacitated_lp(cost_fd, demand, capacity, k)


def _build_capacitated_lp(cost, demand, capacity, k) -> LpProblem:
    cost = np.asarray(cost, dtype=float)
    demand = np.asarray(demand, dtype=float)
    nf, nc = cost.shape
    xi = lambda i, j: i * nc + j  # noqa: E731
    yi = lambda i: nf * nc + i  # noqa: E731
    c = np.concatenate([(cost * demand[None, :]).ravel(), np.zeros(nf)])
    upper = np.concatenate([np.full(nf * nc, np.inf), np.ones(nf)])
    p = LpProblem(c=c, upper=upper)
    for j in range(nc):
        p.add_row({xi(i, j): 1.0 for i in range(nf)}, "=", 1.0)
    for i in range(nf):
        row = {xi(i, j): float(demand[j]) for j in range(nc) if demand[j] != 0}
        row[yi(i)] = -float(capacity)
        p.add_row(row, "<=", 0.0)
    p.add_row({yi(i): 1.0 for i in range(nf)}, "<=", float(k))
    for i in range(nf):
        for j in range(nc):
            p.add_row({xi(i, j): 1.0, yi(i): -1.0}, "<=", 0.0)
    return p


def _snap(a: np.ndarray, tol: float = TOL) -> np.ndarray:
    a = np.where(np.abs(a) <= tol, 0.0, a)
    return np.where(np.abs(a - 1.0) <= tol, 1.0, a)


def split_solution(vec: np.ndarray, nf: int, nc: int) -> tuple[np.ndarray, np.ndarray]:
    """Unpack an LP vector into snapped ``(x, y)`` with exact unit column sums."""
    x = _snap(vec[: nf * nc].reshape(nf, nc))
    y = _snap(vec[nf * nc : nf * nc + nf])
    x /= x.sum(axis=0, keepdims=True)
    return x, y


def solve_ckm_relaxation(inst: Instance) -> FractionalSolution:
    """Optimal point of the LP relaxation, snapped and packaged."""
    if inst.total_demand > inst.k * inst.capacity + TOL:
        raise InfeasibleError(
            f"total demand {inst.total_demand!r} exceeds k*M = {inst.k * inst.capacity!r}"
        )
    res = solve_lp(build_ckm_lp(inst))
    x, y = split_solution(res.x, inst.n, inst.n)
    return FractionalSolution.from_xy(inst, x, y)


@dataclass(frozen=True)
class Transportation:
    assign: np.ndarray  # rows: every location (zero rows off the open set)
    cost: float


def transport(cost_rows, demand, limit: float) -> tuple[np.ndarray, float]:
    """Min-cost splittable assignment of ``demand`` to sources with load ``<= limit``.

    ``cost_rows`` is sources x sinks. Returns the fraction matrix and cost.
    """
    cost_rows = np.asarray(cost_rows, dtype=float)
    demand = np.asarray(demand, dtype=float)
    ns, nt = cost_rows.shape
    if demand.sum() > ns * limit + TOL:
        raise InfeasibleError(
            f"demand {demand.sum()!r} exceeds open capacity {ns * limit!r}"
        )
    p = LpProblem(c=(cost_rows * demand[None, :]).ravel())
    for j in range(nt):
        p.add_row({i * nt + j: 1.0 for i in range(ns)}, "=", 1.0)
    for i in range(ns):
        row = {i * nt + j: float(demand[j]) for j in range(nt) if demand[j] != 0}
        if row:
            p.add_row(row, "<=", float(limit))
    res = solve_lp(p)
    frac = _snap(res.x.reshape(ns, nt))
    frac /= frac.sum(axis=0, keepdims=True)
    return frac, float(((cost_rows * frac) @ demand).sum())


def solve_transportation(inst: Instance, open_set, cap_scale: float = 1.0) -> Transportation:
    """Optimal assignment of all demand to the fixed center set ``open_set``."""
    open_idx = sorted(int(i) for i in open_set)
    if not open_idx:
        raise ValueError("open_set must be non-empty")
    if cap_scale < 1:
        raise ValueError("cap_scale must be >= 1")
    frac, cost = transport(inst.cost[open_idx], inst.demand, cap_scale * inst.capacity)
    assign = np.zeros_like(inst.cost)
    assign[open_idx] = frac
    return Transportation(assign, cost)
