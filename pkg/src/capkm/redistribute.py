"""Reshape the fractional opening values of the non-terminal cores."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .concentrate import ConcentratedSolution
from .model import TOL, Check, Instance, NumericalMarginError


@dataclass(frozen=True, eq=False)
class RedistributedSolution:
    yhat: np.ndarray
    s_map: dict[int, int]
    order: tuple[int, ...]
    Yresidual: float
    alpha: float


def compute_s_map(conc: ConcentratedSolution, inst: Instance, sources=None) -> dict[int, int]:
    """Nearest other candidate center for each location in ``sources`` (default ``N2``).

    Candidates are ``N1 U N2``; ties go to the lowest index.
    """
    cand = list(conc.candidates)
    if len(cand) < 2:
        raise ValueError("nearest-neighbour map needs at least two candidate centers")
    sources = conc.N2 if sources is None else sources
    out = {}
    for i in sources:
        others = [t for t in cand if t != i]
        out[int(i)] = int(min(others, key=lambda t: (inst.cost[t, i], t)))
    return out


def determine_opening_values(yprime, alpha: float) -> tuple[np.ndarray, float]:
    """Core of the redistribution sweep on values already in sweep order.

    ``yprime[0]`` is the location with the smallest key and the only one whose
    value may drop below ``(alpha-1)/alpha``. Returns the new values and the
    leftover mass ``Y'`` at termination.
    """
    yprime = np.asarray(yprime, dtype=float)
    v = yprime.size
    total = float(yprime.sum())
    yhat = np.full(v, (alpha - 1) / alpha)
    resid = total - yhat.sum()
    for r in range(v - 1, -1, -1):
        if resid <= TOL:
            return yhat, 0.0
        if r == 0:
            raise NumericalMarginError("redistribution sweep reached the first location")
        if resid + yhat[r] < 1.0 - TOL:
            yhat[0] -= 1.0 - resid - yhat[r]
            yhat[r] = 1.0
            if yhat[0] <= (alpha - 2) / alpha + TOL:
                raise NumericalMarginError(
                    f"first location dropped to {yhat[0]!r}, at the (alpha-2)/alpha floor"
                )
            return yhat, resid
        yhat[r] = 1.0
        resid = total - yhat.sum()
    return yhat, resid


def run_redistribute(conc: ConcentratedSolution, inst: Instance) -> RedistributedSolution:
    """Assign ``N2`` the two-level opening profile, favouring locations whose
    induced demand is expensive to move to their nearest neighbour."""
    alpha = conc.alpha
    N2 = conc.N2
    if conc.Y > len(N2) - 1 + TOL:
        raise ValueError(
            f"sum of N2 opening values {conc.Y!r} exceeds |N2| - 1 = {len(N2) - 1}"
        )
    s_map = compute_s_map(conc, inst)
    key = {i: conc.dprime[i] * inst.cost[s_map[i], i] for i in N2}
    order = tuple(sorted(N2, key=lambda i: (key[i], i)))
    vals, resid = determine_opening_values([conc.yprime[i] for i in order], alpha)
    yhat = conc.yprime.copy()
    yhat[list(order)] = vals
    return RedistributedSolution(yhat, s_map, order, resid, alpha)


def redistribute_invariants(inst: Instance, conc: ConcentratedSolution, red: RedistributedSolution) -> list[Check]:
    """Evaluate the redistributed-profile properties."""
    a = red.alpha
    lo, hi = (a - 2) / a, (a - 1) / a
    yh, yp, d = red.yhat, conc.yprime, conc.dprime
    frac = (yh > lo) & (yh <= hi + TOL)
    whole = (yh >= 1.0) & (yh < 2.0)
    shape_ok = bool(np.all(frac | whole | (yh == 0)))
    strict = [i for i in range(inst.n) if lo < yh[i] < hi - TOL]
    first = red.order[0] if red.order else None
    M = inst.capacity
    b_gap = float(max((d[i] - M for i in np.flatnonzero(frac)), default=-M))
    c_gap = float(max((d[i] - M * yh[i] for i in np.flatnonzero(whole)), default=-M))
    N2 = list(conc.N2)
    w = {i: d[i] * inst.cost[red.s_map[i], i] for i in N2}
    after = float(sum((1 - yh[i]) * w[i] for i in N2))
    before = float(sum((1 - yp[i]) * w[i] for i in N2))
    return [
        Check("values in {0} U ((a-2)/a,(a-1)/a] U [1,2)", float(np.count_nonzero(~(frac | whole | (yh == 0)))), 0.0, shape_ok),
        Check("values strictly inside ((a-2)/a,(a-1)/a)", float(len(strict)), 1.0,
              len(strict) == 0 or (len(strict) == 1 and strict[0] == first)),
        Check("max(d'_i - M) on fractional", b_gap, 0.0, b_gap <= TOL * max(1.0, M)),
        Check("max(d'_i - M*yhat_i) on [1,2)", c_gap, 0.0, c_gap <= TOL * max(1.0, M)),
        Check("sum yhat over N2 preserved", float(yh[N2].sum()), float(yp[N2].sum()),
              abs(yh[N2].sum() - yp[N2].sum()) <= TOL * max(1, len(N2))),
        Check("sum yhat preserved, <= k", float(yh.sum()), float(inst.k),
              abs(yh.sum() - yp.sum()) <= TOL * max(1, inst.n) and yh.sum() <= inst.k + TOL),
        Check("weighted closing cost not increased", after, before, after <= before + TOL * max(1.0, abs(before))),
    ]
