"""Executable checks of the approximation and capacity guarantees."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import TOL, FractionalSolution, Instance, IntegralSolution

COST_RTOL = 1e-7


@dataclass
class VerifyReport:
    centers_ok: bool
    load_ok: bool
    cost_ok: bool
    coverage_ok: bool
    numbers: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.centers_ok and self.load_ok and self.cost_ok and self.coverage_ok

    def failures(self) -> list[str]:
        return [name for name in ("centers_ok", "load_ok", "cost_ok", "coverage_ok") if not getattr(self, name)]


def load_factor(alpha: float) -> float:
    return 2.0 + 2.0 / alpha


def approx_ratio(alpha: float) -> float:
    return 6.0 + 10.0 * alpha


def verify_guarantees(
    inst: Instance,
    frac: FractionalSolution | float,
    sol: IntegralSolution,
    alpha: float,
) -> VerifyReport:
    """Check budget, relaxed capacity, cost against the LP bound, and coverage.

    ``frac`` may be the fractional solution or just its objective value.
    """
    lp_cost = frac.objective if isinstance(frac, FractionalSolution) else float(frac)
    opened = np.asarray(sol.open).astype(bool)
    assign = np.asarray(sol.assign, dtype=float)
    n_open = int(opened.sum())
    load = assign @ inst.demand
    limit = load_factor(alpha) * inst.capacity
    max_load = float(load[opened].max()) if n_open else 0.0
    stray = float(np.abs(assign[~opened]).sum())
    coverage = assign[opened].sum(axis=0) if n_open else np.zeros(inst.n)
    cover_err = float(np.abs(coverage - 1.0).max())
    cost = float(((inst.cost * assign) @ inst.demand).sum())
    bound = approx_ratio(alpha) * lp_cost
    numbers = {
        "centers": n_open,
        "k": inst.k,
        "max_load_ratio": max_load / inst.capacity,
        "load_limit_ratio": load_factor(alpha),
        "cost": cost,
        "lp_cost": lp_cost,
        "cost_bound": bound,
        "cost_ratio": cost / lp_cost if lp_cost > 0 else (0.0 if cost <= TOL else float("inf")),
        "coverage_error": cover_err,
    }
    return VerifyReport(
        centers_ok=n_open <= inst.k,
        load_ok=max_load <= limit + TOL,
        cost_ok=cost <= bound * (1 + COST_RTOL) + TOL,
        coverage_ok=cover_err <= TOL and stray <= TOL and bool(np.all(assign >= -TOL)),
        numbers=numbers,
    )


def best_ratio_for_violation(v: float) -> tuple[float, float]:
    """Smallest approximation ratio whose capacity violation stays within ``v``.

    Returns ``(alpha, 6 + 10 alpha)`` with ``alpha = max(4, 2 / (v - 2))``.
    """
    if not v > 2:
        raise ValueError("capacity violation must exceed 2")
    alpha = max(4.0, 2.0 / (v - 2.0))
    return alpha, approx_ratio(alpha)
