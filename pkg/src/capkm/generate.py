"""Seeded random instances for tests and benchmarks."""

from __future__ import annotations

import math

import numpy as np

from .ckl import CklInstance
from .model import Instance, InvalidInstanceError

GEOMETRIES = ("plane", "uniform-matrix")
MAX_TRIES = 100


def _distances(rng: np.random.Generator, n: int, geometry: str) -> np.ndarray:
    if geometry == "plane":
        pts = rng.random((n, 2))
        return np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    if geometry == "uniform-matrix":
        # any a <= 2 <= b + c with entries in [1, 2], so this is always a metric
        c = rng.uniform(1.0, 2.0, (n, n))
        c = np.triu(c, 1)
        return c + c.T
    raise ValueError(f"unknown geometry {geometry!r}; choose from {GEOMETRIES}")


def _auto_capacity(rng: np.random.Generator, demand: np.ndarray, k: int) -> float:
    # between just enough and half again the average load per center
    need = demand.sum() / k
    return math.ceil(need * rng.uniform(1.0, 1.5) * 1000) / 1000


def gen_instance(
    n: int,
    seed: int,
    demand_max: int = 10,
    capacity: float | None = None,
    k: int | None = None,
    geometry: str = "plane",
) -> Instance:
    """Random instance with integer demands in ``[1, demand_max]``.

    ``k`` defaults to ``max(1, n // 3)``. Without ``capacity`` one is chosen
    so that ``sum d <= k M``; with a fixed capacity, demand vectors are
    redrawn until they fit, up to ``MAX_TRIES`` times.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if demand_max < 1:
        raise ValueError("demand_max must be at least 1")
    k = max(1, n // 3) if k is None else int(k)
    if k < 1:
        raise ValueError("k must be positive")
    rng = np.random.default_rng(seed)
    cost = _distances(rng, n, geometry)
    for _ in range(MAX_TRIES):
        demand = rng.integers(1, demand_max + 1, n).astype(float)
        M = _auto_capacity(rng, demand, k) if capacity is None else float(capacity)
        if demand.sum() <= k * M:
            return Instance(cost, demand, M, k)
    raise InvalidInstanceError(
        f"no demand draw fits k*M = {k * float(capacity)!r} after {MAX_TRIES} tries"
    )


def gen_ckl_instance(
    n_facilities: int,
    n_clients: int,
    seed: int,
    demand_max: int = 10,
    capacity: float | None = None,
    k: int | None = None,
) -> CklInstance:
    """Facilities and clients drawn uniformly in the unit square.

    ``k`` defaults to ``max(1, n_facilities // 2)``.
    """
    if n_facilities < 1 or n_clients < 1:
        raise ValueError("need at least one facility and one client")
    k = max(1, n_facilities // 2) if k is None else int(k)
    rng = np.random.default_rng(seed)
    fac = rng.random((n_facilities, 2))
    cli = rng.random((n_clients, 2))
    ff = np.linalg.norm(fac[:, None] - fac[None], axis=-1)
    fd = np.linalg.norm(fac[:, None] - cli[None], axis=-1)
    for _ in range(MAX_TRIES):
        demand = rng.integers(1, demand_max + 1, n_clients).astype(float)
        M = _auto_capacity(rng, demand, k) if capacity is None else float(capacity)
        if demand.sum() <= k * M:
            return CklInstance(ff, fd, demand, M, k)
    raise InvalidInstanceError(
        f"no demand draw fits k*M = {k * float(capacity)!r} after {MAX_TRIES} tries"
    )


def ring_instance(sizes, jitter: float = 0.0, seed: int = 0, spacing: float = 10.0) -> Instance:
    """Far-apart rings of unit-demand points, each ring one center short.

    With ``M = n / k`` the LP prefers to open every point almost fully and
    pass the shortfall to ring neighbours, which leaves many low-mass
    clusters; rings of nine or more points reach the full rounding path at
    ``alpha = 4``.
    """
    rng = np.random.default_rng(seed)
    pts = []
    for r, m in enumerate(sizes):
        theta = 2 * np.pi * np.arange(m) / m + rng.normal(0.0, jitter, m)
        pts.append(np.c_[np.cos(theta), np.sin(theta)] + [spacing * r, 0.0])
    p = np.vstack(pts)
    n, k = len(p), len(p) - len(sizes)
    cost = np.linalg.norm(p[:, None] - p[None], axis=-1)
    return Instance(cost, np.ones(n), n / k, k)
