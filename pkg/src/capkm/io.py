"""JSON instance and solution files.

Floats are written with ``repr`` precision (the ``json`` module default), so
reading a file back reproduces every number bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .ckl import CklInstance
from .model import Instance, InvalidInstanceError


def instance_to_dict(inst: Instance | CklInstance) -> dict:
    if isinstance(inst, CklInstance):
        cost = np.hstack([inst.cost_ff, inst.cost_fd])
        return {
            "n": inst.n_clients,
            "facilities": inst.n_facilities,
            "cost": cost.tolist(),
            "demand": inst.demand.tolist(),
            "capacity": float(inst.capacity),
            "k": int(inst.k),
        }
    return {
        "n": inst.n,
        "cost": inst.cost.tolist(),
        "demand": inst.demand.tolist(),
        "capacity": float(inst.capacity),
        "k": int(inst.k),
    }


def dumps(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":")) + "\n"


def write_instance(inst, path) -> None:
    Path(path).write_text(dumps(instance_to_dict(inst)))


def instance_from_dict(data: dict) -> Instance | CklInstance:
    """Build an instance from parsed JSON; a ``facilities`` field selects the
    facility/client model, whose ``n`` counts clients."""
    try:
        n = int(data["n"])
        cost = np.array(data["cost"], dtype=float)
        demand = np.array(data["demand"], dtype=float)
        capacity = float(data["capacity"])
        k = data["k"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInstanceError(f"malformed instance: {exc}") from exc
    if not isinstance(k, int) or isinstance(k, bool):
        raise InvalidInstanceError("k must be an integer")
    if "facilities" in data:
        f = data["facilities"]
        if not isinstance(f, int) or f < 1:
            raise InvalidInstanceError("facilities must be a positive integer")
        if cost.shape != (f, f + n):
            raise InvalidInstanceError(f"cost has shape {cost.shape}, expected ({f}, {f + n})")
        if demand.shape != (n,):
            raise InvalidInstanceError(f"demand has length {demand.size}, expected {n}")
        return CklInstance(cost[:, :f], cost[:, f:], demand, capacity, k)
    if cost.shape != (n, n):
        raise InvalidInstanceError(f"cost has shape {cost.shape}, expected ({n}, {n})")
    return Instance(cost, demand, capacity, k)


def read_instance(path) -> Instance | CklInstance:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInstanceError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise InvalidInstanceError(f"{path}: top level must be an object")
    return instance_from_dict(data)


def solution_to_dict(sol, alpha: float, path: str) -> dict:
    """``sol`` is an ``IntegralSolution`` or ``CklSolution``; ``assign`` is
    written sparsely as ``[center, location, fraction]`` sorted by position."""
    a = np.asarray(sol.assign)
    entries = [[int(i), int(j), float(a[i, j])] for i, j in zip(*np.nonzero(a))]
    return {
        "open": [int(v) for v in sol.open],
        "assign": entries,
        "cost": float(sol.cost),
        "max_load_ratio": float(sol.max_load_ratio),
        "alpha": float(alpha),
        "path": path,
    }


def write_solution(sol, alpha: float, path_label: str, path) -> None:
    Path(path).write_text(dumps(solution_to_dict(sol, alpha, path_label)))


def read_solution(path, n_locations: int | None = None) -> dict:
    """Parse a solution file; ``assign`` comes back as a dense array with
    ``len(open)`` rows and ``n_locations`` columns (default: square)."""
    data = json.loads(Path(path).read_text())
    opened = np.array(data["open"], dtype=int)
    cols = len(opened) if n_locations is None else n_locations
    assign = np.zeros((len(opened), cols))
    for i, j, v in data["assign"]:
        assign[int(i), int(j)] = float(v)
    data["open"] = opened
    data["assign"] = assign
    return data
