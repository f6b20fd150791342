"""Worked-example documents: per-step state and invariant tables.

:func:`build_trace` collects everything worth showing from a finished run
into plain Python values; :func:`render_trace` only formats those values
(with ``repr``), so every number in the document is the number in memory.
"""

from __future__ import annotations

from .pipeline import EASY, TRIVIAL, SolveResult


def _checks(rows) -> list[dict]:
    return [{"name": c.name, "value": float(c.value), "bound": float(c.bound), "ok": bool(c.ok)} for c in rows]


def _vec(a) -> list[float]:
    return [float(v) for v in a]


def build_trace(result: SolveResult, extra: dict | None = None) -> dict:
    """Snapshot of a pipeline run; ``extra`` may carry a ``"reduction"``
    section (facility/client runs) with ``checks`` and summary ``values``."""
    inst, sol = result.instance, result.solution
    t: dict = {
        "path": result.path,
        "instance": {"n": inst.n, "k": inst.k, "capacity": inst.capacity,
                     "demand": _vec(inst.demand)},
        "alpha": result.alpha,
        "lp": {"objective": result.lp_cost, "y": _vec(result.frac.y),
               "conn_cost": _vec(result.frac.conn_cost)},
        "result": {"centers": sol.centers, "cost": sol.cost,
                   "max_load_ratio": sol.max_load_ratio},
    }
    cl = result.clusters
    t["clusters"] = {
        "cores": list(cl.cores),
        "members": {int(c): list(cl.members[c]) for c in cl.cores},
        "mass": {int(c): float(cl.mass[c]) for c in cl.cores},
        "checks": _checks(result.checks.get("clustering", [])),
    }
    conc = result.conc
    t["consolidation"] = {
        "yprime": _vec(conc.yprime),
        "N1": list(conc.N1),
        "N2": list(conc.N2),
        "dprime": _vec(conc.dprime),
        "Y": conc.Y,
        "moves": len(conc.log),
        "checks": _checks(result.checks.get("consolidation", [])),
    }
    if result.path == EASY:
        t["easy"] = {"checks": _checks(result.checks.get("easy case", []))}
    if result.red is not None:
        red = result.red
        t["redistribution"] = {
            "order": list(red.order),
            "s_map": {int(i): int(s) for i, s in red.s_map.items()},
            "yhat": _vec(red.yhat),
            "residual": red.Yresidual,
            "checks": _checks(result.checks.get("redistribution", [])),
        }
    if result.stars is not None:
        out = result.stars
        t["stars"] = {
            "items": [
                {"root": rd.star.root, "children": list(rd.star.children), "R": rd.star.R,
                 "case": rd.case, "opened": list(rd.opened),
                 "reassign": {int(i): int(r) for i, r in rd.reassign.items()}}
                for rd in out.roundings
            ],
            "isolated": list(out.forest.isolated),
            "checks": _checks(result.checks.get("stars", [])),
        }
    if extra:
        t.update(extra)
    return t


def _table(rows: list[dict]) -> list[str]:
    if not rows:
        return ["  (no checks)"]
    w = max(len(r["name"]) for r in rows)
    lines = [f"  {'invariant':<{w}}  {'value':>24}  {'bound':>24}  ok"]
    for r in rows:
        lines.append(f"  {r['name']:<{w}}  {r['value']!r:>24}  {r['bound']!r:>24}  {'yes' if r['ok'] else 'NO'}")
    return lines


def _heading(title: str) -> list[str]:
    return ["", title, "-" * len(title)]


def render_trace(t: dict) -> str:
    """Format a trace as headed sections with aligned value/bound tables."""
    if t["path"] == TRIVIAL:
        r = t["result"]
        return (f"trivial-single: one candidate remains after consolidation; "
                f"open {r['centers']!r}, cost {r['cost']!r}\n")
    inst, lp, res = t["instance"], t["lp"], t["result"]
    out = ["Rounding trace", "==============",
           f"n = {inst['n']!r}, k = {inst['k']!r}, M = {inst['capacity']!r}, alpha = {t['alpha']!r}",
           f"demand = {inst['demand']!r}"]
    if "reduction" in t:
        red = t["reduction"]
        out += _heading("Reduction from the facility/client model")
        for key, val in red.get("values", {}).items():
            out.append(f"  {key} = {val!r}")
    out += _heading("LP relaxation")
    out.append(f"  C_LP = {lp['objective']!r}")
    out.append(f"  y = {lp['y']!r}")
    out.append(f"  per-unit connection cost C = {lp['conn_cost']!r}")

    cl = t["clusters"]
    out += _heading("Step 1: clusters")
    for c in cl["cores"]:
        out.append(f"  core {c!r}: members {cl['members'][c]!r}, mass {cl['mass'][c]!r}")
    out += _table(cl["checks"])

    co = t["consolidation"]
    out += _heading("Step 2: consolidation")
    out.append(f"  y' = {co['yprime']!r}")
    out.append(f"  N1 = {co['N1']!r}, N2 = {co['N2']!r}, Y = {co['Y']!r}")
    out.append(f"  d' = {co['dprime']!r}")
    out.append(f"  mass transfers: {co['moves']!r}")
    out += _table(co["checks"])

    if "easy" in t:
        out += _heading("Easy case: open every candidate")
        out += _table(t["easy"]["checks"])
    if "redistribution" in t:
        rd = t["redistribution"]
        out += _heading("Step 3: redistribution")
        out.append(f"  sweep order = {rd['order']!r}")
        out.append(f"  nearest other candidate s(i) = {rd['s_map']!r}")
        out.append(f"  yhat = {rd['yhat']!r}")
        out.append(f"  leftover mass = {rd['residual']!r}")
        out += _table(rd["checks"])
    if "stars" in t:
        st = t["stars"]
        out += _heading("Step 4: stars")
        for s in st["items"]:
            out.append(
                f"  star {s['root']!r} case {s['case']!r}: children {s['children']!r}, R = {s['R']!r}, "
                f"open {s['opened']!r}, reassign {s['reassign']!r}"
            )
        out.append(f"  isolated whole locations opened: {st['isolated']!r}")
        out += _table(st["checks"])
    if "reduction" in t:
        out += _heading("Composition back to clients")
        out += _table(t["reduction"].get("checks", []))

    out += _heading("Result")
    out.append(f"  path = {t['path']}")
    out.append(f"  centers = {res['centers']!r}")
    out.append(f"  cost = {res['cost']!r}")
    out.append(f"  max load / M = {res['max_load_ratio']!r}")
    return "\n".join(out) + "\n"

