"""Round the two-level opening profile to an integral solution via stars.

Every fractional candidate points at its nearest other candidate. The
resulting forest is cut into one-level stars, and each star opens at most
``floor(R_t)`` of its locations, where ``R_t`` is the star's total opening
value. Closed locations hand their induced demand to an open location
nearer the root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .concentrate import ConcentratedSolution
from .lp import solve_transportation
from .model import TOL, Check, Instance, IntegralSolution, InvariantError, NumericalMarginError
from .redistribute import RedistributedSolution


@dataclass
class Star:
    root: int
    children: list[int]
    R: float = 0.0

    @property
    def members(self) -> list[int]:
        return [self.root, *self.children]


@dataclass
class StarForest:
    N1hat: tuple[int, ...]
    N2hat: tuple[int, ...]
    parent: dict[int, int | None]
    roots: tuple[int, ...]
    succ: dict[int, int] = field(default_factory=dict)
    stars: list[Star] = field(default_factory=list)
    isolated: list[int] = field(default_factory=list)

    @property
    def L1(self) -> int:
        return len(self.N1hat)


@dataclass(frozen=True)
class StarRounding:
    star: Star
    case: int
    opened: tuple[int, ...]
    reassign: dict[int, int]
    cost: float


def split_profile(yhat: np.ndarray, alpha: float) -> tuple[tuple[int, ...], tuple[int, ...]]:
    lo = (alpha - 2) / alpha
    N1hat = tuple(int(i) for i in np.flatnonzero((yhat >= 1.0) & (yhat < 2.0)))
    N2hat = tuple(int(i) for i in np.flatnonzero((yhat > lo) & (yhat < 1.0)))
    return N1hat, N2hat


def build_forest(red: RedistributedSolution) -> StarForest:
    """Nearest-neighbour digraph on the fractional locations, with every cycle
    cut at its lowest-index node, which becomes a root."""
    N1hat, N2hat = split_profile(red.yhat, red.alpha)
    nodes = sorted(N1hat + N2hat)
    succ = {i: red.s_map[i] for i in N2hat}
    parent: dict[int, int | None] = {i: succ.get(i) for i in nodes}
    stamp: dict[int, int] = {}
    for start in N2hat:
        if start in stamp:
            continue
        path = []
        i = start
        while i is not None and i not in stamp:
            stamp[i] = start
            path.append(i)
            i = parent[i]
        if i is not None and stamp[i] == start:
            cycle = path[path.index(i):]
            parent[min(cycle)] = None
    roots = tuple(i for i in nodes if parent[i] is None)
    return StarForest(N1hat, N2hat, parent, roots, succ)


def _tree_of(forest: StarForest, root: int) -> list[int]:
    out = []
    for i in forest.parent:
        j = i
        while forest.parent[j] is not None:
            j = forest.parent[j]
        if j == root:
            out.append(i)
    return sorted(out)


def decompose_to_stars(forest: StarForest, yhat: np.ndarray, cost: np.ndarray) -> StarForest:
    """Strip stars from each tree, deepest leaf first; fills ``forest.stars``
    and ``forest.isolated`` in place and returns the forest."""
    parent = forest.parent
    stars: list[Star] = []
    leftovers: list[int] = []
    for root in forest.roots:
        alive = set(_tree_of(forest, root))
        depth = {}
        for i in alive:
            d, j = 0, i
            while parent[j] is not None:
                d, j = d + 1, parent[j]
            depth[i] = d
        while len(alive) >= 2:
            kids = {i: [c for c in alive if parent[c] == i] for i in alive}
            leaves = [i for i in alive if not kids[i]]
            leaf = min(leaves, key=lambda i: (-depth[i], i))
            p = parent[leaf]
            stars.append(Star(p, sorted(kids[p])))
            alive -= {p, *kids[p]}
        if alive:
            (last,) = alive
            if 0.0 < yhat[last] < 1.0:
                leftovers.append(last)
            else:
                forest.isolated.append(last)
    by_root = {s.root: s for s in stars}
    for i in leftovers:
        # a leftover fractional node is a cycle root; its nearest neighbour
        # was its cycle partner, stripped earlier as a star root
        if forest.succ[i] not in by_root:
            raise InvariantError(f"leftover node {i} has no star rooted at {forest.succ[i]}")
        by_root[forest.succ[i]].children.append(i)
    for s in stars:
        s.children.sort(key=lambda i: (cost[s.root, i], i))
        s.R = float(yhat[s.root] + sum(yhat[i] for i in s.children))
    forest.stars = stars
    forest.isolated.sort()
    return forest


def round_star(star: Star, yhat: np.ndarray, alpha: float, cost=None, dprime=None) -> StarRounding:
    """Choose which star members open and where the closed ones send demand.

    Children are in nondecreasing distance from the root. With a root of
    value at least 1 and an even child count, or at least ``1 + 2/alpha`` and
    an odd count, the root plus children 1, 3, 5, ... open and each even child
    goes to its predecessor. Otherwise the root plus children 2, 4, ... open;
    child 1 goes to the root and each later odd child to its predecessor.
    """
    t, ch = star.root, star.children
    m = len(ch)
    yt = yhat[t]
    if m == 0:
        raise InvariantError(f"star at {t} has no children")
    if m % 2 == 0:
        case = 1 if yt >= 1.0 else 2
    else:
        case = 3 if yt >= 1.0 + 2.0 / alpha - TOL else 4
    opened = [t]
    reassign: dict[int, int] = {}
    if case in (1, 3):
        for p, i in enumerate(ch):
            if p % 2 == 0:
                opened.append(i)
            else:
                reassign[i] = ch[p - 1]
    else:
        reassign[ch[0]] = t
        for p in range(1, m):
            if p % 2 == 1:
                opened.append(ch[p])
            else:
                reassign[ch[p]] = ch[p - 1]
    cost_val = 0.0
    if cost is not None and dprime is not None:
        cost_val = float(sum(dprime[i] * cost[r, i] for i, r in reassign.items()))
    return StarRounding(star, case, tuple(opened), reassign, cost_val)


def star_checks(rd: StarRounding, yhat, alpha, inst: Instance, dprime, s_map) -> list[Check]:
    """Per-star guarantees: opening mass, center count, loads, reassignment cost."""
    star = rd.star
    M = inst.capacity
    frac_members = [i for i in star.members if yhat[i] < 1.0]
    cnt = len(frac_members)
    mass = float(sum(yhat[i] for i in frac_members))
    out = []
    if cnt >= 2:
        q = cnt // 2
        bound = q if cnt % 2 == 0 else q + 1
        out.append(Check(f"star {star.root} fractional mass ({cnt} nodes)", mass, float(bound), mass > bound))
    cap = math.floor(star.R + TOL)
    if len(rd.opened) > cap:
        raise NumericalMarginError(
            f"star {star.root} (case {rd.case}) opens {len(rd.opened)} > floor(R_t) = {cap}"
        )
    out.append(Check(f"star {star.root} centers <= floor(R_t)", float(len(rd.opened)), float(cap), True))
    load = {c: dprime[c] for c in rd.opened}
    for i, r in rd.reassign.items():
        load[r] += dprime[i]
    worst = max(load.values())
    limit = (2 + 2 / alpha) * M
    out.append(Check(f"star {star.root} max d'-load", float(worst), limit, worst <= limit + TOL * max(1.0, M)))
    slack = max(
        (dprime[i] * inst.cost[r, i] - 2 * dprime[i] * inst.cost[s_map[i], i] for i, r in rd.reassign.items()),
        default=0.0,
    )
    scale = max((dprime[i] * inst.cost[s_map[i], i] for i in rd.reassign), default=1.0)
    out.append(Check(f"star {star.root} reassignment vs 2*d'c_s(i)i", float(slack), 0.0,
                     slack <= TOL * max(1.0, scale)))
    return out


@dataclass(frozen=True, eq=False)
class StarOutcome:
    solution: IntegralSolution
    forest: StarForest
    roundings: tuple[StarRounding, ...]
    checks: tuple[Check, ...]


def assemble_integral(inst: Instance, forest: StarForest, roundings, conc: ConcentratedSolution) -> IntegralSolution:
    """Open every star choice plus each isolated whole location, then send each
    original location's demand along ``x'`` and the star reassignment."""
    target = {i: i for i in forest.isolated}
    for rd in roundings:
        for i in rd.opened:
            target[i] = i
        target.update(rd.reassign)
    missing = set(conc.candidates) - set(target)
    if missing:
        raise InvariantError(f"candidates left unassigned: {sorted(missing)}")
    opened = np.zeros(inst.n, dtype=int)
    assign = np.zeros((inst.n, inst.n))
    for i, c in target.items():
        if i == c:
            opened[i] = 1
        assign[c] += conc.xprime[i]
    return IntegralSolution.build(inst, opened, assign)


def round_profile(inst: Instance, conc: ConcentratedSolution, red: RedistributedSolution, check: bool = False) -> StarOutcome:
    """Forest construction, decomposition, per-star rounding, and assembly."""
    alpha = red.alpha
    forest = decompose_to_stars(build_forest(red), red.yhat, inst.cost)
    roundings = tuple(round_star(s, red.yhat, alpha, inst.cost, conc.dprime) for s in forest.stars)
    checks: list[Check] = []
    for rd in roundings:
        checks.extend(star_checks(rd, red.yhat, alpha, inst, conc.dprime, red.s_map))
    sol = assemble_integral(inst, forest, roundings, conc)
    budget = sum(math.floor(s.R + TOL) for s in forest.stars) + sum(
        math.floor(red.yhat[i] + TOL) for i in forest.isolated
    )
    opened = int(sol.open.sum())
    checks.append(Check("centers <= sum floor(R_t) + isolated", float(opened), float(budget), opened <= budget))
    whole = math.floor(float(red.yhat.sum()) + TOL)
    checks.append(Check("sum floor(R_t) + isolated <= floor(sum yhat)", float(budget), float(whole), budget <= whole))
    checks.append(Check("floor(sum yhat) <= k", float(whole), float(inst.k), whole <= inst.k))
    return StarOutcome(sol, forest, roundings, tuple(checks))


def refine(inst: Instance, sol: IntegralSolution, alpha: float) -> float:
    """Cost of the best splittable assignment to the same open set at the
    relaxed capacity; a tighter figure than the composed assignment."""
    return solve_transportation(inst, sol.centers, 2 + 2 / alpha).cost
