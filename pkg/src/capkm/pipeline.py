"""End-to-end rounding: LP, clustering, consolidation, redistribution, stars."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cluster import ClusterStructure, check_alpha, cluster_invariants, run_clustering
from .concentrate import (
    ConcentratedSolution,
    concentrate_all,
    concentrate_invariants,
    try_easy_case,
)
from .lp import solve_ckm_relaxation
from .model import (
    TOL,
    Check,
    FractionalSolution,
    Instance,
    IntegralSolution,
    raise_for_problems,
    require,
    validate_instance,
)
from .redistribute import RedistributedSolution, redistribute_invariants, run_redistribute
from .stars import StarOutcome, round_profile

EASY, FULL, TRIVIAL = "easy", "full", "trivial-single"


@dataclass(eq=False)
class SolveResult:
    instance: Instance
    alpha: float
    frac: FractionalSolution
    clusters: ClusterStructure
    conc: ConcentratedSolution
    solution: IntegralSolution
    path: str
    red: RedistributedSolution | None = None
    stars: StarOutcome | None = None
    checks: dict[str, list[Check]] = field(default_factory=dict)

    @property
    def lp_cost(self) -> float:
        return self.frac.objective

    def all_checks(self) -> list[Check]:
        return [ch for rows in self.checks.values() for ch in rows]


def _easy_checks(inst, frac, sol, alpha) -> list[Check]:
    load = sol.max_load_ratio
    bound = (3 + 4 * alpha) * frac.objective
    return [
        Check("easy case max load / M", load, 2.0, load <= 2.0 + TOL),
        Check("easy case cost", sol.cost, bound, sol.cost <= bound * (1 + 1e-7) + TOL),
    ]


def solve(
    inst: Instance,
    alpha: float = 4.0,
    check: bool = False,
    frac: FractionalSolution | None = None,
) -> SolveResult:
    """Round an optimal (or the supplied) LP point to at most ``k`` centers
    with loads at most ``(2 + 2/alpha) M``.

    With ``check`` set, every stage's guarantees are asserted as it finishes
    and :class:`~capkm.model.InvariantError` is raised on the first failure.
    """
    alpha = check_alpha(alpha)
    raise_for_problems(validate_instance(inst))
    if frac is None:
        frac = solve_ckm_relaxation(inst)
    checks: dict[str, list[Check]] = {}

    clusters = run_clustering(inst, frac, alpha)
    checks["clustering"] = cluster_invariants(inst, frac, clusters)
    if check:
        require(checks["clustering"], "clustering")

    conc = concentrate_all(inst, frac, clusters, check=check)
    checks["consolidation"] = concentrate_invariants(inst, frac, conc)
    if check:
        require(checks["consolidation"], "consolidation")

    result = dict(instance=inst, alpha=alpha, frac=frac, clusters=clusters, conc=conc, checks=checks)
    cand = conc.candidates
    if len(cand) == 1:
        opened = np.zeros(inst.n, dtype=int)
        opened[cand[0]] = 1
        assign = np.zeros((inst.n, inst.n))
        assign[cand[0]] = 1.0
        return SolveResult(solution=IntegralSolution.build(inst, opened, assign), path=TRIVIAL, **result)

    easy = try_easy_case(inst, conc)
    if easy is not None:
        checks["easy case"] = _easy_checks(inst, frac, easy, alpha)
        if check:
            require(checks["easy case"], "easy case")
        return SolveResult(solution=easy, path=EASY, **result)

    red = run_redistribute(conc, inst)
    checks["redistribution"] = redistribute_invariants(inst, conc, red)
    if check:
        require(checks["redistribution"], "redistribution")
    outcome = round_profile(inst, conc, red)
    checks["stars"] = list(outcome.checks)
    if check:
        require(checks["stars"], "stars")
    return SolveResult(solution=outcome.solution, path=FULL, red=red, stars=outcome, **result)
