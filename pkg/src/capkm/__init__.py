"""LP rounding for uniform capacitated k-median with bounded capacity violation.

Typical use::

    from capkm import gen_instance, solve, verify_guarantees
    inst = gen_instance(10, seed=1)
    res = solve(inst, alpha=4.0)
    verify_guarantees(inst, res.frac, res.solution, 4.0).ok
"""

from .ckl import CklInstance, CklSolution, solve_ckl
from .generate import gen_ckl_instance, gen_instance
from .lp import solve_ckm_relaxation, solve_lp, solve_transportation
from .model import (
    TOL,
    CapkmError,
    FractionalSolution,
    InfeasibleError,
    Instance,
    IntegralSolution,
    InvalidInstanceError,
    InvariantError,
    NumericalMarginError,
    validate_instance,
)
from .oracle import exact_ckl_opt, exact_lp_check, exact_opt
from .pipeline import SolveResult, solve
from .verify import best_ratio_for_violation, verify_guarantees

__all__ = [
    "TOL", "CapkmError", "CklInstance", "CklSolution", "FractionalSolution",
    "InfeasibleError", "Instance", "IntegralSolution", "InvalidInstanceError",
    "InvariantError", "NumericalMarginError", "SolveResult",
    "best_ratio_for_violation", "exact_ckl_opt", "exact_lp_check", "exact_opt", "gen_ckl_instance",
    "gen_instance", "solve", "solve_ckl", "solve_ckm_relaxation", "solve_lp",
    "solve_transportation", "validate_instance", "verify_guarantees",
]
