"""Exact solutions of Cauchy-Euler type fractional differential equations.

Build a problem with :class:`FodeSpec` or :class:`SystemSpec`, obtain a
closed-form solution with :func:`solve_scalar` / :func:`solve_system`,
evaluate it with :func:`evaluate` and check it with :func:`residual_scalar`.
"""

from __future__ import annotations

from fracsolve.charpoly import CharPoly, FodeSpec, SystemSpec, apply_operator, roots
from fracsolve.errors import (
    ConvergenceError,
    DomainError,
    FracsolveError,
    PoleError,
    RepeatedRootWarning,
    UnsupportedRegime,
)
from fracsolve.fracderiv import FracOrder, rl_numeric, rl_power
from fracsolve.pde import EvolutionPde, SystemPde, lift, reduce_scalar, reduce_system
from fracsolve.solutions import (
    Branch,
    SolutionExpression,
    SolutionTerm,
    SystemSolution,
    evaluate,
    evaluate_system,
    solve_degenerate_wright,
    solve_scalar,
    solve_system,
)
from fracsolve.verify import (
    ResidualReport,
    residual_pde_scalar,
    residual_pde_system,
    residual_scalar,
    residual_system,
)

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "CharPoly",
    "ConvergenceError",
    "DomainError",
    "EvolutionPde",
    "FodeSpec",
    "FracOrder",
    "FracsolveError",
    "PoleError",
    "RepeatedRootWarning",
    "ResidualReport",
    "SolutionExpression",
    "SolutionTerm",
    "SystemPde",
    "SystemSolution",
    "SystemSpec",
    "UnsupportedRegime",
    "apply_operator",
    "evaluate",
    "evaluate_system",
    "lift",
    "reduce_scalar",
    "reduce_system",
    "residual_pde_scalar",
    "residual_pde_system",
    "residual_scalar",
    "residual_system",
    "rl_numeric",
    "rl_power",
    "roots",
    "solve_degenerate_wright",
    "solve_scalar",
    "solve_system",
]
