"""Residual checks: numerical fractional derivative against the Cauchy-Euler side.

The left side ``D^alpha phi`` is computed by :func:`fracsolve.fracderiv.rl_numeric`
from evaluated solution values only.  The right side applies the operator
with integer derivatives obtained term by term from the series or contour
representation.  The two paths share nothing except the special-function
evaluators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from fracsolve.charpoly import FodeSpec, SystemSpec, apply_operator
from fracsolve.config import INT_TOL, MIN_SAMPLE_POINT, RESIDUAL_TOL, RL_TOL, SERIES_TOL
from fracsolve.errors import ConvergenceError, DomainError
from fracsolve.fracderiv import central_weights, rl_numeric
from fracsolve.pde import EvolutionPde, PdeReduction, SystemPde, lift, reduce_scalar, reduce_system
from fracsolve.solutions import (
    SolutionExpression,
    _constants,
    SystemSolution,
    evaluate,
    solve_scalar,
    solve_system,
    term_values,
)
from fracsolve.specfun.descriptors import FoxH, Wright
from fracsolve.specfun.series import power_series

DEFAULT_POINTS = (0.5, 1.0, 2.0)
DEFAULT_X = (1.0, 2.0, 4.0)
DEFAULT_T = (0.5, 1.0, 2.0)
PDE_TOL = 1e-4
X_STEP = 0.01  # finite-difference step in x, relative to x + shift


@dataclass(frozen=True)
class ResidualReport:
    points: tuple
    lhs: tuple[complex, ...]
    rhs: tuple[complex, ...]
    abs_residual: tuple[float, ...]
    rel_residual: tuple[float, ...]
    max_rel: float
    passed: bool
    tol: float

    def to_dict(self) -> dict:
        def c(v):
            return [complex(v).real, complex(v).imag]

        return {
            "points": list(self.points),
            "lhs": [c(v) for v in self.lhs],
            "rhs": [c(v) for v in self.rhs],
            "abs_residual": list(self.abs_residual),
            "rel_residual": list(self.rel_residual),
            "max_rel": self.max_rel,
            "passed": self.passed,
            "tol": self.tol,
        }


def _points(points) -> np.ndarray:
    z = np.asarray(DEFAULT_POINTS if points is None else points, dtype=float).ravel()
    if z.size == 0:
        raise DomainError("at least one sample point is required")
    if np.any(z < MIN_SAMPLE_POINT):
        raise DomainError(f"sample points must be >= {MIN_SAMPLE_POINT}, got {z.min()}")
    return z


def _report(z, lhs, rhs, tol) -> ResidualReport:
    lhs = np.asarray(lhs, dtype=complex)
    rhs = np.asarray(rhs, dtype=complex)
    diff = np.abs(lhs - rhs)
    scale = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), 1.0)
    rel = diff / scale
    max_rel = float(rel.max())
    return ResidualReport(
        tuple(tuple(float(c) for c in p) if np.ndim(p) else float(p) for p in z),
        tuple(complex(v) for v in lhs),
        tuple(complex(v) for v in rhs),
        tuple(float(v) for v in diff),
        tuple(float(v) for v in rel),
        max_rel,
        max_rel <= tol,
        float(tol),
    )


def _in_null_space(term, alpha: float) -> bool:
    """True when the leading series monomial ``z^rho`` has ``rho = alpha - k``
    for a positive integer ``k``, so that ``D^alpha`` annihilates it."""
    if isinstance(term.func, FoxH) or (isinstance(term.func, Wright) and term.func.alpha < 0):
        return False
    k = alpha - term.rho
    return k > 0.5 and abs(k - round(k)) <= INT_TOL


def _drop_first(k):
    return (k > 0).astype(float)


def _without_null(expr: SolutionExpression, alpha: float, constants):
    """The solution minus its annihilated leading monomials, as a callable.

    Those monomials can dominate the smoothed integrand by orders of
    magnitude and swamp the outer finite difference in roundoff; their exact
    derivative is zero, so omitting them loses nothing.  The ``k = 0`` series
    term is skipped inside the sum, which avoids any cancellation.
    """
    c = _constants(expr.n_constants, constants)

    def f(w):
        w = np.atleast_1d(np.asarray(w, dtype=float))
        total = np.zeros(w.size, dtype=np.complex128)
        for term in expr.terms:
            weight = term.coeff * c[term.constant]
            if weight == 0:
                continue
            if _in_null_space(term, alpha):
                logx = np.log(complex(term.arg_scale)) + term.arg_power * np.log(w)
                vals, _ = power_series(term.func, logx, SERIES_TOL, multiplier=_drop_first)
                total += weight * w**term.rho * vals
            else:
                total += weight * term_values(term, w)
        return total

    return f


def _lhs(expr: SolutionExpression, alpha: float, z, constants, rl_tol, tol):
    # the quadrature error may use half of the residual budget
    rl_tol = max(RL_TOL, 0.5 * tol) if rl_tol is None else rl_tol
    f = _without_null(expr, alpha, constants)

    try:
        return np.asarray(
            # the unit floor of the residual normalization makes an absolute
            # error of rl_tol as harmless as a relative one
            rl_numeric(f, alpha, z, tol=rl_tol, atol=rl_tol),
            dtype=complex,
        )
    except ConvergenceError as exc:
        raise ConvergenceError(f"{exc} (sample points {list(z)})") from exc


def _rhs(coeffs, alpha, expr: SolutionExpression, z, constants):
    ders = [
        evaluate(expr, z, constants, deriv=i) if a != 0 else np.zeros(z.size)
        for i, a in enumerate(coeffs)
    ]
    return apply_operator(coeffs, alpha, z, ders)


def _all_zero(expr: SolutionExpression, constants) -> bool:
    if constants is None:
        return False
    return not np.any(np.asarray(constants, dtype=complex))


def residual_scalar(
    spec: FodeSpec,
    expr: Optional[SolutionExpression] = None,
    constants=None,
    points: Optional[Sequence[float]] = None,
    tol: float = RESIDUAL_TOL,
    rl_tol: Optional[float] = None,
) -> ResidualReport:
    """Residual of ``D^alpha phi = P(phi)`` at the sample points."""
    expr = solve_scalar(spec) if expr is None else expr
    z = _points(points)
    if _all_zero(expr, constants):
        zero = np.zeros(z.size, dtype=complex)
        return _report(z, zero, zero, tol)
    lhs = _lhs(expr, spec.alpha, z, constants, rl_tol, tol)
    rhs = _rhs(spec.coeffs, spec.alpha, expr, z, constants)
    return _report(z, lhs, rhs, tol)


def residual_system(
    spec: SystemSpec,
    sol: Optional[SystemSolution] = None,
    constants=None,
    points: Optional[Sequence[float]] = None,
    tol: float = RESIDUAL_TOL,
    rl_tol: Optional[float] = None,
) -> tuple[ResidualReport, ResidualReport]:
    """Residuals of ``D^alpha phi = P_1(psi)`` and ``D^alpha psi = P_2(phi)``."""
    sol = solve_system(spec) if sol is None else sol
    z = _points(points)
    if _all_zero(sol.phi, constants):
        zero = np.zeros(z.size, dtype=complex)
        return _report(z, zero, zero, tol), _report(z, zero, zero, tol)
    out = []
    for own, other, coeffs in ((sol.phi, sol.psi, spec.a_coeffs), (sol.psi, sol.phi, spec.b_coeffs)):
        lhs = _lhs(own, spec.alpha, z, constants, rl_tol, tol)
        rhs = _rhs(coeffs, spec.alpha, other, z, constants)
        out.append(_report(z, lhs, rhs, tol))
    return out[0], out[1]


# ------------------------------------------------------------------- PDEs


def _x_derivatives(field, x: float, t: np.ndarray, shift: float, order: int):
    """``[u, u_x, ..., d^order u/dx^order]`` at ``(x, t)`` by central differences."""
    h = X_STEP * (x + shift)
    out = [field(np.full(t.size, x), t)]
    for i in range(1, order + 1):
        offsets, weights = central_weights(i)
        xs = x + h * offsets
        vals = field(np.repeat(xs, t.size), np.tile(t, xs.size)).reshape(xs.size, t.size)
        out.append(weights @ vals / h**i)
    return out


def _t_derivative(field, x: float, t: np.ndarray, alpha: float, rl_tol: float):
    return np.asarray(
        rl_numeric(
            lambda tt: field(np.full(np.size(tt), x), np.atleast_1d(tt)),
            alpha,
            t,
            tol=rl_tol,
            atol=rl_tol,
        ),
        dtype=complex,
    )


def _grid(xs, ts, shift):
    xs = np.asarray(DEFAULT_X if xs is None else xs, dtype=float).ravel()
    ts = np.asarray(DEFAULT_T if ts is None else ts, dtype=float).ravel()
    if np.any(xs + shift <= 0) or np.any(ts <= 0):
        raise DomainError("grid must satisfy x > -shift and t > 0")
    return xs, ts


def residual_pde_scalar(
    pde: EvolutionPde,
    solution: Optional[SolutionExpression] = None,
    constants=None,
    xs=None,
    ts=None,
    tol: float = PDE_TOL,
    reduction: Optional[PdeReduction] = None,
) -> ResidualReport:
    """Residual of the scalar evolution equation for the lifted invariant solution."""
    red = reduce_scalar(pde) if reduction is None else reduction
    sol = solve_scalar(red.target) if solution is None else solution
    xs, ts = _grid(xs, ts, pde.b)
    rl_tol = max(RL_TOL, 0.25 * tol)

    def field(x, t):
        return lift(red, sol, x, t, constants)

    pts, lhs, rhs = [], [], []
    for x in xs:
        ders = _x_derivatives(field, x, ts, pde.b, pde.m)
        base = x + pde.b
        r = sum(a * base ** (pde.p - pde.m + i) * ders[i] for i, a in enumerate(pde.coeffs))
        lhs.append(_t_derivative(field, x, ts, pde.alpha, rl_tol))
        rhs.append(r)
        pts.extend((x, t) for t in ts)
    return _report(pts, np.concatenate(lhs), np.concatenate(rhs), tol)


def residual_pde_system(
    pde: SystemPde,
    solution: Optional[SystemSolution] = None,
    constants=None,
    xs=None,
    ts=None,
    tol: float = PDE_TOL,
) -> tuple[ResidualReport, ResidualReport]:
    """Residuals of both equations of the coupled system for the lifted solution."""
    red = reduce_system(pde)
    sol = solve_system(red.target) if solution is None else solution
    xs, ts = _grid(xs, ts, pde.c)
    rl_tol = max(RL_TOL, 0.25 * tol)

    def u_field(x, t):
        return lift(red, sol, x, t, constants)[0]

    def v_field(x, t):
        return lift(red, sol, x, t, constants)[1]

    pts, lu, ru, lv, rv = [], [], [], [], []
    for x in xs:
        base = x + pde.c
        u = _x_derivatives(u_field, x, ts, pde.c, 1)
        v = _x_derivatives(v_field, x, ts, pde.c, 1)
        lu.append(_t_derivative(u_field, x, ts, pde.alpha, rl_tol))
        lv.append(_t_derivative(v_field, x, ts, pde.alpha, rl_tol))
        ru.append(pde.a1 * base**pde.m1 * v[1] + pde.b1 * base ** (pde.m1 - 1) * v[0])
        rv.append(pde.a2 * base**pde.m2 * u[1] + pde.b2 * base ** (pde.m2 - 1) * u[0])
        pts.extend((x, t) for t in ts)
    cat = np.concatenate
    return _report(pts, cat(lu), cat(ru), tol), _report(pts, cat(lv), cat(rv), tol)


__all__ = [
    "DEFAULT_POINTS",
    "ResidualReport",
    "residual_pde_scalar",
    "residual_pde_system",
    "residual_scalar",
    "residual_system",
]
