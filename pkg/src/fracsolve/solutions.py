"""Closed-form solutions of Cauchy-Euler fractional ODEs and systems.

Every solution is a linear combination of terms

    coeff * c[j] * z^rho * F(A z^sigma)

with ``F`` a Mittag-Leffler, Wright, generalized Wright or Fox H-function and
``c`` the vector of free constants.  Which family is used depends on the order
``alpha`` relative to the degree ``m`` of the right-hand side:

* ``m = 0``: Mittag-Leffler terms, ``n = ceil(alpha)`` per family;
* ``0 < alpha < m`` (scalar) or ``alpha < m/2`` (system): a single Fox H term
  in ``z^(-alpha)`` (resp. ``z^(-2 alpha)``);
* ``alpha > m`` (scalar) or ``alpha > m/2`` (system): generalized Wright terms.

The boundaries ``alpha = m`` and ``alpha = m/2`` have no closed form here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from fracsolve.charpoly import FodeSpec, SystemSpec, build_scalar, build_system, roots
from fracsolve.config import CONTOUR_TOL, INT_TOL, SERIES_TOL
from fracsolve.errors import DomainError, UnsupportedRegime
from fracsolve.fracderiv import FracOrder
from fracsolve.specfun.descriptors import (
    FoxH,
    GenWright,
    MittagLeffler,
    ParamRow,
    Wright,
    descriptor_from_dict,
    descriptor_to_dict,
)
from fracsolve.specfun.foxh import mellin_barnes
from fracsolve.specfun.identities import gen_wright_as_fox_h, wright_as_gen_wright
from fracsolve.specfun.series import falling_factorial, power_series

#: beyond this modulus a Wright function with negative alpha at a negative
#: argument is evaluated through its contour integral (the series cancels badly)
WRIGHT_SERIES_LIMIT = 1.0
DEGENERATE_TOL = 1e-9


class Branch(str, Enum):
    MITTAG_LEFFLER = "MittagLeffler"
    GEN_WRIGHT = "GenWright"
    FOX_H = "FoxH"
    WRIGHT_DEGENERATE = "WrightDegenerate"


@dataclass(frozen=True)
class SolutionTerm:
    """``coeff * c[constant] * z^rho * func(arg_scale * z^arg_power)``."""

    coeff: complex
    constant: int
    rho: float
    func: Union[MittagLeffler, Wright, GenWright, FoxH]
    arg_scale: float
    arg_power: float

    def __post_init__(self):
        object.__setattr__(self, "coeff", complex(self.coeff))
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(self, "arg_scale", float(self.arg_scale))
        object.__setattr__(self, "arg_power", float(self.arg_power))
        if self.arg_power == 0:
            raise DomainError("argument power sigma must be nonzero")
        self.func.validate()


@dataclass(frozen=True)
class SolutionExpression:
    terms: tuple[SolutionTerm, ...]
    n: int
    branch: Branch
    n_constants: int


@dataclass(frozen=True)
class SystemSolution:
    """``(phi, psi)`` sharing one vector of free constants."""

    phi: SolutionExpression
    psi: SolutionExpression

    @property
    def n_constants(self) -> int:
        return self.phi.n_constants

    @property
    def branch(self) -> Branch:
        return self.phi.branch


def _is_int(x: float) -> bool:
    return abs(x - round(x)) <= INT_TOL


def _n_of(alpha: float) -> int:
    return FracOrder(alpha).n


def _sorted_roots(poly) -> tuple[complex, ...]:
    return roots(poly.with_roots()) if poly.degree >= 1 else ()


# --------------------------------------------------------------------- scalar


def _mittag_leffler_scalar(alpha: float, a0: float) -> SolutionExpression:
    n = _n_of(alpha)
    terms = tuple(
        SolutionTerm(1.0, k - 1, alpha - k, MittagLeffler(alpha, 1 + alpha - k), a0, alpha)
        for k in range(1, n + 1)
    )
    return SolutionExpression(terms, n, Branch.MITTAG_LEFFLER, n)


def _fox_h_scalar(alpha: float, lead: float, rts) -> SolutionExpression:
    func = FoxH(len(rts), 0, (ParamRow(1, alpha),), tuple(ParamRow(-s, 1) for s in rts))
    term = SolutionTerm(1.0, 0, 0.0, func, 1.0 / lead, -alpha)
    return SolutionExpression((term,), 1, Branch.FOX_H, 1)


def _gen_wright_scalar(alpha: float, lead: float, rts) -> SolutionExpression:
    n = _n_of(alpha)
    terms = []
    for k in range(1, n + 1):
        upper = tuple(ParamRow(1 - k / alpha - s, 1) for s in rts) + (ParamRow(1, 1),)
        func = GenWright(upper, (ParamRow(1 + alpha - k, alpha),))
        terms.append(SolutionTerm(1.0, k - 1, alpha - k, func, lead, alpha))
    return SolutionExpression(tuple(terms), n, Branch.GEN_WRIGHT, n)


def scalar_regime(spec: FodeSpec) -> Branch:
    """Branch the automatic dispatch would pick; raises if none applies."""
    m, alpha = spec.m, spec.alpha
    if m == 0:
        return Branch.MITTAG_LEFFLER
    if abs(alpha - m) <= INT_TOL:
        raise UnsupportedRegime(f"no closed-form solution at the boundary alpha = m = {m}")
    if alpha < m:
        if not spec.coeffs[-1] > 0:
            raise UnsupportedRegime(
                f"0 < alpha < m needs a positive leading coefficient, got a_m = {spec.coeffs[-1]}"
            )
        return Branch.FOX_H
    return Branch.GEN_WRIGHT


def solve_scalar(spec: FodeSpec, branch: Optional[Union[Branch, str]] = None) -> SolutionExpression:
    """Solution of ``D^alpha phi = P(phi)`` for the Cauchy-Euler operator ``P``.

    ``branch`` forces a particular representation; it must be admissible for
    the parameters (``WrightDegenerate`` needs ``m = 2`` and discriminant 1/4).
    """
    auto = None
    if branch is not None:
        branch = Branch(branch)
    if branch == Branch.WRIGHT_DEGENERATE:
        if spec.m != 2:
            raise UnsupportedRegime("the Wright-function form exists only for m = 2")
        return solve_degenerate_wright(spec.alpha, *spec.coeffs)
    auto = scalar_regime(spec)
    if branch is None:
        branch = auto
    alpha = spec.alpha
    if branch == Branch.MITTAG_LEFFLER:
        if spec.m != 0:
            raise UnsupportedRegime("Mittag-Leffler solutions need m = 0")
        return _mittag_leffler_scalar(alpha, spec.coeffs[0])
    rts = _sorted_roots(build_scalar(spec))
    lead = spec.coeffs[-1]
    if branch == Branch.FOX_H:
        if auto != Branch.FOX_H:
            raise UnsupportedRegime("Fox H solutions need 0 < alpha < m and a_m > 0")
        return _fox_h_scalar(alpha, lead, rts)
    if branch == Branch.GEN_WRIGHT:
        if not alpha > spec.m:
            raise UnsupportedRegime("generalized Wright solutions need alpha > m")
        return _gen_wright_scalar(alpha, lead, rts)
    raise UnsupportedRegime(f"unknown branch {branch}")


def discriminant(alpha: float, a: float, b: float, c: float) -> float:
    return 1 / alpha**2 - 2 * b / (alpha * c) + b**2 / c**2 - 4 * a / c


def solve_degenerate_wright(alpha: float, a: float, b: float, c: float) -> SolutionExpression:
    """Wright-function solutions for ``m = 2`` when the discriminant equals 1/4.

    For ``0 < alpha < 2`` (needs ``c > 0``) a single Wright term in
    ``z^(-alpha/2)``; for ``alpha > 2`` generalized Wright terms with a
    doubled step.  The single-term form equals the Fox H solution divided by
    ``sqrt(pi) * c^s1``, ``s1`` the larger characteristic root.
    """
    alpha, a, b, c = float(alpha), float(a), float(b), float(c)
    if c == 0:
        raise DomainError("leading coefficient c must be nonzero")
    d = discriminant(alpha, a, b, c)
    if abs(d - 0.25) > DEGENERATE_TOL:
        raise DomainError(f"Wright-function form needs discriminant 1/4, got {d}")
    if abs(alpha - 2) <= INT_TOL:
        raise UnsupportedRegime("no Wright-function form at alpha = 2")
    if alpha < 2:
        if not c > 0:
            raise DomainError("Wright-function form for alpha < 2 needs c > 0")
        s1 = 0.5 * (1 / alpha - b / c + 0.5)
        func = Wright(-alpha / 2, 0.5 * alpha * (3 / alpha - b / c + 0.5))
        term = SolutionTerm(1.0, 0, alpha * s1, func, -2 / math.sqrt(c), -alpha / 2)
        return SolutionExpression((term,), 1, Branch.WRIGHT_DEGENERATE, 1)
    n = _n_of(alpha)
    terms = []
    for k in range(1, n + 1):
        upper = (ParamRow(1.5 - (2 * k + 1) / alpha + b / c, 2), ParamRow(1, 1))
        func = GenWright(upper, (ParamRow(1 + alpha - k, alpha),))
        terms.append(SolutionTerm(1.0, k - 1, alpha - k, func, c / 4, alpha))
    return SolutionExpression(tuple(terms), n, Branch.WRIGHT_DEGENERATE, n)


# --------------------------------------------------------------------- systems


def system_regime(spec: SystemSpec) -> Branch:
    m = spec.m1 + spec.m2
    alpha = spec.alpha
    if m == 0:
        return Branch.MITTAG_LEFFLER
    if abs(2 * alpha - m) <= INT_TOL:
        raise UnsupportedRegime(f"no closed-form solution at the boundary alpha = m/2 = {m / 2}")
    if 2 * alpha < m:
        if not spec.a_coeffs[-1] * spec.b_coeffs[-1] > 0:
            raise UnsupportedRegime(
                "alpha < m/2 needs leading coefficients of equal sign (a_m1 * b_m2 > 0)"
            )
        return Branch.FOX_H
    return Branch.GEN_WRIGHT


def _mittag_leffler_system(spec: SystemSpec) -> SystemSolution:
    alpha = spec.alpha
    a0, b0 = spec.a_coeffs[0], spec.b_coeffs[0]
    n = _n_of(alpha)
    A, sig = a0 * b0, 2 * alpha
    phi, psi = [], []
    for k in range(1, n + 1):
        low = MittagLeffler(2 * alpha, 1 + alpha - k)
        high = MittagLeffler(2 * alpha, 1 + 2 * alpha - k)
        phi.append(SolutionTerm(1.0, k - 1, alpha - k, low, A, sig))
        phi.append(SolutionTerm(a0, n + k - 1, 2 * alpha - k, high, A, sig))
        psi.append(SolutionTerm(b0, k - 1, 2 * alpha - k, high, A, sig))
        psi.append(SolutionTerm(1.0, n + k - 1, alpha - k, low, A, sig))
    b = Branch.MITTAG_LEFFLER
    return SystemSolution(
        SolutionExpression(tuple(phi), n, b, 2 * n), SolutionExpression(tuple(psi), n, b, 2 * n)
    )


def _fox_h_system(spec: SystemSpec, r1, r2) -> SystemSolution:
    alpha = spec.alpha
    am, bm = spec.a_coeffs[-1], spec.b_coeffs[-1]
    m1, m2 = spec.m1, spec.m2
    m = m1 + m2
    A = 2.0**m * am * bm
    upper = (ParamRow(1, 2 * alpha),)

    def rows(shift1, shift2):
        return tuple(ParamRow(-s / 2 + shift1, 1) for s in r1) + tuple(
            ParamRow(-s / 2 + shift2, 1) for s in r2
        )

    phi = SolutionTerm(
        math.copysign(1.0, bm), 0, 0.0, FoxH(m, 0, upper, rows(0.5, 0.0)), 1 / A, -2 * alpha
    )
    psi = SolutionTerm(
        2.0 ** ((m2 - m1) / 2) * math.sqrt(bm / am),
        0,
        0.0,
        FoxH(m, 0, upper, rows(0.0, 0.5)),
        1 / A,
        -2 * alpha,
    )
    b = Branch.FOX_H
    return SystemSolution(SolutionExpression((phi,), 1, b, 1), SolutionExpression((psi,), 1, b, 1))


def _gen_wright_system(spec: SystemSpec, r1, r2) -> SystemSolution:
    alpha = spec.alpha
    am, bm = spec.a_coeffs[-1], spec.b_coeffs[-1]
    m1, m2 = spec.m1, spec.m2
    A = 2.0 ** (m1 + m2) * am * bm
    sig = 2 * alpha
    n = _n_of(alpha)

    def gw(k, off1, off2, low_shift):
        base = -k / (2 * alpha)
        upper = (
            tuple(ParamRow(off1 + base - s / 2, 1) for s in r1)
            + tuple(ParamRow(off2 + base - s / 2, 1) for s in r2)
            + (ParamRow(1, 1),)
        )
        return GenWright(upper, (ParamRow(1 + low_shift - k, 2 * alpha),))

    phi, psi = [], []
    for k in range(1, n + 1):
        phi.append(SolutionTerm(1.0, k - 1, alpha - k, gw(k, 1.0, 0.5, alpha), A, sig))
        phi.append(
            SolutionTerm(2.0**m1 * am, n + k - 1, 2 * alpha - k, gw(k, 1.5, 1.0, 2 * alpha), A, sig)
        )
        psi.append(
            SolutionTerm(2.0**m2 * bm, k - 1, 2 * alpha - k, gw(k, 1.0, 1.5, 2 * alpha), A, sig)
        )
        psi.append(SolutionTerm(1.0, n + k - 1, alpha - k, gw(k, 0.5, 1.0, alpha), A, sig))
    b = Branch.GEN_WRIGHT
    return SystemSolution(
        SolutionExpression(tuple(phi), n, b, 2 * n), SolutionExpression(tuple(psi), n, b, 2 * n)
    )


def solve_system(spec: SystemSpec, branch: Optional[Union[Branch, str]] = None) -> SystemSolution:
    """Solution of ``D^alpha phi = P_1(psi)``, ``D^alpha psi = P_2(phi)``.

    Constants are laid out as ``[c_{1,1}..c_{n,1}, c_{1,2}..c_{n,2}]`` for the
    Mittag-Leffler and generalized Wright branches and ``[c_1]`` for Fox H.
    """
    auto = system_regime(spec)
    branch = auto if branch is None else Branch(branch)
    if branch == Branch.MITTAG_LEFFLER:
        if auto != Branch.MITTAG_LEFFLER:
            raise UnsupportedRegime("Mittag-Leffler system solutions need m1 = m2 = 0")
        return _mittag_leffler_system(spec)
    p1, p2 = build_system(spec)
    r1, r2 = _sorted_roots(p1), _sorted_roots(p2)
    if branch == Branch.FOX_H:
        if auto != Branch.FOX_H:
            raise UnsupportedRegime("Fox H system solutions need 0 < alpha < m/2")
        return _fox_h_system(spec, r1, r2)
    if branch == Branch.GEN_WRIGHT:
        if not 2 * spec.alpha > spec.m1 + spec.m2:
            raise UnsupportedRegime("generalized Wright system solutions need alpha > m/2")
        return _gen_wright_system(spec, r1, r2)
    raise UnsupportedRegime(f"branch {branch.value} is not available for systems")


# ------------------------------------------------------------------ evaluation


def _series_part(func, logx, rho, sigma, order, tol):
    mult = None
    if order:
        def mult(k):
            return falling_factorial(rho + sigma * k, order)
    vals, _ = power_series(func, logx, tol, multiplier=mult)
    return vals


def _wright_part(term: SolutionTerm, logz, order, series_tol, contour_tol):
    """Wright term with ``alpha < 0``: series near 0, contour for large negative arguments."""
    A, sig, rho = term.arg_scale, term.arg_power, term.rho
    logx = np.log(complex(A)) + sig * logz
    out = np.empty(logz.size, dtype=np.complex128)
    far = (A < 0) & (logx.real > math.log(WRIGHT_SERIES_LIMIT))
    near = ~far
    if np.any(near):
        out[near] = _series_part(term.func, logx[near], rho, sig, order, series_tol)
    if np.any(far):
        h = gen_wright_as_fox_h(wright_as_gen_wright(term.func))
        logy = math.log(-A) + sig * logz[far]
        out[far], _ = mellin_barnes(h, logy, contour_tol, rho, sig, order)
    return out


def term_values(term: SolutionTerm, z, order: int = 0, tol: Optional[float] = None):
    """``d^order/dz^order [z^rho F(A z^sigma)]`` (without ``coeff``) at ``z > 0``."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    logz = np.log(z)
    series_tol = SERIES_TOL if tol is None else tol
    contour_tol = CONTOUR_TOL if tol is None else tol
    func, A, sig, rho = term.func, term.arg_scale, term.arg_power, term.rho
    if A == 0:
        # only the constant term of the series survives
        c0 = _series_part(func, np.array([-np.inf + 0j]), rho, sig, order, series_tol)[0]
        return c0 * z ** (rho - order)
    if isinstance(func, FoxH):
        logx = np.log(complex(A)) + sig * logz
        vals, _ = mellin_barnes(func, logx, contour_tol, rho, sig, order)
    elif isinstance(func, Wright) and func.alpha < 0:
        vals = _wright_part(term, logz, order, series_tol, contour_tol)
    else:
        logx = np.log(complex(A)) + sig * logz
        vals = _series_part(func, logx, rho, sig, order, series_tol)
    return z ** (rho - order) * vals


def _constants(n_constants: int, constants) -> np.ndarray:
    if constants is None:
        return np.ones(n_constants, dtype=complex)
    c = np.asarray(constants, dtype=complex).ravel()
    if c.size != n_constants:
        raise DomainError(f"expected {n_constants} constants, got {c.size}")
    return c


def evaluate(
    expr: SolutionExpression,
    z,
    constants=None,
    tol: Optional[float] = None,
    deriv: int = 0,
):
    """Value (or ``deriv``-th derivative) of the solution at ``z > 0``.

    Constants default to 1.  Terms are summed in index order.
    """
    zz = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(zz <= 0):
        raise DomainError("solutions are evaluated only at z > 0")
    c = _constants(expr.n_constants, constants)
    total = np.zeros(zz.size, dtype=np.complex128)
    for term in expr.terms:
        weight = term.coeff * c[term.constant]
        if weight == 0:
            continue
        total += weight * term_values(term, zz, deriv, tol)
    return total[0] if np.ndim(z) == 0 else total


def evaluate_system(sol: SystemSolution, z, constants=None, tol=None, deriv: int = 0):
    return (
        evaluate(sol.phi, z, constants, tol, deriv),
        evaluate(sol.psi, z, constants, tol, deriv),
    )


# --------------------------------------------------------------- serialization


def _c(x: complex) -> list[float]:
    x = complex(x)
    return [x.real, x.imag]


def expression_to_dict(expr: SolutionExpression) -> dict:
    return {
        "branch": expr.branch.value,
        "n": expr.n,
        "n_constants": expr.n_constants,
        "terms": [
            {
                "coeff": _c(t.coeff),
                "constant": t.constant,
                "rho": t.rho,
                "arg_scale": t.arg_scale,
                "arg_power": t.arg_power,
                "function": descriptor_to_dict(t.func),
            }
            for t in expr.terms
        ],
    }


def expression_from_dict(data: dict) -> SolutionExpression:
    terms = tuple(
        SolutionTerm(
            complex(*t["coeff"]),
            int(t["constant"]),
            float(t["rho"]),
            descriptor_from_dict(t["function"]),
            float(t["arg_scale"]),
            float(t["arg_power"]),
        )
        for t in data["terms"]
    )
    return SolutionExpression(terms, int(data["n"]), Branch(data["branch"]), int(data["n_constants"]))


def solution_to_dict(sol: Union[SolutionExpression, SystemSolution]) -> dict:
    if isinstance(sol, SystemSolution):
        return {
            "kind": "system",
            "phi": expression_to_dict(sol.phi),
            "psi": expression_to_dict(sol.psi),
        }
    return {"kind": "scalar", **expression_to_dict(sol)}


def solution_from_dict(data: dict) -> Union[SolutionExpression, SystemSolution]:
    if data.get("kind") == "system":
        return SystemSolution(expression_from_dict(data["phi"]), expression_from_dict(data["psi"]))
    return expression_from_dict(data)


__all__ = [
    "Branch",
    "SolutionExpression",
    "SolutionTerm",
    "SystemSolution",
    "discriminant",
    "evaluate",
    "evaluate_system",
    "expression_from_dict",
    "expression_to_dict",
    "scalar_regime",
    "solution_from_dict",
    "solution_to_dict",
    "solve_degenerate_wright",
    "solve_scalar",
    "solve_system",
    "system_regime",
    "term_values",
]
