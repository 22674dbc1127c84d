"""Riemann-Liouville derivatives: exact on powers, numerical for any function.

The numerical route works on the substituted form

    D^alpha f(z) = d^n/dz^n G(z),
    G(w) = w^(n-alpha) / Gamma(n-alpha) * int_0^1 (1-u)^(n-alpha-1) f(w u) du,

where ``G`` is smooth in ``w > 0`` even though the kernel is singular.  The
inner integral is split at ``u = 1/2``: Gauss-Jacobi on ``[1/2, 1]`` absorbs
the ``(1-u)`` singularity and geometric Gauss-Legendre panels on ``[0, 1/2]``
resolve a possible power singularity of ``f`` at 0 (the remaining tail below
the last panel is summed as a geometric series).  The outer derivative is a
central finite difference with Richardson extrapolation.  All stencil points
share the same quadrature nodes, so ``f`` is called once per node set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from fracsolve.config import INT_TOL, RL_TOL
from fracsolve.errors import ConvergenceError, DomainError
from fracsolve.specfun.descriptors import FoxH, GenWright, MittagLeffler, ParamRow
from fracsolve.specfun.gamma import gamma, rgamma


@dataclass(frozen=True)
class FracOrder:
    """Order ``alpha > 0`` with ``n`` the smallest integer such that ``n >= alpha``."""

    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        if not self.alpha > 0:
            raise DomainError(f"derivative order must be positive, got {self.alpha}")

    @property
    def is_integer(self) -> bool:
        return abs(self.alpha - round(self.alpha)) <= INT_TOL

    @property
    def n(self) -> int:
        if self.is_integer:
            return int(round(self.alpha))
        return math.ceil(self.alpha)


def _order(alpha) -> FracOrder:
    return alpha if isinstance(alpha, FracOrder) else FracOrder(alpha)


@dataclass(frozen=True)
class PowerTerm:
    """``coeff * z**exponent``."""

    coeff: complex
    exponent: float


def rl_power(alpha, beta: float) -> PowerTerm:
    """``D^alpha z^beta = Gamma(1+beta)/Gamma(1+beta-alpha) z^(beta-alpha)``."""
    order = _order(alpha)
    if not beta > -1:
        raise DomainError(f"power rule needs beta > -1, got {beta}")
    coeff = gamma(1.0 + beta) * rgamma(1.0 + beta - order.alpha)
    return PowerTerm(coeff, beta - order.alpha)


def rl_series(terms, alpha) -> list[PowerTerm]:
    """Term-by-term derivative of a sum of powers; zero terms are dropped."""
    out = []
    for term in terms:
        d = rl_power(alpha, term.exponent)
        coeff = term.coeff * d.coeff
        if coeff != 0:
            out.append(PowerTerm(coeff, d.exponent))
    return out


# ------------------------------------------------------------ closed-form rules


@dataclass(frozen=True)
class ShiftedTerm:
    """``coeff * z**exponent * F(arg_scale * z**arg_power)``."""

    coeff: complex
    exponent: float
    func: object
    arg_scale: float
    arg_power: float


def shift_index(B: float, beta: float, alpha: float) -> int:
    """Smallest ``m >= 0`` such that ``B + m beta - alpha - 1`` is not a negative integer.

    Series terms whose power lands on ``z^(-k)`` are annihilated by the
    power rule; ``m`` counts them.
    """
    if not beta > 0:
        raise DomainError(f"shift index needs a positive step, got {beta}")
    limit = 2 + math.ceil(alpha / beta)
    for m in range(limit + 1):
        e = B + m * beta - alpha - 1.0
        if not (e < -0.5 and abs(e - round(e)) <= INT_TOL):
            return m
    raise DomainError("no admissible shift index (step too small for the order)")


def rl_mittag_leffler(alpha, B: float, beta: float, a: float) -> ShiftedTerm:
    """``D^alpha [z^(B-1) E_{beta,B}(a z^beta)]`` for ``B, beta > 0``."""
    order = _order(alpha)
    if not (B > 0 and beta > 0):
        raise DomainError("needs B > 0 and beta > 0")
    m = shift_index(B, beta, order.alpha)
    return ShiftedTerm(
        complex(a) ** m,
        B + m * beta - order.alpha - 1.0,
        MittagLeffler(beta, B + m * beta - order.alpha),
        a,
        beta,
    )


def rl_gen_wright(alpha, desc: GenWright, a: float) -> ShiftedTerm:
    """``D^alpha [z^(B_1-1) pPsi_q(a z^beta_1)]`` with ``(B_1, beta_1)`` the first lower row.

    When the first upper row is ``(1, 1)`` the ``(1, 1) / (1 + m, 1)`` pair
    that the general rule introduces is folded back into it.
    """
    order = _order(alpha)
    first = desc.lower[0]
    B1, b1 = first.value, first.step
    if not (B1.real > 0 and b1 > 0):
        raise DomainError("needs B_1 > 0 and beta_1 > 0")
    m = shift_index(B1.real, b1, order.alpha)
    if B1.imag != 0:
        raise DomainError("first lower row must be real")
    lower_rest = tuple(ParamRow(r.value + m * r.step, r.step) for r in desc.lower[1:])
    head = ParamRow(B1 + m * b1 - order.alpha, b1)
    ones = desc.upper and desc.upper[0].value == 1 and desc.upper[0].step == 1
    if ones:
        upper = (desc.upper[0],) + tuple(
            ParamRow(r.value + m * r.step, r.step) for r in desc.upper[1:]
        )
        lower = (head,) + lower_rest
    else:
        upper = (ParamRow(1, 1),) + tuple(
            ParamRow(r.value + m * r.step, r.step) for r in desc.upper
        )
        lower = (ParamRow(1 + m, 1), head) + lower_rest
    return ShiftedTerm(
        complex(a) ** m,
        B1.real + m * b1 - 1.0 - order.alpha,
        GenWright(upper, lower),
        a,
        b1,
    )


def rl_fox_h(alpha, desc: FoxH, a: float) -> ShiftedTerm:
    """``D^alpha H^{m,0}[a z^(-alpha_p)]`` for an H-function whose last upper row is ``(1, alpha_p)``.

    The last row becomes ``(1 - alpha, alpha_p)`` and a factor ``z^-alpha`` appears.
    """
    order = _order(alpha)
    if desc.l != 0 or not desc.upper:
        raise DomainError("rule applies to H^{m,0} with at least one upper row")
    last = desc.upper[-1]
    if last.value != 1:
        raise DomainError("last upper row must be (1, alpha_p)")
    if not a > 0:
        raise DomainError("argument scale must be positive")
    upper = desc.upper[:-1] + (ParamRow(1 - order.alpha, last.step),)
    return ShiftedTerm(1.0, -order.alpha, FoxH(desc.m, 0, upper, desc.lower), a, -last.step)


@dataclass
class RLDiagnostics:
    error_estimate: float
    jacobi_nodes: int
    panels: int
    tail_ratio: float
    step: float


# ---------------------------------------------------------------- finite differences


def central_weights(order: int, accuracy: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """Offsets and weights of a central stencil for the ``order``-th derivative.

    The stencil is exact for polynomials of degree ``order + accuracy - 1``,
    giving truncation error ``O(h^accuracy)``.
    """
    half = (order + 1) // 2 - 1 + accuracy // 2
    offsets = np.arange(-half, half + 1, dtype=float)
    size = offsets.size
    vander = np.vander(offsets, size, increasing=True).T
    rhs = np.zeros(size)
    rhs[order] = math.factorial(order)
    return offsets, np.linalg.solve(vander, rhs)


# -------------------------------------------------------------------- quadrature

_LEGENDRE_NODES = 12
_PANELS = 48
_JACOBI_START = 32
_JACOBI_MAX = 1024
# the outer finite difference amplifies quadrature error by ~h^-n, so the
# inner integral is converged to near machine precision whatever ``tol`` is
_QUAD_TOL = 1e-13
_FD_STEP = 0.05
_EPS = float(np.finfo(float).eps)
# assumed rounding error of each G value, in units of eps
_NOISE_ULPS = 4.0


def _legendre_panels(levels: int):
    """Gauss-Legendre nodes on [2^-(j+1), 2^-j] for j = 1..levels."""
    x, w = roots_legendre(_LEGENDRE_NODES)
    hi = 2.0 ** -np.arange(1, levels + 1)
    lo = hi / 2
    mid = (hi + lo) / 2
    half = (hi - lo) / 2
    nodes = mid[:, None] + half[:, None] * x[None, :]
    weights = half[:, None] * w[None, :]
    return nodes, weights


def _jacobi_right(count: int, a: float):
    """Nodes/weights for int_{1/2}^1 (1-u)^a g(u) du."""
    x, w = roots_jacobi(count, a, 0.0)
    return 0.75 + 0.25 * x, w * 4.0 ** (-a - 1.0)


def _call(f: Callable, points: np.ndarray) -> np.ndarray:
    flat = points.ravel()
    try:
        vals = np.asarray(f(flat))
    except (TypeError, ValueError):
        vals = None
    if vals is None or vals.shape != flat.shape:
        vals = np.array([f(p) for p in flat])
    return vals.reshape(points.shape)


def _geometric_tail(contrib: np.ndarray):
    """Sum of the panels below the last one, assuming geometric decay.

    ``contrib`` has shape (points, panels) ordered from ``u = 1/2`` toward 0.
    Returns the tail and the fitted ratio per point.
    """
    last = contrib[:, -1]
    prev = contrib[:, -2]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ratio = np.where(prev != 0, last / prev, 0.0)
    # panels at roundoff level relative to the whole integral carry no tail
    negligible = np.abs(last) <= 1e-15 * np.abs(contrib).sum(axis=1)
    ratio = np.where(negligible, 0.0, ratio)
    if np.any(np.abs(ratio) >= 1.0):
        raise DomainError(
            "integrand is not integrable at 0 (panel contributions do not decay)"
        )
    tail = last * ratio / (1.0 - ratio)
    return tail, np.abs(ratio)


def _left_part(f, w: np.ndarray, a: float):
    """``int_0^{1/2} (1-u)^a f(w u) du`` on geometric panels plus a fitted tail."""
    un, uw = _legendre_panels(_PANELS)
    vals = _call(f, w[:, None] * un.ravel()[None, :])
    vals = vals.reshape(w.size, _PANELS, _LEGENDRE_NODES)
    contrib = np.einsum("xpn,pn->xp", vals, uw * (1.0 - un) ** a)
    tail, ratio = _geometric_tail(contrib)
    return contrib.sum(axis=1) + tail, ratio


def _right_part(f, w: np.ndarray, a: float, count: int):
    """``int_{1/2}^1 (1-u)^a f(w u) du`` by ``count``-point Gauss-Jacobi."""
    xj, wj = _jacobi_right(count, a)
    return _call(f, w[:, None] * xj[None, :]) @ wj


def _smooth_part(f, w: np.ndarray, order: FracOrder, tol: float):
    """``G(w)`` at every point of ``w`` with adaptive Jacobi node count.

    Doubling continues until successive rules agree to ``_QUAD_TOL``; once
    they agree to ``tol / 2`` a stalled difference (integrand noise) is
    accepted as well.
    """
    n = order.n
    a = n - order.alpha - 1.0
    left, ratio = _left_part(f, w, a)
    count = _JACOBI_START
    prev = left + _right_part(f, w, a, count)
    last_diff = np.inf
    while True:
        count *= 2
        cur = left + _right_part(f, w, a, count)
        scale = np.maximum(np.abs(cur), np.abs(cur).max(initial=0.0) * 1e-3)
        scale = np.where(scale > 0, scale, 1.0)
        diff = float((np.abs(cur - prev) / scale).max(initial=0.0))
        if diff <= _QUAD_TOL:
            break
        if diff <= 0.5 * tol and (diff > 0.1 * last_diff or count >= _JACOBI_MAX):
            break
        if count >= _JACOBI_MAX:
            raise ConvergenceError(
                f"Gauss-Jacobi quadrature not converged with {count} nodes"
            )
        prev, last_diff = cur, diff
    pref = w ** (n - order.alpha) * rgamma(n - order.alpha)
    return pref * cur, count, float(ratio.max(initial=0.0))


def _attempt(f, order: FracOrder, zz: np.ndarray, tol: float, rel: float, q: float = 2.0, acc: int = 4):
    n = order.n
    offsets, weights = central_weights(n, acc)
    rel = min(rel, 0.45 / max(1.0, offsets.max()))
    steps = [rel * zz, rel * zz / q, rel * zz / q**2]
    if q == 2.0:
        # the three stencils overlap; evaluate each distinct offset (in units of h/4) once
        quarter = np.rint(np.concatenate([offsets * 4, offsets * 2, offsets])).astype(int)
        distinct, where = np.unique(quarter, return_inverse=True)
        grid = zz[:, None] + (0.25 * steps[0])[:, None] * distinct[None, :]
    else:
        where = np.arange(3 * offsets.size)
        grid = np.concatenate([zz[:, None] + h[:, None] * offsets[None, :] for h in steps], axis=1)
    jac, ratio = 0, 0.0
    if order.is_integer:
        G = _call(f, grid)
    else:
        flat, jac, ratio = _smooth_part(f, grid.ravel(), order, tol)
        G = flat.reshape(grid.shape)
    k = offsets.size
    est = [G[:, where[i * k : (i + 1) * k]] @ weights / h**n for i, h in enumerate(steps)]
    # one Richardson level removes the h^acc term; the second pair bounds the error
    qa = q**acc
    r1 = (qa * est[1] - est[0]) / (qa - 1.0)
    r2 = (qa * est[2] - est[1]) / (qa - 1.0)
    # roundoff in G is amplified by the stencil; it bounds what the spread can certify
    size = [np.abs(G[:, where[i * k : (i + 1) * k]]) @ np.abs(weights) / h**n for i, h in enumerate(steps)]
    noise = _NOISE_ULPS * _EPS * (qa * size[1] + size[0]) / (qa - 1.0)
    err = np.abs(r1 - r2) + noise
    # relative to the result itself; tiny results are handled by ``atol``
    scale = np.abs(r1)
    scale = np.where(scale > 0, scale, np.inf)
    diag = RLDiagnostics(
        error_estimate=float(err.max()),
        jacobi_nodes=jac,
        panels=0 if order.is_integer else _PANELS,
        tail_ratio=ratio,
        step=rel,
    )
    return r1, err, err / scale, G, diag


def rl_numeric(
    f: Callable,
    alpha,
    z,
    tol: float = RL_TOL,
    full_output: bool = False,
    step: float = _FD_STEP,
    atol: float = 0.0,
):
    """Riemann-Liouville derivative of ``f`` at ``z > 0`` by quadrature.

    ``f`` should accept a numpy array of points (a scalar-only callable is
    also accepted, at a large cost in speed).  ``z`` may be a scalar or an
    array; every point uses the same nodes so ``f`` sees a single batch.
    ``step`` is the finite-difference step relative to ``z``; if the
    Richardson estimates disagree at a point, other steps, a finer step
    ratio and a wider stencil are tried there before giving up.  Points
    whose absolute spread is below ``atol`` pass regardless of the relative
    spread.
    """
    order = _order(alpha)
    zz = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(zz <= 0):
        raise DomainError("Riemann-Liouville derivative is evaluated only at z > 0")
    value = np.zeros(zz.size, dtype=np.complex128)
    best_rel = np.full(zz.size, np.inf)
    todo = np.arange(zz.size)
    is_complex = False
    diag = None
    # at high order the smallest step of a factor-2 ladder is roundoff bound,
    # so retries use the finer ratio sqrt(2) on their own grids
    r2 = math.sqrt(2.0)
    ladder = (
        (step, 2.0, 4),
        (step, r2, 4),
        (1.4 * step, r2, 6),
        (step / r2, r2, 4),
        (2 * step, 2.0, 6),
        (2 * step, 2.0, 4),
        (step / 2, 2.0, 4),
        (step / 4, 2.0, 4),
    )
    for rel, q, acc in ladder:
        est, abserr, relerr, G, diag = _attempt(f, order, zz[todo], tol, rel, q, acc)
        is_complex |= np.iscomplexobj(G)
        better = relerr < best_rel[todo]
        value[todo[better]] = est[better]
        best_rel[todo[better]] = relerr[better]
        ok = (relerr <= tol) | (abserr <= atol)
        best_rel[todo[ok]] = np.minimum(best_rel[todo[ok]], 0.0)
        value[todo[ok]] = est[ok]
        todo = todo[~ok]
        if todo.size == 0:
            break
    if todo.size:
        worst = todo[int(np.argmax(best_rel[todo]))]
        raise ConvergenceError(
            f"finite-difference estimates disagree at z={zz[worst]}: "
            f"relative spread {best_rel[worst]:.3e} exceeds {tol:.1e}"
        )
    if not is_complex:
        value = value.real
    if np.ndim(z) == 0:
        value = value[0]
    return (value, diag) if full_output else value


__all__ = [
    "FracOrder",
    "PowerTerm",
    "RLDiagnostics",
    "ShiftedTerm",
    "central_weights",
    "rl_fox_h",
    "rl_gen_wright",
    "rl_mittag_leffler",
    "rl_numeric",
    "rl_power",
    "rl_series",
    "shift_index",
]
