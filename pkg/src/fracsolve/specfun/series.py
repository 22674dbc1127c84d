"""Power-series evaluation of Mittag-Leffler, Wright and generalized Wright
functions.

Every series here has the shape ``sum_k c_k x^k`` with ``c_k`` a ratio of
gamma functions.  Coefficients are formed in log space (reciprocal gammas at
poles give ``c_k = 0`` exactly) and the sum is vectorized over the evaluation
points; all points share the same truncation index so that the truncation
error is a smooth function of the argument.

The public evaluators re-sum points with heavy cancellation (alternating
series at large negative arguments) in extended precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import mpmath
import numpy as np

from fracsolve.config import SERIES_MAX_TERMS, SERIES_TOL
from fracsolve.errors import ConvergenceError, DomainError

from .descriptors import GenWright, MittagLeffler, ParamRow, Wright
from .gamma import is_pole, loggamma

_CHUNK = 32
# exp() overflows beyond this
_LOG_HUGE = 700.0
# re-sum in extended precision when max|term| / |sum| exceeds this
_CANCEL_LIMIT = 1e2
# Wright functions with alpha < 0 go through their contour integral beyond
# this modulus on the negative axis
_WRIGHT_CONTOUR_FROM = 1.0


@dataclass
class EvalDiagnostics:
    terms_used: int
    tail_estimate: float
    converged: bool
    contour_half_height: Optional[float] = None
    #: max |term| / |sum|; large values mean cancellation in the sum
    cancellation: float = 1.0
    #: the same ratio per evaluation point
    point_cancellation: Optional[np.ndarray] = None


def log_coefficients(desc, k: np.ndarray) -> np.ndarray:
    """``log c_k`` for the power series of ``desc`` (``-inf`` where c_k = 0)."""
    k = np.asarray(k, dtype=float)
    if isinstance(desc, MittagLeffler):
        return -loggamma(desc.alpha * k + desc.beta)
    if isinstance(desc, Wright):
        return -loggamma(k + 1.0) - loggamma(desc.alpha * k + desc.beta)
    if isinstance(desc, GenWright):
        out = np.zeros(k.shape, dtype=np.complex128)
        for row in desc.upper:
            arg = row.value + row.step * k
            if np.any(is_pole(arg)):
                raise DomainError(
                    f"numerator gamma hits a pole for upper row {row.as_tuple()}"
                )
            out += loggamma(arg)
        for row in desc.lower:
            out -= loggamma(row.value + row.step * k)
        out -= loggamma(k + 1.0)
        return out
    raise TypeError(f"no power series for {desc!r}")


def series_coefficients(desc, nterms: int) -> np.ndarray:
    """First ``nterms`` series coefficients ``c_k`` as complex numbers."""
    return np.exp(log_coefficients(desc, np.arange(nterms)))


def falling_factorial(base, order: int):
    """``base (base-1) ... (base-order+1)``; 1 when ``order == 0``."""
    out = np.ones_like(np.asarray(base, dtype=np.complex128))
    for r in range(order):
        out = out * (base - r)
    return out


def power_series(
    desc,
    logx,
    tol: float = SERIES_TOL,
    multiplier: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    max_terms: int = SERIES_MAX_TERMS,
):
    """Sum ``sum_k c_k w_k x^k`` at every ``x = exp(logx)``.

    ``multiplier`` maps the index array ``k`` to extra weights ``w_k`` (used
    for term-wise derivatives).  ``logx = -inf`` encodes ``x = 0``.

    Truncation: a point is finished once three consecutive terms are each
    below ``tol`` times the modulus of the running sum.

    Returns ``(values, EvalDiagnostics)``.
    """
    logx = np.atleast_1d(np.asarray(logx, dtype=np.complex128))
    npts = logx.size
    total = np.zeros(npts, dtype=np.complex128)
    biggest = np.zeros(npts)
    last = np.zeros(npts)
    run = np.zeros(npts, dtype=int)
    done = np.zeros(npts, dtype=bool)

    halfturns = logx.imag / np.pi
    zero = np.isneginf(logx.real)
    if np.any(zero):
        c0 = np.exp(log_coefficients(desc, np.array([0.0])))[0]
        if multiplier is not None:
            c0 = c0 * multiplier(np.array([0.0]))[0]
        total[zero] = c0
        biggest[zero] = abs(c0)
        done[zero] = True

    k0 = 0
    while not np.all(done):
        if k0 >= max_terms:
            raise ConvergenceError(
                f"series did not converge within {max_terms} terms"
            )
        k = np.arange(k0, k0 + _CHUNK, dtype=float)
        lc = log_coefficients(desc, k)
        act = np.flatnonzero(~done)
        lt = lc[None, :] + k[None, :] * logx[act, None].real
        with np.errstate(invalid="ignore"):
            if np.any(lt.real > _LOG_HUGE):
                raise ConvergenceError(
                    "series terms overflow: argument beyond the practical series radius"
                )
        # phase of x^k in half turns, reduced exactly so that x < 0 gives (-1)^k
        turns = k[None, :] * halfturns[act, None]
        turns = turns - 2.0 * np.round(turns / 2.0)
        terms = np.exp(lt) * np.exp(1j * np.pi * turns)
        if multiplier is not None:
            terms = terms * multiplier(k)[None, :]
        if not np.all(np.isfinite(terms)):
            raise ConvergenceError("non-finite series term")
        mags = np.abs(terms)
        partial = total[act, None] + np.cumsum(terms, axis=1)
        pmag = np.abs(partial)
        small = (mags <= tol * pmag) & (pmag > 0)
        if k0 + _CHUNK >= 64:
            # a series whose first 64 terms all vanish is identically zero
            small |= (pmag == 0) & (mags == 0) & (k[None, :] >= 64)
        r = run[act]
        finished = np.zeros(act.size, dtype=bool)
        for j in range(_CHUNK):
            r = np.where(small[:, j], r + 1, 0)
            finished |= r >= 3
        run[act] = r
        total[act] = partial[:, -1]
        biggest[act] = np.maximum(biggest[act], mags.max(axis=1))
        last[act] = mags[:, -1]
        done[act] = finished
        k0 += _CHUNK

    absval = np.abs(total)
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = np.where(absval > 0, last / absval, 0.0)
        canc = np.where(absval > 0, biggest / absval, 1.0)
    diag = EvalDiagnostics(
        terms_used=k0,
        tail_estimate=float(tail.max(initial=0.0)),
        converged=True,
        cancellation=float(canc.max(initial=1.0)),
        point_cancellation=canc,
    )
    return total, diag


def _mp_coefficient(desc, k: int):
    mp = mpmath.mp
    f = mp.mpmathify
    if isinstance(desc, MittagLeffler):
        return mp.rgamma(f(desc.alpha) * k + f(desc.beta))
    if isinstance(desc, Wright):
        return mp.rgamma(k + 1) * mp.rgamma(f(desc.alpha) * k + f(desc.beta))
    out = mp.rgamma(k + 1)
    for row in desc.upper:
        out *= mp.gamma(f(row.value) + f(row.step) * k)
    for row in desc.lower:
        out *= mp.rgamma(f(row.value) + f(row.step) * k)
    return out


def mp_series_value(desc, x: complex, max_terms: int = SERIES_MAX_TERMS) -> complex:
    """Series value at ``x`` summed in mpmath, with the working precision raised
    until the digits lost to cancellation are covered."""
    mp = mpmath.mp
    digits = 30
    while True:
        with mpmath.workdps(digits):
            xm = mp.mpmathify(x)
            eps = mp.mpf(10) ** (-digits)
            total, biggest, power, quiet = mp.mpf(0), mp.mpf(0), mp.mpf(1), 0
            for k in range(max_terms):
                term = _mp_coefficient(desc, k) * power
                total += term
                biggest = max(biggest, abs(term))
                if term != 0:
                    quiet = quiet + 1 if abs(term) <= eps * abs(total) else 0
                if quiet >= 3:
                    break
                power *= xm
            else:
                raise ConvergenceError(f"series did not converge within {max_terms} terms")
            digits = _next_precision(digits, total, biggest)
            if digits is None:
                return complex(total)


_MP_MAX_DIGITS = 4000


def _next_precision(digits: int, total, biggest):
    """``None`` when ``total`` is trustworthy at ``digits``, else a larger precision."""
    mp = mpmath.mp
    if biggest == 0:
        return None
    if total == 0 or abs(total) <= biggest * mp.mpf(10) ** (8 - digits):
        new = 2 * digits  # only rounding noise survived
    else:
        lost = float(mp.log10(biggest / abs(total)))
        if lost + 20 <= digits:
            return None
        new = int(lost) + 30
    if new > _MP_MAX_DIGITS:
        raise ConvergenceError("cancellation exceeds the extended-precision limit")
    return new


def _resum_cancelled(desc, z, vals, diag):
    canc = diag.point_cancellation
    bad = np.flatnonzero(canc > _CANCEL_LIMIT)
    if bad.size == 0:
        return vals
    zs = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    zs = np.broadcast_to(zs, vals.shape)
    vals = vals.copy()
    for i in bad:
        vals[i] = mp_series_value(desc, complex(zs[i]))
    return vals


def _evaluate(desc, z, tol, full_output):
    vals, diag = power_series(desc, _log_of(np.atleast_1d(z)), tol)
    vals = _resum_cancelled(desc, z, vals, diag)
    return _finish(vals, diag, z, full_output)


def _log_of(z):
    z = np.asarray(z, dtype=np.complex128)
    with np.errstate(divide="ignore"):
        return np.log(z)


def _finish(values, diag, z, full_output):
    if np.ndim(z) == 0:
        values = values[0]
    return (values, diag) if full_output else values


def mittag_leffler(alpha: float, beta: float, z, tol: float = SERIES_TOL, full_output=False):
    """Two-parameter Mittag-Leffler function ``E_{alpha,beta}(z)``."""
    if not tol > 0:
        raise DomainError("tol must be positive")
    desc = MittagLeffler(float(alpha), float(beta))
    desc.validate()
    return _evaluate(desc, z, tol, full_output)


def wright(z, alpha: float, beta, tol: float = SERIES_TOL, full_output=False):
    """Wright function ``Psi(z; alpha, beta)`` (entire for ``alpha > -1``)."""
    desc = Wright(float(alpha), complex(beta))
    desc.validate()
    zz = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    far = (zz.imag == 0) & (zz.real < -_WRIGHT_CONTOUR_FROM)
    if desc.alpha >= 0 or not np.any(far):
        return _evaluate(desc, z, tol, full_output)
    from .foxh import mellin_barnes
    from .identities import gen_wright_as_fox_h, wright_as_gen_wright

    vals = np.empty(zz.shape, dtype=np.complex128)
    diag = None
    if np.any(~far):
        vals[~far], diag = _evaluate(desc, zz[~far], tol, True)
    h = gen_wright_as_fox_h(wright_as_gen_wright(desc))
    vals[far], hdiag = mellin_barnes(h, np.log(-zz[far].real) + 0j, max(tol, 1e-13))
    diag = hdiag if diag is None else diag
    return _finish(vals, diag, z, full_output)


def gen_wright(upper, lower, z, tol: float = SERIES_TOL, full_output=False):
    """Generalized Wright function ``pPsi_q[z | upper; lower]``.

    ``upper`` and ``lower`` are sequences of :class:`ParamRow` or
    ``(value, step)`` pairs.
    """
    desc = GenWright(tuple(upper), tuple(lower))
    desc.validate()
    return _evaluate(desc, z, tol, full_output)


__all__ = [
    "EvalDiagnostics",
    "ParamRow",
    "falling_factorial",
    "gen_wright",
    "log_coefficients",
    "mittag_leffler",
    "mp_series_value",
    "power_series",
    "series_coefficients",
    "wright",
]
