"""Complex gamma function via the Lanczos approximation (g=7, 9 terms).

All functions accept scalars or arrays.  :func:`loggamma` is the workhorse
for the series and contour kernels: only ``exp(loggamma(z))`` is ever used,
so the branch of the imaginary part is irrelevant.
"""

from __future__ import annotations

import numpy as np

from fracsolve.config import INT_TOL
from fracsolve.errors import PoleError

_G = 7.0
_COEF = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)
_LOG_PI = np.log(np.pi)

# above this modulus gamma() goes through the log form to avoid overflow
_DIRECT_LIMIT = 60.0


def _as_complex(z):
    return np.asarray(z, dtype=np.complex128)


def _is_real_input(z) -> bool:
    return not np.iscomplexobj(z)


def is_pole(z, tol: float = INT_TOL):
    """True where ``z`` is a non-positive integer (within ``tol``)."""
    z = _as_complex(z)
    nearest = np.round(z.real)
    return (nearest <= 0) & (np.abs(z - nearest) <= tol)


def _reduce_mod2(z):
    # sin(pi z) is 2-periodic in Re z; the shift is exact in floating point
    return z - 2.0 * np.round(z.real / 2.0)


def sinpi(z):
    """``sin(pi z)`` with exact argument reduction of the real part."""
    return np.sin(np.pi * _reduce_mod2(_as_complex(z)))


def _log_sinpi(z):
    z = _reduce_mod2(z)
    out = np.empty_like(z)
    y = z.imag
    small = np.abs(y) < 30.0
    if np.any(small):
        out[small] = np.log(np.sin(np.pi * z[small]))
    up = y >= 30.0
    if np.any(up):
        w = z[up]
        out[up] = -1j * np.pi * w + np.log(0.5j) + np.log1p(-np.exp(2j * np.pi * w))
    down = y <= -30.0
    if np.any(down):
        w = z[down]
        out[down] = 1j * np.pi * w + np.log(-0.5j) + np.log1p(-np.exp(-2j * np.pi * w))
    return out


def _lanczos_series(w):
    acc = np.full_like(w, _COEF[0])
    for i in range(1, len(_COEF)):
        acc = acc + _COEF[i] / (w + i)
    return acc


def _loggamma_right(z):
    # valid for Re z >= 0.5
    w = z - 1.0
    t = w + _G + 0.5
    return _HALF_LOG_2PI + (w + 0.5) * np.log(t) - t + np.log(_lanczos_series(w))


def loggamma(z):
    """A logarithm of the gamma function; ``inf`` at the poles.

    The real part is ``log|Gamma(z)|``.  For ``Re z >= 1/2`` this is the
    principal branch; to the left the reflection formula is used, so the
    imaginary part may differ from the principal branch by a multiple of
    ``2 pi``.  Callers only exponentiate or take phases of it.
    """
    z = _as_complex(z)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    poles = is_pole(z)
    right = (z.real >= 0.5) & ~poles
    left = (z.real < 0.5) & ~poles
    if np.any(right):
        out[right] = _loggamma_right(z[right])
    if np.any(left):
        zl = z[left]
        out[left] = _LOG_PI - _log_sinpi(zl) - _loggamma_right(1.0 - zl)
    out[poles] = np.inf
    return out[0] if scalar else out


def _gamma_direct(z):
    # Re z >= 0.5 and |z| moderate
    w = z - 1.0
    t = w + _G + 0.5
    return np.sqrt(2.0 * np.pi) * t ** (w + 0.5) * np.exp(-t) * _lanczos_series(w)


def _gamma_nonpole(z):
    out = np.empty_like(z)
    big = np.abs(z) > _DIRECT_LIMIT
    if np.any(big):
        out[big] = np.exp(loggamma(z[big]))
    right = ~big & (z.real >= 0.5)
    if np.any(right):
        out[right] = _gamma_direct(z[right])
    left = ~big & (z.real < 0.5)
    if np.any(left):
        zl = z[left]
        out[left] = np.pi / (sinpi(zl) * _gamma_direct(1.0 - zl))
    return out


def gamma(z, reciprocal: bool = False):
    """Gamma function.

    With ``reciprocal=True`` returns ``1/Gamma(z)``, which is entire and is
    exactly zero at the non-positive integers.  Otherwise a pole raises
    :class:`PoleError`.
    """
    real_input = _is_real_input(z)
    zc = _as_complex(z)
    scalar = zc.ndim == 0
    zc = np.atleast_1d(zc)
    poles = is_pole(zc)
    if np.any(poles) and not reciprocal:
        raise PoleError(f"gamma has a pole at {zc[poles][0]}")
    out = np.zeros_like(zc)
    ok = ~poles
    if np.any(ok):
        vals = _gamma_nonpole(zc[ok])
        out[ok] = 1.0 / vals if reciprocal else vals
    if real_input:
        out = out.real
    return out[0] if scalar else out


def rgamma(z):
    """Reciprocal gamma function ``1/Gamma(z)``; total, zero at the poles."""
    return gamma(z, reciprocal=True)
