"""Fox H-function by direct quadrature of its Mellin-Barnes integral.

    H(x) = (1/2 pi i) * int_{gamma - i oo}^{gamma + i oo} Theta(s) x^s ds

    Theta(s) = prod_{j<=m} G(B_j - beta_j s) prod_{i<=l} G(1 - A_i + alpha_i s)
               / (prod_{i>l} G(A_i - alpha_i s) prod_{j>m} G(1 - B_j + beta_j s))

With ``s = gamma + i t`` the integral becomes
``x^gamma / (2 pi) * int Theta(gamma + i t) exp(i t log x) dt``.  The gamma
ratio does not depend on ``x``, so one set of quadrature nodes serves a whole
batch of arguments: the kernel is evaluated once per node and only the
oscillatory factor is formed per argument.

Quadrature is adaptive Gauss-Kronrod (7/15) on panels of ``[0, T]``; the
half-height ``T`` doubles until the newest block contributes less than
``tol/10`` of the integrand's L1 mass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fracsolve.config import CONTOUR_TOL
from fracsolve.errors import ConvergenceError, DomainError

from .descriptors import FoxH
from .gamma import loggamma
from .series import EvalDiagnostics

_XGK = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.0,
    ]
)
_WGK = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
_WG = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)

# 15 nodes on [-1, 1] and the matching Kronrod / embedded Gauss weights
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5]] = _WG[:3]
_GW[7] = _WG[3]
_GW[[9, 11, 13]] = _WG[2::-1]

_EPS = np.finfo(float).eps
_T0 = 8.0
_T_MAX = 16384.0
_MAX_PANELS = 60_000
_CHUNK_X = 64
# abscissa shifts tried when only one family of poles is present; the
# geometric ratio 2^(1/4) keeps the chosen line within a few nats of the saddle
_LOG_NEGLIGIBLE = -800.0
_SHIFT_STEPS_PER_OCTAVE = 4
_SHIFTS = np.concatenate([[0.0], 0.5 * 2.0 ** (np.arange(0, 57) / _SHIFT_STEPS_PER_OCTAVE)])


@dataclass(frozen=True)
class _Kernel:
    """Log of the gamma ratio with an optional polynomial factor."""

    desc: FoxH
    rho: float = 0.0
    sigma: float = 0.0
    order: int = 0

    def log_theta(self, s):
        d = self.desc
        s = np.asarray(s, dtype=np.complex128)
        out = np.zeros(s.shape, dtype=np.complex128)
        for j, row in enumerate(d.lower):
            if j < d.m:
                out += loggamma(row.value - row.step * s)
            else:
                out -= loggamma(1.0 - row.value + row.step * s)
        for i, row in enumerate(d.upper):
            if i < d.l:
                out += loggamma(1.0 - row.value + row.step * s)
            else:
                out -= loggamma(row.value - row.step * s)
        for r in range(self.order):
            with np.errstate(divide="ignore"):
                out += np.log(self.rho + self.sigma * s - r + 0j)
        return out


def _right_poles(desc: FoxH) -> list[float]:
    # leading real parts of s = (B_j + k) / beta_j
    return [row.value.real / row.step for row in desc.lower[: desc.m]]


def _left_poles(desc: FoxH) -> list[float]:
    # leading real parts of s = (A_i - 1 - k) / alpha_i
    return [(row.value.real - 1.0) / row.step for row in desc.upper[: desc.l]]


def contour_abscissa(desc: FoxH) -> float:
    """Real part of a vertical line separating the two families of poles."""
    right = _right_poles(desc)
    left = _left_poles(desc)
    if not left:
        return min(right) - 0.5
    if not right:
        return max(left) + 0.5
    lo, hi = max(left), min(right)
    if not lo < hi:
        raise DomainError(
            "no vertical contour separates the poles: "
            f"leftmost right pole {hi} <= rightmost left pole {lo}"
        )
    return 0.5 * (lo + hi)


def _conj_closed(rows) -> bool:
    vals = sorted((r.value.real, r.value.imag, r.step) for r in rows)
    conj = sorted((r.value.real, -r.value.imag, r.step) for r in rows)
    return all(
        abs(a[0] - b[0]) <= 1e-12 * max(1.0, abs(a[0]))
        and abs(a[1] - b[1]) <= 1e-12 * max(1.0, abs(a[1]))
        and a[2] == b[2]
        for a, b in zip(vals, conj)
    )


def _is_conj_symmetric(desc: FoxH) -> bool:
    d = desc
    return (
        _conj_closed(d.upper[: d.l])
        and _conj_closed(d.upper[d.l :])
        and _conj_closed(d.lower[: d.m])
        and _conj_closed(d.lower[d.m :])
    )


def check_convergence(desc: FoxH, logx) -> None:
    desc.validate()
    logx = np.asarray(logx, dtype=np.complex128)
    if np.any(np.isneginf(logx.real)):
        raise DomainError("Fox H-function is evaluated only at nonzero arguments")
    bound = 0.5 * np.pi * desc.mu
    bad = np.abs(logx.imag) >= bound
    if np.any(bad):
        raise DomainError(
            f"|arg z| = {np.abs(logx.imag[bad]).max()} violates |arg z| < pi*mu/2 = {bound}"
        )


def _panel_eval(kernel, gamma, shift, L, panels, both):
    """Kronrod value, error estimate and L1 mass per panel and argument."""
    mid = 0.5 * (panels[:, 0] + panels[:, 1])
    half = 0.5 * (panels[:, 1] - panels[:, 0])
    t = mid[:, None] + half[:, None] * _NODES[None, :]
    lt = kernel.log_theta(gamma + 1j * t) - shift
    if both is None:
        # real arguments, conjugate-symmetric rows: only Re of one half is needed
        mag = np.exp(lt.real)
        vals = mag[..., None] * np.cos(lt.imag[..., None] + t[..., None] * L.real[None, None, :])
        l1 = np.broadcast_to(((mag @ _KW) * half)[:, None], (panels.shape[0], L.size))
    else:
        ph = np.exp(1j * t[..., None] * L[None, None, :])
        vals = np.exp(lt)[..., None] * ph
        if both:
            lt2 = kernel.log_theta(gamma - 1j * t) - shift
            vals = vals + np.exp(lt2)[..., None] / ph
        l1 = np.matmul(_KW, np.abs(vals)) * half[:, None]
    k = np.matmul(_KW, vals) * half[:, None]
    g = np.matmul(_GW, vals) * half[:, None]
    # rounding level of the integrand: log-gamma sums and t*log x lose
    # absolute accuracy in proportion to their size
    size = np.abs(lt + shift).max(axis=1)[:, None] + panels[:, 1:2] * np.abs(L)[None, :]
    noise = 50 * _EPS * (1.0 + size) * l1
    return k, np.abs(k - g), l1, noise


def _integrate(kernel, gamma, L, tol, symmetric, budget=_MAX_PANELS):
    """``int_0^oo`` of the folded integrand for every entry of ``L``."""
    shift = kernel.log_theta(np.array([gamma + 0.5j]))[0].real
    if not np.isfinite(shift):
        shift = 0.0
    npts = L.size
    value = np.zeros(npts, dtype=np.float64 if symmetric else np.complex128)
    err = np.zeros(npts)
    mass = np.zeros(npts)
    T = _T0
    width = 1.0
    queue = np.column_stack([np.arange(0.0, T, width), np.arange(width, T + width, width)])
    block = np.zeros(npts)
    block_lo = 0.0
    evaluated = 0
    # None selects the real fast path of _panel_eval
    both = None if symmetric else True
    while True:
        while queue.size:
            evaluated += len(queue)
            if evaluated > budget:
                raise ConvergenceError("contour quadrature did not converge (panel budget)")
            k, e, l1, noise = _panel_eval(kernel, gamma, shift, L, queue, both)
            total_mass = mass + l1.sum(axis=0)
            w = (queue[:, 1] - queue[:, 0])[:, None]
            allowed = np.maximum(0.25 * tol * total_mass[None, :] * w / T, noise)
            ok = np.all(e <= allowed, axis=1)
            if np.any(ok):
                value += k[ok].sum(axis=0)
                err += e[ok].sum(axis=0)
                mass += l1[ok].sum(axis=0)
                in_block = ok & (queue[:, 0] >= block_lo)
                block += l1[in_block].sum(axis=0)
            bad = queue[~ok]
            if bad.size and np.min(bad[:, 1] - bad[:, 0]) < 1e-9:
                raise ConvergenceError("contour quadrature stalled on a tiny panel")
            mid = 0.5 * (bad[:, 0] + bad[:, 1])
            queue = np.concatenate(
                [np.column_stack([bad[:, 0], mid]), np.column_stack([mid, bad[:, 1]])]
            )
        rel_tail = np.where(mass > 0, block / np.where(mass > 0, mass, 1.0), 0.0)
        if block_lo > 0 and np.all(rel_tail < tol / 10):
            break
        if np.all(mass == 0):
            break
        if 2 * T > _T_MAX:
            raise ConvergenceError(
                f"contour integrand has not decayed by half-height {T}"
            )
        width = max(1.0, T / 16)
        starts = np.arange(T, 2 * T, width)
        queue = np.column_stack([starts, starts + width])
        block_lo = T
        block = np.zeros(npts)
        T *= 2
    if symmetric:
        value = 2.0 * value.real + 0j
        mass = 2.0 * mass
        err = 2.0 * err
    tail = float(rel_tail.max(initial=0.0))
    return value, shift, T, evaluated * 15, tail


def _choose_abscissae(desc, kernel, gamma0, L):
    """Per-argument abscissa; shifted away from the poles when that is allowed.

    With only one family of poles the line may move freely to the side
    without poles.  The shift minimizing the integrand scale
    ``|Theta(gamma)| |x^gamma|`` keeps the quadrature error relative to the
    value, which matters where H is exponentially small.
    """
    if desc.l == 0:
        cands = gamma0 - _SHIFTS
    elif desc.m == 0:
        cands = gamma0 + _SHIFTS
    else:
        cands = np.array([gamma0])
    lt = kernel.log_theta(cands + 0.5j).real
    lt = np.where(np.isfinite(lt), lt, np.inf)
    score = lt[:, None] + cands[:, None] * L.real[None, :]
    best = np.argmin(score, axis=0)
    return best, cands, score[best, np.arange(L.size)]


def mellin_barnes(
    desc: FoxH,
    logx,
    tol: float = CONTOUR_TOL,
    rho: float = 0.0,
    sigma: float = 0.0,
    order: int = 0,
):
    """``(1/2 pi i) int Theta(s) (rho + sigma s)_order x^s ds`` for each ``log x``.

    ``(r)_N`` is the falling factorial, so with ``x = A z^sigma`` the result
    times ``z^(rho - order)`` is the ``order``-th derivative of
    ``z^rho H(A z^sigma)``.

    Returns ``(values, EvalDiagnostics)``.
    """
    logx = np.atleast_1d(np.asarray(logx, dtype=np.complex128))
    check_convergence(desc, logx)
    if not tol > 0:
        raise DomainError("tol must be positive")
    kernel = _Kernel(desc, float(rho), float(sigma), int(order))
    gamma0 = contour_abscissa(desc)
    symmetric_rows = _is_conj_symmetric(desc)
    choice, cands, scale = _choose_abscissae(desc, kernel, gamma0, logx)
    out = np.zeros(logx.size, dtype=np.complex128)
    # integrand far below the smallest double everywhere: the value is 0
    choice = np.where(scale < _LOG_NEGLIGIBLE, -1, choice)
    half_height = 0.0
    nodes = 0
    tail = 0.0
    ceiling = len(cands) - 1  # largest shift not yet seen to fail
    for idx in np.unique(choice[choice >= 0]):
        gamma = float(cands[idx])
        members = np.flatnonzero(choice == idx)
        for start in range(0, members.size, _CHUNK_X):
            sel = members[start : start + _CHUNK_X]
            L = logx[sel]
            symmetric = symmetric_rows and np.all(L.imag == 0)
            # a far-shifted line can exhaust the panel budget; step back toward
            # the unshifted abscissa until one converges
            k = min(int(idx), ceiling)
            while True:
                gamma = float(cands[k])
                try:
                    budget = _MAX_PANELS if k == 0 else _MAX_PANELS // 10
                    val, shift, T, n, tl = _integrate(kernel, gamma, L, tol, symmetric, budget)
                    break
                except ConvergenceError:
                    if k == 0:
                        raise
                    # halve the shift
                    k = max(0, k - _SHIFT_STEPS_PER_OCTAVE)
                    ceiling = min(ceiling, k)
            with np.errstate(under="ignore"):
                out[sel] = np.exp(shift + gamma * L) * val / (2.0 * np.pi)
            half_height = max(half_height, T)
            nodes += n
            tail = max(tail, tl)
    diag = EvalDiagnostics(
        terms_used=nodes,
        tail_estimate=tail,
        converged=True,
        contour_half_height=half_height,
    )
    return out, diag


def fox_h(desc: FoxH, z, tol: float = CONTOUR_TOL, full_output: bool = False):
    """Fox H-function ``H^{m,l}_{p,q}`` of ``desc`` at ``z`` (scalar or array)."""
    if not isinstance(desc, FoxH):
        raise TypeError("fox_h expects a FoxH descriptor")
    zz = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    if np.any(zz == 0):
        raise DomainError("Fox H-function is evaluated only at nonzero arguments")
    vals, diag = mellin_barnes(desc, np.log(zz), tol)
    if np.ndim(z) == 0:
        vals = vals[0]
    return (vals, diag) if full_output else vals


__all__ = ["check_convergence", "contour_abscissa", "fox_h", "mellin_barnes"]
