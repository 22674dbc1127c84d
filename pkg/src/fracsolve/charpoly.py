"""Cauchy-Euler operators and their characteristic polynomials.

The operator ``P(phi) = sum_i (a_i / alpha^i) z^i phi^(i)`` maps ``z^(alpha s)``
to ``Pt(s) z^(alpha s)`` with

    Pt(s) = a_0 + sum_{i>=1} a_i prod_{j<i} (s - j/alpha),

so ``P = a_m prod_k ((1/alpha) z d/dz - s_k)`` over the roots ``s_k`` of ``Pt``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as npoly

from fracsolve.errors import ConvergenceError, DomainError, RepeatedRootWarning

REPEAT_TOL = 1e-7
RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class FodeSpec:
    """``D^alpha phi = sum_{i=0}^m (a_i/alpha^i) z^i phi^(i)``."""

    alpha: float
    coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        self.validate()

    @property
    def m(self) -> int:
        return len(self.coeffs) - 1

    def validate(self) -> None:
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if not self.coeffs:
            raise DomainError("at least the coefficient a_0 is required")
        if self.m >= 1 and self.coeffs[-1] == 0:
            raise DomainError("leading coefficient a_m must be nonzero")


@dataclass(frozen=True)
class SystemSpec:
    """``D^alpha phi = P_1(psi)``, ``D^alpha psi = P_2(phi)``."""

    alpha: float
    a_coeffs: tuple[float, ...]
    b_coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "a_coeffs", tuple(float(c) for c in self.a_coeffs))
        object.__setattr__(self, "b_coeffs", tuple(float(c) for c in self.b_coeffs))
        self.validate()

    @property
    def m1(self) -> int:
        return len(self.a_coeffs) - 1

    @property
    def m2(self) -> int:
        return len(self.b_coeffs) - 1

    def validate(self) -> None:
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if not self.a_coeffs or not self.b_coeffs:
            raise DomainError("both coefficient lists need at least one entry")
        if self.a_coeffs[-1] == 0 or self.b_coeffs[-1] == 0:
            raise DomainError("leading coefficients a_{m1} and b_{m2} must be nonzero")


@dataclass(frozen=True)
class CharPoly:
    """Characteristic polynomial in monomial form (``coeffs[i]`` multiplies ``s^i``)."""

    coeffs: tuple[float, ...]
    alpha: float
    roots: Optional[tuple[complex, ...]] = field(default=None, compare=False)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> float:
        return self.coeffs[-1]

    def __call__(self, s):
        return npoly.polyval(s, np.asarray(self.coeffs))

    def with_roots(self) -> "CharPoly":
        return self if self.roots is not None else replace(self, roots=roots(self))


def falling_factorial_poly(i: int, alpha: float) -> np.ndarray:
    """Monomial coefficients of ``prod_{j<i} (s - j/alpha)``."""
    out = np.array([1.0])
    for j in range(i):
        out = npoly.polymul(out, [-j / alpha, 1.0])
    return out


def characteristic(coeffs, alpha: float) -> CharPoly:
    total = np.zeros(len(coeffs))
    for i, a in enumerate(coeffs):
        total[: i + 1] += a * falling_factorial_poly(i, alpha)
    return CharPoly(tuple(float(c) for c in total), float(alpha))


def build_scalar(spec: FodeSpec) -> CharPoly:
    return characteristic(spec.coeffs, spec.alpha)


def build_system(spec: SystemSpec) -> tuple[CharPoly, CharPoly]:
    return characteristic(spec.a_coeffs, spec.alpha), characteristic(spec.b_coeffs, spec.alpha)


def apply_operator(coeffs, alpha: float, z, derivatives) -> np.ndarray:
    """``sum_i (a_i/alpha^i) z^i phi^(i)(z)`` given ``derivatives[i] = phi^(i)(z)``."""
    z = np.asarray(z)
    out = np.zeros(np.broadcast(z, np.asarray(derivatives[0])).shape, dtype=complex)
    for i, a in enumerate(coeffs):
        if a != 0:
            out = out + (a / alpha**i) * z**i * np.asarray(derivatives[i])
    return out


# ------------------------------------------------------------------ root finding


def _aberth(desc: np.ndarray, maxiter: int = 500) -> Optional[np.ndarray]:
    """Aberth-Ehrlich iteration on a polynomial given highest power first."""
    m = desc.size - 1
    monic = desc / desc[0]
    dmonic = np.polyder(monic)
    # Fujiwara bound on the root moduli
    radius = 2.0 * max(abs(monic[k]) ** (1.0 / k) for k in range(1, m + 1))
    radius = max(radius, 1e-3)
    z = 0.5 * radius * np.exp(1j * (2 * np.pi * np.arange(m) / m + 0.4))
    for _ in range(maxiter):
        p = np.polyval(monic, z)
        dp = np.polyval(dmonic, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            pull = (1.0 / diff).sum(axis=1)
            step = ratio / (1.0 - ratio * pull)
        if not np.all(np.isfinite(step)):
            return None
        z = z - step
        if np.all(np.abs(step) <= 4 * np.finfo(float).eps * np.maximum(np.abs(z), 1.0)):
            return z
    return None


def _residual_ok(poly: CharPoly, rts: np.ndarray) -> bool:
    c = np.abs(np.asarray(poly.coeffs))
    for s in rts:
        scale = npoly.polyval(abs(s), c)
        if abs(poly(s)) > RESIDUAL_TOL * max(scale, np.finfo(float).tiny):
            return False
    return True


def _polish(desc: np.ndarray, rts: np.ndarray, steps: int = 3) -> np.ndarray:
    d = np.polyder(desc)
    for _ in range(steps):
        dp = np.polyval(d, rts)
        ok = dp != 0
        rts = np.where(ok, rts - np.polyval(desc, rts) / np.where(ok, dp, 1.0), rts)
    return rts


def _pair_conjugates(rts: np.ndarray) -> np.ndarray:
    """Make the root multiset exactly closed under conjugation."""
    rts = rts.astype(complex).copy()
    scale = np.maximum(np.abs(rts), 1.0)
    real = np.abs(rts.imag) <= REPEAT_TOL * scale
    rts[real] = rts[real].real
    upper = [i for i in np.flatnonzero(~real) if rts[i].imag > 0]
    lower = [i for i in np.flatnonzero(~real) if rts[i].imag < 0]
    if len(upper) != len(lower):
        raise ConvergenceError("complex roots of a real polynomial do not pair up")
    for i in upper:
        j = min(lower, key=lambda k: abs(rts[k] - np.conj(rts[i])))
        lower.remove(j)
        mean = 0.5 * (rts[i] + np.conj(rts[j]))
        rts[i], rts[j] = mean, np.conj(mean)
    return rts


def _order_roots(rts: np.ndarray) -> np.ndarray:
    # deterministic order: by real part, then imaginary part
    return rts[np.lexsort((rts.imag, rts.real))]


def roots(poly: CharPoly) -> tuple[complex, ...]:
    """All roots of ``poly`` with multiplicity, conjugate-paired.

    Aberth-Ehrlich iteration is tried first; companion-matrix eigenvalues are
    the fallback.  Roots closer than ``1e-7`` trigger a
    :class:`RepeatedRootWarning`.
    """
    if poly.degree < 1:
        return ()
    desc = np.asarray(poly.coeffs[::-1], dtype=float)
    if desc[0] == 0:
        raise DomainError("leading coefficient is zero")
    if poly.degree == 1:
        rts = np.array([-desc[1] / desc[0]], dtype=complex)
    else:
        rts = _aberth(desc)
        if rts is None or not _residual_ok(poly, rts):
            rts = _polish(desc, np.roots(desc).astype(complex))
        rts = _pair_conjugates(rts)
    if not _residual_ok(poly, rts):
        raise ConvergenceError("root finding did not reach the residual tolerance")
    rts = _order_roots(rts)
    clusters = repeated_roots(rts)
    if clusters:
        warnings.warn(
            f"characteristic polynomial has repeated roots {clusters}; "
            "the corresponding solution terms are not independent",
            RepeatedRootWarning,
            stacklevel=2,
        )
    return tuple(complex(r) for r in rts)


def repeated_roots(rts) -> list[tuple[complex, int]]:
    """Clusters of roots within ``1e-7`` of each other, as (root, multiplicity)."""
    rts = list(rts)
    seen = [False] * len(rts)
    out = []
    for i, r in enumerate(rts):
        if seen[i]:
            continue
        group = [j for j in range(i, len(rts)) if abs(rts[j] - r) <= REPEAT_TOL * max(1.0, abs(r))]
        for j in group:
            seen[j] = True
        if len(group) > 1:
            out.append((complex(r), len(group)))
    return out


__all__ = [
    "CharPoly",
    "FodeSpec",
    "SystemSpec",
    "apply_operator",
    "build_scalar",
    "build_system",
    "characteristic",
    "falling_factorial_poly",
    "repeated_roots",
    "roots",
]
