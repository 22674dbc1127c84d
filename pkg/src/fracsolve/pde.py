"""Similarity reductions of variable-coefficient fractional evolution equations.

Scalar class (order ``m`` in ``x``)::

    D_t^alpha u = sum_i a_i (x+b)^(p-m+i) d^i u/dx^i,      x > -b, t > 0.

The ansatz ``u = (x+b)^a phi(z)``, ``z = t (x+b)^((p-m)/alpha)`` turns it into a
Cauchy-Euler FODE for ``phi``.  Closed-form reduced coefficients are provided
for ``m = 2``; for other ``m`` only the ansatz is exposed.

System class::

    D_t^alpha u = a1 (x+c)^m1 v_x + b1 (x+c)^(m1-1) v,
    D_t^alpha v = a2 (x+c)^m2 u_x + b2 (x+c)^(m2-1) u,

reduced by ``u = (x+c)^(d+m1/2) phi(z)``, ``v = (x+c)^(d+m2/2) psi(z)``,
``z = t (x+c)^((m1+m2-2)/(2 alpha))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from fracsolve.charpoly import FodeSpec, SystemSpec
from fracsolve.errors import DomainError, UnsupportedRegime
from fracsolve.solutions import SolutionExpression, SystemSolution, evaluate


@dataclass(frozen=True)
class EvolutionPde:
    alpha: float
    coeffs: tuple[float, ...]  # a_0 .. a_m
    b: float
    p: float
    a: float = 0.0  # weight of the u d/du generator in the invariant solution

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        for name in ("b", "p", "a"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if len(self.coeffs) < 2:
            raise DomainError("the x-order m must be at least 1")
        if not self.coeffs[-1] > 0:
            raise DomainError(f"leading coefficient a_m must be positive, got {self.coeffs[-1]}")

    @property
    def m(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class SystemPde:
    alpha: float
    a1: float
    a2: float
    b1: float
    b2: float
    m1: float
    m2: float
    c: float
    d: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "a1", "a2", "b1", "b2", "m1", "m2", "c", "d"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if not self.a1 * self.a2 > 0:
            raise DomainError("the system needs a1 * a2 > 0")


@dataclass(frozen=True)
class PdeReduction:
    """``u = (x+shift)^prefactor[0] phi(z)`` (and ``v`` with ``prefactor[1]``),
    ``z = t (x+shift)^similarity``; ``target`` is the reduced FODE (``None``
    when no closed-form coefficients are available)."""

    similarity: float
    prefactor: tuple[float, ...]
    shift: float
    target: Union[FodeSpec, SystemSpec, None]


def scalar_ansatz(pde: EvolutionPde) -> PdeReduction:
    """Ansatz for any ``m``, without reduced coefficients."""
    return PdeReduction((pde.p - pde.m) / pde.alpha, (pde.a,), pde.b, None)


def reduce_scalar(pde: EvolutionPde) -> PdeReduction:
    """Reduced FODE for the second-order class (``m = 2``)."""
    if pde.m != 2:
        raise UnsupportedRegime(
            f"reduced coefficients are available only for m = 2 (got m = {pde.m})"
        )
    a0, a1, a2 = pde.coeffs
    alpha, p, a = pde.alpha, pde.p, pde.a
    abar = a * (a - 1) * a2 + a * a1 + a0
    if p == 2:
        target = FodeSpec(alpha, (abar,))
    else:
        bbar = (p - 2) * ((p - 2) / alpha + 2 * a - 1 + a1 / a2) * a2
        cbar = (p - 2) ** 2 * a2
        target = FodeSpec(alpha, (abar, bbar, cbar))
    return PdeReduction((p - 2) / alpha, (a,), pde.b, target)


def reduce_system(pde: SystemPde) -> PdeReduction:
    m = pde.m1 + pde.m2
    abar1 = (pde.d + pde.m2 / 2) * pde.a1 + pde.b1
    abar2 = (pde.d + pde.m1 / 2) * pde.a2 + pde.b2
    if m == 2:
        target = SystemSpec(pde.alpha, (abar1,), (abar2,))
    else:
        target = SystemSpec(
            pde.alpha, (abar1, (m - 2) * pde.a1 / 2), (abar2, (m - 2) * pde.a2 / 2)
        )
    return PdeReduction(
        (m - 2) / (2 * pde.alpha), (pde.d + pde.m1 / 2, pde.d + pde.m2 / 2), pde.c, target
    )


def similarity_variable(red: PdeReduction, x, t):
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    base = x + red.shift
    if np.any(base <= 0):
        raise DomainError(f"x must exceed {-red.shift}")
    if np.any(t <= 0):
        raise DomainError("t must be positive")
    return base, t * base**red.similarity


def lift(
    red: PdeReduction,
    solution: Union[SolutionExpression, SystemSolution],
    x,
    t,
    constants=None,
    tol=None,
):
    """Invariant PDE solution ``u(x, t)`` (or ``(u, v)``) from a reduced solution."""
    base, z = similarity_variable(red, x, t)
    shape = np.broadcast(base, z).shape
    base = np.broadcast_to(base, shape).ravel()
    zf = np.broadcast_to(z, shape).ravel()
    if isinstance(solution, SystemSolution):
        u = base ** red.prefactor[0] * evaluate(solution.phi, zf, constants, tol)
        v = base ** red.prefactor[1] * evaluate(solution.psi, zf, constants, tol)
        return u.reshape(shape), v.reshape(shape)
    u = base ** red.prefactor[0] * evaluate(solution, zf, constants, tol)
    return u.reshape(shape)


__all__ = [
    "EvolutionPde",
    "PdeReduction",
    "SystemPde",
    "lift",
    "reduce_scalar",
    "reduce_system",
    "scalar_ansatz",
    "similarity_variable",
]
