"""Parameterisations of the special functions used to build solutions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from fracsolve.errors import DomainError


@dataclass(frozen=True)
class ParamRow:
    """One parameter pair ``(A, alpha)`` (upper) or ``(B, beta)`` (lower).

    Whether the row is upper or lower is fixed by the list it is stored in.
    ``value`` may be complex (characteristic roots enter here), ``step`` is
    always real.
    """

    value: complex
    step: float

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        object.__setattr__(self, "step", float(self.step))

    def as_tuple(self) -> tuple[complex, float]:
        return (self.value, self.step)


def _rows(rows) -> tuple[ParamRow, ...]:
    out = []
    for r in rows:
        out.append(r if isinstance(r, ParamRow) else ParamRow(*r))
    return tuple(out)


@dataclass(frozen=True)
class MittagLeffler:
    """``E_{alpha,beta}(z) = sum z^k / Gamma(alpha k + beta)``."""

    alpha: float
    beta: float
    kind: str = field(default="MittagLeffler", init=False)

    def validate(self) -> None:
        if not self.alpha > 0:
            raise DomainError(f"Mittag-Leffler needs alpha > 0, got {self.alpha}")


@dataclass(frozen=True)
class Wright:
    """``Psi(z; alpha, beta) = sum z^k / (k! Gamma(alpha k + beta))``."""

    alpha: float
    beta: complex
    kind: str = field(default="Wright", init=False)

    def validate(self) -> None:
        if not self.alpha > -1:
            raise DomainError(f"Wright function needs alpha > -1, got {self.alpha}")


@dataclass(frozen=True)
class GenWright:
    """Generalized Wright function ``pPsi_q`` with upper and lower rows."""

    upper: tuple[ParamRow, ...]
    lower: tuple[ParamRow, ...]
    kind: str = field(default="GenWright", init=False)

    def __post_init__(self):
        object.__setattr__(self, "upper", _rows(self.upper))
        object.__setattr__(self, "lower", _rows(self.lower))

    @property
    def delta(self) -> float:
        return sum(r.step for r in self.lower) - sum(r.step for r in self.upper)

    def validate(self) -> None:
        for r in self.upper + self.lower:
            if r.step == 0:
                raise DomainError("generalized Wright steps must be nonzero")
        if not self.delta > -1:
            raise DomainError(
                f"generalized Wright series diverges: Delta = {self.delta} <= -1"
            )


@dataclass(frozen=True)
class FoxH:
    """Fox H-function ``H^{m,l}_{p,q}``.

    ``upper`` holds ``(A_i, alpha_i)`` for ``i = 1..p`` and ``lower`` holds
    ``(B_j, beta_j)`` for ``j = 1..q``.  The first ``l`` upper rows and the
    first ``m`` lower rows sit in the numerator of the Mellin-Barnes kernel.
    """

    m: int
    l: int
    upper: tuple[ParamRow, ...]
    lower: tuple[ParamRow, ...]
    kind: str = field(default="FoxH", init=False)

    def __post_init__(self):
        object.__setattr__(self, "upper", _rows(self.upper))
        object.__setattr__(self, "lower", _rows(self.lower))

    @property
    def p(self) -> int:
        return len(self.upper)

    @property
    def q(self) -> int:
        return len(self.lower)

    @property
    def mu(self) -> float:
        a = [r.step for r in self.upper]
        b = [r.step for r in self.lower]
        return sum(a[: self.l]) - sum(a[self.l :]) + sum(b[: self.m]) - sum(b[self.m :])

    @property
    def nu(self) -> float:
        return sum(r.step for r in self.lower) - sum(r.step for r in self.upper)

    def validate(self) -> None:
        if not (0 <= self.m <= self.q and 0 <= self.l <= self.p):
            raise DomainError(
                f"need 0 <= m <= q and 0 <= l <= p, got m={self.m}, l={self.l}, "
                f"p={self.p}, q={self.q}"
            )
        if self.m == 0 and self.l == 0:
            raise DomainError("H-function with (m, l) = (0, 0) is not defined")
        for r in self.upper + self.lower:
            if not r.step > 0:
                raise DomainError("Fox H steps must be strictly positive")
        if not self.mu > 0:
            raise DomainError(f"contour integral diverges: mu = {self.mu} <= 0")


SpecialFunctionDescriptor = Union[MittagLeffler, Wright, GenWright, FoxH]


def descriptor_to_dict(desc: SpecialFunctionDescriptor) -> dict:
    def rows(rs):
        return [[r.value.real, r.value.imag, r.step] for r in rs]

    if isinstance(desc, MittagLeffler):
        return {"kind": desc.kind, "alpha": desc.alpha, "beta": desc.beta}
    if isinstance(desc, Wright):
        beta = complex(desc.beta)
        return {"kind": desc.kind, "alpha": desc.alpha, "beta": [beta.real, beta.imag]}
    if isinstance(desc, GenWright):
        return {"kind": desc.kind, "upper": rows(desc.upper), "lower": rows(desc.lower)}
    if isinstance(desc, FoxH):
        return {
            "kind": desc.kind,
            "m": desc.m,
            "l": desc.l,
            "upper": rows(desc.upper),
            "lower": rows(desc.lower),
        }
    raise TypeError(f"not a special function descriptor: {desc!r}")


def descriptor_from_dict(data: dict) -> SpecialFunctionDescriptor:
    def rows(rs):
        return tuple(ParamRow(complex(re, im), step) for re, im, step in rs)

    kind = data["kind"]
    if kind == "MittagLeffler":
        return MittagLeffler(float(data["alpha"]), float(data["beta"]))
    if kind == "Wright":
        beta = data["beta"]
        if isinstance(beta, (list, tuple)):
            beta = complex(*beta)
        return Wright(float(data["alpha"]), complex(beta))
    if kind == "GenWright":
        return GenWright(rows(data["upper"]), rows(data["lower"]))
    if kind == "FoxH":
        return FoxH(int(data["m"]), int(data["l"]), rows(data["upper"]), rows(data["lower"]))
    raise ValueError(f"unknown special function kind {kind!r}")
