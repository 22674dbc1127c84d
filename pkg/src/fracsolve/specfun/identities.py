"""Parameter-level transformations between special-function descriptors.

Each function returns a new descriptor; the accompanying change of argument
or prefactor is stated in the docstring.
"""

from __future__ import annotations

from fracsolve.errors import DomainError

from .descriptors import FoxH, GenWright, MittagLeffler, ParamRow, Wright


def invert_argument(desc: FoxH) -> FoxH:
    """``H^{m,l}_{p,q}[z | A; B] = H^{l,m}_{q,p}[1/z | 1-B; 1-A]`` (z > 0)."""
    upper = tuple(ParamRow(1 - r.value, r.step) for r in desc.lower)
    lower = tuple(ParamRow(1 - r.value, r.step) for r in desc.upper)
    return FoxH(desc.l, desc.m, upper, lower)


def scale_steps(desc: FoxH, k: float) -> FoxH:
    """Steps multiplied by ``k > 0``: ``H[z] = k * H_scaled[z^k]``."""
    if not k > 0:
        raise DomainError(f"step scaling needs k > 0, got {k}")
    return FoxH(
        desc.m,
        desc.l,
        tuple(ParamRow(r.value, k * r.step) for r in desc.upper),
        tuple(ParamRow(r.value, k * r.step) for r in desc.lower),
    )


def absorb_power(desc: FoxH, sigma: complex) -> FoxH:
    """``z^sigma H[z] = H_shifted[z]`` with every value shifted by ``sigma * step``."""
    return FoxH(
        desc.m,
        desc.l,
        tuple(ParamRow(r.value + sigma * r.step, r.step) for r in desc.upper),
        tuple(ParamRow(r.value + sigma * r.step, r.step) for r in desc.lower),
    )


def differentiate(desc: FoxH, rho: complex, sigma: float, order: int) -> FoxH:
    """Descriptor ``G`` with ``d^N/dz^N (z^(rho-1) H[a z^sigma]) = z^(rho-N-1) G[a z^sigma]``.

    The gamma ratio gains ``Gamma(rho + sigma s) / Gamma(rho - N + sigma s)``,
    a degree-``N`` polynomial in ``s``.
    """
    if not sigma > 0:
        raise DomainError("differentiation rule needs sigma > 0")
    if order < 0:
        raise DomainError("derivative order must be non-negative")
    upper = (ParamRow(1 - rho, sigma),) + desc.upper
    lower = desc.lower + (ParamRow(1 - rho + order, sigma),)
    return FoxH(desc.m, desc.l + 1, upper, lower)


def mittag_leffler_as_gen_wright(desc: MittagLeffler) -> GenWright:
    """``E_{a,b}(z) = 1Psi1[z | (1,1); (b,a)]``."""
    return GenWright((ParamRow(1, 1),), (ParamRow(desc.beta, desc.alpha),))


def wright_as_gen_wright(desc: Wright) -> GenWright:
    """``Psi(z; a, b) = 0Psi1[z | -; (b, a)]``."""
    return GenWright((), (ParamRow(desc.beta, desc.alpha),))


def gen_wright_as_fox_h(desc: GenWright) -> FoxH:
    """H-function ``G`` with ``pPsi_q[z] = G[-z]``.

    The first lower row plays a special role: for ``beta_1 > 0`` it becomes
    a denominator row of the lower list, for ``-1 < beta_1 < 0`` a denominator
    row of the upper list with positive step.  All other steps must be
    positive.  The contour integral converges when ``Delta < 1``.
    """
    if not desc.lower:
        raise DomainError("bridge to an H-function needs at least one lower row")
    for r in desc.upper + desc.lower[1:]:
        if not r.step > 0:
            raise DomainError("bridge to an H-function needs positive steps")
    first = desc.lower[0]
    upper = tuple(ParamRow(1 - r.value, r.step) for r in desc.upper)
    rest = tuple(ParamRow(1 - r.value, r.step) for r in desc.lower[1:])
    p = len(desc.upper)
    if first.step > 0:
        lower = (ParamRow(0, 1), ParamRow(1 - first.value, first.step)) + rest
        return FoxH(1, p, upper, lower)
    if -1 < first.step < 0:
        return FoxH(1, p, upper + (ParamRow(first.value, -first.step),), (ParamRow(0, 1),) + rest)
    raise DomainError(f"first lower step must lie in (-1, 0) or (0, oo), got {first.step}")


__all__ = [
    "absorb_power",
    "differentiate",
    "gen_wright_as_fox_h",
    "invert_argument",
    "mittag_leffler_as_gen_wright",
    "scale_steps",
    "wright_as_gen_wright",
]
