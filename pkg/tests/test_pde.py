from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracsolve import DomainError, EvolutionPde, SystemPde, UnsupportedRegime, lift, solve_scalar
from fracsolve.pde import reduce_scalar, reduce_system, scalar_ansatz, similarity_variable
from fracsolve.solutions import discriminant


@pytest.mark.parametrize("alpha", [0.4, 0.9, 1.7])
def test_pure_diffusion_reduction(alpha):
    red = reduce_scalar(EvolutionPde(alpha, (0.0, 0.0, 1.0), b=0.0, p=0.0, a=0.0))
    assert red.target.coeffs == pytest.approx((0.0, 4 / alpha + 2, 4.0))
    assert red.similarity == pytest.approx(-2 / alpha)


def test_p_equals_two_gives_mittag_leffler_problem():
    a0, a1, a2, a = 0.3, -0.2, 1.4, 0.6
    red = reduce_scalar(EvolutionPde(0.8, (a0, a1, a2), b=0.0, p=2.0, a=a))
    assert red.target.m == 0
    assert red.target.coeffs[0] == pytest.approx(a * (a - 1) * a2 + a * a1 + a0)
    assert red.similarity == 0


@settings(max_examples=50, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(-2, 2), st.floats(0.2, 3), st.floats(-1.5, 1.5).filter(lambda p: abs(p - 2) > 0.05))
def test_wright_condition_gives_quarter_discriminant(alpha, a1, a2, p):
    a0 = a2 / 4 * (a1 / a2 - p / 2) * (a1 / a2 + p / 2 - 2)
    spec = reduce_scalar(EvolutionPde(alpha, (a0, a1, a2), b=0.0, p=p, a=0.0)).target
    assert discriminant(alpha, *spec.coeffs) == pytest.approx(0.25, abs=1e-9)


def test_only_second_order_has_coefficients():
    pde = EvolutionPde(0.5, (1.0, 0.0, 0.0, 1.0), b=0.0, p=1.0)
    with pytest.raises(UnsupportedRegime):
        reduce_scalar(pde)
    assert scalar_ansatz(pde).target is None


def test_system_reduction_cases():
    pde = SystemPde(0.7, a1=1.1, a2=0.8, b1=0.2, b2=0.3, m1=2.0, m2=1.0, c=0.5, d=0.2)
    red = reduce_system(pde)
    assert red.target.a_coeffs == pytest.approx(((0.2 + 0.5) * 1.1 + 0.2, 0.55))
    assert red.target.b_coeffs == pytest.approx((1.2 * 0.8 + 0.3, 0.4))
    assert red.prefactor == pytest.approx((1.2, 0.7))
    pde2 = SystemPde(0.7, a1=1.1, a2=0.8, b1=0.2, b2=0.3, m1=1.0, m2=1.0, c=0.5, d=0.2)
    red2 = reduce_system(pde2)
    assert red2.target.m1 == 0 and red2.target.m2 == 0 and red2.similarity == 0


def test_validation():
    with pytest.raises(DomainError):
        EvolutionPde(0.5, (1.0, 0.0, -1.0), b=0.0, p=0.0)
    with pytest.raises(DomainError):
        EvolutionPde(0.0, (1.0, 0.0, 1.0), b=0.0, p=0.0)
    with pytest.raises(DomainError):
        SystemPde(0.5, a1=1.0, a2=-1.0, b1=0, b2=0, m1=1, m2=1, c=0)


def test_similarity_domain():
    red = reduce_scalar(EvolutionPde(0.8, (0.3, 0.2, 1.1), b=0.5, p=0.0, a=0.7))
    with pytest.raises(DomainError):
        similarity_variable(red, -1.0, 1.0)
    with pytest.raises(DomainError):
        similarity_variable(red, 1.0, 0.0)


def test_lift_shapes_and_prefactor():
    pde = EvolutionPde(0.8, (0.3, 0.2, 1.1), b=0.5, p=0.0, a=0.7)
    red = reduce_scalar(pde)
    sol = solve_scalar(red.target)
    x = np.array([1.0, 2.0, 4.0])[:, None]
    t = np.array([0.5, 1.0])[None, :]
    u = lift(red, sol, x, t)
    assert u.shape == (3, 2)
    from fracsolve import evaluate

    z = t * (x + 0.5) ** red.similarity
    assert np.allclose(u, (x + 0.5) ** 0.7 * evaluate(sol, z.ravel()).reshape(3, 2), rtol=1e-14)
