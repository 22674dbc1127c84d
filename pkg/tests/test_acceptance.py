"""Acceptance criteria 1-8.

Each test carries ``@pytest.mark.acceptance(n)``; the terminal summary prints
one PASS/FAIL line per criterion.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import replace

import numpy as np
import pytest

from conftest import FIXTURES, mp_gen_wright
from fracsolve import (
    EvolutionPde,
    FodeSpec,
    SystemPde,
    SystemSolution,
    SystemSpec,
    evaluate,
    residual_pde_scalar,
    residual_pde_system,
    residual_scalar,
    residual_system,
    rl_numeric,
    rl_power,
    solve_degenerate_wright,
    solve_scalar,
    solve_system,
)
from fracsolve.charpoly import build_scalar, build_system, roots
from fracsolve.cli import run
from fracsolve.fracderiv import rl_mittag_leffler
from fracsolve.solutions import SolutionTerm, term_values
from fracsolve.specfun import (
    FoxH,
    GenWright,
    MittagLeffler,
    ParamRow,
    Wright,
    absorb_power,
    fox_h,
    gamma,
    gen_wright,
    gen_wright_as_fox_h,
    invert_argument,
    mittag_leffler,
    mittag_leffler_as_gen_wright,
    scale_steps,
    wright,
    wright_as_gen_wright,
)
from fracsolve.specfun.series import log_coefficients

Z = np.array([0.5, 1.0, 2.0])
RESIDUAL = 1e-5


def _rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.abs(b)))


# ------------------------------------------------------------ criterion 1


@pytest.mark.acceptance(1)
def test_exp_identity():
    x = np.linspace(-10, 10, 100)
    assert _rel(mittag_leffler(1, 1, x), np.exp(x)) <= 1e-11


@pytest.mark.acceptance(1)
def test_cos_identity():
    x = np.linspace(0, 2 * np.pi, 100)
    assert _rel(mittag_leffler(2, 1, -(x**2)), np.cos(x)) <= 1e-11


@pytest.mark.acceptance(1)
@pytest.mark.parametrize("beta", [0.3, 1.0, 2.5])
def test_wright_zero_alpha(beta):
    x = np.linspace(-10, 10, 100)
    assert _rel(wright(x, 0.0, beta), np.exp(x) / gamma(beta)) <= 1e-11


@pytest.mark.acceptance(1)
def test_gen_wright_against_oracle():
    rng = np.random.default_rng(1)
    for _ in range(20):
        p, q = int(rng.integers(0, 3)), int(rng.integers(1, 3))
        upper = [(float(rng.uniform(0.2, 2.0)), float(rng.uniform(0.2, 1.0))) for _ in range(p)]
        lower = [(float(rng.uniform(0.2, 2.5)), float(rng.uniform(0.2, 1.5))) for _ in range(q)]
        delta = sum(b for _, b in lower) - sum(a for _, a in upper)
        if delta <= -0.8:
            lower[0] = (lower[0][0], lower[0][1] + 1.0)
        x = float(rng.uniform(-3, 3))
        ours = gen_wright(upper, lower, x)
        ref = mp_gen_wright(upper, lower, x)
        assert abs(ours - ref) <= 1e-10 * abs(ref)


# ------------------------------------------------------------ criterion 2


@pytest.mark.acceptance(2)
def test_bridge_to_gen_wright_termwise():
    rng = np.random.default_rng(2)
    k = np.arange(60.0)
    for _ in range(10):
        ml = MittagLeffler(float(rng.uniform(0.2, 3)), float(rng.uniform(0.1, 3)))
        wr = Wright(float(rng.uniform(-0.9, 2)), float(rng.uniform(-1, 3)))
        for d, g in ((ml, mittag_leffler_as_gen_wright(ml)), (wr, wright_as_gen_wright(wr))):
            a, b = log_coefficients(d, k), log_coefficients(g, k)
            finite = np.isfinite(a.real)
            assert np.array_equal(finite, np.isfinite(b.real))
            assert np.max(np.abs(np.exp(a[finite] - b[finite]) - 1)) <= 1e-13


@pytest.mark.acceptance(2)
def test_bridge_to_fox_h_series_vs_contour():
    rng = np.random.default_rng(3)
    for _ in range(10):
        # Delta > -1 for the series and aperture >= 0.2 for the contour
        a = float(rng.uniform(0.2, 1.0))
        d = GenWright(
            [(float(rng.uniform(0.2, 2.0)), a)],
            [(float(rng.uniform(0.3, 2.0)), float(rng.uniform(0.2, 0.55))),
             (float(rng.uniform(0.3, 2.0)), float(rng.uniform(0.1, 0.45)))],
        )
        x = -float(rng.uniform(0.3, 3.0))
        series = gen_wright(d.upper, d.lower, x)
        contour = fox_h(gen_wright_as_fox_h(d), -x)
        assert abs(series - contour) <= 1e-8 * abs(series)


def _random_h(rng, i):
    kind = i % 3
    if kind == 0:
        m = int(rng.integers(1, 4))
        return FoxH(m, 0, [(1.0, float(rng.uniform(0.2, 0.9 * m)))],
                    [(float(b), 1.0) for b in rng.uniform(-0.8, 1.5, m)])
    if kind == 1:
        return FoxH(1, 1, [(1 - float(rng.uniform(0.3, 2.0)), 1.0)], [(0.0, 1.0)])
    return FoxH(2, 0, [(float(rng.uniform(0.5, 2)), float(rng.uniform(0.2, 0.6)))],
                [(float(rng.uniform(0, 1)), 1.0), (float(rng.uniform(0, 1)), 0.8),
                 (float(rng.uniform(0.5, 2)), 0.3)])


@pytest.mark.acceptance(2)
def test_fox_h_identities():
    rng = np.random.default_rng(4)
    for i in range(10):
        h = _random_h(rng, i)
        base = fox_h(h, Z)
        assert _rel(fox_h(invert_argument(h), 1 / Z), base) <= 1e-8
        k = float(rng.uniform(0.5, 2.0))
        assert _rel(k * fox_h(scale_steps(h, k), Z**k), base) <= 1e-8
        sigma = float(rng.uniform(-0.3, 0.3))
        assert _rel(fox_h(absorb_power(h, sigma), Z), Z**sigma * base) <= 1e-8


# ------------------------------------------------------------ criterion 3


@pytest.mark.acceptance(3)
def test_power_rule_oracle():
    rng = np.random.default_rng(5)
    for _ in range(50):
        alpha, beta, z = rng.uniform(0.1, 3.5), rng.uniform(-0.9, 3.0), rng.uniform(0.3, 3.0)
        t = rl_power(alpha, beta)
        exact = t.coeff * z**t.exponent
        got = rl_numeric(lambda s: s**beta, alpha, z)
        if exact == 0:
            assert abs(got) <= 1e-6
        else:
            assert abs(got - exact) <= 1e-6 * abs(exact)


@pytest.mark.acceptance(3)
def test_mittag_leffler_derivative_rule():
    rng = np.random.default_rng(6)
    for _ in range(20):
        alpha, beta = float(rng.uniform(0.2, 2.5)), float(rng.uniform(0.3, 1.5))
        B, a = float(rng.uniform(0.3, 2.5)), float(rng.uniform(-1.5, 1.5))
        src = SolutionTerm(1.0, 0, B - 1, MittagLeffler(beta, B), a, beta)
        st = rl_mittag_leffler(alpha, B, beta, a)
        out = SolutionTerm(1.0, 0, st.exponent, st.func, st.arg_scale, st.arg_power)
        got = rl_numeric(lambda s: term_values(src, s), alpha, Z)
        exact = st.coeff * term_values(out, Z)
        assert np.max(np.abs(got - exact) / np.abs(exact)) <= 1e-5


# ------------------------------------------------------------ criterion 4


def _u(r, lo, hi):
    return float(r.uniform(lo, hi))


def _sign(r):
    return 1.0 if r.random() < 0.5 else -1.0


def _constants(r, n):
    return list(r.uniform(0.5, 1.5, n) * np.where(r.random(n) < 0.5, -1, 1))


def _quarter_a(alpha, b, c):
    """``a`` making the discriminant equal 1/4."""
    return (1 / alpha**2 - 2 * b / (alpha * c) + b**2 / c**2 - 0.25) * c / 4


def _fox_h_system(r):
    s = _sign(r)
    return SystemSpec(_u(r, 0.15, 0.9), [_u(r, -1, 1), s * _u(r, 0.3, 1.2)], [_u(r, -1, 1), s * _u(r, 0.3, 1.2)])


def _fox_h_system_cubic(r):
    s = _sign(r)
    return SystemSpec(
        _u(r, 0.15, 1.4), [_u(r, -1, 1), s * _u(r, 0.3, 1.2)], [_u(r, -1, 1), _u(r, -1, 1), s * _u(r, 0.3, 1.2)]
    )


def _wright_small(r):
    alpha, b, c = _u(r, 0.3, 1.5), _u(r, -1, 1), _u(r, 1, 4)
    return FodeSpec(alpha, [_quarter_a(alpha, b, c), b, c])


def _wright_large(r):
    alpha, b, c = _u(r, 2.1, 3.8), _u(r, -1, 1), _sign(r) * _u(r, 0.3, 1.0)
    return FodeSpec(alpha, [_quarter_a(alpha, b, c), b, c])


FAMILIES = {
    "ml-scalar": (2058940, lambda r: FodeSpec(_u(r, 0.2, 3.8), [_u(r, -1.5, 1.5)])),
    "ml-system": (2066859, lambda r: SystemSpec(_u(r, 0.2, 2.5), [_u(r, -1.5, 1.5)], [_u(r, -1.5, 1.5)])),
    "gw-first-order": (2074778, lambda r: FodeSpec(_u(r, 1.1, 3.5), [_u(r, -1, 1), _sign(r) * _u(r, 0.3, 1.2)])),
    "gw-second-order": (2082697, lambda r: FodeSpec(_u(r, 2.1, 3.8), [_u(r, -1, 1), _u(r, -1, 1), _sign(r) * _u(r, 0.3, 1.0)])),
    "gw-system-first-order": (2090616, lambda r: SystemSpec(
        _u(r, 1.1, 2.5), [_u(r, -1, 1), _sign(r) * _u(r, 0.3, 1.2)], [_u(r, -1, 1), _sign(r) * _u(r, 0.3, 1.2)]
    )),
    "h-first-order": (2090616, lambda r: FodeSpec(_u(r, 0.2, 0.9), [_u(r, -1, 1), _u(r, 0.3, 1.5)])),
    "h-second-order": (2098535, lambda r: FodeSpec(_u(r, 0.2, 1.8), [_u(r, -1, 1), _u(r, -1, 1), _u(r, 0.3, 1.5)])),
    "h-system-first-order": (2106454, _fox_h_system),
    "wright-below-two": (1995588, _wright_small),
    "wright-above-two": (2003507, _wright_large),
    "h-cubic": (2138130, lambda r: FodeSpec(_u(r, 0.2, 2.8), [_u(r, -1, 1), _u(r, -1, 1), _u(r, -1, 1), _u(r, 0.3, 1.5)])),
    "gw-cubic": (2146049, lambda r: FodeSpec(
        _u(r, 3.1, 3.9), [_u(r, -1, 1), _u(r, -1, 1), _u(r, -1, 1), _sign(r) * _u(r, 0.3, 1.0)]
    )),
    "h-system-mixed": (2146049, _fox_h_system_cubic),
    "gw-system-mixed": (2153968, lambda r: SystemSpec(
        _u(r, 1.6, 2.8), [_u(r, -1, 1), _sign(r) * _u(r, 0.3, 1.0)],
        [_u(r, -1, 1), _u(r, -1, 1), _sign(r) * _u(r, 0.3, 1.0)],
    )),
}


def _perturb(expr):
    """Shift one parameter of the first term by 0.1."""
    t = expr.terms[0]
    f = t.func
    if isinstance(f, FoxH):
        f = replace(f, lower=(ParamRow(f.lower[0].value + 0.1, f.lower[0].step),) + f.lower[1:])
    elif isinstance(f, GenWright):
        f = replace(f, upper=(ParamRow(f.upper[0].value + 0.1, f.upper[0].step),) + f.upper[1:])
    else:
        f = replace(f, beta=f.beta + 0.1)
    return replace(expr, terms=(replace(t, func=f),) + expr.terms[1:])


@pytest.mark.acceptance(4)
@pytest.mark.parametrize("family", list(FAMILIES))
def test_solution_family(family):
    seed, draw = FAMILIES[family]
    r = np.random.default_rng(seed)
    branch = "WrightDegenerate" if family.startswith("wright") else None
    worst, controls = 0.0, []
    for i in range(20):
        spec = draw(r)
        if isinstance(spec, SystemSpec):
            sol = solve_system(spec)
            c = _constants(r, sol.n_constants)
            worst = max(worst, *(rep.max_rel for rep in residual_system(spec, sol, c)))
            if i < 3:
                bad = SystemSolution(_perturb(sol.phi), sol.psi)
                controls.append(max(rep.max_rel for rep in residual_system(spec, bad, c)))
        else:
            expr = solve_scalar(spec, branch)
            c = _constants(r, expr.n_constants)
            worst = max(worst, residual_scalar(spec, expr, c).max_rel)
            if i < 3:
                controls.append(residual_scalar(spec, _perturb(expr), c).max_rel)
    print(f"{family}: worst residual {worst:.2e}, weakest negative control {min(controls):.2e}")
    assert worst <= RESIDUAL
    assert min(controls) > RESIDUAL


# ------------------------------------------------------------ criterion 5


def _rows(desc_rows):
    return sorted(((complex(r.value).real, complex(r.value).imag, r.step) for r in desc_rows))


def _match(a, b):
    assert len(a) == len(b)
    for x, y in zip(a, b):
        assert np.allclose(x, y, rtol=0, atol=1e-12)


def _draw_m(rng, m):
    return [float(v) for v in rng.uniform(-1, 1, m)] + [float(rng.uniform(0.3, 1.5))]


@pytest.mark.acceptance(5)
@pytest.mark.parametrize("m", [1, 2])
def test_general_scalar_wright_form_reproduces_low_order(m):
    rng = np.random.default_rng(10 + m)
    for _ in range(5):
        coeffs = _draw_m(rng, m)
        alpha = float(rng.uniform(m + 0.1, m + 1.9))
        if m == 1:
            a, b = coeffs
            s = [-a / b]
        else:
            a, b, c = coeffs
            d = complex(1 / alpha**2 - 2 * b / (alpha * c) + b**2 / c**2 - 4 * a / c)
            s = [0.5 * (1 / alpha - b / c + d**0.5), 0.5 * (1 / alpha - b / c - d**0.5)]
        expr = solve_scalar(FodeSpec(alpha, coeffs))
        n = math.ceil(alpha)
        assert len(expr.terms) == n
        for k, t in enumerate(expr.terms, start=1):
            upper = [ParamRow(1 - k / alpha - si, 1) for si in s] + [ParamRow(1, 1)]
            _match(_rows(t.func.upper), _rows(upper))
            _match(_rows(t.func.lower), _rows([ParamRow(1 + alpha - k, alpha)]))
            assert (t.constant, t.rho, t.arg_scale, t.arg_power) == pytest.approx(
                (k - 1, alpha - k, coeffs[-1], alpha), abs=1e-12
            )


@pytest.mark.acceptance(5)
@pytest.mark.parametrize("m", [1, 2])
def test_general_scalar_fox_h_form_reproduces_low_order(m):
    rng = np.random.default_rng(20 + m)
    for _ in range(5):
        coeffs = _draw_m(rng, m)
        alpha = float(rng.uniform(0.15, m - 0.1))
        if m == 1:
            a, b = coeffs
            s = [-a / b]
        else:
            a, b, c = coeffs
            d = complex(1 / alpha**2 - 2 * b / (alpha * c) + b**2 / c**2 - 4 * a / c)
            s = [0.5 * (1 / alpha - b / c + d**0.5), 0.5 * (1 / alpha - b / c - d**0.5)]
        (t,) = solve_scalar(FodeSpec(alpha, coeffs)).terms
        assert (t.func.m, t.func.l) == (m, 0)
        _match(_rows(t.func.upper), _rows([ParamRow(1, alpha)]))
        _match(_rows(t.func.lower), _rows([ParamRow(-si, 1) for si in s]))
        assert (t.rho, t.arg_scale, t.arg_power) == pytest.approx((0.0, 1 / coeffs[-1], -alpha), abs=1e-12)


@pytest.mark.acceptance(5)
def test_general_system_reproduces_first_order_pair():
    rng = np.random.default_rng(30)
    for _ in range(5):
        a1, a2 = (float(v) for v in rng.uniform(-1, 1, 2))
        sg = 1.0 if rng.random() < 0.5 else -1.0
        b1, b2 = sg * float(rng.uniform(0.3, 1.2)), sg * float(rng.uniform(0.3, 1.2))
        s1, s2 = -a1 / b1, -a2 / b2
        # generalized Wright form, alpha > 1
        alpha = float(rng.uniform(1.1, 2.9))
        sol = solve_system(SystemSpec(alpha, (a1, b1), (a2, b2)))
        n = math.ceil(alpha)
        arg = 4 * b1 * b2

        def gw(k, o1, o2, low):
            up = [ParamRow(o1 - k / (2 * alpha) - s1 / 2, 1), ParamRow(o2 - k / (2 * alpha) - s2 / 2, 1), ParamRow(1, 1)]
            return up, [ParamRow(1 + low - k, 2 * alpha)]

        expected_phi, expected_psi = [], []
        for k in range(1, n + 1):
            expected_phi.append((1.0, k - 1, alpha - k, gw(k, 1.0, 0.5, alpha)))
            expected_phi.append((2 * b1, n + k - 1, 2 * alpha - k, gw(k, 1.5, 1.0, 2 * alpha)))
            expected_psi.append((2 * b2, k - 1, 2 * alpha - k, gw(k, 1.0, 1.5, 2 * alpha)))
            expected_psi.append((1.0, n + k - 1, alpha - k, gw(k, 0.5, 1.0, alpha)))
        for got, want in ((sol.phi.terms, expected_phi), (sol.psi.terms, expected_psi)):
            assert len(got) == len(want)
            for t, (coeff, const, rho, (up, low)) in zip(sorted(got, key=lambda t: t.constant), sorted(want, key=lambda w: w[1])):
                assert (t.coeff.real, t.constant, t.rho, t.arg_scale, t.arg_power) == pytest.approx(
                    (coeff, const, rho, arg, 2 * alpha), abs=1e-12
                )
                _match(_rows(t.func.upper), _rows(up))
                _match(_rows(t.func.lower), _rows(low))
        # Fox H form, alpha < 1
        alpha = float(rng.uniform(0.15, 0.9))
        sol = solve_system(SystemSpec(alpha, (a1, b1), (a2, b2)))
        (tp,), (tq,) = sol.phi.terms, sol.psi.terms
        for t in (tp, tq):
            assert (t.rho, t.arg_scale, t.arg_power) == pytest.approx((0.0, 1 / arg, -2 * alpha), abs=1e-12)
            _match(_rows(t.func.upper), _rows([ParamRow(1, 2 * alpha)]))
        assert tp.coeff.real == pytest.approx(math.copysign(1.0, b1), abs=1e-12)
        assert tq.coeff.real == pytest.approx(math.sqrt(b2 / b1), abs=1e-12)
        _match(_rows(tp.func.lower), _rows([ParamRow(0.5 - s1 / 2, 1), ParamRow(-s2 / 2, 1)]))
        _match(_rows(tq.func.lower), _rows([ParamRow(-s1 / 2, 1), ParamRow(0.5 - s2 / 2, 1)]))


# ------------------------------------------------------------ criterion 6


@pytest.mark.acceptance(6)
def test_wright_form_equals_fox_h_form():
    rng = np.random.default_rng(7)
    for _ in range(10):
        alpha, b, c = float(rng.uniform(0.1, 1.95)), float(rng.uniform(-1, 1)), float(rng.uniform(0.3, 4))
        a = _quarter_a(alpha, b, c)
        wright_form = solve_degenerate_wright(alpha, a, b, c)
        h_form = solve_scalar(FodeSpec(alpha, (a, b, c)), "FoxH")
        s1 = max(roots(build_scalar(FodeSpec(alpha, (a, b, c)))), key=lambda s: s.real).real
        lhs = math.sqrt(math.pi) * c**s1 * evaluate(wright_form, Z)
        rhs = evaluate(h_form, Z)
        assert _rel(lhs, rhs) <= 1e-8


# ------------------------------------------------------------ criterion 7

PDES = {
    "scalar, Fox H": EvolutionPde(0.8, (0.3, 0.2, 1.1), b=0.5, p=0.0, a=0.7),
    "scalar, generalized Wright": EvolutionPde(2.4, (0.3, -0.2, 0.9), b=0.2, p=1.0, a=0.4),
    "scalar, p=2": EvolutionPde(0.8, (0.3, 0.2, 1.1), b=0.5, p=2.0, a=0.7),
    "system case 1, Fox H": SystemPde(0.4, a1=1.1, a2=0.8, b1=0.2, b2=0.3, m1=2.0, m2=1.0, c=0.5, d=0.2),
    "system case 1, generalized Wright": SystemPde(1.7, a1=0.9, a2=0.6, b1=-0.1, b2=0.3, m1=2.0, m2=1.0, c=0.3),
    "system case 2": SystemPde(0.7, a1=1.1, a2=0.8, b1=0.2, b2=0.3, m1=1.0, m2=1.0, c=0.5, d=0.2),
}


@pytest.mark.acceptance(7)
@pytest.mark.parametrize("name", list(PDES))
def test_pde_residual(name):
    pde = PDES[name]
    if isinstance(pde, EvolutionPde):
        reports = [residual_pde_scalar(pde)]
    else:
        reports = list(residual_pde_system(pde))
    for rep in reports:
        assert len(rep.points) == 9
        assert rep.max_rel <= 1e-4


# ------------------------------------------------------------ criterion 8

ALL_FIXTURES = sorted(p.name for p in FIXTURES.glob("*.json"))


def _cli(*argv):
    out = io.StringIO()
    return run(list(argv), out=out), out.getvalue()


@pytest.mark.acceptance(8)
@pytest.mark.parametrize("fixture", ALL_FIXTURES)
def test_verify_fixture(fixture):
    code, text = _cli("verify", str(FIXTURES / fixture))
    assert code == 0 and json.loads(text)["passed"]


@pytest.mark.acceptance(8)
@pytest.mark.parametrize("fixture", ALL_FIXTURES)
def test_solve_eval_round_trip(fixture, tmp_path):
    saved = str(tmp_path / "solution.json")
    assert _cli("solve", str(FIXTURES / fixture), "--json-out", saved)[0] == 0
    code1, direct = _cli("eval", str(FIXTURES / fixture))
    code2, again = _cli("eval", saved, *(["--grid", "1,2,4;0.5,1,2"] if "pde" in fixture else []))
    assert code1 == code2 == 0
    a = np.loadtxt(io.StringIO(direct), delimiter=",", skiprows=1, ndmin=2)
    b = np.loadtxt(io.StringIO(again), delimiter=",", skiprows=1, ndmin=2)
    assert direct.splitlines()[0] == again.splitlines()[0]
    assert np.allclose(a, b, rtol=1e-12, atol=0)


@pytest.mark.acceptance(8)
def test_exit_codes(tmp_path):
    def write(doc):
        path = tmp_path / f"p{len(list(tmp_path.iterdir()))}.json"
        path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        return str(path)

    assert _cli("solve", write("{oops"))[0] == 1
    assert _cli("solve", write({"kind": "scalar_fode", "alpha": 1.0}))[0] == 1
    assert _cli("solve", write({"kind": "scalar_fode", "alpha": 2.0, "coeffs": [1.0, 0.5, 1.0]}))[0] == 2
    assert _cli("solve", write({"kind": "system_fode", "alpha": 1.0, "a_coeffs": [1, 1], "b_coeffs": [1, 1]}))[0] == 2
    assert _cli("verify", str(FIXTURES / "mittag_leffler_scalar.json"), "--tol", "1e-15")[0] == 3
    assert _cli("eval", write({"kind": "scalar_fode", "alpha": 0.1, "coeffs": [60.0]}), "--z", "1")[0] == 4
