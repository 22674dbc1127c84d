from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import mpmath as mp
import numpy as np
import pytest

REPO = Path(__file__).resolve().parents[1]
FIXTURES = REPO / "fixtures"

# ---------------------------------------------------------------- oracles
# All oracles below are independent of the package: plain mpmath sums at
# 50 (or more) significant digits.


def mp_gen_wright(upper, lower, x, dps=50):
    """sum_k prod Gamma(A + a k) / prod Gamma(B + b k) x^k / k!."""
    with mp.workdps(dps):
        x = mp.mpmathify(x)
        total = mp.mpf(0)
        small = 0
        k = 0
        while small < 10:
            num = mp.fprod(mp.gamma(mp.mpmathify(A) + mp.mpf(a) * k) for A, a in upper)
            den = mp.fprod(mp.rgamma(mp.mpmathify(B) + mp.mpf(b) * k) for B, b in lower)
            term = num * den * x**k / mp.factorial(k)
            total += term
            small = small + 1 if abs(term) <= mp.mpf(10) ** (-dps + 5) * abs(total) else 0
            k += 1
            if k > 20000:
                raise RuntimeError("oracle series did not converge")
        return complex(total)


def mp_mittag_leffler(alpha, beta, x, dps=50):
    return mp_gen_wright([(1, 1)], [(beta, alpha)], x, dps)


def mp_wright(x, alpha, beta, dps=50):
    return mp_gen_wright([], [(beta, alpha)], x, dps)


def mp_fox_h_residues(x, alpha, bs, dps=50):
    """H^{m,0}_{1,m}[x | (1, alpha); (b_1,1)..(b_m,1)] as a sum over the
    right-hand poles of prod Gamma(b_j - s) (simple poles assumed)."""
    with mp.workdps(dps):
        x = mp.mpmathify(x)
        bs = [mp.mpmathify(b) for b in bs]
        total = mp.mpf(0)
        for i, bi in enumerate(bs):
            small = 0
            k = 0
            while small < 10:
                s = bi + k
                term = (-1) ** k / mp.factorial(k) * x**s * mp.rgamma(1 - alpha * s)
                for j, bj in enumerate(bs):
                    if j != i:
                        term *= mp.gamma(bj - s)
                total += term
                small = small + 1 if abs(term) <= mp.mpf(10) ** (-dps + 5) * abs(total) else 0
                k += 1
                if k > 5000:
                    raise RuntimeError("residue sum did not converge")
        return complex(total)


# ------------------------------------------------------------- acceptance log

_OUTCOMES: dict[int, list[tuple[str, str]]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n): test belongs to acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _OUTCOMES[marker.args[0]].append((item.name, report.outcome))


_TITLES = {
    1: "special-function conformance",
    2: "bridge and H-function identities",
    3: "Riemann-Liouville oracle",
    4: "solution residuals and negative controls",
    5: "subsumption of the low-order formulas",
    6: "Wright-form / H-form equivalence",
    7: "PDE reductions",
    8: "command line contract",
}


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_TITLES):
        results = _OUTCOMES.get(n)
        if not results:
            terminalreporter.write_line(f"criterion {n} ({_TITLES[n]}): NOT RUN")
            continue
        failed = [name for name, outcome in results if outcome != "passed"]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {n} ({_TITLES[n]}): {status} [{len(results) - len(failed)}/{len(results)} checks]"
        if failed:
            line += " failing: " + ", ".join(failed)
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
