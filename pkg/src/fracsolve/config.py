"""Library-wide numerical tolerances.

``FRACSOLVE_TOL`` in the environment overrides the residual tolerance used by
:mod:`fracsolve.verify` and the command line.
"""

from __future__ import annotations

import os

#: truncation tolerance for power series (relative to the partial sum)
SERIES_TOL = 1e-15
#: tolerance for the Mellin-Barnes contour quadrature (relative to the L1 norm
#: of the integrand)
CONTOUR_TOL = 1e-13
#: error target of the numerical Riemann-Liouville derivative
RL_TOL = 1e-6
#: residual tolerance for solution verification
RESIDUAL_TOL = 1e-5
#: smallest sample point accepted by the verifier
MIN_SAMPLE_POINT = 0.25
#: integer / pole detection
INT_TOL = 1e-9

SERIES_MAX_TERMS = 100_000


def default_residual_tol() -> float:
    value = os.environ.get("FRACSOLVE_TOL")
    if value is None or not value.strip():
        return RESIDUAL_TOL
    tol = float(value)
    if not tol > 0:
        raise ValueError(f"FRACSOLVE_TOL must be positive, got {value!r}")
    return tol
