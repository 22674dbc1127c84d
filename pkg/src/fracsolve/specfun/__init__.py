"""Special functions: Mittag-Leffler, Wright, generalized Wright and Fox H."""

from __future__ import annotations

from .descriptors import (
    FoxH,
    GenWright,
    MittagLeffler,
    ParamRow,
    Wright,
    descriptor_from_dict,
    descriptor_to_dict,
)
from .foxh import fox_h, mellin_barnes
from .gamma import gamma, loggamma, rgamma
from .identities import (
    absorb_power,
    differentiate,
    gen_wright_as_fox_h,
    invert_argument,
    mittag_leffler_as_gen_wright,
    scale_steps,
    wright_as_gen_wright,
)
from .series import EvalDiagnostics, gen_wright, mittag_leffler, power_series, wright

__all__ = [
    "EvalDiagnostics",
    "FoxH",
    "GenWright",
    "MittagLeffler",
    "ParamRow",
    "Wright",
    "absorb_power",
    "descriptor_from_dict",
    "descriptor_to_dict",
    "differentiate",
    "fox_h",
    "gamma",
    "gen_wright",
    "gen_wright_as_fox_h",
    "invert_argument",
    "loggamma",
    "mellin_barnes",
    "mittag_leffler",
    "mittag_leffler_as_gen_wright",
    "power_series",
    "rgamma",
    "scale_steps",
    "wright",
    "wright_as_gen_wright",
]
