"""Run-wide numerical defaults."""

import os

DEFAULT_ORDER = 6
MAX_ORDER = 16

#: coefficient comparison tolerance, relative to the largest input magnitude
DEFAULT_TOL = 1e-9
TOL_ENV = "FOCUSJET_TOL"

#: below this |b/a| a double-pinched gluing map is on the non-normalizable stratum
MU_ZERO_TOL = 1e-6

#: numerical rank threshold, relative to the largest singular value
RANK_TOL = 1e-8


def tolerance():
    """Comparison tolerance, overridable through ``FOCUSJET_TOL``."""
    raw = os.environ.get(TOL_ENV)
    if not raw:
        return DEFAULT_TOL
    value = float(raw)
    if not value > 0:
        raise ValueError(f"{TOL_ENV} must be positive, got {raw!r}")
    return value
