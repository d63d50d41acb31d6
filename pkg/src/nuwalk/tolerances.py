"""Numerical tolerances shared across the package."""

import os

UNITARITY = 1e-12
TRACE = 1e-12
EIGEN = 1e-10
PSD = 1e-10
APPROX = 1e-2
NORMALIZATION = 1e-10
PRUNE = 1e-300


def cptp_tolerance() -> float:
    """Completeness tolerance, overridable with ``OSC_TOL_CPTP``."""
    return float(os.environ.get("OSC_TOL_CPTP", 1e-12))
