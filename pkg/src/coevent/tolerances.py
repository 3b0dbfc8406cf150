"""Numerical tolerances shared across modules.

All structural checks (unitarity, projector algebra, completeness) use
EPS_UNIT.  Decoherence-functional axiom residuals use EPS_DF.  An event is
a zero set when its measure is at most EPS_ZERO; measures inside
(EPS_ZERO, BORDERLINE_MAX] are reported as borderline instead of being
silently classified either way.
"""

from __future__ import annotations

EPS_UNIT = 1e-9
EPS_DF = 1e-9
EPS_ZERO = 1e-9
BORDERLINE_MAX = 1e-7


def tolerance_summary() -> dict:
    """Tolerances in report form, keyed by the names reports use."""
    return {
        "eps_unit": EPS_UNIT,
        "eps_df": EPS_DF,
        "eps_zero": EPS_ZERO,
        "borderline_band": [EPS_ZERO, BORDERLINE_MAX],
    }
