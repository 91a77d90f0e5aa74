"""Radiative shock toolkit: profiles, regularity thresholds, verification."""

from ._core import (
    admissibility,
    profile,
    regularity,
    shock_speed,
    verify_traveling_wave,
)

__all__ = [
    "admissibility",
    "profile",
    "regularity",
    "shock_speed",
    "verify_traveling_wave",
]
