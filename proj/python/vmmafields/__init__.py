"""Volatility-modulated mixed moving-average random fields.

Thin re-export of the compiled extension; the config schema matches the
``vmma`` command-line tool, so scripted runs and shell runs stay
interchangeable.
"""

from vmmafields._core import (
    ConfigError,
    Experiment,
    FieldSample,
    GridAxis,
    GridSpec,
    design_kernel,
    from_mss,
    rho_translation_invariant,
    selfsim_spectral,
    stat_incr_covariance,
    to_mss,
)

__all__ = [
    "ConfigError",
    "Experiment",
    "FieldSample",
    "GridAxis",
    "GridSpec",
    "design_kernel",
    "from_mss",
    "rho_translation_invariant",
    "selfsim_spectral",
    "stat_incr_covariance",
    "to_mss",
]
