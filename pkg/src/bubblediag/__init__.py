"""Bubble diagnostics for networked assets.

Combines a generalized Metcalfe fundamental-value regression with LPPLS
critical-time calibration: GLS fitting under AR(1) errors, profile-likelihood
confidence intervals for the critical time, and a bootstrap-validated
fitting-window scan.
"""

from .timeseries import TimeSeries, SmoothingSpec, load_series, save_series, market_cap, resample, smooth

__version__ = "0.1.0"

__all__ = [
    "TimeSeries",
    "SmoothingSpec",
    "load_series",
    "save_series",
    "market_cap",
    "resample",
    "smooth",
    "__version__",
]
