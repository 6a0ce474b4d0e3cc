"""Generalized Metcalfe valuation: log-log regression of market cap on users.

Fits ln(cap) = alpha + beta ln(users) by OLS, optionally with the exponent
pinned, and derives support-line predictions and the market-to-fundamental
ratio from any (alpha, beta) parameterization. Reported standard errors are
conventional OLS errors and are optimistic under the persistent residual
autocorrelation typical of these series; no HAC correction is applied.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import (
    DegenerateRegressorError,
    EmptyOverlapError,
    InsufficientDataError,
    MismatchedSamplesError,
    NotNestedError,
    WindowTooSmallError,
)
from .timeseries import TimeSeries, align


@dataclass(frozen=True)
class SupportLine:
    """Fixed (alpha0, beta0) fundamental-value line: cap = e^alpha0 * users^beta0."""

    alpha0: float
    beta0: float

    def __post_init__(self):
        if self.beta0 <= 0:
            raise ValueError("beta0 must be positive")

    @property
    def alpha(self) -> float:
        return self.alpha0

    @property
    def beta(self) -> float:
        return self.beta0


#: Named support-line parameterizations shipped with the package.
SUPPORT_LINE_PRESETS = {
    "support": SupportLine(0.0, 1.75),
    "metcalfe-support": SupportLine(-3.0, 2.0),
}


@dataclass(frozen=True)
class MetcalfeFit:
    """OLS fit of ln(cap) on ln(users), with conventional standard errors."""

    alpha: float
    beta: float
    se_alpha: float
    se_beta: float
    r_squared: float
    residuals: np.ndarray
    n: int
    rss: float
    tss: float
    free_params: int

    def __post_init__(self):
        res = np.asarray(self.residuals, dtype=np.float64).copy()
        res.setflags(write=False)
        object.__setattr__(self, "residuals", res)
        if self.free_params == 2 and abs(res.sum()) > 1e-9 * max(1.0, np.abs(res).max()) * self.n:
            raise ValueError("OLS residuals must sum to zero")
        if self.tss > 0 and abs(self.r_squared - (1.0 - self.rss / self.tss)) > 1e-9:
            raise ValueError("r_squared inconsistent with RSS/TSS")

    def to_dict(self, window: float | None = None) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "se_alpha": self.se_alpha,
            "se_beta": self.se_beta,
            "r_squared": self.r_squared,
            "n": self.n,
            "window": window,
        }


@dataclass(frozen=True)
class MmvSeries:
    """Market value divided by the support-line fundamental value."""

    series: TimeSeries
    support: SupportLine


@dataclass(frozen=True)
class RollingBeta:
    """Per-window exponent estimates from a causal moving window.

    Plain arrays rather than a TimeSeries: an exponent estimate may be
    non-positive on noisy windows.
    """

    timestamps: np.ndarray
    beta: np.ndarray
    se_beta: np.ndarray

    def __len__(self) -> int:
        return len(self.timestamps)

    def fraction_below(self, threshold: float, level: float = 0.05, two_sided: bool = False) -> float:
        """Fraction of windows whose beta is significantly below threshold.

        One-sided by default; pass two_sided=True to halve the tail
        probability instead.
        """
        crit = stats.norm.ppf(1.0 - (level / 2 if two_sided else level))
        return float(np.mean((self.beta + crit * self.se_beta) < threshold))


def _aligned_logs(users: TimeSeries, cap: TimeSeries) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ts, u, c = align(users, cap)
    return ts, np.log(u), np.log(c)


def fit_generalized_metcalfe(users: TimeSeries, cap: TimeSeries) -> MetcalfeFit:
    """OLS regression of ln(cap) on ln(users) over their common timestamps."""
    _, lu, lc = _aligned_logs(users, cap)
    return _ols_fit(lu, lc)


def _ols_fit(lu: np.ndarray, lc: np.ndarray) -> MetcalfeFit:
    n = len(lu)
    if n < 3:
        raise InsufficientDataError(f"need at least 3 aligned observations, got {n}")
    mx, my = lu.mean(), lc.mean()
    dx, dy = lu - mx, lc - my
    sxx = float(dx @ dx)
    if sxx <= 0:
        raise DegenerateRegressorError("ln(users) has zero variance")
    beta = float(dx @ dy) / sxx
    alpha = my - beta * mx
    residuals = lc - (alpha + beta * lu)
    rss = float(residuals @ residuals)
    tss = float(dy @ dy)
    sigma2 = rss / (n - 2)
    se_beta = np.sqrt(sigma2 / sxx)
    se_alpha = np.sqrt(sigma2 * (1.0 / n + mx * mx / sxx))
    return MetcalfeFit(
        alpha=float(alpha),
        beta=beta,
        se_alpha=float(se_alpha),
        se_beta=float(se_beta),
        r_squared=1.0 - rss / tss if tss > 0 else 1.0,
        residuals=residuals,
        n=n,
        rss=rss,
        tss=tss,
        free_params=2,
    )


def fit_constrained_metcalfe(users: TimeSeries, cap: TimeSeries, beta_fixed: float) -> MetcalfeFit:
    """Intercept-only OLS of ln(cap) - beta_fixed * ln(users)."""
    _, lu, lc = _aligned_logs(users, cap)
    n = len(lu)
    if n < 2:
        raise InsufficientDataError(f"need at least 2 aligned observations, got {n}")
    z = lc - beta_fixed * lu
    alpha = float(z.mean())
    residuals = z - alpha
    rss = float(residuals @ residuals)
    tss = float(((lc - lc.mean()) ** 2).sum())
    se_alpha = np.sqrt(rss / (n - 1) / n)
    return MetcalfeFit(
        alpha=alpha,
        beta=float(beta_fixed),
        se_alpha=float(se_alpha),
        se_beta=0.0,
        r_squared=1.0 - rss / tss if tss > 0 else 1.0,
        residuals=residuals,
        n=n,
        rss=rss,
        tss=tss,
        free_params=1,
    )


def compare_nested_ftest(restricted: MetcalfeFit, full: MetcalfeFit) -> float:
    """ANOVA F-test of a restricted fit against the full fit; returns the p-value."""
    if restricted.free_params >= full.free_params:
        raise NotNestedError("restricted fit must have strictly fewer free parameters")
    if restricted.n != full.n or abs(restricted.tss - full.tss) > 1e-9 * max(1.0, full.tss):
        raise MismatchedSamplesError("fits were not computed on the same sample")
    ddf = full.free_params - restricted.free_params
    df_resid = full.n - full.free_params
    f_stat = max((restricted.rss - full.rss) / ddf, 0.0) / (full.rss / df_resid)
    return float(stats.f.sf(f_stat, ddf, df_resid))


def rolling_beta(users: TimeSeries, cap: TimeSeries, window: float, min_obs: int = 10) -> RollingBeta:
    """Exponent from the generalized regression on a causal window (t - window, t].

    Evaluated at every common timestamp with at least min_obs window
    observations. Per-window moments come from prefix sums of the centered
    logs, which is exact OLS and O(n).
    """
    ts, lu, lc = _aligned_logs(users, cap)
    n = len(ts)
    lu = lu - lu.mean()
    lc = lc - lc.mean()
    cs = {
        "x": np.concatenate(([0.0], np.cumsum(lu))),
        "y": np.concatenate(([0.0], np.cumsum(lc))),
        "xx": np.concatenate(([0.0], np.cumsum(lu * lu))),
        "yy": np.concatenate(([0.0], np.cumsum(lc * lc))),
        "xy": np.concatenate(([0.0], np.cumsum(lu * lc))),
    }
    # window (t - window, t]: first index strictly greater than t - window
    starts = np.searchsorted(ts, ts - window, side="right")
    ends = np.arange(1, n + 1)
    counts = ends - starts
    out_t, out_b, out_se = [], [], []
    for i in range(n):
        k = counts[i]
        if k < min_obs:
            continue
        lo, hi = starts[i], ends[i]
        sx = cs["x"][hi] - cs["x"][lo]
        sy = cs["y"][hi] - cs["y"][lo]
        sxx = cs["xx"][hi] - cs["xx"][lo]
        syy = cs["yy"][hi] - cs["yy"][lo]
        sxy = cs["xy"][hi] - cs["xy"][lo]
        vxx = sxx - sx * sx / k
        if vxx <= 1e-12 * max(sxx, 1.0):
            continue
        vxy = sxy - sx * sy / k
        vyy = syy - sy * sy / k
        beta = vxy / vxx
        rss = max(vyy - beta * vxy, 0.0)
        se = np.sqrt(rss / (k - 2) / vxx) if k > 2 else np.nan
        out_t.append(ts[i])
        out_b.append(beta)
        out_se.append(se)
    if len(out_t) < 2:
        raise WindowTooSmallError(
            f"no two evaluation points have >= {min_obs} observations in a {window:.0f}s window"
        )
    return RollingBeta(
        beta=TimeSeries(np.array(out_t), np.array(out_b)),
        se_beta=TimeSeries(np.array(out_t), np.array(out_se)),
    )


def predict_cap(line_or_fit: SupportLine | MetcalfeFit, users: TimeSeries) -> TimeSeries:
    """Pointwise e^alpha * users^beta for a support line or a fitted regression."""
    alpha, beta = line_or_fit.alpha, line_or_fit.beta
    return TimeSeries(users.timestamps, np.exp(alpha + beta * np.log(users.values)))


def mmv_ratio(cap: TimeSeries, smoothed_users: TimeSeries, support: SupportLine) -> MmvSeries:
    """Market cap divided by the support-line prediction, on common timestamps."""
    ts, c, u = align(cap, smoothed_users)
    if len(ts) < 2:
        raise EmptyOverlapError("cap and user series share fewer than 2 timestamps")
    ratio = c / np.exp(support.alpha0 + support.beta0 * np.log(u))
    return MmvSeries(series=TimeSeries(ts, ratio), support=support)
