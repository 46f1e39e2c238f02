"""Closed-form finite-window false-alarm and detection probabilities.

The detector flags at the first sample whose statistic exceeds the threshold.
Because the clamped statistic equals the maximum of the partial LLR sums
started at each possible post-reset sample, the pre-clamp value at sample m
decomposes into m "last reset at r" possibilities, each a chi-square event:

    Pr{ sum_{j=r}^{m} l(y_j) <= lam } = P(k/2, zeta(lam, k) / (2 v)),
    k = m - r + 1,   zeta(lam, k) = (lam - k*c2) / c1,

with v the sample variance of the governing hypothesis.  The per-sample
first-crossing probability multiplies the crossing factor at m by the
no-crossing factors of every earlier sample, treating samples as independent.

Two compositions of the decomposition are provided:

* normalized (default): the m possibilities are weighted equally, so the
  per-sample factor is a proper CDF in [0, 1] and totals span the full ROC.
* raw: the possibilities are summed unweighted, which can exceed 1; leading
  factors are then floored at 0 and product factors capped at 1.  Kept as the
  verbatim transcription of the derivation, but it degenerates at small
  thresholds (see f_z).

Both are approximations; the Monte Carlo harness measures their true gap.
The EXIT case mirrors the formulas: the LLR negates, so partial-sum CDFs
become survival functions with the variance roles swapped.  That mirror is
validated only against Monte Carlo.
"""

import csv
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .cusum import OutcomeKind
from .signal_model import (
    LlrParams,
    SensingCase,
    SignalModel,
    llr_params,
    post_change_variance,
    pre_change_variance,
)
from .specfun import reg_lower_gamma


class NoBracketError(ValueError):
    """Target metric value is outside the achievable range on the bracket."""

    def __init__(self, message: str, achievable: tuple[float, float]):
        super().__init__(message)
        self.achievable = achievable


class NoSolutionError(ValueError):
    """Bisection converged in lambda without reaching the target tolerance."""

    def __init__(self, message: str, closest_lambda: float, closest_value: float):
        super().__init__(message)
        self.closest_lambda = closest_lambda
        self.closest_value = closest_value


class NonMonotoneWarning(UserWarning):
    """Grid pre-scan saw the metric increase with lambda somewhere."""


class RocSource(Enum):
    ANALYTIC = "analytic"
    MONTE_CARLO = "monte-carlo"


@dataclass(frozen=True)
class RocQuery:
    """One evaluation scenario: model, window, change point, horizon, case.

    eval_horizon is the last sample counted toward the detection total; the
    full-window variant is eval_horizon = window_len.
    """

    model: SignalModel
    window_len: int
    change_point: int
    eval_horizon: int
    case: SensingCase = SensingCase.ENTRANCE

    def __post_init__(self):
        if not 1 <= self.change_point <= self.eval_horizon <= self.window_len:
            raise ValueError(
                "need 1 <= change_point <= eval_horizon <= window_len, got "
                f"tau={self.change_point}, L={self.eval_horizon}, N={self.window_len}"
            )


@dataclass(frozen=True)
class RocPoint:
    threshold: float
    p_false: float
    p_detect: float
    source: RocSource


@dataclass(frozen=True)
class RocCurve:
    query: RocQuery
    points: tuple[RocPoint, ...]

    def __post_init__(self):
        thresholds = [p.threshold for p in self.points]
        if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
            raise ValueError("thresholds must be strictly increasing")

    def thresholds(self) -> np.ndarray:
        return np.array([p.threshold for p in self.points])

    def write_csv(self, out) -> None:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["threshold", "p_false", "p_detect", "source"])
        for p in self.points:
            writer.writerow(
                [repr(p.threshold), repr(p.p_false), repr(p.p_detect), p.source.value]
            )


def default_thresholds(count: int = 64, low: float = 0.1, high: float = 50.0) -> np.ndarray:
    """Default sweep grid: log-spaced thresholds covering floor to saturation."""
    if count < 1 or not 0.0 < low < high:
        raise ValueError("need count >= 1 and 0 < low < high")
    return np.geomspace(low, high, count)


def zeta(lam: float, k: int, params: LlrParams) -> float:
    """Chi-square argument scale: (lam - k*c2) / c1 for k summed LLR terms."""
    if not lam > 0.0:
        raise ValueError(f"threshold must be > 0, got {lam!r}")
    if k < 1:
        raise ValueError(f"term count must be >= 1, got {k}")
    return (lam - k * params.c2) / params.c1


def _zeta_exit(lam: float, k: int, params: LlrParams) -> float:
    """EXIT-case mirror of zeta, clamped at zero.

    With the LLR negated, {sum <= lam} flips to {sum of squares >= zeta'},
    zeta' = -(lam + k*c2)/c1; a negative zeta' means the event is certain.
    """
    return max(0.0, -(lam + k * params.c2) / params.c1)


def _partial_sum_cdf_k(
    lam: float, k: int, variance: float, params: LlrParams, case: SensingCase
) -> float:
    """Pr{sum of k per-sample LLRs <= lam} under sample variance `variance`."""
    if case is SensingCase.ENTRANCE:
        return reg_lower_gamma(k / 2.0, zeta(lam, k, params) / (2.0 * variance))
    return 1.0 - reg_lower_gamma(k / 2.0, _zeta_exit(lam, k, params) / (2.0 * variance))


def cdf_partial_sum(
    lam: float,
    first: int,
    last: int,
    variance: float,
    params: LlrParams,
    case: SensingCase = SensingCase.ENTRANCE,
) -> float:
    """CDF at lam of the LLR sum over samples first..last (k = last-first+1)."""
    if first < 1 or last < first:
        raise ValueError(f"need 1 <= first <= last, got first={first}, last={last}")
    return _partial_sum_cdf_k(lam, last - first + 1, variance, params, case)


def f_z(
    lam: float,
    m: int,
    start: int,
    variance: float,
    params: LlrParams,
    case: SensingCase = SensingCase.ENTRANCE,
) -> float:
    """Unweighted reset-possibility decomposition of the sample-m statistic CDF.

    Sums cdf_partial_sum(lam, r, m, ...) for r = start..m.  The possibilities
    overlap, so the raw sum may exceed 1 (it tends to m - start + 1 as lam
    grows); consumers normalize or clamp.
    """
    if start < 1 or m < start:
        raise ValueError(f"need 1 <= start <= m, got start={start}, m={m}")
    return sum(
        _partial_sum_cdf_k(lam, k, variance, params, case)
        for k in range(1, m - start + 2)
    )


def _possibility_cdfs(
    lam: float, count: int, variance: float, params: LlrParams, case: SensingCase
) -> np.ndarray:
    """Partial-sum CDFs for k = 1..count summed LLR terms."""
    return np.array(
        [_partial_sum_cdf_k(lam, k, variance, params, case) for k in range(1, count + 1)]
    )


def _first_crossing_probs(terms: np.ndarray, normalized: bool) -> np.ndarray:
    """Per-sample first-crossing probabilities from possibility CDFs.

    Entry m-1 is (1 - F_m)+ * prod_{j<m} min(F_j, 1) where F_m aggregates the
    first m possibility CDFs: their mean when normalized, raw sum otherwise.
    """
    if len(terms) == 0:
        return np.empty(0)
    f = np.cumsum(terms)
    if normalized:
        f = f / np.arange(1, len(terms) + 1)
    leading = np.maximum(1.0 - f, 0.0)
    capped = np.minimum(f, 1.0)
    no_cross = np.concatenate([[1.0], np.cumprod(capped[:-1])])
    return leading * no_cross


def p_false_at(
    lam: float,
    sample: int,
    params: LlrParams,
    noise_variance: float,
    case: SensingCase = SensingCase.ENTRANCE,
    normalized: bool = True,
) -> float:
    """First-false-alarm probability at a pre-change sample (1-based).

    `noise_variance` is the pre-change sample variance of the case.  At
    sample 1 the value is the exact single-sample tail, no approximation.
    """
    if sample < 1:
        raise ValueError(f"sample index must be >= 1, got {sample}")
    terms = _possibility_cdfs(lam, sample, noise_variance, params, case)
    return float(_first_crossing_probs(terms, normalized)[-1])


def p_false_total(
    lam: float,
    query: RocQuery,
    strict_paper: bool = False,
    normalized: bool = True,
) -> float:
    """Total false-alarm probability over the pre-change window, in [0, 1].

    Default sums first-crossing probabilities over every pre-change sample
    1..tau-1.  strict_paper shifts the covered range to samples 2..tau (the
    verbatim summation range of the derivation), which skips the exact
    first-sample term.
    """
    tau = query.change_point
    variance = pre_change_variance(query.model, query.case)
    params = llr_params(query.model)
    if strict_paper:
        terms = _possibility_cdfs(lam, tau, variance, params, query.case)
        per_sample = _first_crossing_probs(terms, normalized)[1:]
    else:
        terms = _possibility_cdfs(lam, tau - 1, variance, params, query.case)
        per_sample = _first_crossing_probs(terms, normalized)
    return float(min(1.0, per_sample.sum()))


def p_detect_at(
    lam: float, sample: int, query: RocQuery, normalized: bool = True
) -> float:
    """First-detection probability at a post-change sample (1-based).

    The decomposition starts at the change point: sample m contributes
    m - tau + 1 possibilities under the post-change variance.
    """
    tau = query.change_point
    if not tau <= sample <= query.window_len:
        raise ValueError(
            f"sample must lie in [{tau}, {query.window_len}], got {sample}"
        )
    variance = post_change_variance(query.model, query.case)
    params = llr_params(query.model)
    terms = _possibility_cdfs(lam, sample - tau + 1, variance, params, query.case)
    return float(_first_crossing_probs(terms, normalized)[-1])


def p_detect_total(lam: float, query: RocQuery, normalized: bool = True) -> float:
    """Total detection probability over samples tau..eval_horizon, in [0, 1]."""
    tau = query.change_point
    count = query.eval_horizon - tau + 1
    variance = post_change_variance(query.model, query.case)
    params = llr_params(query.model)
    terms = _possibility_cdfs(lam, count, variance, params, query.case)
    return float(min(1.0, _first_crossing_probs(terms, normalized).sum()))


def roc_sweep(
    query: RocQuery,
    thresholds: Sequence[float],
    strict_paper: bool = False,
    normalized: bool = True,
) -> RocCurve:
    """Analytic ROC points over a strictly increasing threshold grid."""
    thresholds = np.asarray(thresholds, dtype=float)
    if thresholds.ndim != 1 or len(thresholds) == 0:
        raise ValueError("thresholds must be a nonempty 1-d sequence")
    if np.any(thresholds <= 0.0) or np.any(np.diff(thresholds) <= 0.0):
        raise ValueError("thresholds must be positive and strictly increasing")
    points = tuple(
        RocPoint(
            threshold=float(lam),
            p_false=p_false_total(float(lam), query, strict_paper, normalized),
            p_detect=p_detect_total(float(lam), query, normalized),
            source=RocSource.ANALYTIC,
        )
        for lam in thresholds
    )
    return RocCurve(query=query, points=points)


def solve_threshold(
    query: RocQuery,
    target: float,
    which: OutcomeKind,
    tol: float = 1e-3,
    bracket: tuple[float, float] = (1e-3, 200.0),
    grid_points: int = 129,
    strict_paper: bool = False,
    normalized: bool = True,
) -> float:
    """Threshold whose analytic metric matches `target` within `tol`.

    `which` selects the metric: OutcomeKind.FALSE_ALARM for the total
    false-alarm probability, OutcomeKind.DETECTION for the total detection
    probability.  A log-grid pre-scan over `bracket` locates the first
    straddling interval from the small-lambda side (so flat stretches resolve
    to the smallest achieving lambda) and bisection refines it.  Raises
    NoBracketError when the target is outside the achievable range, and
    NoSolutionError (carrying the closest point) when the metric cannot be
    pinned within tol; emits NonMonotoneWarning if the pre-scan sees the
    clamped metric increase with lambda anywhere.
    """
    if not 0.0 < target < 1.0:
        raise ValueError(f"target must be in (0, 1), got {target!r}")
    if not tol > 0.0:
        raise ValueError(f"tol must be > 0, got {tol!r}")
    if which is OutcomeKind.FALSE_ALARM:
        def metric(lam):
            return p_false_total(lam, query, strict_paper, normalized)
    elif which is OutcomeKind.DETECTION:
        def metric(lam):
            return p_detect_total(lam, query, normalized)
    else:
        raise ValueError(f"which must be FALSE_ALARM or DETECTION, got {which!r}")

    lo, hi = bracket
    if not 0.0 < lo < hi:
        raise ValueError(f"bracket must satisfy 0 < lo < hi, got {bracket!r}")
    grid = np.geomspace(lo, hi, grid_points)
    values = np.array([metric(lam) for lam in grid])
    if np.any(np.diff(values) > 1e-12):
        warnings.warn(
            "metric is not monotone over the scan grid; returning the smallest "
            "achieving threshold",
            NonMonotoneWarning,
            stacklevel=2,
        )
    v_min, v_max = float(values.min()), float(values.max())
    if not v_min <= target <= v_max:
        raise NoBracketError(
            f"target {target} outside achievable range [{v_min:.6g}, {v_max:.6g}] "
            f"on bracket {bracket}",
            achievable=(v_min, v_max),
        )

    span = None
    for i in range(len(grid) - 1):
        if (values[i] - target) * (values[i + 1] - target) <= 0.0:
            span = (grid[i], grid[i + 1], values[i], values[i + 1])
            break
    if span is None:  # pragma: no cover - excluded by the range check above
        raise NoBracketError(
            f"no straddling interval for target {target}", achievable=(v_min, v_max)
        )

    a, b, fa, _ = span
    for _ in range(200):
        mid = math.sqrt(a * b)
        fm = metric(mid)
        if abs(fm - target) <= tol:
            return mid
        if (fa - target) * (fm - target) <= 0.0:
            b = mid
        else:
            a, fa = mid, fm
    lam = math.sqrt(a * b)
    achieved = metric(lam)
    if abs(achieved - target) <= tol:
        return lam
    raise NoSolutionError(
        f"metric stuck at {achieved:.6g} (target {target}, tol {tol}) near "
        f"lambda={lam:.6g}",
        closest_lambda=lam,
        closest_value=achieved,
    )
