"""Seeded Monte Carlo harness: the empirical oracle for the closed forms.

Each trial draws a full window from its own keyed stream (a pure function of
the base seed and the trial index), runs the detector from sample 1 with no
reset at the change point, and classifies the first crossing: a crossing
before the change point is a false alarm, a crossing between the change
point and the evaluation horizon is a detection, anything else (no crossing,
or crossing after the horizon) is a miss for the frame.

Detection frequencies condition on reaching the change point unflagged by
default; trials that false-alarm are excluded from both numerator and
denominator.  Both choices are togglable: `reset_at_change` restarts the
statistic at the change point (matching the closed forms' conditioning),
`condition_on_survival=False` divides by all trials instead.

Everything is deterministic given (query, thresholds, trials, base_seed),
independent of worker count: per-trial streams are keyed, and aggregation is
counts only.
"""

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import RocCurve, RocPoint, RocQuery, RocSource
from .cusum import DetectionOutcome, OutcomeKind
from .rng import derive_seed, standard_normals
from .signal_model import (
    SensingCase,
    SignalModel,
    llr_params,
    post_change_variance,
    pre_change_variance,
)


@dataclass(frozen=True)
class TrialOutcome:
    """One trial's classification; seed_used = derive_seed(base_seed, trial_index)."""

    outcome: DetectionOutcome
    trial_index: int
    seed_used: int


@dataclass(frozen=True)
class EmpiricalRoc:
    """Empirical ROC points with binomial standard errors.

    pd per point is NaN when no trial survived to the change point (the
    conditional detection frequency has no data there); pd_trials carries the
    per-point conditional sample size used for its standard error.
    """

    query: RocQuery
    trials: int
    points: tuple[RocPoint, ...]
    pf_std_errors: tuple[float, ...]
    pd_std_errors: tuple[float, ...]
    pd_trials: tuple[int, ...]

    def thresholds(self) -> np.ndarray:
        return np.array([p.threshold for p in self.points])

    def write_csv(self, out) -> None:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(
            ["threshold", "p_false", "p_detect", "source",
             "pf_std_error", "pd_std_error", "pd_trials"]
        )
        for p, se_f, se_d, n_d in zip(
            self.points, self.pf_std_errors, self.pd_std_errors, self.pd_trials
        ):
            writer.writerow(
                [repr(p.threshold), repr(p.p_false), repr(p.p_detect),
                 p.source.value, repr(se_f), repr(se_d), n_d]
            )


@dataclass(frozen=True)
class DelayStats:
    """Delay and run-length summaries over a batch of trial outcomes.

    mean_time_to_false_alarm is the mean stopping index over false-alarm
    trials; feed outcomes from no-change windows to estimate the mean time to
    false alarm proper.  censored counts trials that never crossed within the
    window (distinct from misses, which include crossings past the horizon).
    """

    mean_delay: float | None
    mean_time_to_false_alarm: float | None
    miss_rate: float
    censored: int


@dataclass(frozen=True)
class ComparisonReport:
    """Per-point absolute gaps between an analytic and an empirical curve."""

    thresholds: tuple[float, ...]
    pf_gaps: tuple[float, ...]
    pd_gaps: tuple[float, ...]  # NaN where the empirical Pd is undefined
    max_pf_gap: float
    max_pd_gap: float
    tolerance: float
    passed: bool
    undefined_pd: int

    def summary(self) -> str:
        return (
            f"max |dPf| = {self.max_pf_gap:.4f}, max |dPd| = {self.max_pd_gap:.4f} "
            f"(tolerance {self.tolerance}, {self.undefined_pd} undefined Pd points): "
            f"{'PASS' if self.passed else 'FAIL'}"
        )

    def write_csv(self, out) -> None:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["threshold", "pf_gap", "pd_gap"])
        for lam, gf, gd in zip(self.thresholds, self.pf_gaps, self.pd_gaps):
            writer.writerow([repr(lam), repr(gf), repr(gd)])


def _trace_block(
    model: SignalModel,
    case: SensingCase,
    window_len: int,
    change_point: int | None,
    base_seed: int,
    start: int,
    stop: int,
    reset_at_change: bool,
) -> np.ndarray:
    """Statistic traces for trials start..stop-1, shape (stop-start, N)."""
    pre_sd = math.sqrt(pre_change_variance(model, case))
    post_sd = math.sqrt(post_change_variance(model, case))
    n = window_len
    y = np.empty((stop - start, n))
    for i in range(start, stop):
        y[i - start] = standard_normals(derive_seed(base_seed, i), n)
    if change_point is None:
        y *= pre_sd
    else:
        y[:, : change_point - 1] *= pre_sd
        y[:, change_point - 1 :] *= post_sd
    params = llr_params(model)
    increments = params.c1 * y * y + params.c2
    if case is SensingCase.EXIT:
        increments = -increments
    g = np.empty_like(increments)
    acc = np.zeros(stop - start)
    for j in range(n):
        if reset_at_change and change_point is not None and j == change_point - 1:
            acc = np.zeros(stop - start)
        acc = np.maximum(acc + increments[:, j], 0.0)
        g[:, j] = acc
    return g


def _simulate_traces(
    model: SignalModel,
    case: SensingCase,
    window_len: int,
    change_point: int | None,
    trials: int,
    base_seed: int,
    reset_at_change: bool = False,
    workers: int = 1,
) -> np.ndarray:
    """(trials, N) statistic traces; identical for any worker count."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if workers <= 1:
        return _trace_block(
            model, case, window_len, change_point, base_seed, 0, trials,
            reset_at_change,
        )
    g = np.empty((trials, window_len))
    chunk = -(-trials // workers)
    spans = [(s, min(s + chunk, trials)) for s in range(0, trials, chunk)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {
            pool.submit(
                _trace_block, model, case, window_len, change_point, base_seed,
                s, e, reset_at_change,
            ): (s, e)
            for s, e in spans
        }
        for future, (s, e) in futures.items():
            g[s:e] = future.result()
    return g


def _stop_indices(g: np.ndarray, threshold: float) -> np.ndarray:
    """1-based first index with g > threshold per trial; 0 = never crossed."""
    over = g > threshold
    crossed = over.any(axis=1)
    return np.where(crossed, over.argmax(axis=1) + 1, 0)


def _classify_with_horizon(
    stop: int, change_point: int | None, horizon: int | None
) -> DetectionOutcome:
    """First-crossing classification; crossings past the horizon are misses."""
    if stop == 0:
        return DetectionOutcome(stop_index=None, kind=OutcomeKind.MISS, delay=None)
    if change_point is None or stop < change_point:
        return DetectionOutcome(
            stop_index=stop, kind=OutcomeKind.FALSE_ALARM, delay=None
        )
    if horizon is None or stop <= horizon:
        return DetectionOutcome(
            stop_index=stop, kind=OutcomeKind.DETECTION, delay=stop - change_point
        )
    return DetectionOutcome(stop_index=stop, kind=OutcomeKind.MISS, delay=None)


def run_trials(
    query: RocQuery,
    lam: float,
    trials: int,
    base_seed: int,
    reset_at_change: bool = False,
    workers: int = 1,
) -> list[TrialOutcome]:
    """Simulate and classify `trials` independent windows at one threshold."""
    if not lam > 0.0:
        raise ValueError(f"threshold must be > 0, got {lam!r}")
    g = _simulate_traces(
        query.model, query.case, query.window_len, query.change_point,
        trials, base_seed, reset_at_change, workers,
    )
    stops = _stop_indices(g, lam)
    return [
        TrialOutcome(
            outcome=_classify_with_horizon(
                int(stop), query.change_point, query.eval_horizon
            ),
            trial_index=i,
            seed_used=derive_seed(base_seed, i),
        )
        for i, stop in enumerate(stops)
    ]


def null_trials(
    model: SignalModel,
    case: SensingCase,
    window_len: int,
    lam: float,
    trials: int,
    base_seed: int,
    workers: int = 1,
) -> list[TrialOutcome]:
    """Trials over no-change windows; every crossing is a false alarm.

    The resulting outcomes feed delay_stats for the mean time to false alarm,
    with never-crossing trials reported as censored.
    """
    if not lam > 0.0:
        raise ValueError(f"threshold must be > 0, got {lam!r}")
    g = _simulate_traces(model, case, window_len, None, trials, base_seed,
                         False, workers)
    stops = _stop_indices(g, lam)
    return [
        TrialOutcome(
            outcome=_classify_with_horizon(int(stop), None, None),
            trial_index=i,
            seed_used=derive_seed(base_seed, i),
        )
        for i, stop in enumerate(stops)
    ]


def empirical_roc(
    query: RocQuery,
    thresholds,
    trials: int,
    base_seed: int,
    reset_at_change: bool = False,
    condition_on_survival: bool = True,
    workers: int = 1,
) -> EmpiricalRoc:
    """Empirical ROC over a threshold grid with common random numbers.

    One set of trial traces is generated and scanned per threshold, so sweep
    noise cancels point-to-point; the estimates are identical in distribution
    to independent sweeps.
    """
    thresholds = np.asarray(thresholds, dtype=float)
    if thresholds.ndim != 1 or len(thresholds) == 0:
        raise ValueError("thresholds must be a nonempty 1-d sequence")
    if np.any(thresholds <= 0.0) or np.any(np.diff(thresholds) <= 0.0):
        raise ValueError("thresholds must be positive and strictly increasing")
    tau = query.change_point
    horizon = query.eval_horizon
    g = _simulate_traces(
        query.model, query.case, query.window_len, tau, trials, base_seed,
        reset_at_change, workers,
    )
    points = []
    pf_ses = []
    pd_ses = []
    pd_ns = []
    for lam in thresholds:
        stops = _stop_indices(g, float(lam))
        fa = int(np.count_nonzero((stops > 0) & (stops < tau)))
        det = int(np.count_nonzero((stops >= tau) & (stops <= horizon)))
        pf = fa / trials
        denom = (trials - fa) if condition_on_survival else trials
        pd = det / denom if denom > 0 else float("nan")
        points.append(
            RocPoint(threshold=float(lam), p_false=pf, p_detect=pd,
                     source=RocSource.MONTE_CARLO)
        )
        pf_ses.append(math.sqrt(pf * (1.0 - pf) / trials))
        pd_ses.append(
            math.sqrt(pd * (1.0 - pd) / denom) if denom > 0 else float("nan")
        )
        pd_ns.append(denom)
    return EmpiricalRoc(
        query=query,
        trials=trials,
        points=tuple(points),
        pf_std_errors=tuple(pf_ses),
        pd_std_errors=tuple(pd_ses),
        pd_trials=tuple(pd_ns),
    )


def delay_stats(outcomes: list[TrialOutcome]) -> DelayStats:
    """Summarize delays, false-alarm times and miss/censor counts."""
    if not outcomes:
        raise ValueError("outcomes must be nonempty")
    delays = [
        t.outcome.delay for t in outcomes if t.outcome.kind is OutcomeKind.DETECTION
    ]
    fa_stops = [
        t.outcome.stop_index
        for t in outcomes
        if t.outcome.kind is OutcomeKind.FALSE_ALARM
    ]
    misses = sum(1 for t in outcomes if t.outcome.kind is OutcomeKind.MISS)
    censored = sum(1 for t in outcomes if t.outcome.stop_index is None)
    return DelayStats(
        mean_delay=sum(delays) / len(delays) if delays else None,
        mean_time_to_false_alarm=sum(fa_stops) / len(fa_stops) if fa_stops else None,
        miss_rate=misses / len(outcomes),
        censored=censored,
    )


def compare(
    analytic: RocCurve, empirical: EmpiricalRoc, tolerance: float = 0.05
) -> ComparisonReport:
    """Per-point |gap| report between curves on the same threshold grid.

    Points where the empirical Pd is undefined (no surviving trials) are
    excluded from the Pd maximum and counted separately.
    """
    lam_a = analytic.thresholds()
    lam_e = empirical.thresholds()
    if len(lam_a) != len(lam_e) or not np.array_equal(lam_a, lam_e):
        raise ValueError("analytic and empirical curves use different grids")
    pf_gaps = []
    pd_gaps = []
    undefined = 0
    for pa, pe in zip(analytic.points, empirical.points):
        pf_gaps.append(abs(pa.p_false - pe.p_false))
        if math.isnan(pe.p_detect):
            undefined += 1
            pd_gaps.append(float("nan"))
        else:
            pd_gaps.append(abs(pa.p_detect - pe.p_detect))
    max_pf = max(pf_gaps)
    defined = [gap for gap in pd_gaps if not math.isnan(gap)]
    max_pd = max(defined) if defined else 0.0
    return ComparisonReport(
        thresholds=tuple(float(x) for x in lam_a),
        pf_gaps=tuple(pf_gaps),
        pd_gaps=tuple(pd_gaps),
        max_pf_gap=max_pf,
        max_pd_gap=max_pd,
        tolerance=tolerance,
        passed=(max_pf <= tolerance and max_pd <= tolerance),
        undefined_pd=undefined,
    )


def write_manifest(out, entries: dict) -> None:
    """Write a reproducibility manifest as `key = value` lines."""
    for key, value in entries.items():
        out.write(f"{key} = {value}\n")
