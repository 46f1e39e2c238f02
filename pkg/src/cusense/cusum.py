"""Sequential CUSUM detector.

The statistic accumulates per-sample log-likelihood ratios and clamps at
zero: g_0 = 0, g_next = max(g + l, 0).  A flag is raised at the first sample
whose statistic strictly exceeds the threshold; strict inequality is the
documented tie-break (ties have measure zero under the continuous model).
The detector keeps producing the trace after the first crossing so one run
serves both the stopping-time bookkeeping and trace plotting.
"""

import csv
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .signal_model import (
    LlrParams,
    SampleSequence,
    SensingCase,
    SignalModel,
    llr,
    llr_params,
)


class OutcomeKind(Enum):
    FALSE_ALARM = "false-alarm"
    DETECTION = "detection"
    MISS = "miss"


@dataclass(frozen=True)
class CusumState:
    """Statistic g after `index` samples, with the pre-clamp value z.

    g = max(z, 0) >= 0 always; the initial state is g = 0, z = 0, index = 0.
    """

    g: float
    z: float
    index: int

    @classmethod
    def initial(cls) -> "CusumState":
        return cls(g=0.0, z=0.0, index=0)


@dataclass(frozen=True)
class DetectionOutcome:
    """First-crossing classification for one window.

    stop_index is the 1-based first sample with g > threshold, or None if the
    statistic never crossed.  FALSE_ALARM means stop_index < change point;
    DETECTION means stop_index at or after it (delay = stop - change point);
    MISS means no crossing.
    """

    stop_index: int | None
    kind: OutcomeKind
    delay: int | None


def step(state: CusumState, increment: float) -> CusumState:
    """One recursion step; pure transition, the input state is unchanged."""
    z = state.g + increment
    return CusumState(g=max(z, 0.0), z=z, index=state.index + 1)


def first_crossing(trace: Sequence[CusumState], threshold: float) -> int | None:
    """Smallest 1-based index with g strictly above threshold, else None."""
    if not trace:
        raise ValueError("trace must be nonempty")
    for state in trace:
        if state.g > threshold:
            return state.index
    return None


def classify(stop_index: int | None, change_point: int | None) -> DetectionOutcome:
    """Classify a first crossing against a change point (None = no change)."""
    if stop_index is None:
        return DetectionOutcome(stop_index=None, kind=OutcomeKind.MISS, delay=None)
    if change_point is None or stop_index < change_point:
        return DetectionOutcome(
            stop_index=stop_index, kind=OutcomeKind.FALSE_ALARM, delay=None
        )
    return DetectionOutcome(
        stop_index=stop_index,
        kind=OutcomeKind.DETECTION,
        delay=stop_index - change_point,
    )


def run(
    samples: SampleSequence,
    model: SignalModel,
    case: SensingCase,
    threshold: float,
) -> tuple[list[CusumState], DetectionOutcome]:
    """Run the detector over a full window.

    Returns the complete trace (one state per sample, crossings included)
    and the outcome classified against the scenario's change point.
    """
    if not threshold > 0.0:
        raise ValueError(f"threshold must be > 0, got {threshold!r}")
    params = llr_params(model)
    trace = []
    state = CusumState.initial()
    for y in samples.samples:
        state = step(state, llr(float(y), params, case))
        trace.append(state)
    outcome = classify(first_crossing(trace, threshold), samples.spec.change_point)
    return trace, outcome


def write_trace_csv(
    out,
    samples: SampleSequence,
    trace: Sequence[CusumState],
    threshold: float,
    params: LlrParams | None = None,
    case: SensingCase | None = None,
) -> None:
    """Write trace rows (index, sample, increment, z, g, crossed) to `out`.

    `crossed` is 1 where g > threshold at that row; the first 1 marks the
    stopping sample.
    """
    if params is None:
        params = llr_params(samples.spec.model)
    if case is None:
        case = samples.spec.case
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["index", "sample", "increment", "z", "g", "crossed"])
    for y, state in zip(samples.samples, trace):
        inc = llr(float(y), params, case)
        writer.writerow(
            [state.index, repr(float(y)), repr(inc), repr(state.z), repr(state.g),
             int(state.g > threshold)]
        )
