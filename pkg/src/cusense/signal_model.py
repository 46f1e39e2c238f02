"""Two-hypothesis Gaussian signal model.

A sensing window sees zero-mean Gaussian samples whose variance flips at the
change point: noise-only variance sigma^2 on one side, signal-plus-noise
variance sigma^2 + P on the other.  ENTRANCE is the vacant-to-occupied case;
EXIT is occupied-to-vacant, where the per-sample log-likelihood ratio is the
exact negation of the ENTRANCE one.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .rng import standard_normals


class SensingCase(Enum):
    ENTRANCE = "entrance"
    EXIT = "exit"


@dataclass(frozen=True)
class SignalModel:
    """Noise variance sigma^2 and signal power P, both in linear units."""

    noise_variance: float
    signal_power: float

    def __post_init__(self):
        for name in ("noise_variance", "signal_power"):
            v = getattr(self, name)
            if not (v > 0.0 and math.isfinite(v)):
                raise ValueError(f"{name} must be finite and > 0, got {v!r}")


@dataclass(frozen=True)
class LlrParams:
    """Constants of the quadratic LLR l(y) = c1*y^2 + c2 (ENTRANCE form).

    Always derived from a SignalModel via llr_params: c1 > 0 > c2.
    """

    c1: float
    c2: float


def llr_params(model: SignalModel) -> LlrParams:
    """LLR constants for a model: c1 = P / (2(P+s2)s2), c2 = ln(s2/(P+s2))/2."""
    s2 = model.noise_variance
    p = model.signal_power
    return LlrParams(
        c1=p / (2.0 * (p + s2) * s2),
        c2=0.5 * math.log(s2 / (p + s2)),
    )


def llr(y: float, params: LlrParams, case: SensingCase = SensingCase.ENTRANCE) -> float:
    """Per-sample log-likelihood ratio; EXIT is the exact negation."""
    value = params.c1 * y * y + params.c2
    return value if case is SensingCase.ENTRANCE else -value


def pre_change_variance(model: SignalModel, case: SensingCase) -> float:
    """Sample variance before the change point (the case's H0 side)."""
    if case is SensingCase.ENTRANCE:
        return model.noise_variance
    return model.noise_variance + model.signal_power


def post_change_variance(model: SignalModel, case: SensingCase) -> float:
    """Sample variance from the change point onward (the case's H1 side)."""
    if case is SensingCase.ENTRANCE:
        return model.noise_variance + model.signal_power
    return model.noise_variance


@dataclass(frozen=True)
class ScenarioSpec:
    """One simulated frame: model, sensing case, window, change point, seed.

    change_point is the 1-based index of the first post-change sample, or
    None for a window with no change (all samples from the pre-change side).
    """

    model: SignalModel
    case: SensingCase
    window_len: int
    change_point: int | None
    seed: int

    def __post_init__(self):
        if self.window_len < 1:
            raise ValueError(f"window_len must be >= 1, got {self.window_len}")
        tau = self.change_point
        if tau is not None and not (1 <= tau <= self.window_len):
            raise ValueError(
                f"change_point must lie in [1, {self.window_len}] or be None, got {tau}"
            )


@dataclass(frozen=True)
class SampleSequence:
    """Generated samples plus the spec that produced them."""

    samples: np.ndarray
    spec: ScenarioSpec

    def __post_init__(self):
        if len(self.samples) != self.spec.window_len:
            raise ValueError(
                f"expected {self.spec.window_len} samples, got {len(self.samples)}"
            )


def generate(spec: ScenarioSpec) -> SampleSequence:
    """Draw one window of samples; identical output for identical spec."""
    z = standard_normals(spec.seed, spec.window_len)
    pre_sd = math.sqrt(pre_change_variance(spec.model, spec.case))
    post_sd = math.sqrt(post_change_variance(spec.model, spec.case))
    y = np.empty(spec.window_len)
    tau = spec.change_point
    if tau is None:
        y[:] = z * pre_sd
    else:
        y[: tau - 1] = z[: tau - 1] * pre_sd
        y[tau - 1 :] = z[tau - 1 :] * post_sd
    return SampleSequence(samples=y, spec=spec)
