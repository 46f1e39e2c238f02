"""Pick a threshold for a target false-alarm budget, then measure what it buys.

Solves the closed-form false-alarm total for a 10% budget, validates the
operating point by simulation, and summarizes detection delay and the mean
time to false alarm on no-change windows at that threshold.
"""

import numpy as np

from cusense import (
    OutcomeKind,
    RocQuery,
    SensingCase,
    SignalModel,
    delay_stats,
    empirical_roc,
    null_trials,
    p_detect_total,
    p_false_total,
    run_trials,
    solve_threshold,
)

model = SignalModel(noise_variance=1.0, signal_power=1.0)
query = RocQuery(model=model, window_len=200, change_point=100, eval_horizon=140)

lam = solve_threshold(query, 0.10, OutcomeKind.FALSE_ALARM)
print(f"threshold for a 10% false-alarm budget: lambda = {lam:.4f}")
print(f"  closed-form Pf at lambda : {p_false_total(lam, query):.4f}")
print(f"  closed-form Pd at lambda : {p_detect_total(lam, query):.4f}")

emp = empirical_roc(query, np.array([lam]), 10_000, 99)
point = emp.points[0]
print(f"  simulated Pf             : {point.p_false:.4f} "
      f"(std error {emp.pf_std_errors[0]:.4f})")
print(f"  simulated Pd             : {point.p_detect:.4f} "
      f"(std error {emp.pd_std_errors[0]:.4f}, "
      f"{emp.pd_trials[0]} surviving trials)")

stats = delay_stats(run_trials(query, lam, 10_000, base_seed=99))
print(f"\ndetection delay (mean over detections): {stats.mean_delay:.2f} samples")
print(f"miss rate within the horizon           : {stats.miss_rate:.4f}")

null_stats = delay_stats(
    null_trials(model, SensingCase.ENTRANCE, 200, lam, 10_000, base_seed=100)
)
print(f"\non no-change windows at the same threshold:")
print(f"  mean time to false alarm : {null_stats.mean_time_to_false_alarm:.1f} samples")
print(f"  windows with no crossing : {null_stats.censored} of 10000")
