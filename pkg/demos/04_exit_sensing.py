"""Sensing the occupant's exit: the mirrored detection problem.

For exit sensing the pre-change samples carry signal power and the per-sample
LLR is the exact negation of the entrance one, which bounds each increment by
|c2|: the statistic can only climb by |c2| per sample, so crossings need
sustained accumulation and high thresholds become strictly unreachable within
a finite horizon.  The closed forms mirror accordingly (partial-sum CDFs turn
into survival functions with the variance roles swapped) and are validated
only against simulation.
"""

import numpy as np

from cusense import (
    RocQuery,
    SensingCase,
    SignalModel,
    default_thresholds,
    empirical_roc,
    llr_params,
    p_detect_total,
    roc_sweep,
)

model = SignalModel(noise_variance=1.0, signal_power=1.0)
params = llr_params(model)
query = RocQuery(model=model, window_len=200, change_point=100,
                 eval_horizon=140, case=SensingCase.EXIT)

per_sample_cap = -params.c2
horizon_span = query.eval_horizon - query.change_point + 1
print(f"per-sample statistic gain is capped at |c2| = {per_sample_cap:.4f}")
print(f"=> no detection is possible above lambda = "
      f"{per_sample_cap * horizon_span:.2f} within the horizon")
print(f"   closed form agrees: Pd({per_sample_cap * horizon_span + 1:.0f}) = "
      f"{p_detect_total(per_sample_cap * horizon_span + 1.0, query):.4f}\n")

grid = default_thresholds(16, 0.5, 12.0)
analytic = roc_sweep(query, grid)
empirical = empirical_roc(query, grid, 4000, 5)

print(f"{'lambda':>8} {'Pf closed':>10} {'Pf sim':>8} {'Pd closed':>10} {'Pd sim':>8}")
for pa, pe in zip(analytic.points, empirical.points):
    pd_sim = "  (n/a)" if np.isnan(pe.p_detect) else f"{pe.p_detect:8.4f}"
    print(f"{pa.threshold:8.3f} {pa.p_false:10.4f} {pe.p_false:8.4f} "
          f"{pa.p_detect:10.4f} {pd_sim}")
