"""Per-metric summary statistics over trial records.

mean, sample standard deviation (n - 1 denominator, None for one record),
min, max and a 95% confidence interval mean +- q * std / sqrt(n), where q is
the Student t quantile with n - 1 degrees of freedom for n < 30 and the
normal quantile otherwise.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats


@dataclass(frozen=True)
class SummaryStats:
    n: int
    mean: float
    std: float | None
    min: float
    max: float
    ci_low: float | None
    ci_high: float | None

    def as_dict(self):
        return asdict(self)


def summarize_values(values) -> SummaryStats:
    x = np.asarray([float(v) for v in values], dtype=float)
    if len(x) == 0:
        raise ValueError("no values to summarize")
    x = x[~np.isnan(x)]
    if len(x) == 0:  # every trial reported nan (e.g. walk never mixed)
        return SummaryStats(0, math.nan, None, math.nan, math.nan, None, None)
    n = len(x)
    mean = float(x.mean())
    if n < 2:
        return SummaryStats(n, mean, None, float(x.min()), float(x.max()), None, None)
    std = float(x.std(ddof=1))
    q = stats.t.ppf(0.975, n - 1) if n < 30 else stats.norm.ppf(0.975)
    half = q * std / math.sqrt(n)
    return SummaryStats(n, mean, std, float(x.min()), float(x.max()), mean - half, mean + half)


def summarize(records) -> dict:
    """Map (experiment, d, metric) -> SummaryStats.

    Accepts ExperimentRecord objects or CSV row dicts.
    """
    groups = defaultdict(list)
    for rec in records:
        if isinstance(rec, dict):
            groups[(rec["experiment"], int(rec["d"]), rec["metric"])].append(float(rec["value"]))
        else:
            for name, value in rec.metrics.items():
                groups[(rec.experiment, rec.d, name)].append(value)
    if not groups:
        raise ValueError("no records to summarize")
    return {key: summarize_values(vals) for key, vals in sorted(groups.items())}
