"""Log-log fits and grid bookkeeping."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from ..proj_geometry import Chart


@dataclass(frozen=True)
class GridSpec:
    """Dyadic grid in a chart: half-open cells of side 2^-l anchored at 0."""
    chart: Chart
    l: int

    @property
    def epsilon(self) -> float:
        return 2.0 ** -self.l

    def refine(self) -> "GridSpec":
        return GridSpec(self.chart, self.l + 1)

    def max_cells(self, extent: float = 1.0) -> int:
        """Upper bound (ceil(extent/eps) + 1)^n on occupied cells of a set of that extent."""
        return (math.ceil(extent / self.epsilon) + 1) ** (self.chart.m - 1)


@dataclass
class DimEstimate:
    samples: list  # (label, log 1/eps, log N or log V)
    slope: float
    intercept: float
    residual: float
    fit_range: tuple
    method: str = ""
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["samples"] = [list(s) for s in self.samples]
        d["fit_range"] = list(self.fit_range)
        return d

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)


class FitRangeError(ValueError):
    pass


def loglog_fit(samples, fit_range=None, method: str = "", sign: float = 1.0) -> DimEstimate:
    """Least squares of y on x over samples whose label lies in fit_range.

    samples: iterable of (label, x, y), e.g. (l, log 1/eps, log N).
    fit_range: inclusive (lo, hi) on the label; None means all samples.
    sign multiplies the slope (use -1 to turn a decay into a dimension).
    """
    samples = [tuple(s) for s in samples]
    if fit_range is None:
        fit_range = (min(s[0] for s in samples), max(s[0] for s in samples))
    lo, hi = fit_range
    sel = [s for s in samples if lo <= s[0] <= hi]
    if len(sel) < 3:
        raise FitRangeError(f"need >= 3 samples in range {lo}..{hi}, got {len(sel)}")
    x = np.array([s[1] for s in sel], dtype=float)
    y = np.array([s[2] for s in sel], dtype=float)
    slope, icept = np.polyfit(x, y, 1)
    res = float(np.max(np.abs(y - (slope * x + icept))))
    return DimEstimate(samples, float(sign * slope), float(icept), res, (lo, hi), method)


def count_samples(counts: dict) -> list:
    """(l, log 1/eps, log N) for eps = 2^-l."""
    return [(l, l * math.log(2), math.log(counts[l])) for l in sorted(counts) if counts[l] > 0]


def default_set_range(levels) -> tuple:
    """Drop the two coarsest levels and the finest one."""
    levels = sorted(levels)
    return levels[2], levels[-2]


def default_cloud_range(counts: dict, n_points: int, saturation: int = 32) -> tuple:
    """Fit range for a point cloud of n_points.

    Levels whose count exceeds n_points/saturation are dominated by the
    finite sample (most cells hold a single point) and are cut; of the
    rest the two coarsest and the finest are dropped as for sets.  If that
    leaves fewer than 3 levels the finest unsaturated level is kept.
    """
    levels = sorted(counts)
    ok = [l for l in levels if counts[l] * saturation <= n_points]
    if not ok:
        raise FitRangeError("every level is saturated; use a deeper cloud")
    l_max = ok[-1]
    lo = levels[0] + 2
    if l_max - 1 - lo + 1 >= 3:
        return lo, l_max - 1
    if l_max - lo + 1 >= 3:
        return lo, l_max
    raise FitRangeError(f"only levels {lo}..{l_max} unsaturated; use a deeper cloud")
