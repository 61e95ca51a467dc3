import json
import math

import numpy as np
import pytest

from projgasket.dimension_lab import (DimEstimate, FitRangeError, GridSpec, count_samples,
                                      default_cloud_range, default_set_range, loglog_fit,
                                      reference_fractal)
from projgasket.proj_geometry import Chart


def _power_law(d, c=1.0, levels=range(0, 12), noise=0.0, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for l in levels:
        N = c * 2.0 ** (d * l) * (1 + noise * rng.standard_normal())
        out.append((l, l * math.log(2), math.log(N)))
    return out


def test_exact_power_law():
    est = loglog_fit(_power_law(1.7, c=3.0))
    assert est.slope == pytest.approx(1.7, abs=1e-12)
    assert est.residual < 1e-12
    assert est.intercept == pytest.approx(math.log(3.0))


def test_noisy_power_law():
    est = loglog_fit(_power_law(1.585, c=2.0, noise=0.01, seed=42))
    assert est.slope == pytest.approx(1.585, abs=0.02)


def test_constant_gives_zero():
    est = loglog_fit([(l, l * 0.69, 2.0) for l in range(6)])
    assert est.slope == pytest.approx(0.0, abs=1e-12)


def test_range_selection_and_errors():
    samples = _power_law(2.0, levels=range(0, 5)) + [(5, 5 * math.log(2), 0.0)]
    est = loglog_fit(samples, (0, 4))
    assert est.slope == pytest.approx(2.0)
    assert est.fit_range == (0, 4)
    with pytest.raises(FitRangeError):
        loglog_fit(samples, (3, 4))
    assert loglog_fit(samples, (0, 4), sign=-1).slope == pytest.approx(-2.0)


def test_count_samples():
    s = count_samples({0: 1, 1: 3, 2: 9})
    assert s[2] == (2, 2 * math.log(2), math.log(9))


def test_default_ranges():
    assert default_set_range(range(0, 13)) == (2, 11)
    counts = {l: min(3**l, 10**6) for l in range(0, 16)}
    # 3^l <= 10^6/32 up to l = 9: fit 2..8
    assert default_cloud_range(counts, 10**6) == (2, 8)
    with pytest.raises(FitRangeError):
        default_cloud_range({l: 10**6 for l in range(5)}, 10**6)
    # too few levels: the finest unsaturated one is kept
    assert default_cloud_range({0: 1, 1: 4, 2: 16, 3: 64, 4: 256, 5: 1024}, 256 * 32) == (2, 4)


def test_dim_estimate_json():
    est = loglog_fit(_power_law(1.5), method="boxset")
    d = json.loads(est.to_json())
    assert d["slope"] == pytest.approx(1.5)
    assert d["method"] == "boxset"
    assert len(d["samples"]) == 12 and d["fit_range"] == [0, 11]
    assert isinstance(est, DimEstimate)


def test_grid_spec():
    g = GridSpec(Chart.axis_chart(3, 3), 3)
    assert g.epsilon == 0.125
    assert g.refine().l == 4
    assert g.max_cells() == 81


def test_reference_fractal():
    root, rule = reference_fractal("tetrix")
    assert root.n == 3 and callable(rule)
    with pytest.raises(ValueError):
        reference_fractal("koch")
