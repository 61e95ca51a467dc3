"""Dimension estimation: box counting, barycenter clouds, Minkowski volumes."""
from .boxcount import barycenter_points, boxcount_barycenters, boxcount_set, count_points, occupied_cells
from .fit import (DimEstimate, FitRangeError, GridSpec, count_samples, default_cloud_range,
                  default_set_range, loglog_fit)
from .minkowski import (RadiusLedger, ResolutionError, build_ledger, envelope_exponent, eps_schedule,
                        minkowski_area_n2, minkowski_band_n3, minkowski_bounds_n3, minkowski_table)
from .reference import midpoint_children, midpoint_levels, reference_root

__all__ = [
    "barycenter_points", "boxcount_barycenters", "boxcount_set", "count_points", "occupied_cells",
    "DimEstimate", "FitRangeError", "GridSpec", "count_samples", "default_cloud_range",
    "default_set_range", "loglog_fit", "RadiusLedger", "ResolutionError", "build_ledger",
    "envelope_exponent", "eps_schedule", "minkowski_area_n2", "minkowski_band_n3",
    "minkowski_bounds_n3", "minkowski_table", "midpoint_children", "midpoint_levels",
    "reference_root", "reference_fractal",
]


def reference_fractal(kind: str):
    """(root, child_rule) for 'sierpinski' or 'tetrix'; pass both to any estimator."""
    kinds = {"sierpinski": 2, "tetrix": 3}
    if kind not in kinds:
        raise ValueError(f"unknown reference fractal {kind!r}; choose sierpinski or tetrix")
    return reference_root(kinds[kind]), midpoint_levels
