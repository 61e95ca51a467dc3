"""Minkowski-dimension estimates from bodies sorted by inscribed radius.

The ledger enumerates every body whose radius is at least ``eps_min``.
A subtree is skipped as soon as its simplex has inradius below
``eps_min``: a body sits inside every ancestor simplex, so its radius can
not be larger.  Above ``eps_min`` the sorted radius list is therefore
complete, and every neighbourhood volume below is exact (n = 2) or a
rigorous two-sided bound (n = 3) for eps >= eps_min.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..lattice_tree import Basis, NodeCapError, children_array, int_det, level_indices
from ..proj_geometry import Chart, default_chart, level_measures, simplex_inradius


class ResolutionError(ValueError):
    """eps is below the smallest radius the ledger resolves."""


@dataclass
class RadiusLedger:
    n: int
    chart: Chart
    eps_min: float
    radius: np.ndarray  # descending
    volume: np.ndarray  # areas for n = 2
    surface: np.ndarray  # perimeters for n = 2
    depth: np.ndarray
    position: np.ndarray
    root_volume: float
    root_surface: float
    root_curvature: float  # integrated mean curvature (n = 3), pi for n = 2 corners

    def __post_init__(self):
        z = np.zeros(1)
        self.cum_volume = np.concatenate([z, np.cumsum(self.volume)])
        self.cum_surface = np.concatenate([z, np.cumsum(self.surface)])
        if self.n == 2:
            self.cum_sq = np.concatenate([z, np.cumsum(self.surface**2 / (4 * self.volume))])

    def __len__(self):
        return len(self.radius)

    def k_eps(self, eps: float) -> int:
        """Number of bodies with radius >= eps."""
        if eps < self.eps_min:
            raise ResolutionError(f"eps={eps:.4g} below the enumerated radius {self.eps_min:.4g}; "
                                  "rebuild the ledger with a smaller eps_min")
        return int(np.searchsorted(-self.radius, -eps, side="right"))

    def index_of(self, k: int) -> str:
        """Digit-string multi-index of the k-th body (0-based, sorted order)."""
        d = int(self.depth[k])
        return "".join(str(i) for i in level_indices(self.n, d)[int(self.position[k])]) if d else ""

    def decay_exponent(self, k_min: int = 10) -> tuple[float, float]:
        """Least-squares slope and intercept of log rho_k against log k, k >= k_min."""
        k = np.arange(1, len(self.radius) + 1)
        sel = k >= k_min
        if sel.sum() < 3:
            raise ValueError("too few bodies for a decay fit")
        slope, icept = np.polyfit(np.log(k[sel]), np.log(self.radius[sel]), 1)
        return float(slope), float(icept)


def _root_geometry(root: Basis, chart: Chart) -> tuple[float, float, float]:
    """Chart volume, surface and curvature term of the root simplex."""
    P = chart.project_array(root.as_array().astype(float))
    n = root.n
    vol = abs(np.linalg.det(P[1:] - P[0])) / math.factorial(n)
    if n == 2:
        per = sum(np.linalg.norm(P[a] - P[b]) for a, b in itertools.combinations(range(3), 2))
        return vol, per, math.pi
    surf = 0.0
    for face in itertools.combinations(range(4), 3):
        a, b, c = P[list(face)]
        surf += np.linalg.norm(np.cross(b - a, c - a)) / 2
    H = 0.0
    for a, b in itertools.combinations(range(4), 2):
        c, d = [k for k in range(4) if k not in (a, b)]
        e = P[b] - P[a]
        # dihedral angle along edge ab between faces abc and abd
        u = np.cross(e, P[c] - P[a])
        v = np.cross(e, P[d] - P[a])
        theta = math.acos(np.clip(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)), -1, 1))
        H += np.linalg.norm(e) * (math.pi - theta) / 2
    return vol, surf, H


def build_ledger(root: Basis, eps_min: float, chart: Chart | None = None,
                 children=children_array, cap: int | None = 20_000_000) -> RadiusLedger:
    """All bodies with radius >= eps_min, sorted by radius (ties in tree order)."""
    chart = chart or default_chart(root)
    n = root.n
    if n not in (2, 3):
        raise ValueError("radius ledgers need n = 2 or 3")
    rad, vol, surf, dep, pos = [], [], [], [], []
    level = root.as_array()[None]
    positions = np.zeros(1, dtype=np.int64)
    d = 0
    seen = 0
    while len(level):
        seen += len(level)
        if cap is not None and seen > cap:
            raise NodeCapError(f"node cap {cap} exceeded at depth {d}")
        det = abs(int_det(level[0].tolist()))
        meas = level_measures(level, chart, det, want=("volume", "surface", "radius"))
        keep = meas["radius"] >= eps_min
        rad.append(meas["radius"][keep])
        vol.append(meas["volume"][keep])
        surf.append(meas["surface"][keep])
        dep.append(np.full(keep.sum(), d))
        pos.append(positions[keep])
        kids = children(level)
        kdet = abs(int_det(kids[0].tolist()))
        alive = simplex_inradius(kids, chart, kdet) >= eps_min
        m = n + 1
        kid_pos = (positions[:, None] * m + np.arange(m)[None]).reshape(-1)
        level, positions = kids[alive], kid_pos[alive]
        d += 1
    radius = np.concatenate(rad)
    depth = np.concatenate(dep)
    position = np.concatenate(pos)
    order = np.lexsort((position, depth, -radius))
    V, S, H = _root_geometry(root, chart)
    return RadiusLedger(n, chart, eps_min, radius[order], np.concatenate(vol)[order],
                        np.concatenate(surf)[order], depth[order], position[order], V, S, H)


def minkowski_area_n2(ledger: RadiusLedger, eps: float) -> float:
    """Area of the eps-neighbourhood of the limit set (n = 2), exact for eps >= eps_min.

    Outer Steiner area of the root triangle minus, for every body with
    radius >= eps, the similar inner triangle at distance eps from its sides.
    """
    if ledger.n != 2:
        raise ValueError("area formula is for n = 2")
    k = ledger.k_eps(eps)
    A, p = ledger.root_volume, ledger.root_surface
    return (p * eps + eps * ledger.cum_surface[k] + A - ledger.cum_volume[k]
            + eps**2 * (math.pi - ledger.cum_sq[k]))


def minkowski_bounds_n3(ledger: RadiusLedger, eps: float) -> tuple[float, float]:
    """Lower and upper bound for the eps-neighbourhood volume (n = 3).

    The tail (volume of the bodies with radius < eps) is exact: the limit
    set has measure zero, so it is the root volume minus the listed bodies.
    """
    if ledger.n != 3:
        raise ValueError("volume bounds are for n = 3")
    k = ledger.k_eps(eps)
    tail = ledger.root_volume - ledger.cum_volume[k]
    upper = (ledger.root_surface * eps + ledger.root_curvature * eps**2
             + eps * ledger.cum_surface[k] + tail + 4 * math.pi / 3 * eps**3)
    return tail, upper


def eps_schedule(base: float = 1.2, m_max: int = 50, m_min: int = 1) -> list[tuple[int, float]]:
    return [(m, base ** -m) for m in range(m_min, m_max + 1)]


def minkowski_table(ledger: RadiusLedger, schedule) -> list[dict]:
    """Rows (m, eps, volume[, upper], dimension estimates n - log V / log eps)."""
    rows = []
    n = ledger.n
    for m, eps in schedule:
        if n == 2:
            V = float(minkowski_area_n2(ledger, eps))
            rows.append({"m": m, "epsilon": eps, "volume": V,
                         "dimension": n - math.log(V) / math.log(eps), "k_eps": ledger.k_eps(eps)})
        else:
            lo, hi = (float(x) for x in minkowski_bounds_n3(ledger, eps))
            rows.append({"m": m, "epsilon": eps, "volume": lo, "upper": hi,
                         "dimension": n - math.log(lo) / math.log(eps) if lo > 0 else float("nan"),
                         "dimension_upper": n - math.log(hi) / math.log(eps),
                         "k_eps": ledger.k_eps(eps)})
    return rows


def envelope_exponent(values, lower: bool, bins: int = 12, k_min: int = 10) -> float:
    """Slope of a power-law envelope of ``values`` against the sorted index k.

    log k (k >= k_min) is split into equal bins; the extreme point of each
    bin (min for the lower envelope, max for the upper) enters a line fit.
    """
    y = np.asarray(values, dtype=float)
    k = np.arange(1, len(y) + 1)
    sel = k >= k_min
    x, ly = np.log(k[sel]), np.log(y[sel])
    if len(x) < 3:
        raise ValueError("too few bodies for an envelope fit")
    edges = np.linspace(x[0], x[-1], bins + 1)
    bx, by = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        s = (x >= a) & (x <= b)
        if s.any():
            j = np.argmin(ly[s]) if lower else np.argmax(ly[s])
            bx.append(x[s][j])
            by.append(ly[s][j])
    return float(np.polyfit(bx, by, 1)[0])


def minkowski_band_n3(ledger: RadiusLedger, bins: int = 12, k_min: int = 10) -> dict:
    """Dimension band from power-law envelopes of the sorted body sequence.

    With rho_k ~ k^-r, V_k >= A k^-a (lower envelope) and S_k <= B k^-s,
    V_k <= B' k^-a' (upper envelopes), summing the bounds on the
    neighbourhood volume gives
        n - (a - 1)/r <= dim <= max(n - 1 + (1 - s)/r, n - (a' - 1)/r).
    """
    if ledger.n != 3:
        raise ValueError("volume bounds are for n = 3")
    r = -ledger.decay_exponent(k_min)[0]
    a = -envelope_exponent(ledger.volume, True, bins, k_min)
    a_up = -envelope_exponent(ledger.volume, False, bins, k_min)
    s = -envelope_exponent(ledger.surface, False, bins, k_min)
    n = ledger.n
    lo = n - (a - 1) / r
    hi = max(n - 1 + (1 - s) / r, n - (a_up - 1) / r)
    return {"radius_exponent": -r, "volume_lower_exponent": -a, "volume_upper_exponent": -a_up,
            "surface_upper_exponent": -s, "lower": float(lo), "upper": float(hi)}
