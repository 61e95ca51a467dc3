"""Box counting on dyadic grids in a chart.

Cells at level l are the half-open boxes [i 2^-l, (i+1) 2^-l) (per axis),
anchored at the chart origin, so counts are nested under refinement.

``boxcount_set`` counts cells meeting the union of the depth-k simplices.
Every cell/simplex test is an exact separating-axis test in integer
arithmetic: simplex vertices are kept as chart-homogeneous integer vectors
(x, w) with w > 0 and cell corners as (i, 2^l).  Cells are refined only
where the parent cell met the simplex.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

import numpy as np

from ..lattice_tree import Basis, iter_levels, subtree_prefixes, NodeCapError
from ..proj_geometry import Chart, ChartError, default_chart

_KEY_BITS = 21


def cell_keys(cells: np.ndarray) -> np.ndarray:
    """Pack integer cell coordinates (P, n) into int64 keys."""
    offset = 1 << (_KEY_BITS - 1)
    key = np.zeros(len(cells), dtype=np.int64)
    for k in range(cells.shape[1]):
        key = (key << _KEY_BITS) + (cells[:, k] + offset)
    return key


def occupied_cells(points: np.ndarray, l: int) -> np.ndarray:
    """Sorted unique keys of the level-l cells containing the points."""
    cells = np.floor(np.asarray(points) * 2.0**l).astype(np.int64)
    return np.unique(cell_keys(cells))


def count_points(points: np.ndarray, levels: Sequence[int]) -> dict[int, int]:
    pts = np.asarray(points, dtype=float)
    return {l: len(occupied_cells(pts, l)) for l in levels}


# -- exact simplex / half-open box test ---------------------------------------

def _cofactor_normals(V: np.ndarray) -> np.ndarray:
    """Face normals of stacked simplices.

    V: (P, m, m) homogeneous vertices (rows).  Returns N of shape (P, m, m)
    where N[:, c] is normal to the hyperplane through all vertices but c,
    oriented so that N[:, c] . V[:, c] > 0.
    """
    P, m, _ = V.shape
    N = np.zeros_like(V)
    for c in range(m):
        others = [a for a in range(m) if a != c]
        M = V[:, others, :]  # (P, m-1, m)
        for k in range(m):
            cols = [j for j in range(m) if j != k]
            sub = M[:, :, cols]
            N[:, c, k] = (-1) ** k * _int_det_stack(sub)
        s = np.einsum("pk,pk->p", N[:, c], V[:, c])
        N[:, c] *= np.sign(s)[:, None]
    return N


def _int_det_stack(A: np.ndarray) -> np.ndarray:
    """Exact determinants of small integer matrices (sizes 1..3) in int64."""
    k = A.shape[1]
    if k == 1:
        return A[:, 0, 0]
    if k == 2:
        return A[:, 0, 0] * A[:, 1, 1] - A[:, 0, 1] * A[:, 1, 0]
    if k == 3:
        return (A[:, 0, 0] * (A[:, 1, 1] * A[:, 2, 2] - A[:, 1, 2] * A[:, 2, 1])
                - A[:, 0, 1] * (A[:, 1, 0] * A[:, 2, 2] - A[:, 1, 2] * A[:, 2, 0])
                + A[:, 0, 2] * (A[:, 1, 0] * A[:, 2, 1] - A[:, 1, 1] * A[:, 2, 0]))
    out = np.zeros(len(A), dtype=A.dtype)
    for j in range(k):
        minor = np.delete(np.delete(A, 0, axis=1), j, axis=2)
        out += (-1) ** j * A[:, 0, j] * _int_det_stack(minor)
    return out


def _edge_axes(V: np.ndarray) -> np.ndarray:
    """Cross products of simplex edges with the coordinate axes (n = 3).

    Returns (P, E, 3) integer affine directions; E = 6 edges x 3 axes.
    """
    X, W = V[:, :, :-1], V[:, :, -1:]
    axes = []
    for a, b in itertools.combinations(range(V.shape[1]), 2):
        d = W[:, a] * X[:, b] - W[:, b] * X[:, a]  # (P, 3), scaled edge direction
        axes.append(np.stack([np.zeros_like(d[:, 0]), d[:, 2], -d[:, 1]], 1))
        axes.append(np.stack([-d[:, 2], np.zeros_like(d[:, 0]), d[:, 0]], 1))
        axes.append(np.stack([d[:, 1], -d[:, 0], np.zeros_like(d[:, 0])], 1))
    return np.stack(axes, 1)


class SimplexSet:
    """Precomputed integer data for a stack of chart simplices."""

    def __init__(self, V: np.ndarray):
        V = np.asarray(V, dtype=np.int64)
        if (V[:, :, -1] <= 0).any():
            raise ChartError("simplex vertices must have positive chart denominators")
        self.V = V
        self.n = V.shape[1] - 1
        self.N = _cofactor_normals(V)
        self.Nv = np.einsum("pck,pck->pc", self.N, V)  # N_c . V_c > 0
        self.E = _edge_axes(V) if self.n == 3 else None

    def __len__(self):
        return len(self.V)

    def bbox_cells(self, l: int) -> tuple[np.ndarray, np.ndarray]:
        """Exact floor of the min/max chart coordinates at level l."""
        X, W = self.V[:, :, :-1], self.V[:, :, -1:]
        f = (X << l) // W
        return f.min(axis=1), f.max(axis=1)

    def intersects(self, idx: np.ndarray, cells: np.ndarray, l: int) -> np.ndarray:
        """Does simplex ``idx[p]`` meet the half-open cell ``cells[p]``?"""
        V = self.V[idx]
        X, W = V[:, :, :-1], V[:, :, -1]
        scale = np.int64(1) << l
        sep = np.zeros(len(idx), dtype=bool)
        # coordinate axes: box interval [I, I+1) (lower end attained)
        for k in range(self.n):
            xs = X[:, :, k] * scale
            lo = cells[:, k][:, None] * W
            hi = (cells[:, k][:, None] + 1) * W
            sep |= (xs < lo).all(axis=1) | (xs >= hi).all(axis=1)
        # face hyperplanes, both sides
        N, Nv = self.N[idx], self.Nv[idx]
        for c in range(self.n + 1):
            a = N[:, c, :-1]
            f0 = np.einsum("pk,pk->p", a, cells) + N[:, c, -1] * scale
            fmax = f0 + np.clip(a, 0, None).sum(axis=1)
            fmin = f0 + np.clip(a, None, 0).sum(axis=1)
            sep |= (fmax < 0) | ((fmax == 0) & (f0 < 0))
            far = fmin * W[:, c] - Nv[:, c] * scale
            sep |= (far > 0) | ((far == 0) & (f0 > fmin))
        if self.E is not None:
            E = self.E[idx]
            for e in range(E.shape[1]):
                u = E[:, e, :]
                t = np.einsum("pk,pak->pa", u, X) * scale  # projections * 2^l * W_a
                b0 = np.einsum("pk,pk->p", u, cells)
                bmin = b0 + np.clip(u, None, 0).sum(axis=1)
                bmax = b0 + np.clip(u, 0, None).sum(axis=1)
                min_att = (u >= 0).all(axis=1)
                max_att = (u <= 0).all(axis=1)
                lo = bmin[:, None] * W
                hi = bmax[:, None] * W
                sep |= (t < lo).all(axis=1) | ((t <= lo).all(axis=1) & ~min_att)
                sep |= (t > hi).all(axis=1) | ((t >= hi).all(axis=1) & ~max_att)
        return ~sep


def _initial_pairs(S: SimplexSet, l: int) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = S.bbox_cells(l)
    span = hi - lo + 1
    idx_parts, cell_parts = [], []
    for shape in {tuple(s) for s in span.tolist()}:
        sel = np.nonzero((span == np.array(shape)).all(axis=1))[0]
        offs = np.array(list(itertools.product(*[range(s) for s in shape])), dtype=np.int64)
        idx_parts.append(np.repeat(sel, len(offs)))
        cell_parts.append((lo[sel][:, None, :] + offs[None]).reshape(-1, S.n))
    idx = np.concatenate(idx_parts)
    cells = np.concatenate(cell_parts)
    keep = S.intersects(idx, cells, l)
    return idx[keep], cells[keep]


def simplex_cell_keys(V: np.ndarray, levels: Sequence[int], chunk: int = 1 << 20,
                      cap: int | None = None) -> dict[int, np.ndarray]:
    """Per level, sorted unique keys of cells meeting any of the simplices."""
    S = SimplexSet(V)
    levels = sorted(set(levels))
    top = levels[-1]
    out: dict[int, np.ndarray] = {}
    idx, cells = _initial_pairs(S, 0)
    offs = np.array(list(itertools.product((0, 1), repeat=S.n)), dtype=np.int64)
    for l in range(top + 1):
        if cap is not None and len(idx) > cap:
            raise NodeCapError(f"pair cap {cap} exceeded at level {l}")
        if l in levels:
            out[l] = np.unique(cell_keys(cells))
        if l == top:
            break
        new_idx, new_cells = [], []
        for s in range(0, len(idx), chunk):
            ci = np.repeat(idx[s:s + chunk], len(offs))
            cc = (2 * cells[s:s + chunk][:, None, :] + offs[None]).reshape(-1, S.n)
            keep = S.intersects(ci, cc, l + 1)
            new_idx.append(ci[keep])
            new_cells.append(cc[keep])
        idx = np.concatenate(new_idx)
        cells = np.concatenate(new_cells)
    return out


def _level_vertices(root: Basis, depth: int, chart: Chart, prefix=(), child_rule=None) -> np.ndarray:
    for d, bases in _levels(root, depth, prefix, child_rule):
        if d == depth:
            return chart.homogeneous(bases)
    raise AssertionError("unreachable")


def _set_task(args):
    root, depth, chart, levels, prefix, cap, child_rule = args
    V = _level_vertices(root, depth, chart, prefix, child_rule)
    return simplex_cell_keys(V, levels, cap=cap)


def boxcount_set(root: Basis, depth: int, levels: Sequence[int], chart: Chart | None = None,
                 workers: int = 1, split_depth: int | None = None,
                 cap: int | None = 50_000_000, child_rule=None) -> dict[int, int]:
    """N_eps for eps = 2^-l: cells meeting F_depth, the union of depth-k simplices.

    The work is split over subtrees (first ``split_depth`` indices); the
    merge is a set union of cell keys, so counts do not depend on
    ``workers``.
    """
    chart = chart or default_chart(root)
    levels = sorted(set(levels))
    if split_depth is None:
        split_depth = 0 if workers == 1 else min(depth, 2)
    tasks = [(root, depth, chart, levels, p, cap, child_rule)
             for p in subtree_prefixes(root.n, split_depth)]
    results = _run(_set_task, tasks, workers)
    return {l: len(_union([r[l] for r in results])) for l in levels}


def _union(arrays: list[np.ndarray]) -> np.ndarray:
    if len(arrays) == 1:
        return arrays[0]
    return np.unique(np.concatenate(arrays))


def _run(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) == 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks))


# -- barycenter clouds ---------------------------------------------------------

def barycenter_points(root: Basis, depth: int, chart: Chart | None = None,
                      prefix=(), child_rule=None) -> tuple[np.ndarray, int]:
    """Chart images of all barycenters with |I| <= depth (natural order).

    Barycenters on the chart's line at infinity are dropped; their number
    is returned alongside the points.
    """
    chart = chart or default_chart(root)
    pts, dropped = [], 0
    for _, bases in _levels(root, depth, prefix, child_rule):
        H = chart.homogeneous(bases.sum(axis=1))
        ok = H[:, -1] != 0
        dropped += int((~ok).sum())
        pts.append(H[ok, :-1] / H[ok, -1:])
    return np.concatenate(pts), dropped


def _levels(root, depth, prefix, child_rule):
    if child_rule is None:
        return iter_levels(root, depth, prefix=prefix)
    return child_rule(root, depth, prefix)


def _bary_task(args):
    root, depth, chart, levels, prefix, child_rule = args
    pts, dropped = barycenter_points(root, depth, chart, prefix, child_rule)
    return {l: occupied_cells(pts, l) for l in levels}, dropped


def boxcount_barycenters(root: Basis, depth: int, levels: Sequence[int],
                         chart: Chart | None = None, workers: int = 1,
                         split_depth: int | None = None, child_rule=None
                         ) -> tuple[dict[int, int], int]:
    """Occupied-cell counts of the barycenter cloud, plus dropped-point count."""
    chart = chart or default_chart(root)
    levels = sorted(set(levels))
    if split_depth is None:
        split_depth = 0 if workers == 1 else min(depth, 2)
    prefixes = subtree_prefixes(root.n, split_depth)
    tasks = [(root, depth, chart, levels, p, child_rule) for p in prefixes]
    results = _run(_bary_task, tasks, workers)
    # ancestors of the split level are not inside any subtree
    extra = []
    if split_depth > 0:
        pts, _ = barycenter_points(root, split_depth - 1, chart, (), child_rule)
        extra = [{l: occupied_cells(pts, l) for l in levels}]
    dropped = sum(r[1] for r in results)
    maps = [r[0] for r in results] + extra
    return {l: len(_union([mp[l] for mp in maps])) for l in levels}, dropped
