"""Midpoint-subdivision reference fractals (Sierpinski triangle, Tetrix).

Child i of a basis keeps the corner e_i and takes the edge midpoints
[e_i + e_j]; writing the corner as 2 e_i keeps all chart denominators
equal, so every child simplex is the exact midpoint subsimplex and every
barycenter vector points at the chart centroid.  The levels have the same
layout as ``lattice_tree.iter_levels`` so every estimator runs unchanged.
"""
from __future__ import annotations

from typing import Iterator, Sequence

import numpy as np

from ..lattice_tree import Basis, NodeCapError, TreeOverflowError, _checked_add, level_index, simplex_basis


def reference_root(n: int) -> Basis:
    """Unit corner simplex in the last-axis chart (n=2: Sierpinski, n=3: Tetrix)."""
    return simplex_basis(n)


def midpoint_children(bases: np.ndarray) -> np.ndarray:
    """(N, m, m) -> (N*m, m, m), node-major like ``children_array``."""
    N, m, _ = bases.shape
    out = np.empty((N, m, m, m), dtype=np.int64)
    for i in range(m):
        ei = bases[:, i, :][:, None, :]
        s, bad = _checked_add(bases, np.broadcast_to(ei, bases.shape))
        if bad.any():
            raise TreeOverflowError((int(np.argwhere(bad.any(axis=(1, 2)))[0][0]), i + 1))
        out[:, i] = s  # row i becomes 2 e_i, others e_i + e_j
    return out.reshape(N * m, m, m)


def midpoint_levels(root: Basis, depth: int, prefix: Sequence[int] = (),
                    cap: int | None = None) -> Iterator[tuple[int, np.ndarray]]:
    level = np.asarray(root.as_array(), dtype=np.int64)[None]
    for i in tuple(prefix):
        level = midpoint_children(level)[i - 1:i]
    prefix = tuple(prefix)
    total = 0
    for d in range(len(prefix), depth + 1):
        total += len(level)
        if cap is not None and total > cap:
            raise NodeCapError(f"node cap {cap} exceeded at depth {d}")
        yield d, level
        if d < depth:
            try:
                level = midpoint_children(level)
            except TreeOverflowError as exc:
                p, i = exc.index
                rel = level_index(p, len(root) - 1, d - len(prefix))
                raise TreeOverflowError(prefix + rel + (i,)) from None
