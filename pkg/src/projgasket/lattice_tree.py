"""Exact integer construction of the basis tree T(E).

A node of the tree is an ordered basis of Z^(n+1).  Child ``i`` keeps the
i-th vector and adds it to every other vector, so every node has the same
determinant as the root.  Indices (child indices, multi-indices) are
1-based throughout, the way the construction is usually written down.

Two access paths are provided: pure-Python functions working on single
nodes (``child_basis``, ``node``, ``enumerate_tree``) and a numpy frontier
(``iter_levels``) that streams whole tree levels as int64 arrays for the
heavy enumerations.  Both check for int64 overflow and never wrap around.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterator, Sequence

import numpy as np

INT64_MAX = 2**63 - 1

MultiIndex = tuple  # tuple[int, ...], entries in 1..n+1, () is the root


class TreeOverflowError(OverflowError):
    """An entry left the signed 64-bit range."""

    def __init__(self, index: MultiIndex):
        self.index = tuple(index)
        super().__init__(f"int64 overflow at node {format_index(self.index)!r}")


class NodeCapError(RuntimeError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


def format_index(index: Sequence[int]) -> str:
    """Digit-string form of a multi-index ("" for the root)."""
    return "".join(str(i) for i in index)


def parse_index(text: str) -> MultiIndex:
    return tuple(int(c) for c in text.strip())


def _check(value: int, index: Sequence[int]) -> int:
    if -INT64_MAX - 1 <= value <= INT64_MAX:
        return value
    raise TreeOverflowError(index)


@dataclass(frozen=True)
class Basis:
    """Ordered list of n+1 integer vectors of length n+1."""

    vectors: tuple

    def __post_init__(self):
        vecs = tuple(tuple(int(x) for x in v) for v in self.vectors)
        m = len(vecs)
        if m < 2 or any(len(v) != m for v in vecs):
            raise ValueError("a basis needs n+1 vectors of length n+1, n >= 1")
        object.__setattr__(self, "vectors", vecs)

    @classmethod
    def from_rows(cls, rows) -> "Basis":
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def parse(cls, text: str) -> "Basis":
        """Parse ``"1,0,1;0,1,1;0,0,1"`` (semicolon-separated vectors)."""
        rows = [r for r in text.replace(" ", "").split(";") if r]
        return cls(tuple(tuple(int(x) for x in r.split(",")) for r in rows))

    def format(self) -> str:
        return ";".join(",".join(str(x) for x in v) for v in self.vectors)

    @property
    def n(self) -> int:
        return len(self.vectors) - 1

    def __len__(self):
        return len(self.vectors)

    def __getitem__(self, i):
        return self.vectors[i]

    def __iter__(self):
        return iter(self.vectors)

    def as_array(self) -> np.ndarray:
        return np.array(self.vectors, dtype=np.int64)

    def det(self) -> int:
        return int_det(self.vectors)

    def is_nonnegative(self) -> bool:
        return all(x >= 0 for v in self.vectors for x in v)


def int_det(rows) -> int:
    """Exact determinant by fraction-free Gaussian elimination (Bareiss)."""
    a = [list(r) for r in rows]
    m = len(a)
    sign, prev = 1, 1
    for k in range(m - 1):
        if a[k][k] == 0:
            for r in range(k + 1, m):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, m):
            for j in range(k + 1, m):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[m - 1][m - 1]


# -- named roots -------------------------------------------------------------

def canonical_basis(n: int) -> Basis:
    m = n + 1
    return Basis(tuple(tuple(int(i == j) for j in range(m)) for i in range(m)))


def simplex_basis(n: int) -> Basis:
    """Root with e_i = unit_i + unit_{n+1}, e_{n+1} = unit_{n+1}.

    For n=2 this is {(1,0,1),(0,1,1),(0,0,1)}, for n=3 the tetrahedral root
    E_T.  Its simplex is the standard simplex in the chart h_{n+1} = 1.
    """
    m = n + 1
    vecs = []
    for i in range(n):
        vecs.append(tuple(int(j == i or j == n) for j in range(m)))
    vecs.append(tuple(int(j == n) for j in range(m)))
    return Basis(tuple(vecs))


E_C = Basis(((1, 0, 1), (0, 1, 1), (1, 1, 0)))
E_T = simplex_basis(3)

NAMED_BASES = {
    "simplex2": simplex_basis(2),
    "simplex3": simplex_basis(3),
    "ET": E_T,
    "EC": E_C,
    "canonical2": canonical_basis(2),
    "canonical3": canonical_basis(3),
    "n1": Basis(((1, 0), (1, 1))),
}


def resolve_basis(spec: str) -> Basis:
    """A named root (see ``NAMED_BASES``) or an explicit ``a,b;c,d`` matrix."""
    if spec in NAMED_BASES:
        return NAMED_BASES[spec]
    return Basis.parse(spec)


# -- single-node operations --------------------------------------------------

def child_basis(b: Basis, i: int, index: Sequence[int] = ()) -> Basis:
    """Child ``i`` (1-based): keep e_i, replace every other e_j by e_j + e_i."""
    m = len(b)
    if not 1 <= i <= m:
        raise ValueError(f"child index {i} outside 1..{m}")
    ei = b.vectors[i - 1]
    where = tuple(index) + (i,)
    out = []
    for j, ej in enumerate(b.vectors):
        if j == i - 1:
            out.append(ej)
        else:
            out.append(tuple(_check(x + y, where) for x, y in zip(ej, ei)))
    return Basis(tuple(out))


def node(root: Basis, index: Sequence[int]) -> Basis:
    b = root
    for k, i in enumerate(index):
        b = child_basis(b, i, index[:k])
    return b


def barycenter(b: Basis) -> tuple:
    """The (unnormalised) vector sum of the basis vectors."""
    return tuple(_check(sum(col), ()) for col in zip(*b.vectors))


def tree_size(n: int, depth: int) -> int:
    """Number of nodes with |I| <= depth."""
    return ((n + 1) ** (depth + 1) - 1) // n


def enumerate_tree(root: Basis, depth: int, *, only_depth: int | None = None,
                   prefix: Sequence[int] = (), cap: int | None = None
                   ) -> Iterator[tuple[MultiIndex, Basis]]:
    """Stream ``(I, E_I)`` for |I| <= depth in natural tree order.

    Natural order: shallower nodes first, then lexicographic in I (the later
    node is the one with the larger entry at the first differing place).
    With ``prefix`` only the subtree below that node is visited, depths still
    counted from the global root; ``only_depth`` restricts to one level.
    Only the current frontier is kept in memory.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    prefix = tuple(prefix)
    m = len(root)
    start = node(root, prefix)
    frontier = [(prefix, start)]
    emitted = 0
    for d in range(len(prefix), depth + 1):
        if only_depth is None or d == only_depth:
            for item in frontier:
                emitted += 1
                if cap is not None and emitted > cap:
                    raise NodeCapError(f"node cap {cap} exceeded")
                yield item
        if d == depth or (only_depth is not None and d >= only_depth):
            break
        frontier = [(idx + (i,), child_basis(b, i, idx))
                    for idx, b in frontier for i in range(1, m + 1)]


def subtree_prefixes(n: int, split_depth: int) -> list[MultiIndex]:
    """All multi-indices of length ``split_depth`` in natural order."""
    out = [()]
    for _ in range(split_depth):
        out = [p + (i,) for p in out for i in range(1, n + 2)]
    return out


# -- numpy frontier ----------------------------------------------------------

def _checked_add(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s = a + b
    bad = ((a ^ s) & (b ^ s)) < 0
    return s, bad


def children_array(bases: np.ndarray) -> np.ndarray:
    """All children of a stack of bases, node-major / child-minor order.

    ``bases`` has shape (N, m, m) (vector index second).  Returns shape
    (N*m, m, m).  Raises TreeOverflowError naming the first offending child
    (its index relative to the stack).
    """
    N, m, _ = bases.shape
    out = np.repeat(bases, m, axis=0).reshape(N, m, m, m)
    # out[p, i, j, :] is vector j of child i of node p
    for i in range(m):
        ei = bases[:, i, :][:, None, :]
        s, bad = _checked_add(out[:, i, :, :], ei)
        bad[:, i, :] = False
        if bad.any():
            p = int(np.argwhere(bad.any(axis=(1, 2)))[0][0])
            raise TreeOverflowError((p, i + 1))
        s[:, i, :] = bases[:, i, :]
        out[:, i, :, :] = s
    return out.reshape(N * m, m, m)


def iter_levels(root: Basis, depth: int, prefix: Sequence[int] = (),
                cap: int | None = None) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(d, bases)`` for d = len(prefix)..depth, bases of shape (N, m, m).

    Rows are in natural order within the level (restricted to the subtree).
    """
    prefix = tuple(prefix)
    level = node(root, prefix).as_array()[None]
    total = 0
    for d in range(len(prefix), depth + 1):
        total += len(level)
        if cap is not None and total > cap:
            raise NodeCapError(f"node cap {cap} exceeded at depth {d}")
        yield d, level
        if d < depth:
            try:
                level = children_array(level)
            except TreeOverflowError as exc:
                p, i = exc.index
                rel = level_index(p, len(root) - 1, d - len(prefix))
                raise TreeOverflowError(prefix + rel + (i,)) from None


def level_index(position: int, n: int, length: int) -> MultiIndex:
    """Multi-index of the node at ``position`` in a level of the given length."""
    m = n + 1
    digits = []
    for _ in range(length):
        position, r = divmod(position, m)
        digits.append(r + 1)
    return tuple(reversed(digits))


def level_indices(n: int, length: int) -> np.ndarray:
    """All multi-indices of one level as an int8 array, natural order."""
    m = n + 1
    count = m ** length
    pos = np.arange(count, dtype=np.int64)
    cols = []
    for k in range(length):
        cols.append((pos // m ** (length - 1 - k)) % m + 1)
    if not cols:
        return np.zeros((1, 0), dtype=np.int8)
    return np.stack(cols, axis=1).astype(np.int8)


# -- projective points and maps ----------------------------------------------

@dataclass(frozen=True)
class ProjPoint:
    """Primitive integer homogeneous coordinates, first nonzero entry > 0."""

    coords: tuple

    def __post_init__(self):
        c = tuple(int(x) for x in self.coords)
        g = reduce(math.gcd, c, 0)
        if g == 0:
            raise ValueError("the zero vector has no direction")
        c = tuple(x // g for x in c)
        if next(x for x in c if x != 0) < 0:
            c = tuple(-x for x in c)
        object.__setattr__(self, "coords", c)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)


@dataclass(frozen=True)
class ProjectiveMap:
    """Integer matrix acting on homogeneous column vectors (defined up to scale)."""

    matrix: tuple

    def __post_init__(self):
        object.__setattr__(self, "matrix", tuple(tuple(int(x) for x in r) for r in self.matrix))

    def __matmul__(self, other: "ProjectiveMap") -> "ProjectiveMap":
        a, b = self.matrix, other.matrix
        cols = list(zip(*b))
        return ProjectiveMap(tuple(tuple(sum(x * y for x, y in zip(r, c)) for c in cols)
                                   for r in a))

    def __call__(self, p) -> ProjPoint:
        return apply_map(self, p)


def _adjugate(rows) -> list[list[int]]:
    m = len(rows)
    adj = [[0] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            minor = [r[:j] + r[j + 1:] for k, r in enumerate(rows) if k != i]
            cof = int_det(minor) if minor else 1
            adj[j][i] = cof if (i + j) % 2 == 0 else -cof
    return adj


def psi_map(root: Basis, i: int) -> ProjectiveMap:
    """psi_i: e_j -> e_i + e_j (j != i), e_i -> e_i, in standard coordinates.

    The matrix is B C_i adj(B), an integer multiple of B C_i B^-1, where the
    columns of B are the root vectors.
    """
    m = len(root)
    if not 1 <= i <= m:
        raise ValueError(f"map index {i} outside 1..{m}")
    B = [list(col) for col in zip(*root.vectors)]  # columns are e_j
    C = [[int(r == c) for c in range(m)] for r in range(m)]
    for c in range(m):
        if c != i - 1:
            C[i - 1][c] = 1
    BC = [[sum(B[r][k] * C[k][c] for k in range(m)) for c in range(m)] for r in range(m)]
    adj = _adjugate(B)
    M = [[sum(BC[r][k] * adj[k][c] for k in range(m)) for c in range(m)] for r in range(m)]
    if int_det(B) < 0:
        M = [[-x for x in r] for r in M]
    return ProjectiveMap(tuple(tuple(r) for r in M))


def compose_psi(root: Basis, index: Sequence[int]) -> ProjectiveMap:
    """The map sending Z(E) onto Z(E_I): psi_{i_1} o psi_{i_2} o ... o psi_{i_k}."""
    m = len(root)
    out = ProjectiveMap(tuple(tuple(int(r == c) for c in range(m)) for r in range(m)))
    for i in index:
        out = out @ psi_map(root, i)
    return out


def apply_map(M: ProjectiveMap, p) -> ProjPoint:
    coords = p.coords if isinstance(p, ProjPoint) else tuple(p)
    return ProjPoint(tuple(sum(a * x for a, x in zip(row, coords)) for row in M.matrix))


# -- sections ----------------------------------------------------------------

def section(root: Basis, indices: Sequence[int]) -> list[tuple[MultiIndex, Basis]]:
    """Path from the root following ``indices``; includes the root first."""
    out = [((), root)]
    b = root
    for k, i in enumerate(indices):
        b = child_basis(b, i, indices[:k])
        out.append((tuple(indices[:k + 1]), b))
    return out


def fibonacci_indices(n: int, start: int, direction: int, length: int) -> MultiIndex:
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    m = n + 1
    return tuple((start - 1 + direction * k) % m + 1 for k in range(length))


def fibonacci_section(root: Basis, start: int, direction: int, length: int
                      ) -> list[tuple[MultiIndex, Basis]]:
    """Section stepping the child index by +-1 (mod n+1), root first.

    The barycenters obey the (n+1)-term recurrence
    b_k = b_{k-1} + ... + b_{k-n-1} once enough terms exist.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    return section(root, fibonacci_indices(root.n, start, direction, length))


def edge_section(root: Basis, i: int, length: int) -> list[tuple[MultiIndex, Basis]]:
    """Section that repeats child index ``i``; root first, ``length`` steps."""
    return section(root, (i,) * length)


# -- n-bonacci ---------------------------------------------------------------

def nbonacci_constant(m: int, tol: float = 1e-15) -> float:
    """Dominant real root of x^m = x^(m-1) + ... + x + 1, located in (1, 2)."""
    if m < 2:
        raise ValueError("order must be >= 2")

    def p(x):
        return x**m - sum(x**k for k in range(m))

    lo, hi = 1.0, 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if p(mid) > 0:
            hi = mid
        else:
            lo = mid
        if mid in (lo, hi) and hi - lo <= 4 * math.ulp(mid):
            break
    return 0.5 * (lo + hi)


def nbonacci_terms(m: int, count: int, seed: Sequence[int] | None = None) -> list[int]:
    seq = list(seed) if seed is not None else [0] * (m - 1) + [1]
    while len(seq) < count:
        seq.append(sum(seq[-m:]))
    return seq[:count]


def section_limit_point(barycenters: Sequence[Sequence[int]], chart=None,
                        tol: float | None = None) -> np.ndarray:
    """Chart image of the last barycenter of a section.

    The residual is the distance between the last two chart points; when it
    exceeds ``tol`` a ConvergenceError carrying the residual is raised.
    """
    from .proj_geometry import Chart

    bs = [tuple(b) for b in barycenters]
    if not bs:
        raise ValueError("empty section")
    chart = chart or Chart.axis_chart(len(bs[0]), len(bs[0]))
    last = chart.project(bs[-1])
    if len(bs) > 1:
        residual = float(np.max(np.abs(last - chart.project(bs[-2]))))
    else:
        residual = 0.0
    if tol is not None and residual > tol:
        raise ConvergenceError(f"section not converged: residual {residual:.3g} > {tol:.3g}",
                               residual)
    return last
