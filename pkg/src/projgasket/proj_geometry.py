"""Charts, simplices, bodies and their measures.

Volumes are Lebesgue volumes in an affine chart.  A projective simplex
with integer vertex vectors v_0..v_n whose chart denominators d(v_k) are
all positive has chart volume |det V| / (n! * prod d(v_k)) (times the
chart's own determinant), so every volume below is computed from exact
integer determinants and one floating division.

Bodies are triangulated by coning from the barycenter over their facets;
the triangulation is done once, in coefficient space over the basis
vectors, and reused for every node.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .lattice_tree import Basis, ProjPoint, _adjugate, int_det


class PointAtInfinityError(ValueError):
    pass


class ChartError(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    """Affine chart given by an integer m x m matrix M: for a vector h,
    M h = (x_1..x_n, d) and the chart point is x / d, defined where d != 0.

    ``axis_chart(j)`` is the usual v_i = h_i / h_j.  ``sum_chart`` divides by
    h_1 + ... + h_m.  ``simplex_chart(B)`` uses coordinates in the basis B, so
    S(B) becomes the unit corner simplex; for the bases (1,0,..,1), ..,
    (0,..,1,1), (0,..,0,1) it coincides with the last-axis chart.
    """

    rows: tuple
    label: str

    @classmethod
    def axis_chart(cls, axis: int, m: int) -> "Chart":
        """Chart h_axis = 1 (axis is 1-based) on RP^(m-1)."""
        if not 1 <= axis <= m:
            raise ChartError(f"chart axis {axis} outside 1..{m}")
        rows = [tuple(int(j == k) for j in range(m)) for k in range(m) if k != axis - 1]
        rows.append(tuple(int(j == axis - 1) for j in range(m)))
        return cls(tuple(rows), str(axis))

    @classmethod
    def sum_chart(cls, m: int) -> "Chart":
        rows = [tuple(int(j == k) for j in range(m)) for k in range(m - 1)]
        rows.append((1,) * m)
        return cls(tuple(rows), "sum")

    @classmethod
    def simplex_chart(cls, root: Basis) -> "Chart":
        """Coordinates (lambda_1..lambda_n) / sum(lambda) with h = sum lambda_i e_i."""
        m = len(root)
        A = _adjugate([list(r) for r in zip(*root)])  # adj(B^T): A h = det(B) * lambda
        sign = 1 if int_det(root.as_array().tolist()) > 0 else -1
        A = [[sign * int(x) for x in row] for row in A]
        rows = [tuple(A[k]) for k in range(m - 1)]
        rows.append(tuple(sum(A[k][j] for k in range(m)) for j in range(m)))
        return cls(tuple(rows), "simplex")

    @classmethod
    def parse(cls, text: str, m: int, root: Basis | None = None) -> "Chart":
        if text in ("sum", "s"):
            return cls.sum_chart(m)
        if text == "simplex":
            if root is None:
                raise ChartError("the simplex chart needs a root basis")
            return cls.simplex_chart(root)
        return cls.axis_chart(int(text), m)

    def format(self) -> str:
        return self.label

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def functional(self) -> tuple:
        return self.rows[-1]

    @property
    def det(self) -> int:
        return int_det(self.matrix())

    def matrix(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def denominator(self, h) -> int:
        return sum(w * int(x) for w, x in zip(self.functional, h))

    def homogeneous(self, H: np.ndarray) -> np.ndarray:
        """(..., m) integer vectors -> (..., m) chart-homogeneous (x, d)."""
        H = np.asarray(H)
        return H @ np.asarray(self.rows, dtype=H.dtype).T

    def _coords(self, h) -> list[int]:
        return [sum(a * int(x) for a, x in zip(r, h)) for r in self.rows[:-1]]

    def project(self, h) -> np.ndarray:
        h = tuple(int(x) for x in (h.coords if isinstance(h, ProjPoint) else h))
        d = self.denominator(h)
        if d == 0:
            raise PointAtInfinityError(f"{h} lies at infinity for chart {self.format()}")
        return np.array([x / d for x in self._coords(h)])

    def project_array(self, H: np.ndarray) -> np.ndarray:
        Hh = self.homogeneous(np.asarray(H))
        return Hh[..., :-1] / Hh[..., -1:]

    def project_exact(self, h) -> tuple:
        d = self.denominator(h)
        if d == 0:
            raise PointAtInfinityError(f"{tuple(h)} lies at infinity")
        return tuple(Fraction(x, d) for x in self._coords(h))


def default_chart(root: Basis) -> Chart:
    """Last axis if all root vectors are strictly positive (or negative)
    there, else the first such axis, else the root's simplex chart."""
    m = len(root)
    for axis in [m] + list(range(1, m)):
        col = [v[axis - 1] for v in root]
        if all(x > 0 for x in col) or all(x < 0 for x in col):
            return Chart.axis_chart(axis, m)
    return Chart.simplex_chart(root)


def chart_project(p, chart: Chart) -> np.ndarray:
    return chart.project(p)


def _denominators(b: Basis, chart: Chart) -> list[int]:
    ds = [chart.denominator(v) for v in b]
    if any(d <= 0 for d in ds):
        raise ChartError(f"chart {chart.format()} unsuitable: denominators {ds}")
    return ds


# -- simplex and body volumes ------------------------------------------------

def mu_simplex(b: Basis, chart: Chart | None = None) -> float:
    """Chart volume of S(E): |det E| / (n! * prod of chart denominators)."""
    chart = chart or default_chart(b)
    ds = _denominators(b, chart)
    return abs(b.det() * chart.det) / (math.factorial(b.n) * math.prod(ds))


@lru_cache(maxsize=None)
def body_triangulation(m: int) -> tuple:
    """Simplices covering the body of an m-vector basis.

    Each simplex is an m x m integer matrix of coefficients over the basis
    vectors; the body is the convex hull of the e_i + e_j.  Coning from the
    centre over facets: the facet x_i = 1 is the simplex {e_i + e_j}, the
    facet x_i = 0 is the body of the remaining vectors.
    """
    if m == 2:
        return ()  # the body is a single point

    def tri(S: tuple) -> list[list[tuple]]:
        # triangulation of the (|S|-2)-dimensional polytope conv{e_a+e_b : a,b in S}
        if len(S) == 3:
            a, b, c = S
            return [[(a, b), (a, c), (b, c)]]
        apex = S
        out = []
        for i in S:
            out.append([apex] + [(i, j) for j in S if j != i])
            rest = tuple(j for j in S if j != i)
            for simp in tri(rest):
                out.append([apex] + simp)
        return out

    simplices = []
    for simp in tri(tuple(range(m))):
        rows = []
        for vert in simp:
            row = [0] * m
            for j in vert:
                row[j] += 1
            rows.append(tuple(row))
        simplices.append(tuple(rows))
    return tuple(simplices)


@lru_cache(maxsize=None)
def body_facets(m: int) -> tuple:
    """Boundary simplices of the body (coefficient rows), for surface areas.

    Facets x_i = 1 are simplices; facets x_i = 0 are bodies of one vector
    fewer, triangulated the same way.  For m = 4 this gives the 8 triangles
    (4 corner triangles, 4 face triangles).
    """
    if m < 3:
        return ()
    out = []
    for i in range(m):
        out.append(tuple(tuple(int(k in (i, j)) for k in range(m)) for j in range(m) if j != i))
    if m >= 4:
        for i in range(m):
            rest = [k for k in range(m) if k != i]
            sub = body_triangulation(m - 1) if m - 1 >= 3 else ()
            for simp in sub:
                rows = []
                for r in simp:
                    full = [0] * m
                    for k, c in zip(rest, r):
                        full[k] = c
                    rows.append(tuple(full))
                out.append(tuple(rows))
    return tuple(out)


def body_vertices(b: Basis) -> list[tuple]:
    """Integer vectors e_i + e_j, i < j, in lexicographic order of (i, j)."""
    return [tuple(x + y for x, y in zip(b[i], b[j]))
            for i, j in itertools.combinations(range(len(b)), 2)]


def body_vertex_points(b: Basis) -> list[ProjPoint]:
    return [ProjPoint(v) for v in body_vertices(b)]


def mu_body(b: Basis, chart: Chart | None = None) -> float:
    """Chart volume of the body Z(E); 0 for n = 1."""
    if b.n == 1:
        return 0.0
    chart = chart or default_chart(b)
    _denominators(b, chart)
    det_e = abs(b.det() * chart.det)
    D = [chart.denominator(v) for v in b]
    total = 0.0
    for K in body_triangulation(len(b)):
        dk = abs(int_det(K))
        prod = math.prod(sum(c * d for c, d in zip(row, D)) for row in K)
        total += dk / prod
    return det_e * total / math.factorial(b.n)


# -- distances ---------------------------------------------------------------

def canonical_distance(p, q) -> float:
    """Angle between the two lines, arccos(|<x,y>| / (|x||y|)), in [0, pi/2].

    Evaluated as atan2(|x ^ y|, |<x,y>|) with the wedge norm taken exactly
    (Lagrange identity on integers), which stays accurate for nearby points.
    """
    x = tuple(p.coords if isinstance(p, ProjPoint) else p)
    y = tuple(q.coords if isinstance(q, ProjPoint) else q)
    if all(isinstance(v, (int, np.integer)) for v in x + y):
        x, y = tuple(int(v) for v in x), tuple(int(v) for v in y)
        wedge2 = sum((x[i] * y[j] - x[j] * y[i]) ** 2
                     for i, j in itertools.combinations(range(len(x)), 2))
        dot = abs(sum(a * b for a, b in zip(x, y)))
        return math.atan2(math.sqrt(wedge2), dot)
    xa, ya = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    wedge2 = sum((xa[i] * ya[j] - xa[j] * ya[i]) ** 2
                 for i, j in itertools.combinations(range(len(xa)), 2))
    return math.atan2(math.sqrt(wedge2), abs(float(xa @ ya)))


def body_diameter(b: Basis) -> float:
    verts = body_vertices(b)
    if len(verts) < 2:
        return 0.0
    return max(canonical_distance(p, q) for p, q in itertools.combinations(verts, 2))


def _simplex_measure(points: np.ndarray) -> float:
    """k-volume of a k-simplex given by k+1 points in R^n (k <= n)."""
    k = len(points) - 1
    A = points[1:] - points[0]
    g = A @ A.T
    return math.sqrt(max(0.0, float(np.linalg.det(g)))) / math.factorial(k)


def body_surface(b: Basis, chart: Chart | None = None) -> float:
    """Chart boundary measure of the body (perimeter for n=2, area for n=3)."""
    if b.n < 2:
        return 0.0
    chart = chart or default_chart(b)
    E = np.array(b.vectors, dtype=float)
    total = 0.0
    for F in body_facets(len(b)):
        pts = chart.project_array(np.array(F, dtype=float) @ E)
        total += _simplex_measure(pts)
    return total


def inscribed_radius(b: Basis, chart: Chart | None = None) -> float:
    """2*area/perimeter for n = 2 (the incircle), V/S for n = 3."""
    if b.n == 1:
        raise ValueError("bodies are points for n = 1")
    V, S = mu_body(b, chart), body_surface(b, chart)
    return 2 * V / S if b.n == 2 else V / S


def triangle_incircle_radius(points) -> float:
    p = np.asarray(points, dtype=float)
    u, v = p[1] - p[0], p[2] - p[0]
    area = abs(u[0] * v[1] - u[1] * v[0]) / 2
    per = sum(np.linalg.norm(p[i] - p[(i + 1) % 3]) for i in range(3))
    return 2 * area / per


def tetra_volume_over_surface(points) -> float:
    p = np.asarray(points, dtype=float)
    V = _simplex_measure(p)
    S = sum(_simplex_measure(p[list(f)]) for f in itertools.combinations(range(4), 3))
    return V / S


# -- faces -------------------------------------------------------------------

def basis_coordinates(p, root: Basis) -> tuple:
    """Exact coefficients c with p = sum c_k e_k (Fractions), sign chosen so
    that sum(c) >= 0."""
    det = root.det()
    if det == 0:
        raise ValueError("root is not a basis")
    coords = p.coords if isinstance(p, ProjPoint) else tuple(p)
    if len(coords) != len(root):
        raise ValueError("point and basis dimensions differ")
    B = [list(col) for col in zip(*root.vectors)]
    adj = _adjugate(B)
    c = [Fraction(sum(a * x for a, x in zip(row, coords)), det) for row in adj]
    if sum(c) < 0:
        c = [-x for x in c]
    return tuple(c)


def face_membership(p, root: Basis) -> int | None:
    """1-based index k of the root hyperface (opposite [e_k]) containing p.

    p is on face k when its k-th root coordinate is 0 and the others are
    >= 0.  Points on several faces (lower-dimensional strata) report the
    smallest such k; points off the boundary of S(E) give None.
    """
    c = basis_coordinates(p, root)
    if any(x < 0 for x in c):
        return None
    zeros = [k + 1 for k, x in enumerate(c) if x == 0]
    return zeros[0] if zeros else None


# -- vectorised measures over tree levels -------------------------------------

def level_measures(bases: np.ndarray, chart: Chart, det_root: int,
                   want=("volume", "surface", "radius", "diameter")) -> dict:
    """Body and simplex measures for a stack of bases (N, m, m).

    ``det_root`` is the (constant) determinant of every node.  Returns a
    dict of float arrays; keys: simplex_volume, volume, surface, radius,
    diameter (as requested).
    """
    N, m, _ = bases.shape
    n = m - 1
    H = bases.astype(np.float64)
    D = bases @ np.asarray(chart.functional, dtype=np.int64)  # (N, m)
    if (D <= 0).any():
        raise ChartError(f"chart {chart.format()} unsuitable for some nodes")
    scale = abs(det_root * chart.det) / math.factorial(n)
    out = {"simplex_volume": scale / np.prod(D.astype(float), axis=1)}
    if n == 1:
        for key in want:
            out[key] = np.zeros(N)
        return out
    if "volume" in want or "radius" in want:
        vol = np.zeros(N)
        for K in body_triangulation(m):
            Kd = np.asarray(K, dtype=np.int64)
            prod = np.prod((D @ Kd.T).astype(float), axis=1)
            vol += abs(int_det(K)) / prod
        out["volume"] = vol * scale
    if "surface" in want or "radius" in want:
        surf = np.zeros(N)
        for F in body_facets(m):
            Fd = np.asarray(F, dtype=float)
            P = chart.project_array(np.einsum("rk,nkj->nrj", Fd, H))
            A = P[:, 1:, :] - P[:, :1, :]
            g = A @ np.swapaxes(A, 1, 2)
            surf += np.sqrt(np.clip(np.linalg.det(g), 0, None)) / math.factorial(n - 1)
        out["surface"] = surf
    if "radius" in want:
        r = out["volume"] / out["surface"]
        out["radius"] = 2 * r if n == 2 else r
    if "diameter" in want:
        V = np.stack([H[:, i] + H[:, j] for i, j in itertools.combinations(range(m), 2)], 1)
        best = np.zeros(N)
        for a, c in itertools.combinations(range(V.shape[1]), 2):
            x, y = V[:, a], V[:, c]
            wedge2 = sum((x[:, i] * y[:, j] - x[:, j] * y[:, i]) ** 2
                         for i, j in itertools.combinations(range(m), 2))
            dot = np.abs(np.einsum("nk,nk->n", x, y))
            best = np.maximum(best, np.arctan2(np.sqrt(wedge2), dot))
        out["diameter"] = best
    return out


def simplex_inradius(bases: np.ndarray, chart: Chart, det_root: int) -> np.ndarray:
    """Inradius n*V/S of the chart simplices of a stack of bases."""
    N, m, _ = bases.shape
    n = m - 1
    D = (bases @ np.asarray(chart.functional, dtype=np.int64)).astype(float)
    vol = abs(det_root * chart.det) / math.factorial(n) / np.prod(D, axis=1)
    P = chart.project_array(bases.astype(float))
    surf = np.zeros(N)
    for face in itertools.combinations(range(m), n):
        Q = P[:, list(face)]
        A = Q[:, 1:] - Q[:, :1]
        g = A @ np.swapaxes(A, 1, 2)
        surf += np.sqrt(np.clip(np.linalg.det(g), 0, None)) / math.factorial(n - 1)
    return n * vol / surf
