"""Filtered complexes on point clouds: Vietoris-Rips, Cech, planar alpha.

Only simplices of dimension <= 2 are built; that is all degree-0/1
persistence needs. Every builder returns a `FilteredComplex` whose
simplices are stored in filtration order, ties broken by (value,
dimension, lexicographic vertices) so faces always precede cofaces.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import NamedTuple

import numpy as np
import numpy.typing as npt
from scipy.spatial import Delaunay, QhullError

from .geometry import COINCIDENT_TOL, PointCloud

# Relative tolerance for deciding that a point sits on a triangle's
# circumcircle (cocircular degeneracy detection).
COCIRCULAR_TOL = 1e-9


class FiltrationKind(str, Enum):
    VR = "vr"
    CECH = "cech"
    DELAUNAY = "delaunay"


class FilteredSimplex(NamedTuple):
    """A simplex (sorted vertex tuple) with its filtration entry value."""

    vertices: tuple[int, ...]
    value: float

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1


def _sort_key(s: FilteredSimplex) -> tuple[float, int, tuple[int, ...]]:
    return (s.value, s.dim, s.vertices)


@dataclass(frozen=True)
class FilteredComplex:
    """A filtered simplicial complex of dimension <= 2.

    Invariants (checked at construction): vertex simplices 0..n-1 all
    present with value 0; vertex tuples strictly increasing; faces of
    every simplex present with a value no larger than the simplex's own
    (so the (value, dim, lex) order is a valid filtration order).

    `max_scale` records the cap the builder used; simplices above the cap
    were omitted at build time.
    """

    n_vertices: int
    simplices: tuple[FilteredSimplex, ...]
    kind: FiltrationKind
    max_scale: float

    def __post_init__(self) -> None:
        ordered = tuple(sorted((FilteredSimplex(tuple(s.vertices), float(s.value)) for s in self.simplices), key=_sort_key))
        object.__setattr__(self, "simplices", ordered)
        if self.n_vertices < 1:
            raise ValueError("complex needs at least one vertex")
        values: dict[tuple[int, ...], float] = {}
        for s in ordered:
            v = s.vertices
            if len(v) not in (1, 2, 3):
                raise ValueError(f"simplex dimension out of range: {v}")
            if any(not 0 <= i < self.n_vertices for i in v):
                raise ValueError(f"vertex index out of range in {v}")
            if tuple(sorted(set(v))) != v:
                raise ValueError(f"simplex vertices must be strictly increasing: {v}")
            if not math.isfinite(s.value) or s.value < 0.0:
                raise ValueError(f"simplex value must be finite and nonnegative: {s}")
            if v in values:
                raise ValueError(f"duplicate simplex {v}")
            values[v] = s.value
        for i in range(self.n_vertices):
            if values.get((i,), None) != 0.0:
                raise ValueError(f"vertex {i} missing or at nonzero value")
        for s in ordered:
            if s.dim == 0:
                continue
            for face in itertools.combinations(s.vertices, len(s.vertices) - 1):
                fv = values.get(face)
                if fv is None:
                    raise ValueError(f"face {face} of {s.vertices} missing: complex not face-closed")
                if fv > s.value:
                    raise ValueError(
                        f"face {face} enters at {fv} after coface {s.vertices} at {s.value}"
                    )

    @cached_property
    def value_by_simplex(self) -> dict[tuple[int, ...], float]:
        return {s.vertices: s.value for s in self.simplices}

    @cached_property
    def edges(self) -> tuple[FilteredSimplex, ...]:
        """Edges in filtration order."""
        return tuple(s for s in self.simplices if s.dim == 1)

    @cached_property
    def triangles(self) -> tuple[FilteredSimplex, ...]:
        """Triangles in filtration order."""
        return tuple(s for s in self.simplices if s.dim == 2)

    def value_of(self, vertices: tuple[int, ...]) -> float:
        key = tuple(sorted(vertices))
        try:
            return self.value_by_simplex[key]
        except KeyError:
            raise KeyError(f"simplex {key} not in complex") from None


def _as_points(cloud: PointCloud | npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    if isinstance(cloud, PointCloud):
        return cloud.points
    return PointCloud(np.asarray(cloud, dtype=np.float64)).points


def _distance_matrix(points: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    diff = points[:, None, :] - points[None, :, :]
    D = np.sqrt((diff * diff).sum(axis=2))
    n = points.shape[0]
    # the edge taxonomy assumes distinct points; a zero-length edge would
    # classify meaninglessly, so reject up front in every builder
    if n >= 2 and D[np.triu_indices(n, k=1)].min() < COINCIDENT_TOL:
        raise ValueError("coincident points are not allowed")
    return D


def _vertex_simplices(n: int) -> list[FilteredSimplex]:
    return [FilteredSimplex((i,), 0.0) for i in range(n)]


def build_vr(
    cloud: PointCloud | npt.NDArray[np.float64],
    max_scale: float | None = None,
) -> FilteredComplex:
    """Vietoris-Rips filtration up to dimension 2.

    Edge value is half the endpoint distance; triangle value is the max
    of its edge values. With no explicit cap, the cap is half the cloud
    diameter, which keeps every edge and triangle.

    Args:
        cloud: input points.
        max_scale: optional cap; simplices with value above it are omitted.

    Returns:
        The filtered complex, max_scale field set to the cap used.

    Raises:
        ValueError: coincident points.
    """
    points = _as_points(cloud)
    n = points.shape[0]
    D = _distance_matrix(points)
    cap = float(max_scale) if max_scale is not None else float(D.max()) / 2.0
    simplices = _vertex_simplices(n)
    kept_edge = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            val = D[i, j] / 2.0
            if val <= cap:
                kept_edge[i, j] = True
                simplices.append(FilteredSimplex((i, j), val))
    for i, j, k in itertools.combinations(range(n), 3):
        if not (kept_edge[i, j] and kept_edge[i, k] and kept_edge[j, k]):
            continue
        val = max(D[i, j], D[i, k], D[j, k]) / 2.0
        if val <= cap:
            simplices.append(FilteredSimplex((i, j, k), val))
    return FilteredComplex(n, tuple(simplices), FiltrationKind.VR, cap)


def _meb_radius_from_sides(a: float, b: float, c: float) -> float:
    """Minimum enclosing ball radius of a triple given its side lengths.

    Same geometry as `geometry.enclosing_radius_3`, but fed the builder's
    own distance floats so that a triangle entering with its longest edge
    carries exactly that edge's value (the edge taxonomy compares the two
    for equality).
    """
    longest = max(a, b, c)
    rest_sq = a * a + b * b + c * c - longest * longest
    if longest * longest >= rest_sq:
        return longest / 2.0
    s = (a + b + c) / 2.0
    area_sq = s * (s - a) * (s - b) * (s - c)
    if area_sq <= 0.0:
        return longest / 2.0
    radius = a * b * c / (4.0 * math.sqrt(area_sq))
    return max(radius, longest / 2.0)


def build_cech(
    cloud: PointCloud | npt.NDArray[np.float64],
    max_scale: float | None = None,
) -> FilteredComplex:
    """Cech filtration up to dimension 2.

    Edge value is half the endpoint distance; triangle value is the
    radius of the triple's minimum enclosing ball, which is at least the
    largest edge value (so faces precede cofaces). The default cap is
    diam/sqrt(3): the circumradius of any triple is bounded by that (its
    largest angle is at least 60 degrees), so the default keeps every
    triangle and the complex tops out as a full 2-skeleton.

    Raises:
        ValueError: coincident points.
    """
    points = _as_points(cloud)
    n = points.shape[0]
    D = _distance_matrix(points)
    diam = float(D.max())
    cap = float(max_scale) if max_scale is not None else diam / math.sqrt(3.0)
    simplices = _vertex_simplices(n)
    kept_edge = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            val = D[i, j] / 2.0
            if val <= cap:
                kept_edge[i, j] = True
                simplices.append(FilteredSimplex((i, j), val))
    for i, j, k in itertools.combinations(range(n), 3):
        if not (kept_edge[i, j] and kept_edge[i, k] and kept_edge[j, k]):
            continue
        val = _meb_radius_from_sides(float(D[i, j]), float(D[i, k]), float(D[j, k]))
        if val <= cap:
            simplices.append(FilteredSimplex((i, j, k), val))
    return FilteredComplex(n, tuple(simplices), FiltrationKind.CECH, cap)


def _circumcircle_2d(
    a: npt.NDArray[np.float64],
    b: npt.NDArray[np.float64],
    c: npt.NDArray[np.float64],
) -> tuple[npt.NDArray[np.float64], float]:
    """Circumcenter and circumradius of a nondegenerate planar triangle."""
    u = b - a
    v = c - a
    den = 2.0 * (u[0] * v[1] - u[1] * v[0])
    if den == 0.0:
        raise ValueError("degenerate (collinear) triangle has no circumcircle")
    uu = float(u[0] * u[0] + u[1] * u[1])
    vv = float(v[0] * v[0] + v[1] * v[1])
    ux = (v[1] * uu - u[1] * vv) / den
    uy = (u[0] * vv - v[0] * uu) / den
    center = a + np.array([ux, uy])
    radius = math.hypot(ux, uy)
    return center, radius


def _lex_smallest_triangulation(cycle: list[int]) -> list[tuple[int, int, int]]:
    """Lexicographically smallest triangulation of a convex polygon.

    `cycle` lists vertex ids in convex (cyclic) order. The smallest
    realizable triangle in a convex polygon is always the one on the
    three smallest ids; picking it splits the polygon into arcs, and
    recursing on each arc keeps the sorted triangle list minimal.
    """
    if len(cycle) < 3:
        return []
    chosen = sorted(sorted(cycle)[:3])
    pos = {v: idx for idx, v in enumerate(cycle)}
    anchors = sorted((pos[v] for v in chosen))
    out = [tuple(chosen)]
    for t in range(3):
        start = anchors[t]
        end = anchors[(t + 1) % 3]
        arc = []
        idx = start
        while True:
            arc.append(cycle[idx])
            if idx == end:
                break
            idx = (idx + 1) % len(cycle)
        out.extend(_lex_smallest_triangulation(arc))
    return sorted(out)


def _collinear_path_complex(points: npt.NDArray[np.float64]) -> list[FilteredSimplex]:
    """Path complex for collinear points: consecutive edges at half-length."""
    n = points.shape[0]
    simplices = _vertex_simplices(n)
    if n == 1:
        return simplices
    # order along the line spanned by the farthest pair
    D = _distance_matrix(points)
    i0, j0 = np.unravel_index(int(D.argmax()), D.shape)
    axis = points[j0] - points[i0]
    order = sorted(range(n), key=lambda k: float(np.dot(points[k] - points[i0], axis)))
    for a, b in zip(order, order[1:]):
        i, j = min(a, b), max(a, b)
        simplices.append(FilteredSimplex((i, j), D[i, j] / 2.0))
    return simplices


def build_delaunay_2d(cloud: PointCloud | npt.NDArray[np.float64]) -> FilteredComplex:
    """Planar alpha filtration on the Delaunay triangulation.

    Triangle value = circumradius. Edge value = half-length if the edge's
    open diametral disk contains no cloud point (Gabriel edge), else the
    minimum of its incident triangles' values. Cocircular groups of 4+
    points are re-triangulated deterministically (lexicographically
    smallest triangulation of the convex polygon). All-collinear input
    degrades to the path complex with edges at half-length.

    Raises:
        ValueError: ambient dimension != 2, or coincident points.
    """
    points = _as_points(cloud)
    n = points.shape[0]
    if points.shape[1] != 2:
        raise ValueError("Delaunay implemented for the plane only")
    D = _distance_matrix(points)

    if n <= 2 or _all_collinear(points):
        simplices = _collinear_path_complex(points)
        cap = max((s.value for s in simplices), default=0.0)
        return FilteredComplex(n, tuple(simplices), FiltrationKind.DELAUNAY, cap)

    try:
        tess = Delaunay(points)
    except QhullError:
        if _all_collinear(points, tol=1e-8):
            simplices = _collinear_path_complex(points)
            cap = max((s.value for s in simplices), default=0.0)
            return FilteredComplex(n, tuple(simplices), FiltrationKind.DELAUNAY, cap)
        raise

    triangles = {tuple(sorted(int(v) for v in tri)) for tri in tess.simplices}
    triangles = _canonicalize_cocircular(points, triangles)

    tri_value: dict[tuple[int, int, int], float] = {}
    for tri in triangles:
        _, radius = _circumcircle_2d(points[tri[0]], points[tri[1]], points[tri[2]])
        longest = max(D[tri[0], tri[1]], D[tri[0], tri[2]], D[tri[1], tri[2]])
        tri_value[tri] = max(radius, longest / 2.0)

    edge_tris: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
    for tri in triangles:
        for e in itertools.combinations(tri, 2):
            edge_tris.setdefault(e, []).append(tri)

    simplices = _vertex_simplices(n)
    for (i, j), tris in sorted(edge_tris.items()):
        mid = (points[i] + points[j]) / 2.0
        rad = D[i, j] / 2.0
        dist = np.sqrt(((points - mid) ** 2).sum(axis=1))
        dist[i] = np.inf
        dist[j] = np.inf
        gabriel = bool(dist.min() >= rad)
        val = rad if gabriel else min(tri_value[t] for t in tris)
        simplices.append(FilteredSimplex((i, j), val))
    for tri, val in sorted(tri_value.items()):
        simplices.append(FilteredSimplex(tri, val))
    cap = max(s.value for s in simplices)
    return FilteredComplex(n, tuple(simplices), FiltrationKind.DELAUNAY, cap)


def _all_collinear(points: npt.NDArray[np.float64], tol: float = 1e-12) -> bool:
    if points.shape[0] <= 2:
        return True
    centered = points - points.mean(axis=0)
    scale = float(np.abs(centered).max())
    if scale == 0.0:
        return True
    sv = np.linalg.svd(centered / scale, compute_uv=False)
    return bool(sv[1] <= tol * max(1.0, sv[0]))


def _canonicalize_cocircular(
    points: npt.NDArray[np.float64],
    triangles: set[tuple[int, int, int]],
) -> set[tuple[int, int, int]]:
    """Replace each cocircular group's triangles with the canonical choice."""
    groups: dict[frozenset[int], None] = {}
    for tri in triangles:
        center, radius = _circumcircle_2d(points[tri[0]], points[tri[1]], points[tri[2]])
        dist = np.sqrt(((points - center) ** 2).sum(axis=1))
        on_circle = np.nonzero(np.abs(dist - radius) <= COCIRCULAR_TOL * max(1.0, radius))[0]
        if on_circle.size >= 4:
            groups[frozenset(int(v) for v in on_circle)] = None
    if not groups:
        return triangles
    out = set(triangles)
    for group in groups:
        members = sorted(group)
        out = {t for t in out if not set(t) <= group}
        center = points[members].mean(axis=0)
        cycle = sorted(
            members,
            key=lambda v: math.atan2(points[v][1] - center[1], points[v][0] - center[0]),
        )
        out.update(_lex_smallest_triangulation(cycle))
    return out


_BUILDERS = {
    FiltrationKind.VR: build_vr,
    FiltrationKind.CECH: build_cech,
}


def build_complex(
    cloud: PointCloud | npt.NDArray[np.float64],
    kind: FiltrationKind | str,
    max_scale: float | None = None,
) -> FilteredComplex:
    """Build the filtration of the requested kind.

    Delaunay ignores `max_scale` (the full triangulation is always
    finite) and rejects a non-None value to avoid silent surprises.
    """
    kind = FiltrationKind(kind)
    if kind is FiltrationKind.DELAUNAY:
        if max_scale is not None:
            raise ValueError("the Delaunay filtration does not take a scale cap")
        return build_delaunay_2d(cloud)
    return _BUILDERS[kind](cloud, max_scale)


def critical_scales(complex: FilteredComplex) -> list[float]:
    """Strictly increasing list of all distinct simplex values."""
    return sorted({s.value for s in complex.simplices})
