"""Short / Medium / Long edge taxonomy for filtered complexes.

An edge is Short when removing it (but keeping every other edge up to and
including its own scale) disconnects its endpoints; Long when some
triangle enters the filtration together with it while the triangle's two
other edges entered strictly earlier; Medium otherwise. The two tests are
mutually exclusive, so hitting both is an internal error.

The `long_by_*` functions are independent distance/angle characterizations
of the Long class, implemented directly from the cloud coordinates so they
share no code with the classifier.
"""

from __future__ import annotations

import itertools
from enum import Enum

import numpy as np
import numpy.typing as npt

from .filtration import FilteredComplex
from .geometry import PointCloud, enclosing_radius_3, non_acute_at

Edge = tuple[int, int]


class EdgeClass(Enum):
    SHORT = "Short"
    MEDIUM = "Medium"
    LONG = "Long"


class ConsistencyError(RuntimeError):
    """An edge tested both Short and Long; the taxonomy forbids that."""


class _UnionFind:
    __slots__ = ("parent", "size")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def clone(self) -> "_UnionFind":
        other = _UnionFind.__new__(_UnionFind)
        other.parent = list(self.parent)
        other.size = list(self.size)
        return other

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


def _long_witnessed(complex: FilteredComplex) -> set[Edge]:
    """Edges having a triangle that enters with them over two earlier edges."""
    values = complex.value_by_simplex
    out: set[Edge] = set()
    for tri in complex.triangles:
        tv = tri.value
        for e in itertools.combinations(tri.vertices, 2):
            if values[e] != tv:
                continue
            others = [f for f in itertools.combinations(tri.vertices, 2) if f != e]
            if all(values[f] < tv for f in others):
                out.add(e)
    return out


def classify_all(complex: FilteredComplex) -> dict[Edge, EdgeClass]:
    """Classify every edge of the complex.

    Returns a map from the edge's (i, j) vertex pair to its class, i < j.

    Raises:
        ConsistencyError: if any edge passes both the Short and the Long
            test (the classes are provably disjoint, so this flags a bug).
    """
    long_witnessed = _long_witnessed(complex)
    result: dict[Edge, EdgeClass] = {}
    uf = _UnionFind(complex.n_vertices)
    edges = complex.edges
    pos = 0
    while pos < len(edges):
        # edges tied at one scale: each Short test sees the others
        group_end = pos
        value = edges[pos].value
        while group_end < len(edges) and edges[group_end].value == value:
            group_end += 1
        group = edges[pos:group_end]
        for idx, edge in enumerate(group):
            probe = uf.clone()
            for other_idx, other in enumerate(group):
                if other_idx != idx:
                    probe.union(other.vertices[0], other.vertices[1])
            p, q = edge.vertices
            short = probe.find(p) != probe.find(q)
            is_long = edge.vertices in long_witnessed
            if short and is_long:
                raise ConsistencyError(
                    f"edge {edge.vertices} tested both short and long at value {value}"
                )
            if short:
                result[edge.vertices] = EdgeClass.SHORT
            elif is_long:
                result[edge.vertices] = EdgeClass.LONG
            else:
                result[edge.vertices] = EdgeClass.MEDIUM
        for edge in group:
            uf.union(edge.vertices[0], edge.vertices[1])
        pos = group_end
    return result


def classify_edge(complex: FilteredComplex, e: int) -> EdgeClass:
    """Class of the edge at index `e` in the complex's edge list.

    Raises:
        IndexError: index out of range.
        ConsistencyError: as in classify_all.
    """
    edges = complex.edges
    if not 0 <= e < len(edges):
        raise IndexError(f"edge index {e} out of range for {len(edges)} edges")
    target = edges[e]
    uf = _UnionFind(complex.n_vertices)
    for other in edges:
        if other.value > target.value:
            break
        if other.vertices != target.vertices:
            uf.union(other.vertices[0], other.vertices[1])
    p, q = target.vertices
    short = uf.find(p) != uf.find(q)
    is_long = target.vertices in _long_witnessed(complex)
    if short and is_long:
        raise ConsistencyError(
            f"edge {target.vertices} tested both short and long at value {target.value}"
        )
    if short:
        return EdgeClass.SHORT
    if is_long:
        return EdgeClass.LONG
    return EdgeClass.MEDIUM


def _check_pair(cloud: PointCloud, p: int, q: int) -> None:
    n = cloud.n_points
    if not (0 <= p < n and 0 <= q < n):
        raise IndexError(f"vertex pair ({p}, {q}) out of range for {n} points")
    if p == q:
        raise ValueError("an edge needs two distinct vertices")


def long_by_vr(cloud: PointCloud | npt.NDArray[np.float64], p: int, q: int) -> bool:
    """Distance characterization of Long for Vietoris-Rips.

    True iff some third point v is strictly closer to both p and q than
    they are to each other.
    """
    if not isinstance(cloud, PointCloud):
        cloud = PointCloud(np.asarray(cloud, dtype=np.float64))
    _check_pair(cloud, p, q)
    pts = cloud.points
    d_pq = float(np.linalg.norm(pts[p] - pts[q]))
    for v in range(cloud.n_points):
        if v in (p, q):
            continue
        if (
            float(np.linalg.norm(pts[p] - pts[v])) < d_pq
            and float(np.linalg.norm(pts[q] - pts[v])) < d_pq
        ):
            return True
    return False


def long_by_cech(cloud: PointCloud | npt.NDArray[np.float64], p: int, q: int) -> bool:
    """Characterization of Long for Cech.

    True iff some third point v is strictly closer to both endpoints than
    the edge length and the triple's enclosing ball at half the edge
    length already covers all three points. For a triple that covering
    condition is the same as a non-acute angle at v.
    """
    if not isinstance(cloud, PointCloud):
        cloud = PointCloud(np.asarray(cloud, dtype=np.float64))
    _check_pair(cloud, p, q)
    pts = cloud.points
    d_pq = float(np.linalg.norm(pts[p] - pts[q]))
    for v in range(cloud.n_points):
        if v in (p, q):
            continue
        if not (
            float(np.linalg.norm(pts[p] - pts[v])) < d_pq
            and float(np.linalg.norm(pts[q] - pts[v])) < d_pq
        ):
            continue
        if enclosing_radius_3(pts[p], pts[q], pts[v]) <= d_pq / 2.0:
            return True
    return False


def long_by_delaunay(cloud: PointCloud | npt.NDArray[np.float64], p: int, q: int) -> bool:
    """Angle characterization of Long for the planar alpha filtration.

    True iff some third point sees the segment [p, q] under a non-acute
    angle. Only meaningful for edges of the Delaunay triangulation.
    """
    if not isinstance(cloud, PointCloud):
        cloud = PointCloud(np.asarray(cloud, dtype=np.float64))
    if cloud.dim != 2:
        raise ValueError("the Delaunay characterization is planar only")
    _check_pair(cloud, p, q)
    pts = cloud.points
    return any(
        non_acute_at(pts[v], pts[p], pts[q])
        for v in range(cloud.n_points)
        if v not in (p, q)
    )
