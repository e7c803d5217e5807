"""Euclidean primitives: point clouds, rays, angles, enclosing radii.

Angles between directions are computed with the two-argument arctangent
form, which stays accurate for nearly parallel and nearly opposite
vectors where a plain arccos of the dot product loses digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

# Points closer than this are treated as coincident (degenerate input).
COINCIDENT_TOL = 1e-12

# Default slack for angle-threshold comparisons (radians).
ANGLE_TOL = 1e-9


@dataclass(frozen=True)
class PointCloud:
    """Finite ordered list of points in R^N.

    Args:
        points: array-like of shape (n, N), n >= 1. Coordinates must be
            finite. The array is copied and frozen.
    """

    points: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim != 2:
            raise ValueError(f"points must be a 2-d array, got ndim={pts.ndim}")
        if pts.shape[0] < 1:
            raise ValueError("point cloud must contain at least one point")
        if pts.shape[1] < 1:
            raise ValueError("ambient dimension must be at least 1")
        if not np.all(np.isfinite(pts)):
            raise ValueError("coordinates must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.n_points

    def __getitem__(self, i: int) -> npt.NDArray[np.float64]:
        return self.points[i]

    def diameter(self) -> float:
        """Largest pairwise distance (0.0 for a single point)."""
        if self.n_points == 1:
            return 0.0
        diff = self.points[:, None, :] - self.points[None, :, :]
        return float(np.sqrt((diff * diff).sum(axis=2)).max())


@dataclass(frozen=True)
class Ray:
    """Ray from `vertex` in unit direction `direction`.

    A nonzero direction of any length is accepted and normalized.
    """

    vertex: npt.NDArray[np.float64]
    direction: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        v = np.array(self.vertex, dtype=np.float64, copy=True)
        d = np.array(self.direction, dtype=np.float64, copy=True)
        if v.ndim != 1 or d.ndim != 1:
            raise ValueError("vertex and direction must be 1-d arrays")
        if v.shape != d.shape:
            raise ValueError(
                f"vertex and direction dimensions differ: {v.shape} vs {d.shape}"
            )
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(d))):
            raise ValueError("ray coordinates must be finite")
        norm = float(np.linalg.norm(d))
        if norm < COINCIDENT_TOL:
            raise ValueError("ray direction must be nonzero")
        d = d / norm
        v.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "vertex", v)
        object.__setattr__(self, "direction", d)

    @property
    def dim(self) -> int:
        return self.vertex.shape[0]


def oriented_angle(u: npt.NDArray[np.float64], v: npt.NDArray[np.float64]) -> float:
    """Angle in [0, pi] between nonzero vectors u and v.

    Uses 2*atan2(|u^ - v^|, |u^ + v^|) on the normalized vectors, which is
    exact at 0 and pi and does not suffer the arccos cancellation near
    either end.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu < COINCIDENT_TOL or nv < COINCIDENT_TOL:
        raise ValueError("cannot measure the angle of a zero vector")
    uh = u / nu
    vh = v / nv
    return 2.0 * math.atan2(float(np.linalg.norm(uh - vh)), float(np.linalg.norm(uh + vh)))


def segment_angle(
    a: npt.NDArray[np.float64],
    b: npt.NDArray[np.float64],
    c: npt.NDArray[np.float64],
    d: npt.NDArray[np.float64],
) -> float:
    """Unoriented angle in [0, pi/2] between segments [a,b] and [c,d].

    The segments are treated as undirected lines: the result is the acute
    angle between their directions, independent of endpoint order.

    Raises:
        ValueError: if either segment has (numerically) zero length.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    u = b - a
    v = d - c
    if float(np.linalg.norm(u)) < COINCIDENT_TOL or float(np.linalg.norm(v)) < COINCIDENT_TOL:
        raise ValueError("degenerate segment: endpoints coincide")
    phi = oriented_angle(u, v)
    return min(phi, math.pi - phi)


def angular_deviation(points: npt.NDArray[np.float64] | PointCloud, ray: Ray) -> float:
    """Largest angle any chord of `points` makes with the axis of `ray`.

    Every unordered pair of points defines a segment; the result is the
    maximum of segment_angle between those segments and the ray's line.
    Lies in [0, pi/2]; unoriented, so reversing the ray changes nothing.

    Args:
        points: at least 2 pairwise distinct points, shape (n, N).
        ray: the reference axis.

    Raises:
        ValueError: fewer than 2 points, or coincident points.
    """
    pts = points.points if isinstance(points, PointCloud) else np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("angular deviation needs at least 2 points")
    if pts.shape[1] != ray.dim:
        raise ValueError("points and ray live in different dimensions")
    axis_a = ray.vertex
    axis_b = ray.vertex + ray.direction
    worst = 0.0
    n = pts.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if float(np.linalg.norm(pts[j] - pts[i])) < COINCIDENT_TOL:
                raise ValueError(f"coincident points at indices {i} and {j}")
            worst = max(worst, segment_angle(pts[i], pts[j], axis_a, axis_b))
    return worst


def angular_thickness(points: npt.NDArray[np.float64] | PointCloud, ray: Ray) -> float:
    """Largest oriented angle from the ray direction to any point after the first.

    The first point must sit on the ray vertex; each later point p
    contributes the oriented angle between ray.direction and p - vertex.
    Lies in [0, pi]. A single point has thickness 0 by convention.

    Raises:
        ValueError: first point off the ray vertex, or a later point
            coincident with it.
    """
    pts = points.points if isinstance(points, PointCloud) else np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError("angular thickness needs at least 1 point")
    if pts.shape[1] != ray.dim:
        raise ValueError("points and ray live in different dimensions")
    if float(np.linalg.norm(pts[0] - ray.vertex)) > COINCIDENT_TOL:
        raise ValueError("first point must coincide with the ray vertex")
    worst = 0.0
    for i in range(1, pts.shape[0]):
        off = pts[i] - pts[0]
        if float(np.linalg.norm(off)) < COINCIDENT_TOL:
            raise ValueError(f"point {i} coincides with the ray vertex")
        worst = max(worst, oriented_angle(ray.direction, off))
    return worst


def min_ray_angle(cloud: PointCloud, v: int, ray: Ray) -> float:
    """Smallest oriented angle between the ray direction and any other point.

    Args:
        cloud: at least 2 points.
        v: index of the ray's base point in `cloud`.
        ray: its vertex must coincide with cloud[v].

    Returns:
        min over p in cloud, p != cloud[v], of the oriented angle between
        ray.direction and p - cloud[v]. In [0, pi].

    Raises:
        ValueError: singleton cloud, vertex mismatch, or another point of
            the cloud coinciding with cloud[v].
    """
    if not 0 <= v < cloud.n_points:
        raise IndexError(f"vertex index {v} out of range for {cloud.n_points} points")
    if cloud.n_points < 2:
        raise ValueError("min ray angle needs at least 2 points")
    if cloud.dim != ray.dim:
        raise ValueError("cloud and ray live in different dimensions")
    base = cloud.points[v]
    if float(np.linalg.norm(base - ray.vertex)) > COINCIDENT_TOL:
        raise ValueError("ray vertex must coincide with the indexed cloud point")
    best = math.inf
    for i in range(cloud.n_points):
        if i == v:
            continue
        off = cloud.points[i] - base
        if float(np.linalg.norm(off)) < COINCIDENT_TOL:
            raise ValueError(f"point {i} duplicates the ray base point {v}")
        best = min(best, oriented_angle(ray.direction, off))
    return best


def enclosing_radius_3(
    p: npt.NDArray[np.float64],
    q: npt.NDArray[np.float64],
    r: npt.NDArray[np.float64],
) -> float:
    """Radius of the smallest ball enclosing three points (any ambient dim).

    If the angle opposite the longest side is non-acute (collinear and
    coincident cases included), the ball spans that side: radius is half
    the longest pairwise distance. Otherwise the triple is an acute
    triangle and the radius is its circumradius.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    pts = [p, q, r]
    # side k is opposite vertex k
    sides = [
        float(np.linalg.norm(q - r)),
        float(np.linalg.norm(p - r)),
        float(np.linalg.norm(p - q)),
    ]
    k = int(np.argmax(sides))
    a, b = [pts[i] for i in range(3) if i != k]
    w = pts[k]
    if float(np.dot(a - w, b - w)) <= 0.0:
        return sides[k] / 2.0
    # acute triangle: circumradius a*b*c / 4K with K from the cross norm
    u = q - p
    v = r - p
    gram = float(np.dot(u, u)) * float(np.dot(v, v)) - float(np.dot(u, v)) ** 2
    area2 = math.sqrt(max(gram, 0.0))  # = 2 * triangle area
    if area2 <= 0.0:
        return sides[k] / 2.0
    return sides[0] * sides[1] * sides[2] / (2.0 * area2)


def non_acute_at(
    v: npt.NDArray[np.float64],
    p: npt.NDArray[np.float64],
    q: npt.NDArray[np.float64],
) -> bool:
    """True when the angle at v in the triple (p, v, q) is >= pi/2.

    Decided by the exact sign of (p - v) . (q - v); a right angle counts
    as non-acute.

    Raises:
        ValueError: if v coincides with p or q.
    """
    v = np.asarray(v, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if float(np.linalg.norm(p - v)) < COINCIDENT_TOL or float(np.linalg.norm(q - v)) < COINCIDENT_TOL:
        raise ValueError("angle vertex coincides with an endpoint")
    return float(np.dot(p - v, q - v)) <= 0.0
