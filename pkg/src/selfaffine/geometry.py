"""Planar primitives: points, affine maps, quadrangles and robust predicates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import CollinearSource, DegenerateQuadrangle, SingularMap

#: global geometric tolerance; every predicate accepts an explicit ``tol`` too
DEFAULT_TOL = 1e-9


class Point2(NamedTuple):
    x: float
    y: float

    def __add__(self, other):  # type: ignore[override]
        return Point2(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point2(self.x - other[0], self.y - other[1])

    def scale(self, c: float) -> "Point2":
        return Point2(c * self.x, c * self.y)


def as_point(p: Sequence[float]) -> Point2:
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite point {p!r}")
    return Point2(x, y)


def cross(u: Sequence[float], v: Sequence[float]) -> float:
    return u[0] * v[1] - u[1] * v[0]


def orient(a: Sequence[float], b: Sequence[float], c: Sequence[float]) -> float:
    """Twice the signed area of triangle abc (positive when counter-clockwise)."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def dist(a: Sequence[float], b: Sequence[float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def line_distance(a, b, p) -> float:
    """Signed distance of ``p`` from the directed line through ``a`` and ``b``."""
    length = dist(a, b)
    if length == 0.0:
        return dist(a, p)
    return orient(a, b, p) / length


def polygon_area(vertices: Sequence[Sequence[float]]) -> float:
    """Signed shoelace area."""
    n = len(vertices)
    s = 0.0
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def segments_cross(p1, p2, q1, q2, tol: float = DEFAULT_TOL) -> bool:
    """True when the two segments intersect in a single point interior to both.

    Touching, shared endpoints and collinear overlaps do not count.
    """
    d1 = line_distance(p1, p2, q1)
    d2 = line_distance(p1, p2, q2)
    if not ((d1 > tol and d2 < -tol) or (d1 < -tol and d2 > tol)):
        return False
    d3 = line_distance(q1, q2, p1)
    d4 = line_distance(q1, q2, p2)
    return (d3 > tol and d4 < -tol) or (d3 < -tol and d4 > tol)


def point_segment_distance(p, a, b) -> float:
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    L2 = dx * dx + dy * dy
    if L2 == 0.0:
        return dist(p, a)
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / L2
    t = min(1.0, max(0.0, t))
    return math.hypot(p[0] - ax - t * dx, p[1] - ay - t * dy)


def point_in_polygon(p, vertices: Sequence[Sequence[float]], tol: float = DEFAULT_TOL) -> int:
    """Locate ``p`` relative to a simple polygon: 1 inside, 0 on boundary, -1 outside."""
    n = len(vertices)
    for i in range(n):
        if point_segment_distance(p, vertices[i], vertices[(i + 1) % n]) <= tol:
            return 0
    winding = 0
    px, py = p
    for i in range(n):
        a = vertices[i]
        b = vertices[(i + 1) % n]
        if a[1] <= py:
            if b[1] > py and orient(a, b, p) > 0:
                winding += 1
        elif b[1] <= py and orient(a, b, p) < 0:
            winding -= 1
    return 1 if winding != 0 else -1


@dataclass(frozen=True)
class AffineMap2:
    """``p -> A p + b`` with ``A = [[a11, a12], [a21, a22]]`` and ``b = (a13, a23)``."""

    a11: float
    a12: float
    a21: float
    a22: float
    a13: float = 0.0
    a23: float = 0.0

    @classmethod
    def identity(cls) -> "AffineMap2":
        return cls(1.0, 0.0, 0.0, 1.0, 0.0, 0.0)

    @classmethod
    def from_matrix(cls, linear, translation=(0.0, 0.0)) -> "AffineMap2":
        (a11, a12), (a21, a22) = linear
        return cls(float(a11), float(a12), float(a21), float(a22),
                   float(translation[0]), float(translation[1]))

    @property
    def linear(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]])

    @property
    def translation(self) -> np.ndarray:
        return np.array([self.a13, self.a23])

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21

    def coefficients(self) -> tuple[float, ...]:
        """Serialization order ``[a11, a12, a21, a22, a13, a23]``."""
        return (self.a11, self.a12, self.a21, self.a22, self.a13, self.a23)

    def __call__(self, p: Sequence[float]) -> Point2:
        return apply(self, p)

    def __matmul__(self, other: "AffineMap2") -> "AffineMap2":
        return compose(self, other)


def apply(f: AffineMap2, p: Sequence[float]) -> Point2:
    x, y = p[0], p[1]
    return Point2(f.a11 * x + f.a12 * y + f.a13, f.a21 * x + f.a22 * y + f.a23)


def compose(f: AffineMap2, g: AffineMap2) -> AffineMap2:
    """The map ``p -> f(g(p))``."""
    return AffineMap2(
        f.a11 * g.a11 + f.a12 * g.a21,
        f.a11 * g.a12 + f.a12 * g.a22,
        f.a21 * g.a11 + f.a22 * g.a21,
        f.a21 * g.a12 + f.a22 * g.a22,
        f.a11 * g.a13 + f.a12 * g.a23 + f.a13,
        f.a21 * g.a13 + f.a22 * g.a23 + f.a23,
    )


def invert(f: AffineMap2, tol: float = DEFAULT_TOL) -> AffineMap2:
    d = f.det
    scale = max(abs(f.a11), abs(f.a12), abs(f.a21), abs(f.a22), 1.0)
    if abs(d) <= tol * scale * scale:
        raise SingularMap(f"determinant {d:.3e} is numerically zero")
    i11, i12, i21, i22 = f.a22 / d, -f.a12 / d, -f.a21 / d, f.a11 / d
    return AffineMap2(i11, i12, i21, i22,
                      -(i11 * f.a13 + i12 * f.a23), -(i21 * f.a13 + i22 * f.a23))


def affine_from_triples(src: Sequence[Sequence[float]], dst: Sequence[Sequence[float]],
                        tol: float = DEFAULT_TOL) -> AffineMap2:
    """The unique affine map sending ``src[i]`` to ``dst[i]`` for ``i = 0, 1, 2``."""
    s0, s1, s2 = (as_point(p) for p in src)
    d0, d1, d2 = (as_point(p) for p in dst)
    u, v = s1 - s0, s2 - s0
    det = cross(u, v)
    if abs(det) <= tol * max(1.0, abs(u[0]) + abs(u[1])) * max(1.0, abs(v[0]) + abs(v[1])):
        raise CollinearSource("source points are collinear")
    # the linear part sends u -> d1 - d0 and v -> d2 - d0
    U, V = d1 - d0, d2 - d0
    # inverse of [u v] is [[v1, -v0], [-u1, u0]] / det
    a11 = (U[0] * v[1] - V[0] * u[1]) / det
    a12 = (-U[0] * v[0] + V[0] * u[0]) / det
    a21 = (U[1] * v[1] - V[1] * u[1]) / det
    a22 = (-U[1] * v[0] + V[1] * u[0]) / det
    return AffineMap2(a11, a12, a21, a22,
                      d0[0] - a11 * s0[0] - a12 * s0[1],
                      d0[1] - a21 * s0[0] - a22 * s0[1])


@dataclass(frozen=True)
class Quadrangle:
    """Four ordered vertices; ``kind`` is ``"convex"`` or ``"nonconvex"``.

    ``reflex`` is the 0-based index of the reflex vertex of a non-convex quadrangle
    and ``orientation`` is +1 for counter-clockwise, -1 for clockwise boundaries.
    """

    vertices: tuple[Point2, Point2, Point2, Point2]
    kind: str
    reflex: int | None = None
    orientation: int = 1

    @property
    def is_convex(self) -> bool:
        return self.kind == "convex"

    @property
    def area(self) -> float:
        return abs(polygon_area(self.vertices))

    def __iter__(self):
        return iter(self.vertices)

    def __getitem__(self, i):
        return self.vertices[i]


def turn_values(vertices: Sequence[Sequence[float]]) -> list[float]:
    """Normalized cross products of consecutive edges, i.e. sines of the turning angles."""
    out = []
    for i in range(4):
        a, b, c = vertices[i - 1], vertices[i], vertices[(i + 1) % 4]
        e1 = (b[0] - a[0], b[1] - a[1])
        e2 = (c[0] - b[0], c[1] - b[1])
        n = math.hypot(*e1) * math.hypot(*e2)
        out.append(cross(e1, e2) / n if n > 0 else 0.0)
    return out


def classify_quadrangle(vertices: Sequence[Sequence[float]], tol: float = DEFAULT_TOL) -> Quadrangle:
    if len(vertices) != 4:
        raise DegenerateQuadrangle("a quadrangle needs exactly four vertices")
    pts = tuple(as_point(p) for p in vertices)
    turns = turn_values(pts)
    if min(abs(t) for t in turns) < tol:
        raise DegenerateQuadrangle("three consecutive vertices are collinear")
    if segments_cross(pts[0], pts[1], pts[2], pts[3], tol) or \
            segments_cross(pts[1], pts[2], pts[3], pts[0], tol):
        raise DegenerateQuadrangle("boundary self-intersects")
    positive = [t > 0 for t in turns]
    n_pos = sum(positive)
    if n_pos in (0, 4):
        return Quadrangle(pts, "convex", None, 1 if n_pos == 4 else -1)
    if n_pos in (1, 3):
        majority = n_pos == 3
        reflex = next(i for i, p in enumerate(positive) if p != majority)
        return Quadrangle(pts, "nonconvex", reflex, 1 if majority else -1)
    raise DegenerateQuadrangle("boundary self-intersects")


def transform_points(f: AffineMap2, points: Sequence[Sequence[float]]) -> tuple[Point2, ...]:
    return tuple(apply(f, p) for p in points)


def interior_point(vertices: Sequence[Sequence[float]]) -> Point2:
    """A point strictly inside a simple quadrangle.

    Uses the centroid of the larger triangle on the side of an interior diagonal,
    which stays inside even for non-convex or straight-angled quadrangles.
    """
    v = [as_point(p) for p in vertices]
    sign = 1.0 if polygon_area(v) > 0 else -1.0
    best = None
    for k in (0, 1):
        t1 = (v[k], v[k + 1], v[k + 2])
        t2 = (v[k + 2], v[(k + 3) % 4], v[k])
        a1, a2 = sign * orient(*t1), sign * orient(*t2)
        if a1 >= 0 and a2 >= 0:
            tri = t1 if a1 >= a2 else t2
            area = max(a1, a2)
            if best is None or area > best[0]:
                best = (area, tri)
    if best is None:
        raise DegenerateQuadrangle("no interior diagonal")
    tri = best[1]
    return Point2(sum(p.x for p in tri) / 3.0, sum(p.y for p in tri) / 3.0)
