"""Explicit self-affine dissections.

Trapezoids use the standard embedding ``(0,0), (1,0), (z,1), (0,1)`` with ratio
``z`` of the parallel sides.  Non-convex quadrangles ``Q[x,y]`` have vertices
``(0,1), (0,0), (1,0), (x,y)`` with ``x, y > 0`` and ``x + y < 1``, so the reflex
vertex is ``(x, y)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dissection import (
    Dissection,
    check,
    combinatorial_type,
    piece_from_map,
    piece_from_vertices,
)
from .errors import DegenerateDiagonals, DegenerateQuadrangle, InvalidParams, InvalidWeights, \
    ParallelogramExcluded
from .geometry import (
    DEFAULT_TOL,
    AffineMap2,
    Point2,
    Quadrangle,
    apply,
    classify_quadrangle,
    compose,
    cross,
    dist,
)


# -- trapezoids ----------------------------------------------------------------

def standard_trapezoid(z: float) -> tuple[Point2, Point2, Point2, Point2]:
    return (Point2(0.0, 0.0), Point2(1.0, 0.0), Point2(z, 1.0), Point2(0.0, 1.0))


def _check_z(z: float) -> None:
    if not (math.isfinite(z) and 0 < z <= 1):
        raise InvalidParams(f"trapezoid ratio must lie in (0, 1], got {z}")


def _assemble(parent, piece_vertices, tol: float, tile=None) -> Dissection:
    src = parent if tile is None else tile
    pieces = tuple(piece_from_vertices(src, v, tol=tol) for v in piece_vertices)
    d = Dissection(parent, pieces, "other", tile)
    check(d, tol)
    if len(pieces) == 3:
        d = Dissection(parent, pieces, combinatorial_type(d, tol), tile)
    return d


def trapezoid_A(z: float, weights=(1 / 3, 1 / 3, 1 / 3), tol: float = DEFAULT_TOL) -> Dissection:
    """Three strips cutting both parallel sides in the proportions ``weights``."""
    _check_z(z)
    w = np.asarray(weights, dtype=float)
    if w.shape != (3,) or not np.all(np.isfinite(w)) or np.any(w <= 0) or abs(w.sum() - 1) > 1e-12:
        raise InvalidWeights(f"weights must be three positive numbers summing to 1, got {weights}")
    c1, c2 = float(w[0]), float(w[0] + w[1])
    parent = standard_trapezoid(z)
    pieces = [
        [(0.0, 0.0), (c1, 0.0), (z * c1, 1.0), (0.0, 1.0)],
        [(c1, 0.0), (c2, 0.0), (z * c2, 1.0), (z * c1, 1.0)],
        [(c2, 0.0), (1.0, 0.0), (z, 1.0), (z * c2, 1.0)],
    ]
    return _assemble(parent, pieces, tol)


def zeta(z: float) -> float:
    return z / (1 + z + z * z)


def zeta_identity_residual(z: float) -> float:
    """``z - zeta - z^2 (1 - z zeta)``, zero by definition of ``zeta``."""
    c = zeta(z)
    return z - c - z * z * (1 - z * c)


def trapezoid_B(z: float, tol: float = DEFAULT_TOL) -> Dissection:
    """A full cut from ``(z zeta, 0)`` to ``(zeta, 1)`` and a horizontal sub-cut to the right leg."""
    _check_z(z)
    c = zeta(z)
    h = (1 - z * c) / (1 + c)
    t = Point2(z * c + h * (c - z * c), h)
    u = Point2(1 - (1 - z) * h, h)
    parent = standard_trapezoid(z)
    pieces = [
        [(0.0, 0.0), (z * c, 0.0), (c, 1.0), (0.0, 1.0)],
        [(z * c, 0.0), (1.0, 0.0), u, t],
        [t, u, (z, 1.0), (c, 1.0)],
    ]
    return _assemble(parent, pieces, tol)


def trapezoid_C(z: float, tol: float = DEFAULT_TOL, parallelogram_tol: float = 1e-5) -> Dissection:
    """Three pieces meeting at the interior vertex ``(z^2, z)``."""
    if not math.isfinite(z) or z <= 0:
        raise InvalidParams(f"trapezoid ratio must be positive, got {z}")
    if z >= 1 - parallelogram_tol:
        raise ParallelogramExcluded("parallelograms admit no type-C self-affinity")
    parent = standard_trapezoid(z)
    s = (z * z, z)
    pieces = [
        [(0.0, 0.0), (z, 0.0), s, (0.0, z)],
        [(z, 0.0), (1.0, 0.0), (z, 1.0), s],
        [(0.0, z), s, (z, 1.0), (0.0, 1.0)],
    ]
    return _assemble(parent, pieces, tol)


# -- non-convex quadrangles ------------------------------------------------------

@dataclass(frozen=True)
class NonconvexParams:
    x: float
    y: float

    def __post_init__(self):
        x, y = self.x, self.y
        if not (math.isfinite(x) and math.isfinite(y) and x > 0 and y > 0 and x + y < 1):
            raise InvalidParams(f"non-convex parameters need x, y > 0 and x + y < 1, got ({x}, {y})")

    @property
    def swapped(self) -> "NonconvexParams":
        return NonconvexParams(self.y, self.x)

    def quadrangle(self) -> tuple[Point2, Point2, Point2, Point2]:
        return nonconvex_quadrangle(self.x, self.y)


def nonconvex_quadrangle(x: float, y: float) -> tuple[Point2, Point2, Point2, Point2]:
    return (Point2(0.0, 1.0), Point2(0.0, 0.0), Point2(1.0, 0.0), Point2(x, y))


def _params(p) -> NonconvexParams:
    if isinstance(p, NonconvexParams):
        return p
    return NonconvexParams(*p)


def chain_map(x: float, y: float) -> AffineMap2:
    """Fixes ``(1,0)`` and ``(0,1)`` and sends ``(0,0)`` to ``(x,y)``."""
    return AffineMap2(1 - x, -x, -y, 1 - y, x, y)


def chain_factor(x: float, y: float, k: int) -> float:
    s = x + y
    return (1 - (1 - s) ** k) / s


def nonconvex_chain(p, k: int, tol: float = DEFAULT_TOL) -> Dissection:
    """Stack ``k`` chain images of ``Q[x,y]`` into a larger non-convex quadrangle."""
    p = _params(p)
    if int(k) != k or k < 1:
        raise InvalidParams(f"k must be a positive integer, got {k}")
    x, y = p.x, p.y
    c = chain_factor(x, y, k)
    tile = nonconvex_quadrangle(x, y)
    parent = (Point2(0.0, 1.0), Point2(0.0, 0.0), Point2(1.0, 0.0), Point2(c * x, c * y))
    a = chain_map(x, y)
    f = AffineMap2.identity()
    pieces = []
    for _ in range(k):
        pieces.append(piece_from_map(tile, f))
        f = compose(a, f)
    d = Dissection(parent, tuple(pieces), "other", None if k == 1 else tile)
    return check(d, tol)


def split_map(x: float, y: float) -> AffineMap2:
    return AffineMap2(x, 0.0, y - 1, -1.0, 0.0, 1.0)


def nonconvex_split(p) -> tuple[Quadrangle, AffineMap2, Quadrangle]:
    """Cut off the copy ``beta(Q)`` and return it with ``beta`` and the remaining quadrangle.

    A remainder that collapses to a triangle is returned with ``kind == "degenerate"``.
    """
    p = _params(p)
    x, y = p.x, p.y
    b = split_map(x, y)
    q = nonconvex_quadrangle(x, y)
    piece = classify_quadrangle([apply(b, v) for v in q])
    rem = (Point2(0.0, 0.0), Point2(1.0, 0.0), Point2(x, y), Point2(x * x, (1 - x) * (1 - y)))
    try:
        remainder = classify_quadrangle(rem)
    except DegenerateQuadrangle:
        remainder = Quadrangle(rem, "degenerate")
    return piece, b, remainder


def f_n(x, n: int):
    x = np.asarray(x, dtype=float)
    return (1 - (1 - x) ** (2 * n - 2)) * (1 - x + x * x) - x * (2 - x)


def solve_f_n(n: int, grid: int = 10_000, xtol: float = 1e-14) -> list[float]:
    """All sign-change roots of ``f_n`` in the open interval ``(0, 1)``."""
    if int(n) != n or n < 3:
        raise InvalidParams(f"n must be an integer >= 3, got {n}")
    xs = np.linspace(0.0, 1.0, grid + 1)[1:-1]
    vals = f_n(xs, n)
    roots = [float(xs[i]) for i in np.flatnonzero(vals == 0)]
    for i in np.flatnonzero(vals[:-1] * vals[1:] < 0):
        lo, hi = float(xs[i]), float(xs[i + 1])
        flo = float(vals[i])
        while hi - lo > xtol:
            mid = 0.5 * (lo + hi)
            fm = float(f_n(mid, n))
            if fm == 0:
                lo = hi = mid
                break
            if (fm < 0) == (flo < 0):
                lo, flo = mid, fm
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    return sorted(roots)


def assembly_map(x0: float) -> AffineMap2:
    """Sends the chain parent onto the remainder of the split (when ``f_n(x0) = 0``)."""
    return AffineMap2(x0 * x0, 1.0, (1 - x0) * (1 - x0 + x0 * x0), 0.0)


def gamma_closure_residual(x0: float, n: int) -> float:
    """Distance between the image of the chain parent's reflex vertex and ``(x0, y0)``."""
    y0 = x0 * (1 - x0)
    c = chain_factor(x0, y0, n - 1)
    img = apply(assembly_map(x0), (c * x0, c * y0))
    return dist(img, (x0, y0))


def nonconvex_n_self_affine(n: int, tol: float = DEFAULT_TOL) -> Dissection:
    """An ``n``-piece self-affine dissection of ``Q[x0, x0(1-x0)]``."""
    roots = solve_f_n(n)
    if not roots:
        raise InvalidParams(f"f_{n} has no root in (0, 1)")
    x0 = roots[0]
    y0 = x0 * (1 - x0)
    q = nonconvex_quadrangle(x0, y0)
    pieces = [piece_from_map(q, split_map(x0, y0))]
    g = assembly_map(x0)
    a = chain_map(x0, y0)
    f = AffineMap2.identity()
    for _ in range(n - 1):
        pieces.append(piece_from_map(q, compose(g, f)))
        f = compose(a, f)
    d = Dissection(q, tuple(pieces), "other")
    if n == 3:
        d = Dissection(q, tuple(pieces), combinatorial_type(d, tol))
    return check(d, tol)


def interior_vertices(d: Dissection, tol: float = 1e-9) -> list[Point2]:
    """Distinct piece vertices lying strictly inside the parent."""
    from .geometry import point_in_polygon

    out: list[Point2] = []
    for pc in d.pieces:
        for v in pc.vertices:
            if point_in_polygon(v, d.parent, tol) > 0 and all(dist(v, w) > tol for w in out):
                out.append(v)
    return sorted(out)


def diagonal_invariant(q, tol: float = DEFAULT_TOL) -> float:
    """``|v1 v3| / |v1 d|`` with ``v3`` the reflex vertex and ``d`` on the outer diagonal."""
    quad = q if isinstance(q, Quadrangle) else classify_quadrangle(q)
    if quad.kind != "nonconvex" or quad.reflex is None:
        raise InvalidParams("diagonal invariant needs a non-convex quadrangle")
    r = quad.reflex
    v3 = quad[r]
    v1 = quad[(r + 2) % 4]
    v2 = quad[(r + 1) % 4]
    v4 = quad[(r + 3) % 4]
    u = (v3.x - v1.x, v3.y - v1.y)
    w = (v4.x - v2.x, v4.y - v2.y)
    den = cross(u, w)
    if abs(den) <= tol * math.hypot(*u) * math.hypot(*w):
        raise DegenerateDiagonals("inner diagonal is parallel to the outer diagonal")
    # v1 + t u = v2 + s w
    r2 = (v2.x - v1.x, v2.y - v1.y)
    t = cross(r2, w) / den
    return 1.0 / t
