"""Dissections of a quadrangle into affine copies of a tile.

A piece stores its four vertices, the affine map from the tile and a vertex
correspondence ``perm``: ``map(tile[i]) == vertices[int(perm[i]) - 1]``.
Usually the tile is the parent itself; chain dissections of non-convex
quadrangles tile the parent with copies of a different quadrangle.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import CollinearSource, NotThreePieces, TypeMismatch, VerificationFailure
from .geometry import (
    DEFAULT_TOL,
    AffineMap2,
    Point2,
    affine_from_triples,
    apply,
    as_point,
    compose,
    dist,
    interior_point,
    invert,
    point_in_polygon,
    point_segment_distance,
    polygon_area,
    segments_cross,
)
from . import serialize

#: the eight dihedral vertex correspondences, in the order used by the sweep
PERMS = ("1234", "2341", "3412", "4123", "1432", "2143", "3214", "4321")

CTYPES = ("A", "B", "C", "other")


def perm_indices(perm: str) -> tuple[int, int, int, int]:
    """0-based images ``pi(i) - 1``."""
    return tuple(int(c) - 1 for c in perm)  # type: ignore[return-value]


def compose_perms(p: str, q: str) -> str:
    """``p o q`` as a correspondence string: ``i -> p(q(i))``."""
    pi, qi = perm_indices(p), perm_indices(q)
    return "".join(str(pi[qi[i]] + 1) for i in range(4))


def _quad(vertices: Sequence[Sequence[float]]) -> tuple[Point2, Point2, Point2, Point2]:
    if len(vertices) != 4:
        raise ValueError("a quadrangle needs four vertices")
    return tuple(as_point(p) for p in vertices)  # type: ignore[return-value]


@dataclass(frozen=True)
class Piece:
    vertices: tuple[Point2, Point2, Point2, Point2]
    map: AffineMap2
    perm: str

    def __post_init__(self):
        object.__setattr__(self, "vertices", _quad(self.vertices))
        if self.perm not in PERMS:
            raise ValueError(f"{self.perm!r} is not a dihedral correspondence")

    @property
    def area(self) -> float:
        return abs(polygon_area(self.vertices))


@dataclass(frozen=True)
class Dissection:
    parent: tuple[Point2, Point2, Point2, Point2]
    pieces: tuple[Piece, ...]
    ctype: str = "other"
    tile: tuple[Point2, Point2, Point2, Point2] | None = None
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "parent", _quad(self.parent))
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if self.tile is not None:
            object.__setattr__(self, "tile", _quad(self.tile))
        if self.ctype not in CTYPES:
            raise ValueError(f"unknown combinatorial type {self.ctype!r}")

    @property
    def tile_vertices(self) -> tuple[Point2, Point2, Point2, Point2]:
        return self.parent if self.tile is None else self.tile

    def __len__(self) -> int:
        return len(self.pieces)

    def transformed(self, f: AffineMap2) -> "Dissection":
        """Image of the whole dissection under ``f``; the tile moves only if it is the parent."""
        pieces = tuple(Piece(tuple(apply(f, p) for p in pc.vertices), compose(f, pc.map), pc.perm)
                       for pc in self.pieces)
        if self.tile is None:
            # maps are tile -> piece; with tile = parent they conjugate by f
            finv = invert(f)
            pieces = tuple(Piece(pc.vertices, compose(pc.map, finv), pc.perm) for pc in pieces)
            return Dissection(tuple(apply(f, p) for p in self.parent), pieces, self.ctype)
        return Dissection(tuple(apply(f, p) for p in self.parent), pieces, self.ctype, self.tile)

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        out = {
            "parent": [list(p) for p in self.parent],
            "pieces": [{"vertices": [list(p) for p in pc.vertices],
                        "map": list(pc.map.coefficients()),
                        "perm": pc.perm} for pc in self.pieces],
            "ctype": self.ctype,
        }
        if self.tile is not None:
            out["tile"] = [list(p) for p in self.tile]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Dissection":
        pieces = tuple(Piece(tuple(tuple(v) for v in pc["vertices"]),
                             AffineMap2(*map(float, pc["map"])), str(pc["perm"]))
                       for pc in data["pieces"])
        tile = data.get("tile")
        return cls(tuple(tuple(v) for v in data["parent"]), pieces,
                   data.get("ctype", "other"),
                   None if tile is None else tuple(tuple(v) for v in tile))

    def to_json(self, indent: int | None = 1) -> str:
        return serialize.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "Dissection":
        return cls.from_dict(serialize.loads(text))


def piece_from_vertices(tile: Sequence[Sequence[float]], vertices: Sequence[Sequence[float]],
                        tol: float = 1e-9) -> Piece:
    """Find the correspondence and map presenting ``vertices`` as an affine copy of ``tile``."""
    tile = _quad(tile)
    verts = _quad(vertices)
    best = None
    for perm in PERMS:
        idx = perm_indices(perm)
        try:
            f = affine_from_triples(tile[:3], [verts[idx[i]] for i in range(3)])
        except CollinearSource:
            continue
        err = dist(apply(f, tile[3]), verts[idx[3]])
        if err <= tol:
            return Piece(verts, f, perm)
        if best is None or err < best[0]:
            best = (err, perm)
    raise VerificationFailure(f"no vertex correspondence fits (best residual {best and best[0]:.3e})")


def piece_from_map(tile: Sequence[Sequence[float]], f: AffineMap2, perm: str = "1234") -> Piece:
    """The piece ``f(tile)`` with its vertices listed so that ``perm`` holds."""
    tile = _quad(tile)
    idx = perm_indices(perm)
    verts: list[Point2 | None] = [None] * 4
    for i in range(4):
        verts[idx[i]] = apply(f, tile[i])
    return Piece(tuple(verts), f, perm)  # type: ignore[arg-type]


# -- verification --------------------------------------------------------------

@dataclass(frozen=True)
class VerificationReport:
    passed: bool
    area_defect: float
    max_affine_residual: float
    disjointness_violations: tuple[str, ...] = ()
    coverage_violations: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.passed


def _edges(v):
    return [(v[i], v[(i + 1) % 4]) for i in range(4)]


def verify(d: Dissection, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Check that ``d`` is a genuine dissection into affine copies of its tile."""
    parent = d.parent
    tile = d.tile_vertices
    xs = [p.x for p in parent]
    ys = [p.y for p in parent]
    scale = max(1.0, max(xs) - min(xs), max(ys) - min(ys))
    ptol = tol * scale
    parent_area = abs(polygon_area(parent))
    tile_area = abs(polygon_area(tile))

    disjoint: list[str] = []
    cover: list[str] = []
    if not d.pieces:
        return VerificationReport(False, parent_area, math.inf, (), ("no pieces",))

    max_res = 0.0
    for k, pc in enumerate(d.pieces):
        idx = perm_indices(pc.perm)
        for i in range(4):
            max_res = max(max_res, dist(apply(pc.map, tile[i]), pc.vertices[idx[i]]))
        # the map must be non-degenerate and consistent with the piece area
        if abs(pc.map.det) * tile_area <= tol * parent_area:
            cover.append(f"piece {k} is degenerate")
        elif abs(abs(pc.map.det) * tile_area - pc.area) > max(tol * parent_area, 10 * max_res * scale):
            cover.append(f"piece {k} area disagrees with its map determinant")

    total = sum(pc.area for pc in d.pieces)
    area_defect = abs(parent_area - total) / parent_area if parent_area > 0 else math.inf
    if not area_defect <= tol:
        cover.append(f"area defect {area_defect:.3e}")

    for k, pc in enumerate(d.pieces):
        for i, p in enumerate(pc.vertices):
            if point_in_polygon(p, parent, ptol) < 0:
                cover.append(f"vertex {i} of piece {k} lies outside the parent")

    for a, b in itertools.combinations(range(len(d.pieces)), 2):
        va, vb = d.pieces[a].vertices, d.pieces[b].vertices
        bad = False
        for (p1, p2), (q1, q2) in itertools.product(_edges(va), _edges(vb)):
            if segments_cross(p1, p2, q1, q2, ptol):
                bad = True
                break
        if not bad:
            for u, w in ((va, vb), (vb, va)):
                try:
                    c = interior_point(u)
                except ValueError:
                    c = None
                if c is not None and point_in_polygon(c, w, ptol) > 0:
                    bad = True
                    break
        if bad:
            disjoint.append(f"pieces {a} and {b} overlap")

    passed = max_res <= ptol and not disjoint and not cover
    return VerificationReport(passed, area_defect, max_res, tuple(disjoint), tuple(cover))


def check(d: Dissection, tol: float = DEFAULT_TOL) -> Dissection:
    """Return ``d`` unchanged or raise ``VerificationFailure``."""
    rep = verify(d, tol)
    if not rep.passed:
        problems = rep.disjointness_violations + rep.coverage_violations
        raise VerificationFailure(f"dissection failed verification: residual "
                                  f"{rep.max_affine_residual:.3e}; {'; '.join(problems)}")
    return d


# -- combinatorial type ------------------------------------------------------

def _snap_points(points, tol):
    reps: list[Point2] = []
    ids = []
    for p in points:
        for k, r in enumerate(reps):
            if dist(p, r) <= tol:
                ids.append(k)
                break
        else:
            reps.append(p)
            ids.append(len(reps) - 1)
    return reps, ids


def _boundary_side(p, parent, tol) -> set[int]:
    return {i for i in range(4)
            if point_segment_distance(p, parent[i], parent[(i + 1) % 4]) <= tol}


def combinatorial_type(d: Dissection, tol: float = DEFAULT_TOL) -> str:
    """Classify a three-piece dissection by the incidence pattern of its cuts."""
    if len(d.pieces) != 3:
        raise NotThreePieces(f"expected 3 pieces, got {len(d.pieces)}")
    parent = d.parent
    scale = max(1.0, max(dist(parent[0], p) for p in parent))
    stol = max(tol, 1e-9) * scale
    allv = [p for pc in d.pieces for p in pc.vertices]
    reps, ids = _snap_points(allv, stol)
    sides = [_boundary_side(p, parent, stol) for p in reps]
    corners = {k for k, r in enumerate(reps) if any(dist(r, q) <= stol for q in parent)}

    # cut edges: piece edges not contained in one parent side
    cut_edges = set()
    for j in range(3):
        loop = ids[4 * j:4 * j + 4]
        for i in range(4):
            a, b = loop[i], loop[(i + 1) % 4]
            if a == b:
                continue
            if sides[a] & sides[b]:
                continue
            cut_edges.add((min(a, b), max(a, b)))

    interior = [k for k in range(len(reps)) if not sides[k]]
    if not interior:
        # two disjoint cuts, each joining interiors of opposite sides
        if len(cut_edges) != 2:
            return "other"
        for a, b in cut_edges:
            if a in corners or b in corners:
                return "other"
            sa, sb = sides[a], sides[b]
            if len(sa) != 1 or len(sb) != 1:
                return "other"
            (ia,), (ib,) = sa, sb
            if (ia - ib) % 4 != 2:
                return "other"
        return "A"
    if len(interior) != 1:
        return "other"
    v = interior[0]
    dirs = []
    for a, b in cut_edges:
        if v in (a, b):
            w = reps[b if a == v else a]
            u = (w.x - reps[v].x, w.y - reps[v].y)
            n = math.hypot(*u)
            u = (u[0] / n, u[1] / n)
            if not any(abs(u[0] - e[0]) + abs(u[1] - e[1]) < 1e-7 for e in dirs):
                dirs.append(u)
    if len(dirs) != 3:
        return "other"
    opposite = any(abs(p[0] + q[0]) + abs(p[1] + q[1]) < 1e-7
                   for p, q in itertools.combinations(dirs, 2))
    return "B" if opposite else "C"


# -- congruence, refinement and signatures -----------------------------------

def dihedral_orders() -> list[tuple[int, int, int, int]]:
    """The eight vertex orderings of a quadrangle as 0-based index tuples."""
    return [perm_indices(p) for p in PERMS]


def find_congruence(src: Sequence[Sequence[float]], dst: Sequence[Sequence[float]],
                    tol: float = 1e-9) -> tuple[AffineMap2, str]:
    """An affine ``g`` and correspondence ``sigma`` with ``g(src[i]) = dst[sigma(i)]``."""
    src, dst = _quad(src), _quad(dst)
    scale = max(1.0, max(dist(dst[0], p) for p in dst))
    for perm in PERMS:
        idx = perm_indices(perm)
        try:
            g = affine_from_triples(src[:3], [dst[idx[i]] for i in range(3)])
        except CollinearSource:
            continue
        if dist(apply(g, src[3]), dst[idx[3]]) <= tol * scale:
            return g, perm
    raise TypeMismatch("quadrangles are not affinely congruent")


def refine(d: Dissection, piece_index: int, sub: Dissection, tol: float = 1e-9) -> Dissection:
    """Replace piece ``piece_index`` of ``d`` by the corresponding image of ``sub``."""
    tile = d.tile_vertices
    target = d.pieces[piece_index]
    # g sends d's tile onto sub's parent; g2 sends d's tile onto sub's tile
    g, _ = find_congruence(tile, sub.parent, tol)
    g2, tau = find_congruence(tile, sub.tile_vertices, tol)
    ginv = invert(g)
    outer = compose(target.map, ginv)
    new = []
    for k, pc in enumerate(d.pieces):
        if k != piece_index:
            new.append(pc)
            continue
        for spc in sub.pieces:
            f = compose(outer, compose(spc.map, g2))
            verts = tuple(apply(outer, p) for p in spc.vertices)
            new.append(Piece(verts, f, compose_perms(spc.perm, tau)))
    return Dissection(d.parent, tuple(new), "other", d.tile, dict(d.meta))


def _quantize(v: float, q: float) -> int:
    return int(round(v / q))


def equivalence_signature(d: Dissection, quantum: float = 1e-6) -> bytes:
    """Canonical bytes, invariant under affine images of ``d`` and relabelled pieces."""
    parent = d.parent
    best = None
    for order in dihedral_orders():
        p = [parent[i] for i in order]
        try:
            n = affine_from_triples(p[:3], [(0.0, 1.0), (0.0, 0.0), (1.0, 0.0)])
        except CollinearSource:
            continue
        tile = [d.tile_vertices[i] for i in order] if d.tile is None else list(d.tile)
        head = tuple(_quantize(c, quantum) for c in apply(n, p[3]))
        body = []
        for pc in d.pieces:
            pts = []
            for t in tile:
                q = apply(n, apply(pc.map, t))
                pts.extend((_quantize(q.x, quantum), _quantize(q.y, quantum)))
            body.append(tuple(pts))
        key = (head, tuple(sorted(body)))
        if best is None or key < best:
            best = key
    if best is None:
        raise CollinearSource("parent has no three non-collinear consecutive vertices")
    return serialize.dumps([list(best[0]), [list(b) for b in best[1]]], indent=None).encode()


__all__ = [
    "PERMS", "Piece", "Dissection", "VerificationReport", "verify", "check",
    "combinatorial_type", "refine", "find_congruence", "equivalence_signature",
    "piece_from_vertices", "piece_from_map", "compose_perms", "perm_indices",
]
