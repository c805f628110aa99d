"""Affine types of convex quadrangles.

A convex quadrangle with vertices ``v1..v4`` is encoded by the image ``(x, y)`` of
``v4`` under the affine map sending ``v1, v2, v3`` to ``(0,1), (0,0), (1,0)``.
The eight choices of three consecutive vertices give eight encodings; exactly one
lies in the canonical region ``P = {x + y > 1, y <= 1, x <= y}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import InvalidParams, NotApplicable
from .geometry import DEFAULT_TOL, Point2, affine_from_triples, apply

#: region labels in substitution order: identity, ', '', ''', then the swapped family
REGIONS = ("P", "Pprime", "P2prime", "P3prime",
           "Pbar", "Pbarprime", "Pbar2prime", "Pbar3prime")

# label -> inverse substitution label (rotations invert, reflections are involutions)
_INVERSE = {"P": "P", "Pprime": "P3prime", "P2prime": "P2prime", "P3prime": "Pprime",
            "Pbar": "Pbar", "Pbarprime": "Pbarprime", "Pbar2prime": "Pbar2prime",
            "Pbar3prime": "Pbar3prime"}


def _subs(x: float, y: float) -> list[tuple[float, float]]:
    s = x + y - 1.0
    return [
        (x, y),
        (1.0 / y, s / y),
        (y / s, x / s),
        (s / x, 1.0 / x),
        (y, x),
        (s / y, 1.0 / y),
        (x / s, y / s),
        (1.0 / x, s / x),
    ]


def substitute(label: str, x: float, y: float) -> tuple[float, float]:
    """Apply the substitution that carries ``P`` onto region ``label``."""
    return _subs(x, y)[REGIONS.index(label)]


_REGION_TESTS: dict[str, Callable[[float, float], bool]] = {
    "P": lambda x, y: x + y > 1 and y <= 1 and x <= y,
    "Pprime": lambda x, y: y > 0 and x >= 1 and x + y <= 2,
    "P2prime": lambda x, y: y >= 1 and x >= y,
    "P3prime": lambda x, y: x > 0 and x <= 1 and x + y >= 2,
    "Pbar": lambda x, y: x + y > 1 and x <= 1 and x >= y,
    "Pbarprime": lambda x, y: x > 0 and y >= 1 and x + y <= 2,
    "Pbar2prime": lambda x, y: x >= 1 and x <= y,
    "Pbar3prime": lambda x, y: y > 0 and y <= 1 and x + y >= 2,
}


@dataclass(frozen=True)
class NaturalParams:
    x: float
    y: float
    region: str = "P"

    @property
    def xy(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class GcParams:
    alpha: float
    beta: float

    def dual(self) -> "GcParams":
        a, b = self.alpha, self.beta
        return GcParams((1 - b) * a / ((1 - a) * b), (1 - b) / (1 - a))


def check_convex(x: float, y: float) -> None:
    if not (math.isfinite(x) and math.isfinite(y)):
        raise InvalidParams(f"non-finite parameters ({x}, {y})")
    if not (x > 0 and y > 0 and x + y > 1):
        raise InvalidParams(f"({x}, {y}) violates x > 0, y > 0, x + y > 1")


def _snap(x: float, y: float, tol: float) -> tuple[float, float]:
    if abs(y - 1.0) < tol:
        y = 1.0
    if abs(x - 1.0) < tol:
        x = 1.0
    if abs(x - y) < tol:
        x = y = 0.5 * (x + y)
    if abs(x + y - 2.0) < tol and x != y:
        # move onto x + y = 2 along the anti-diagonal
        d = 0.5 * (2.0 - x - y)
        x, y = x + d, y + d
    return x, y


def region_of(x: float, y: float, tol: float = DEFAULT_TOL) -> str:
    """First canonical region (in substitution order) containing ``(x, y)``."""
    sx, sy = _snap(x, y, tol)
    for name in REGIONS:
        if _REGION_TESTS[name](sx, sy):
            return name
    raise InvalidParams(f"({x}, {y}) lies in no canonical region")


def in_region(name: str, x: float, y: float, tol: float = DEFAULT_TOL) -> bool:
    sx, sy = _snap(x, y, tol)
    return _REGION_TESTS[name](sx, sy)


def eight_parametrizations(x: float, y: float, tol: float = DEFAULT_TOL) -> list[NaturalParams]:
    check_convex(x, y)
    return [NaturalParams(a, b, region_of(a, b, tol)) for a, b in _subs(x, y)]


def _violation(x: float, y: float) -> float:
    return max(0.0, y - 1.0, x - y, 1.0 - x - y)


def normalize_to_P(x: float, y: float, tol: float = DEFAULT_TOL) -> tuple[NaturalParams, str]:
    """Canonical encoding in ``P`` plus the region label of the input encoding.

    The label names the substitution that carries the canonical pair back to the
    input, so ``normalize_to_P(1.5, 0.75)`` reports ``"Pbar3prime"``.
    """
    check_convex(x, y)
    cands = _subs(x, y)
    best = None
    for k, (a, b) in enumerate(cands):
        sa, sb = _snap(a, b, tol)
        if _REGION_TESTS["P"](sa, sb):
            best = (k, sa, sb)
            break
    if best is None:
        k = min(range(8), key=lambda i: _violation(*cands[i]))
        best = (k, *_snap(*cands[k], tol))
    k, a, b = best
    label = _INVERSE[REGIONS[k]]
    return NaturalParams(a, b, "P"), label


def canonical(x: float, y: float, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    return normalize_to_P(x, y, tol)[0].xy


def classify_shape(x: float, y: float, tol: float = DEFAULT_TOL) -> str:
    a, b = canonical(x, y, tol)
    if abs(a - 1) < tol and abs(b - 1) < tol:
        return "parallelogram"
    if abs(b - 1) < tol:
        return "trapezoid"
    if abs(a - b) < tol or abs(a + b - 2) < tol:
        return "affine_kite"
    return "generic"


def is_trapezoid(x: float, y: float, tol: float = 1e-7) -> bool:
    return abs(x - 1) < tol or abs(y - 1) < tol


def gc_to_natural(g: GcParams) -> NaturalParams:
    a, b = g.alpha, g.beta
    if not (0 < a < b < 1):
        raise InvalidParams(f"gc parameters need 0 < alpha < beta < 1, got ({a}, {b})")
    x, y = (1 - b) / (1 - a), b
    return NaturalParams(x, y, region_of(x, y))


def natural_to_gc(x: float, y: float, tol: float = DEFAULT_TOL) -> GcParams:
    check_convex(x, y)
    if abs(x - 1) < tol or abs(y - 1) < tol:
        raise NotApplicable("trapezoids have no gc-parametrization")
    if not (x < 1 and y < 1):
        raise InvalidParams(f"({x}, {y}) needs x < 1 and y < 1")
    return GcParams((x + y - 1) / x, y)


def representative(x: float, y: float) -> tuple[Point2, Point2, Point2, Point2]:
    """The quadrangle ``(0,1), (0,0), (1,0), (x,y)`` of type ``Q[x,y]``."""
    return (Point2(0.0, 1.0), Point2(0.0, 0.0), Point2(1.0, 0.0), Point2(float(x), float(y)))


def layout_representative(x: float, y: float) -> tuple[Point2, Point2, Point2, Point2]:
    """Same type listed as ``(0,0), (1,0), (x,y), (0,1)``; the solver layout."""
    return (Point2(0.0, 0.0), Point2(1.0, 0.0), Point2(float(x), float(y)), Point2(0.0, 1.0))


def natural_params_of(vertices: Sequence[Sequence[float]], start: int = 0,
                      reverse: bool = False) -> tuple[float, float]:
    """Raw ``(x, y)`` read off a vertex list, starting at ``start`` in either direction."""
    order = [(start - k) % 4 for k in range(4)] if reverse else [(start + k) % 4 for k in range(4)]
    v = [vertices[i] for i in order]
    f = affine_from_triples(v[:3], [(0.0, 1.0), (0.0, 0.0), (1.0, 0.0)])
    p = apply(f, v[3])
    return (p.x, p.y)
