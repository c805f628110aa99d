"""The one-parameter families and the thirteen singular affine types.

Every 3-self-affine convex quadrangle has its canonical parameters on one of the
curves ``T, A, B1, B2, C`` or at one of the singular points ``S1..S13``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ConvergenceFailure, InvalidParams
from .params import check_convex, normalize_to_P
from .polynomials import Poly2, real_roots_in

DEFAULT_MEMBER_TOL = 1e-6


@dataclass(frozen=True)
class FamilyCurve:
    name: str
    poly: Poly2
    # open-interval description of the domain, checked on canonical parameters
    domain: Callable[[float, float], bool]
    domain_text: str

    def residual(self, x: float, y: float) -> float:
        return float(self.poly(x, y))

    def distance(self, x: float, y: float) -> float:
        """First-order distance ``|p| / |grad p|`` to the algebraic curve."""
        gx, gy = self.poly.grad(x, y)
        g = math.hypot(gx, gy)
        r = abs(self.poly(x, y))
        return r / g if g > 0 else (0.0 if r == 0 else math.inf)


def _in_open_p(x: float, y: float) -> bool:
    return x + y > 1 and y < 1 and x < y


CURVES: dict[str, FamilyCurve] = {
    "T": FamilyCurve("T", Poly2({(0, 1): 1, (0, 0): -1}),
                     lambda x, y: 0 < x <= 1, "y = 1, 0 < x <= 1"),
    "A": FamilyCurve("A", Poly2({(0, 3): 1, (1, 2): 1, (2, 0): -1, (0, 2): -1}),
                     _in_open_p, "x + y > 1, y < 1, x < y"),
    "B1": FamilyCurve("B1", Poly2({(1, 2): 1, (0, 2): 1, (1, 1): -1, (0, 1): -1,
                                   (1, 0): 1, (2, 0): -1}),
                      _in_open_p, "x + y > 1, y < 1, x < y"),
    "B2": FamilyCurve("B2", Poly2({(3, 0): 1, (2, 2): -1, (2, 1): 1, (2, 0): -2,
                                   (1, 3): -1, (1, 2): 2, (1, 1): -1, (1, 0): 1,
                                   (0, 2): 1, (0, 1): -1}),
                      _in_open_p, "x + y > 1, y < 1, x < y"),
    "C": FamilyCurve("C", Poly2({(0, 1): 1, (2, 0): -1, (1, 0): 1, (0, 0): -1}),
                     lambda x, y: 0 < x < 1, "y = x^2 - x + 1, 0 < x < 1"),
}


def curve_residual(curve: FamilyCurve | str, x: float, y: float) -> float:
    if isinstance(curve, str):
        curve = CURVES[curve]
    return curve.residual(x, y)


# -- singular solutions ------------------------------------------------------

@dataclass(frozen=True)
class SingularSolution:
    id: int
    eq1: Poly2
    eq2: Poly2
    value: tuple[float, float]
    printed: tuple[float, float]
    closed_form: str | None = None
    closed_value: tuple[float, float] | None = None

    @property
    def name(self) -> str:
        return f"S{self.id}"

    def residuals(self, x: float | None = None, y: float | None = None) -> tuple[float, float]:
        if x is None:
            x, y = self.value
        return float(self.eq1(x, y)), float(self.eq2(x, y))


# (eq1, eq2, printed value, closed form); coefficients keyed by (power of x, power of y)
_TABLE1 = {
    1: ({(3, 1): 1, (1, 1): -1, (1, 0): -1, (0, 2): 1, (0, 1): -1, (0, 0): 1},
        {(3, 0): 1, (2, 2): 1, (2, 0): -2, (1, 2): -1, (1, 1): -1, (1, 0): 2, (0, 2): -1,
         (0, 1): 2, (0, 0): -1},
        (0.54368, 0.83928), None),
    2: ({(3, 1): 1, (2, 2): 1, (2, 1): -1, (1, 2): -1, (1, 0): -1, (0, 1): 1},
        {(3, 1): 1, (2, 2): 1, (2, 1): -1, (2, 0): -1, (1, 2): -2, (1, 1): 1, (1, 0): 1,
         (0, 3): -1, (0, 2): 2, (0, 1): -1},
        (0.55706, 0.85490), None),
    3: ({(3, 1): 1, (2, 2): 1, (2, 1): -1, (2, 0): -1, (1, 2): 1, (1, 1): -2, (1, 0): 1,
         (0, 2): -1, (0, 1): 1},
        {(3, 1): 1, (3, 0): -1, (2, 2): 1, (2, 1): -4, (2, 0): 2, (1, 2): -1, (1, 1): 3,
         (1, 0): -1, (0, 2): 1, (0, 1): -1},
        (0.54660, 0.72669), None),
    4: ({(2, 2): 1, (2, 1): 1, (2, 0): -1, (1, 3): 1, (1, 2): -1, (1, 1): -2, (1, 0): 1,
         (0, 2): -1, (0, 1): 1},
        {(4, 0): 1, (3, 1): 1, (3, 0): -3, (2, 1): -2, (2, 0): 2, (1, 2): -1, (1, 1): 3,
         (1, 0): -1, (0, 2): 1, (0, 1): -1},
        (0.50678, 0.67567), None),
    5: ({(3, 1): 1, (2, 2): 2, (2, 1): -2, (2, 0): -1, (1, 3): 1, (1, 2): -3, (1, 1): 2,
         (0, 3): -1, (0, 2): 1},
        {(3, 1): 1, (3, 0): -1, (2, 2): 2, (2, 1): -3, (2, 0): 2, (1, 3): 1, (1, 2): -3,
         (1, 1): 1, (0, 3): -1, (0, 2): 1},
        (0.47759, 0.81530),
        ("((9-4*sqrt(2))/7, (10+sqrt(2))/14)",
         ((9 - 4 * math.sqrt(2)) / 7, (10 + math.sqrt(2)) / 14))),
    6: ({(2, 2): 1, (1, 3): 1, (1, 2): -1, (1, 0): -1, (0, 3): -1, (0, 1): 1},
        {(3, 0): 1, (2, 2): 1, (2, 1): -1, (2, 0): -1, (1, 3): 1, (1, 2): -3, (1, 1): 1,
         (1, 0): 1, (0, 3): -1, (0, 2): 2, (0, 1): -1},
        (0.25805, 0.84781), None),
    7: ({(3, 0): 1, (2, 1): 1, (2, 0): -1, (1, 0): -2, (0, 2): 1, (0, 1): -2, (0, 0): 2},
        {(2, 0): -1, (1, 2): 1, (1, 1): -3, (1, 0): 3, (0, 3): 1, (0, 2): -2, (0, 1): 3,
         (0, 0): -2},
        (0.58750, 0.78257), None),
    8: ({(2, 1): 1, (2, 0): -2, (1, 2): 1, (1, 1): -3, (1, 0): 3, (0, 2): -1, (0, 1): 3,
         (0, 0): -2},
        {(2, 1): 1, (1, 2): 1, (1, 0): -2, (0, 1): -2, (0, 0): 2},
        (0.5, 0.71922),
        ("(1/2, (7-sqrt(17))/4)", (0.5, (7 - math.sqrt(17)) / 4))),
    9: ({(2, 1): 1, (1, 2): 2, (1, 1): -4, (1, 0): 1, (0, 3): 1, (0, 2): -4, (0, 1): 3},
        {(2, 0): 1, (1, 1): 1, (0, 1): -1},
        (0.59100, 0.85403), None),
    10: ({(2, 1): 1, (1, 1): -2, (1, 0): 1, (0, 3): 1, (0, 2): -2, (0, 1): 1},
         {(3, 0): 1, (2, 1): 1, (2, 0): -2, (1, 2): 2, (1, 1): -3, (1, 0): 1, (0, 2): -1,
          (0, 1): 1},
         (0.41803, 0.71831), None),
    11: ({(2, 1): 1, (1, 3): 1, (1, 1): -1, (1, 0): -1, (0, 3): -1, (0, 2): 1, (0, 1): -1,
          (0, 0): 1},
         {(3, 1): 1, (3, 0): -2, (2, 2): -1, (2, 0): 2, (1, 3): -1, (1, 2): 2, (1, 1): 1,
          (1, 0): -2, (0, 2): 1, (0, 1): -2, (0, 0): 1},
         (0.33133, 0.78783), None),
    12: ({(1, 2): 2, (1, 1): -2, (1, 0): 1, (0, 2): -2, (0, 1): 1},
         {(2, 1): 3, (2, 0): -2, (1, 2): 1, (1, 1): -3, (1, 0): 1, (0, 2): -1, (0, 1): 1},
         (0.4, 0.66666), ("(2/5, 2/3)", (0.4, 2.0 / 3.0))),
    13: ({(2, 1): 1, (1, 1): -1, (1, 0): -1, (0, 4): 1, (0, 3): -1, (0, 2): 1, (0, 1): -1,
          (0, 0): 1},
         {(4, 0): 1, (3, 0): -2, (2, 2): -1, (2, 0): 2, (1, 3): -1, (1, 2): 2, (1, 1): 1,
          (1, 0): -2, (0, 2): 1, (0, 1): -2, (0, 0): 1},
         (0.59717, 0.87586), None),
}


def newton2(f1: Poly2, f2: Poly2, seed: tuple[float, float], tol: float = 1e-12,
            max_iter: int = 50) -> tuple[float, float]:
    """Plain 2-D Newton iteration on ``f1 = f2 = 0`` from ``seed``."""
    x, y = seed
    for _ in range(max_iter):
        r1, r2 = f1(x, y), f2(x, y)
        (a, b), (c, d) = f1.grad(x, y), f2.grad(x, y)
        det = a * d - b * c
        if det == 0:
            break
        dx = (d * r1 - b * r2) / det
        dy = (-c * r1 + a * r2) / det
        x, y = x - dx, y - dy
        if abs(dx) + abs(dy) < 1e-16 * (1 + abs(x) + abs(y)):
            break
    if not (abs(f1(x, y)) < tol and abs(f2(x, y)) < tol):
        raise ConvergenceFailure(f"Newton from {seed} ended at ({x}, {y})")
    return float(x), float(y)


@lru_cache(maxsize=None)
def table1_solutions(tol: float = 1e-12) -> tuple[SingularSolution, ...]:
    out = []
    for k, (t1, t2, printed, closed) in _TABLE1.items():
        f1, f2 = Poly2(t1), Poly2(t2)
        value = newton2(f1, f2, printed, tol=tol)
        cf, cv = closed if closed else (None, None)
        out.append(SingularSolution(k, f1, f2, value, printed, cf, cv))
    return tuple(out)


def special_x() -> float:
    """Root in (0, 1) of ``x^3 - 2x^2 + 3x - 1``."""
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid * (mid * (mid - 2) + 3) - 1 > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def special_point() -> tuple[float, float]:
    """The affine type on ``C`` that admits eight distinct type-C dissections."""
    x = special_x()
    return x, x * x - x + 1


# -- membership and sampling -----------------------------------------------

def is_member(x: float, y: float, tol: float = DEFAULT_MEMBER_TOL) -> set[str]:
    check_convex(x, y)
    cx, cy = normalize_to_P(x, y)[0].xy
    found = set()
    for name, curve in CURVES.items():
        if curve.distance(cx, cy) < tol and curve.domain(cx, cy):
            found.add(name)
    for s in table1_solutions():
        if math.hypot(cx - s.value[0], cy - s.value[1]) < tol:
            found.add(s.name)
    return found


def is_special(x: float, y: float, tol: float = DEFAULT_MEMBER_TOL) -> bool:
    check_convex(x, y)
    cx, cy = normalize_to_P(x, y)[0].xy
    sx, sy = special_point()
    return math.hypot(cx - sx, cy - sy) < tol


def points_on_curve(curve: FamilyCurve | str, x: float | None = None,
                    y: float | None = None) -> list[tuple[float, float]]:
    """Curve points (domain enforced) on the vertical line at ``x`` or horizontal line at ``y``."""
    if isinstance(curve, str):
        curve = CURVES[curve]
    if (x is None) == (y is None):
        raise InvalidParams("give exactly one of x, y")
    if curve.name == "T":
        cands = [(float(x), 1.0)] if x is not None else []
    elif x is not None:
        cands = [(x, r) for r in real_roots_in(curve.poly.coeffs_in_y(x), 0.0, 1.0 + 1e-12)]
    else:
        cands = [(r, y) for r in real_roots_in(curve.poly.coeffs_in_x(y), 0.0, 1.0 + 1e-12)]
    out = []
    for px, py in cands:
        # polish against the bivariate polynomial along the free coordinate
        for _ in range(3):
            gx, gy = curve.poly.grad(px, py)
            g = gy if x is not None else gx
            if g == 0:
                break
            step = curve.poly(px, py) / g
            if x is not None:
                py -= step
            else:
                px -= step
        if curve.domain(px, py):
            out.append((float(px), float(py)))
    return sorted(out)


def sample_curve(curve: FamilyCurve | str, n: int) -> list[tuple[float, float]]:
    """``n`` points on the curve from a uniform sweep of ``x``."""
    if isinstance(curve, str):
        curve = CURVES[curve]
    if n < 1:
        raise InvalidParams("n must be positive")
    if curve.name == "T":
        xs = [(i + 1) / n for i in range(n)]
    else:
        xs = [(i + 1) / (n + 1) for i in range(n)]
    out = []
    for x in xs:
        pts = points_on_curve(curve, x=x)
        if pts:
            out.append(pts[0])
    return out


def curve_polyline(curve: FamilyCurve | str, n: int = 400) -> np.ndarray:
    return np.array(sample_curve(curve, n))
