"""Reduced dissection systems.

The parent is always laid out as ``L = (0,0), (1,0), (x,y), (0,1)``.  A template
places three pieces inside ``L`` as functions of six unknowns (``x, y`` first).
For a piece ``V`` with correspondence ``pi`` the affine map ``F`` with
``F(L[i]) = V[pi(i)]`` is fixed by the three corners ``(0,0), (1,0), (0,1)``,

    F(a, b) = V[pi(0)] + a (V[pi(1)] - V[pi(0)]) + b (V[pi(3)] - V[pi(0)]),

so the remaining corner contributes the residual ``F(x, y) - V[pi(2)]``.
Three pieces give six equations in six unknowns.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


class Dual:
    """Forward-mode dual number: value ``v`` of shape ``(N,)`` and gradient ``g`` of shape ``(N, K)``."""

    __slots__ = ("v", "g")

    def __init__(self, v, g):
        self.v = v
        self.g = g

    def __add__(self, o):
        if isinstance(o, Dual):
            return Dual(self.v + o.v, self.g + o.g)
        return Dual(self.v + o, self.g)

    __radd__ = __add__

    def __sub__(self, o):
        if isinstance(o, Dual):
            return Dual(self.v - o.v, self.g - o.g)
        return Dual(self.v - o, self.g)

    def __rsub__(self, o):
        return Dual(o - self.v, -self.g)

    def __neg__(self):
        return Dual(-self.v, -self.g)

    def __mul__(self, o):
        if isinstance(o, Dual):
            return Dual(self.v * o.v, self.g * o.v[:, None] + o.g * self.v[:, None])
        return Dual(self.v * o, self.g * o)

    __rmul__ = __mul__


def variables(u: np.ndarray) -> list[Dual]:
    n, k = u.shape
    eye = np.eye(k)
    return [Dual(u[:, j], np.broadcast_to(eye[j], (n, k))) for j in range(k)]


def _lift(c, n: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(c, Dual):
        return np.broadcast_to(c.v, (n,)), np.broadcast_to(c.g, (n, k))
    return np.full(n, float(c)) if np.ndim(c) == 0 else np.asarray(c), np.zeros((n, k))


# -- layouts --------------------------------------------------------------------
# a layout maps a list of six coordinates (floats, arrays or duals) to three pieces,
# each a list of four (X, Y) vertices.

def _layout_c(u):
    x, y, s, t, m, n = u
    A = [(0.0, 0.0), (m, 0.0), (s, t), (0.0, n)]
    B = [(1.0, 0.0), (x, y), (s, t), (m, 0.0)]
    C = [(0.0, 1.0), (0.0, n), (s, t), (x, y)]
    return [A, B, C]


def _parent(u):
    x, y = u[0], u[1]
    return [(0.0, 0.0), (1.0, 0.0), (x, y), (0.0, 1.0)]


def _lerp(p, q, a):
    return (p[0] + a * (q[0] - p[0]), p[1] + a * (q[1] - p[1]))


def _layout_a(k: int):
    def layout(u):
        L = _parent(u)
        W = [L[(i + k) % 4] for i in range(4)]
        u1, u2, v1, v2 = u[2:]
        P1, P2 = _lerp(W[0], W[1], u1), _lerp(W[0], W[1], u2)
        R1, R2 = _lerp(W[3], W[2], v1), _lerp(W[3], W[2], v2)
        return [[W[0], P1, R1, W[3]], [P1, P2, R2, R1], [P2, W[1], W[2], R2]]
    return layout


def _layout_b(k: int):
    def layout(u):
        L = _parent(u)
        W = [L[(i + k) % 4] for i in range(4)]
        a, b, w, r = u[2:]
        P = _lerp(W[0], W[1], a)
        R = _lerp(W[3], W[2], b)
        T = _lerp(P, R, w)
        U = _lerp(W[1], W[2], r)
        return [[W[0], P, R, W[3]], [P, W[1], U, T], [T, U, W[2], R]]
    return layout


@dataclass(frozen=True)
class Template:
    """A reduced system family: ``C``, ``A0``, ``A1`` or ``B0`` .. ``B3``."""

    name: str
    unknowns: tuple[str, ...]
    layout: Callable
    # start box for the quasi-random multistart
    start_lo: tuple[float, ...]
    start_hi: tuple[float, ...]

    @property
    def kind(self) -> str:
        return self.name[0]

    def pieces(self, u) -> list[list[tuple]]:
        return self.layout(list(u))

    def parent(self, u) -> list[tuple]:
        return _parent(list(u))

    def cut_ok(self, U: np.ndarray, margin: float = 1e-7) -> np.ndarray:
        """Open-interval constraints on the cut parameters (batched)."""
        c = U[:, 2:]
        lo, hi = margin, 1 - margin
        if self.kind == "C":
            return np.all((c[:, 2:] > lo) & (c[:, 2:] < hi), axis=1)
        if self.kind == "A":
            u1, u2, v1, v2 = c.T
            return ((u1 > lo) & (u2 - u1 > margin) & (u2 < hi)
                    & (v1 > lo) & (v2 - v1 > margin) & (v2 < hi))
        return np.all((c > lo) & (c < hi), axis=1)


_BIG = 5.0

TEMPLATES: dict[str, Template] = {
    "C": Template("C", ("x", "y", "s", "t", "m", "n"), _layout_c,
                  (0, 0, 0, 0, 0, 0), (_BIG, _BIG, _BIG, _BIG, 1, 1)),
}
for _k in range(2):
    TEMPLATES[f"A{_k}"] = Template(f"A{_k}", ("x", "y", "u1", "u2", "v1", "v2"), _layout_a(_k),
                                   (0, 0, 0, 0, 0, 0), (_BIG, _BIG, 1, 1, 1, 1))
for _k in range(4):
    TEMPLATES[f"B{_k}"] = Template(f"B{_k}", ("x", "y", "u", "v", "w", "r"), _layout_b(_k),
                                   (0, 0, 0, 0, 0, 0), (_BIG, _BIG, 1, 1, 1, 1))

#: template families addressed by the sweep
FAMILIES = {"C": ("C",), "A": ("A0", "A1"), "B": ("B0", "B1", "B2", "B3")}


def template(name: str) -> Template:
    try:
        return TEMPLATES[name]
    except KeyError:
        raise ValueError(f"unknown template {name!r}") from None


def piece_arrays(tpl: Template, U: np.ndarray) -> np.ndarray:
    """Piece vertices as an array of shape ``(N, 3, 4, 2)``."""
    n = U.shape[0]
    pcs = tpl.pieces([U[:, j] for j in range(U.shape[1])])
    out = np.empty((n, 3, 4, 2))
    for j, pc in enumerate(pcs):
        for i, (X, Y) in enumerate(pc):
            out[:, j, i, 0] = X
            out[:, j, i, 1] = Y
    return out


def _coefficients(x: np.ndarray, y: np.ndarray, p: np.ndarray):
    """Weights ``c`` with ``residual = sum_k c_k V_k`` plus the one-hot corner selectors."""
    eye = np.eye(4)
    e0, e1, e2, e3 = eye[p[:, 0]], eye[p[:, 1]], eye[p[:, 2]], eye[p[:, 3]]
    c = e0 + x[:, None] * (e1 - e0) + y[:, None] * (e3 - e0) - e2
    return c, e1 - e0, e3 - e0


def residual_jacobian(tpl: Template, U: np.ndarray, pidx: np.ndarray):
    """Residuals ``(N, 6)`` and Jacobians ``(N, 6, 6)`` for rows ``U`` with correspondences ``pidx``.

    ``pidx`` has shape ``(N, 3, 4)`` holding 0-based ``pi(i)`` for each piece.
    """
    n, k = U.shape
    pcs = tpl.pieces(variables(U))
    R = np.empty((n, 6))
    J = np.empty((n, 6, k))
    x, y = U[:, 0], U[:, 1]
    V = np.empty((n, 4, 2))
    G = np.empty((n, 4, 2, k))
    for j, pc in enumerate(pcs):
        for i, (X, Y) in enumerate(pc):
            V[:, i, 0], G[:, i, 0] = _lift(X, n, k)
            V[:, i, 1], G[:, i, 1] = _lift(Y, n, k)
        c, dx, dy = _coefficients(x, y, pidx[:, j, :])
        R[:, 2 * j:2 * j + 2] = (c[:, None, :] @ V)[:, 0]
        g = (c[:, None, :] @ G.reshape(n, 4, 2 * k)).reshape(n, 2, k)
        # x and y are unknowns 0 and 1 and multiply the edge vectors directly
        g[:, :, 0] += (dx[:, None, :] @ V)[:, 0]
        g[:, :, 1] += (dy[:, None, :] @ V)[:, 0]
        J[:, 2 * j:2 * j + 2] = g
    return R, J


def residual(tpl: Template, U: np.ndarray, pidx: np.ndarray) -> np.ndarray:
    n = U.shape[0]
    V = piece_arrays(tpl, U)
    rows = np.arange(n)[:, None]
    x, y = U[:, 0:1], U[:, 1:2]
    out = np.empty((n, 6))
    for j in range(3):
        Vp = V[:, j][rows, pidx[:, j, :]]
        out[:, 2 * j:2 * j + 2] = Vp[:, 0] + x * (Vp[:, 1] - Vp[:, 0]) + y * (Vp[:, 3] - Vp[:, 0]) - Vp[:, 2]
    return out
