"""Bivariate integer polynomials stored as exponent -> coefficient tables."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Poly2:
    """``sum c * x**i * y**j`` over ``terms = {(i, j): c}``."""

    terms: dict[tuple[int, int], int] = field(hash=False)

    def __call__(self, x, y):
        total = 0.0
        for (i, j), c in self.terms.items():
            total = total + c * x**i * y**j
        return total

    def grad(self, x, y):
        gx = 0.0
        gy = 0.0
        for (i, j), c in self.terms.items():
            if i:
                gx = gx + c * i * x ** (i - 1) * y**j
            if j:
                gy = gy + c * j * x**i * y ** (j - 1)
        return gx, gy

    @property
    def degree(self) -> int:
        return max(i + j for i, j in self.terms)

    def coeffs_in_x(self, y: float) -> np.ndarray:
        """Coefficients of ``p(., y)`` in numpy order (highest power first)."""
        d = max(i for i, _ in self.terms)
        out = np.zeros(d + 1)
        for (i, j), c in self.terms.items():
            out[d - i] += c * y**j
        return out

    def coeffs_in_y(self, x: float) -> np.ndarray:
        d = max(j for _, j in self.terms)
        out = np.zeros(d + 1)
        for (i, j), c in self.terms.items():
            out[d - j] += c * x**i
        return out

    def __sub__(self, other: "Poly2") -> "Poly2":
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0) - c
        return Poly2({k: c for k, c in terms.items() if c != 0})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly2):
            return NotImplemented
        a = {k: c for k, c in self.terms.items() if c}
        b = {k: c for k, c in other.terms.items() if c}
        return a == b

    def format(self) -> str:
        """Human-readable form, e.g. ``x^3*y - x*y + 1``."""
        parts = []
        for (i, j), c in sorted(self.terms.items(), key=lambda kv: (-(kv[0][0] + kv[0][1]), -kv[0][0])):
            mono = "*".join(f"{v}^{e}" if e > 1 else v for v, e in (("x", i), ("y", j)) if e)
            mag = abs(c)
            body = mono if mono and mag == 1 else (f"{mag}*{mono}" if mono else f"{mag}")
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        if not parts:
            return "0"
        head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        return head + "".join(f" {s} {b}" for s, b in parts[1:])


def real_roots_in(coeffs: np.ndarray, lo: float, hi: float) -> list[float]:
    """Real roots of a univariate polynomial strictly inside ``(lo, hi)``."""
    coeffs = np.trim_zeros(np.asarray(coeffs, dtype=float), "f")
    if coeffs.size <= 1:
        return []
    out = []
    for r in np.roots(coeffs):
        if abs(r.imag) > 1e-7 * max(1.0, abs(r.real)):
            continue
        x = r.real
        # a few Newton polishing steps on the real axis
        d = np.polyder(coeffs)
        for _ in range(3):
            dv = np.polyval(d, x)
            if dv == 0:
                break
            x = x - np.polyval(coeffs, x) / dv
        if lo < x < hi:
            out.append(float(x))
    return sorted(out)
