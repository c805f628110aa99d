"""Deterministic SVG output for dissections and the parameter chart."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

from .dissection import Dissection, perm_indices, verify
from .errors import UnverifiedDissection
from .families import CURVES, sample_curve, table1_solutions
from .geometry import DEFAULT_TOL


@dataclass(frozen=True)
class RenderOptions:
    width: int = 480
    height: int = 480
    # stroke widths in pixels (strokes do not scale with the drawing)
    stroke: float = 1.5
    outline_stroke: float = 2.5
    labels: str = "none"
    margin: float = 0.08
    fill: bool = True

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("dimensions must be positive")
        if self.stroke <= 0 or self.outline_stroke <= 0:
            raise ValueError("stroke widths must be positive")
        if self.labels not in ("none", "vertex-numbers"):
            raise ValueError(f"unknown label mode {self.labels!r}")
        if not 0 <= self.margin < 0.5:
            raise ValueError("margin fraction must lie in [0, 0.5)")


_PALETTE = ("#f4d35e", "#8ecae6", "#f4978e", "#b8e0a8", "#cdb4db", "#ffd6a5", "#a0c4ff", "#e9c46a",
            "#bde0fe")


def fmt(v: float) -> str:
    """Six decimals, with negative zero folded onto zero."""
    s = f"{v:.6f}"
    return "0.000000" if s == "-0.000000" else s


def _path(points: Iterable[Sequence[float]], closed: bool = True) -> str:
    pts = [f"{fmt(p[0])},{fmt(p[1])}" for p in points]
    return "M" + " L".join(pts) + (" Z" if closed else "")


def _bounds(points: Sequence[Sequence[float]], margin: float):
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0, 1e-12)
    pad = margin * span / (1 - 2 * margin) if margin else 0.0
    return x0 - pad, y0 - pad, x1 + pad, y1 + pad


def _header(opts: RenderOptions, box) -> list[str]:
    x0, y0, x1, y1 = box
    # after the y flip the visible window is [x0, x1] x [-y1, -y0]
    vb = f"{fmt(x0)} {fmt(-y1)} {fmt(x1 - x0)} {fmt(y1 - y0)}"
    return ['<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{opts.width}" '
            f'height="{opts.height}" viewBox="{vb}" preserveAspectRatio="xMidYMid meet">']


def _centroid(pts):
    return sum(p[0] for p in pts) / len(pts), sum(p[1] for p in pts) / len(pts)


def render_dissection(d: Dissection, opts: RenderOptions = RenderOptions(),
                      tol: float = DEFAULT_TOL) -> bytes:
    """SVG of the parent outline and one path per piece.

    With ``labels="vertex-numbers"`` the piece corner ``piece[pi(i)]`` carries the
    digit ``i + 1``, the number of the tile vertex it is the image of.
    """
    if not verify(d, tol).passed:
        raise UnverifiedDissection("refusing to render a dissection that does not verify")
    pts = [tuple(p) for p in d.parent] + [tuple(v) for pc in d.pieces for v in pc.vertices]
    box = _bounds(pts, opts.margin)
    span = max(box[2] - box[0], box[3] - box[1])
    out = _header(opts, box)
    out.append('<g transform="scale(1,-1)" stroke="#000000" stroke-linejoin="round">')
    for k, pc in enumerate(d.pieces):
        fill = _PALETTE[k % len(_PALETTE)] if opts.fill else "none"
        out.append(f'<path class="piece" data-index="{k}" data-perm="{pc.perm}" '
                   f'd="{_path(pc.vertices)}" fill="{fill}" stroke-width="{opts.stroke}" '
                   f'vector-effect="non-scaling-stroke"/>')
    out.append(f'<path class="parent" d="{_path(d.parent)}" fill="none" '
               f'stroke-width="{opts.outline_stroke}" vector-effect="non-scaling-stroke"/>')
    out.append("</g>")
    if opts.labels == "vertex-numbers":
        size = fmt(0.045 * span)
        out.append(f'<g class="labels" font-family="sans-serif" font-size="{size}" '
                   'text-anchor="middle" dominant-baseline="central">')
        for pc in d.pieces:
            cx, cy = _centroid(pc.vertices)
            p = perm_indices(pc.perm)
            for i in range(4):
                vx, vy = pc.vertices[p[i]]
                # pull the digit a fifth of the way toward the piece centre
                lx, ly = vx + 0.2 * (cx - vx), vy + 0.2 * (cy - vy)
                out.append(f'<text x="{fmt(lx)}" y="{fmt(-ly)}">{i + 1}</text>')
        out.append("</g>")
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


def parse_piece_paths(svg: bytes | str) -> list[list[tuple[float, float]]]:
    """Vertex lists of the piece paths of a rendered dissection (in model coordinates)."""
    import xml.etree.ElementTree as ET

    root = ET.fromstring(svg if isinstance(svg, bytes) else svg.encode("utf-8"))
    out = []
    for el in root.iter("{http://www.w3.org/2000/svg}path"):
        if el.get("class") != "piece":
            continue
        toks = el.get("d", "").replace("M", " ").replace("L", " ").replace("Z", " ").split()
        out.append([tuple(float(c) for c in t.split(",")) for t in toks])
    return out


# -- parameter chart -----------------------------------------------------------

_CURVE_STYLE = {"T": "#555555", "A": "#d62828", "B1": "#2a9d8f", "B2": "#264653", "C": "#7b2cbf"}
_REGION = ((0.0, 1.0), (0.5, 0.5), (1.0, 1.0))


def _catalogue_points(catalogue) -> list[tuple[float, float]]:
    if catalogue is None:
        return []
    return [xy for _, _, xy in catalogue.normalized_points()]


def render_parameter_chart(catalogue=None, opts: RenderOptions = RenderOptions(),
                           samples: int = 400) -> bytes:
    """Region ``P`` with the family curves, the singular points and any catalogue points.

    Without a catalogue the known families are drawn.  An empty catalogue draws the
    region boundary only; otherwise its normalized solutions are overlaid as crosses.
    """
    box = _bounds(_REGION, opts.margin)
    span = box[2] - box[0]
    out = _header(opts, box)
    out.append('<g transform="scale(1,-1)" fill="none">')
    out.append(f'<path class="region" d="{_path(_REGION)}" stroke="#000000" '
               f'stroke-width="{opts.outline_stroke}" vector-effect="non-scaling-stroke"/>')
    found = _catalogue_points(catalogue)
    if catalogue is None or found:
        for name in CURVES:
            pts = sample_curve(name, samples)
            if len(pts) < 2:
                continue
            out.append(f'<path class="curve" data-family="{escape(name)}" d="{_path(pts, False)}" '
                       f'stroke="{_CURVE_STYLE[name]}" stroke-width="{opts.stroke}" '
                       'vector-effect="non-scaling-stroke"/>')
        r = fmt(0.008 * span)
        for s in table1_solutions():
            x, y = s.value
            out.append(f'<circle class="singular" data-id="{s.id}" cx="{fmt(x)}" cy="{fmt(y)}" '
                       f'r="{r}" fill="#000000"/>')
    if found:
        h = 0.004 * span
        d = " ".join(f"M{fmt(x - h)},{fmt(y - h)} L{fmt(x + h)},{fmt(y + h)} "
                     f"M{fmt(x - h)},{fmt(y + h)} L{fmt(x + h)},{fmt(y - h)}" for x, y in found)
        out.append(f'<path class="found" d="{d}" stroke="#e76f51" stroke-width="{opts.stroke * 0.5}" '
                   'vector-effect="non-scaling-stroke"/>')
    out.append("</g>")
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")
