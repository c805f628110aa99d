"""Multistart solving of the reduced dissection systems over all 512 correspondence triples."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import qmc

from .. import serialize
from ..dissection import (
    PERMS,
    Dissection,
    Piece,
    check,
    combinatorial_type,
    compose_perms,
    equivalence_signature,
    find_congruence,
    perm_indices,
    verify,
)
from ..errors import MissingCatalogue, VerificationFailure
from ..families import CURVES, special_point
from ..geometry import Point2, affine_from_triples
from ..params import eight_parametrizations, normalize_to_P
from .newton import levenberg_marquardt
from .templates import FAMILIES, TEMPLATES, Template, piece_arrays, residual_jacobian, template

_PIDX = np.array([perm_indices(p) for p in PERMS])
_TRIPLE_IDX = np.array(list(itertools.product(range(8), repeat=3)))

Triple = tuple[str, str, str]

#: correspondence triples producing the one-parameter families and the singular types
FAMILY_TRIPLES: tuple[Triple, ...] = (
    ("1432", "1234", "4321"), ("1432", "3214", "2341"), ("3214", "1234", "1432"),
    ("3214", "4123", "2143"), ("3214", "2143", "4123"), ("3214", "3214", "3412"),
)
SINGULAR_TRIPLES: tuple[Triple, ...] = (
    ("2341", "1234", "1234"), ("2341", "1234", "2143"), ("2341", "2341", "1234"),
    ("2341", "2341", "1432"), ("2341", "2341", "2143"), ("2341", "1432", "2143"),
    ("2341", "2143", "1234"), ("2341", "2143", "1432"), ("2341", "2143", "2143"),
    ("4123", "1234", "4321"), ("4123", "3214", "1432"), ("4123", "3214", "4321"),
    ("2143", "1234", "3412"), ("2143", "2341", "1432"), ("2143", "2143", "3412"),
)


def all_triples() -> list[Triple]:
    return [tuple(p) for p in itertools.product(PERMS, repeat=3)]  # type: ignore[misc]


def triple_index(triple: Sequence[str]) -> int:
    a, b, c = (PERMS.index(p) for p in triple)
    return 64 * a + 8 * b + c


def triple_from_index(k: int) -> Triple:
    return tuple(PERMS[i] for i in _TRIPLE_IDX[k])  # type: ignore[return-value]


# -- configuration and results -------------------------------------------------

@dataclass(frozen=True)
class SolverConfig:
    seed: int = 0
    starts: int = 2000
    max_iter: int = 100
    dedup_radius: float = 1e-7
    #: largest residual norm recorded as a solution
    residual_tol: float = 1e-10
    #: Newton target; accepted points must reach this
    converge_tol: float = 1e-12
    #: smallest piece area, as a fraction of the parent area
    min_piece_fraction: float = 1e-5
    margin: float = 1e-7
    trapezoid_tol: float = 1e-7
    rank_tol: float = 1e-8
    trace_min_points: int = 20
    trace_step: float = 1e-3
    trace_max_step: float = 0.02
    trace_max_points: int = 3000
    absorb_radius: float = 1e-3
    trapezoid_cap: int = 20
    verify_tol: float = 1e-9
    chunk: int = 16
    jobs: int = 1


@dataclass(frozen=True)
class ReducedSystem:
    """Six equations in six unknowns for one template and one correspondence triple."""

    template: Template
    triple: Triple

    @property
    def unknowns(self) -> tuple[str, ...]:
        return self.template.unknowns

    @property
    def pidx(self) -> np.ndarray:
        return np.array([perm_indices(p) for p in self.triple])

    def residual_jacobian(self, U: np.ndarray):
        U = np.atleast_2d(np.asarray(U, dtype=float))
        return residual_jacobian(self.template, U, np.broadcast_to(self.pidx, (len(U), 3, 4)))

    def residual(self, u) -> np.ndarray:
        R, _ = self.residual_jacobian(u)
        return R[0] if np.ndim(u) == 1 else R

    def jacobian(self, u) -> np.ndarray:
        _, J = self.residual_jacobian(u)
        return J[0] if np.ndim(u) == 1 else J


def build_system(triple: Sequence[str], template_name: str = "C") -> ReducedSystem:
    triple = tuple(triple)
    if len(triple) != 3 or any(p not in PERMS for p in triple):
        raise ValueError(f"invalid correspondence triple {triple!r}")
    return ReducedSystem(template(template_name), triple)  # type: ignore[arg-type]


@dataclass(frozen=True)
class Solution:
    u: tuple[float, ...]
    residual: float
    xy: tuple[float, float]
    region: str

    def to_dict(self) -> dict:
        return {"u": list(self.u), "residual": self.residual, "xy": list(self.xy),
                "region": self.region}

    @classmethod
    def from_dict(cls, d: dict) -> "Solution":
        return cls(tuple(d["u"]), d["residual"], tuple(d["xy"]), d["region"])


@dataclass(frozen=True)
class SolutionCurve:
    points: tuple[tuple[float, ...], ...]
    max_residual: float
    family: str | None

    @property
    def canonical(self) -> list[tuple[float, float]]:
        return [normalize_to_P(p[0], p[1])[0].xy for p in self.points]

    def to_dict(self) -> dict:
        return {"family": self.family, "max_residual": self.max_residual,
                "n_points": len(self.points), "points": [list(p) for p in self.points]}

    @classmethod
    def from_dict(cls, d: dict) -> "SolutionCurve":
        return cls(tuple(tuple(p) for p in d["points"]), d["max_residual"], d["family"])


@dataclass
class SolutionSet:
    template: str
    triple: Triple
    isolated: list[Solution] = field(default_factory=list)
    curves: list[SolutionCurve] = field(default_factory=list)
    trapezoidal: list[Solution] = field(default_factory=list)
    n_trapezoidal: int = 0
    #: singular points that continuation could not extend (limits of collapsing pieces)
    n_degenerate: int = 0

    @property
    def index(self) -> int:
        return triple_index(self.triple)

    @property
    def has_nontrapezoidal(self) -> bool:
        return bool(self.isolated or self.curves)

    def to_dict(self) -> dict:
        return {"template": self.template, "index": self.index, "triple": list(self.triple),
                "isolated": [s.to_dict() for s in self.isolated],
                "curves": [c.to_dict() for c in self.curves],
                "n_trapezoidal": self.n_trapezoidal, "n_degenerate": self.n_degenerate,
                "trapezoidal": [s.to_dict() for s in self.trapezoidal]}

    @classmethod
    def from_dict(cls, d: dict) -> "SolutionSet":
        return cls(d["template"], tuple(d["triple"]),
                   [Solution.from_dict(s) for s in d["isolated"]],
                   [SolutionCurve.from_dict(c) for c in d["curves"]],
                   [Solution.from_dict(s) for s in d["trapezoidal"]],
                   d["n_trapezoidal"], d.get("n_degenerate", 0))


# -- validity ---------------------------------------------------------------

def _signed_areas(V: np.ndarray) -> np.ndarray:
    X, Y = V[..., 0], V[..., 1]
    return 0.5 * np.sum(X * np.roll(Y, -1, axis=-1) - np.roll(X, -1, axis=-1) * Y, axis=-1)


def valid_mask(tpl: Template, U: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    """Box restrictions plus non-degenerate, positively oriented pieces."""
    U = np.atleast_2d(U)
    x, y = U[:, 0], U[:, 1]
    with np.errstate(invalid="ignore"):
        ok = (np.all(np.isfinite(U), axis=1) & (x > 0) & (y > 0) & (x + y > 1 + cfg.margin)
              & (x <= y + 1e-9) & (x < 5) & (y < 5) & tpl.cut_ok(U, cfg.margin))
        if tpl.kind == "C":
            s, t = U[:, 2], U[:, 3]
            ok &= (s > 0) & (t > 0) & (s < np.maximum(1, x)) & (t < np.maximum(1, y))
        areas = _signed_areas(piece_arrays(tpl, U))
        ok &= np.all(areas > cfg.min_piece_fraction * 0.5 * (x + y)[:, None], axis=1)
    return ok


def is_trapezoidal(u, tol: float = 1e-7) -> bool:
    """``x = 1`` or ``y = 1``, tested on the raw and on the normalized parameters."""
    x, y = float(u[0]), float(u[1])
    if abs(x - 1) < tol or abs(y - 1) < tol:
        return True
    a, b = normalize_to_P(x, y)[0].xy
    return abs(a - 1) < tol or abs(b - 1) < tol


# -- materialization ------------------------------------------------------------

def dissection_from_solution(triple: Sequence[str], u: Sequence[float], template_name: str = "C",
                             tol: float = 1e-9) -> Dissection:
    """Build and verify the dissection described by a solution vector ``u``."""
    tpl = template(template_name)
    u = np.asarray(u, dtype=float).reshape(1, -1)
    V = piece_arrays(tpl, u)[0]
    x, y = float(u[0, 0]), float(u[0, 1])
    parent = (Point2(0.0, 0.0), Point2(1.0, 0.0), Point2(x, y), Point2(0.0, 1.0))
    corners = (parent[0], parent[1], parent[3])
    pieces = []
    for j, perm in enumerate(triple):
        p = perm_indices(perm)
        verts = tuple(Point2(float(a), float(b)) for a, b in V[j])
        f = affine_from_triples(corners, (verts[p[0]], verts[p[1]], verts[p[3]]))
        pieces.append(Piece(verts, f, perm))
    d = Dissection(parent, tuple(pieces), "other")
    rep = verify(d, tol)
    if not rep.passed:
        raise VerificationFailure(f"solution of {'/'.join(triple)} does not verify: "
                                  f"residual {rep.max_affine_residual:.3e}, "
                                  f"{list(rep.disjointness_violations + rep.coverage_violations)}")
    return Dissection(parent, tuple(pieces), combinatorial_type(d, tol))


def _verifies(triple, u, template_name, tol) -> bool:
    try:
        dissection_from_solution(triple, u, template_name, tol)
    except (VerificationFailure, ValueError):
        return False
    return True


# -- continuation ------------------------------------------------------------

def _tangent(J: np.ndarray) -> np.ndarray:
    return np.linalg.svd(J)[2][-1]


def _corrector(system: ReducedSystem, pred: np.ndarray, t: np.ndarray, tol: float):
    v = pred.copy()
    for _ in range(12):
        R, J = system.residual_jacobian(v)
        r = R[0]
        nr = float(np.linalg.norm(r))
        A = np.vstack([J[0], t])
        b = np.concatenate([r, [t @ (v - pred)]])
        if nr < tol and abs(b[-1]) < 1e-13:
            return v, nr
        dv = np.linalg.lstsq(A, -b, rcond=None)[0]
        v = v + dv
        if not np.all(np.isfinite(v)):
            return None, math.inf
    R, _ = system.residual_jacobian(v)
    nr = float(np.linalg.norm(R[0]))
    return (v, nr) if nr < tol else (None, nr)


def _trace_direction(system: ReducedSystem, u0: np.ndarray, t0: np.ndarray,
                     cfg: SolverConfig) -> list[np.ndarray]:
    tpl = system.template
    pts: list[np.ndarray] = []
    u, t, h = u0, t0, cfg.trace_step
    while len(pts) < cfg.trace_max_points and h >= 1e-7:
        v, _ = _corrector(system, u + h * t, t, cfg.converge_tol)
        good = (v is not None and np.linalg.norm(v - u) < 2 * h
                and valid_mask(tpl, v[None], cfg)[0]
                and not is_trapezoidal(v, cfg.trapezoid_tol)
                and _verifies(system.triple, v, tpl.name, cfg.verify_tol))
        if not good:
            h *= 0.5
            continue
        tn = _tangent(system.jacobian(v))
        if tn @ t < 0:
            tn = -tn
        pts.append(v)
        # a closed branch returns to its start
        if len(pts) > 3 and np.linalg.norm(v - u0) < 0.5 * h:
            break
        u, t = v, tn
        if len(pts) >= cfg.trace_min_points:
            h = min(1.5 * h, cfg.trace_max_step)
    return pts


def trace_curve(system: ReducedSystem, u0: Sequence[float], cfg: SolverConfig) -> np.ndarray:
    """Pseudo-arclength continuation through ``u0`` in both directions."""
    u0 = np.asarray(u0, dtype=float)
    t0 = _tangent(system.jacobian(u0))
    fwd = _trace_direction(system, u0, t0, cfg)
    bwd = _trace_direction(system, u0, -t0, cfg)
    return np.array(bwd[::-1] + [u0] + fwd)


def _polyline_distance(p: np.ndarray, poly: np.ndarray) -> float:
    if len(poly) == 1:
        return float(np.linalg.norm(p - poly[0]))
    a, b = poly[:-1], poly[1:]
    d = b - a
    L2 = np.einsum("ij,ij->i", d, d)
    s = np.clip(np.einsum("ij,ij->i", p - a, d) / np.where(L2 > 0, L2, 1), 0, 1)
    q = a + s[:, None] * d
    return float(np.min(np.linalg.norm(p - q, axis=1)))


def classify_curve(points: Iterable[Sequence[float]], tol: float = 1e-8) -> str | None:
    """Name of the family curve containing every (normalized) point, if any."""
    canon = [normalize_to_P(p[0], p[1])[0].xy for p in points]
    for name, curve in CURVES.items():
        if all(curve.distance(x, y) < tol for x, y in canon):
            return name
    return None


# -- multistart ------------------------------------------------------------------

def _template_code(name: str) -> int:
    return list(TEMPLATES).index(name)


def start_points(tpl: Template, index: int, n: int, seed: int,
                 free: Sequence[int] | None = None) -> np.ndarray:
    """Scrambled Halton points in the start box, seeded per template and triple."""
    cols = list(range(len(tpl.unknowns))) if free is None else list(free)
    ss = np.random.SeedSequence([seed, _template_code(tpl.name), index, len(cols)])
    h = qmc.Halton(d=len(cols), scramble=True, seed=np.random.default_rng(ss)).random(n)
    lo = np.array(tpl.start_lo, dtype=float)[cols]
    hi = np.array(tpl.start_hi, dtype=float)[cols]
    return lo + (hi - lo) * h


def _dedupe(U: np.ndarray, radius: float) -> np.ndarray:
    if len(U) == 0:
        return U
    U = U[np.lexsort(U.T[::-1])]
    kept: list[np.ndarray] = []
    for u in U:
        if not kept or np.min(np.linalg.norm(np.array(kept) - u, axis=1)) > radius:
            kept.append(u)
    return np.array(kept)


def _solution(u: np.ndarray, res: float) -> Solution:
    canon, label = normalize_to_P(float(u[0]), float(u[1]))
    return Solution(tuple(float(v) for v in u), float(res), canon.xy, label)


def _postprocess(tpl: Template, triple: Triple, U: np.ndarray, res: np.ndarray,
                 cfg: SolverConfig) -> SolutionSet:
    out = SolutionSet(tpl.name, triple)
    keep = (res < cfg.converge_tol) & valid_mask(tpl, U, cfg)
    pts = _dedupe(U[keep], cfg.dedup_radius)
    if len(pts) == 0:
        return out
    system = ReducedSystem(tpl, triple)
    R, J = system.residual_jacobian(pts)
    rn = np.linalg.norm(R, axis=1)
    trap = np.array([is_trapezoidal(u, cfg.trapezoid_tol) for u in pts])
    out.n_trapezoidal = int(trap.sum())
    for k in np.flatnonzero(trap)[:cfg.trapezoid_cap]:
        out.trapezoidal.append(_solution(pts[k], rn[k]))
    sv = np.linalg.svd(J, compute_uv=False)
    deficient = sv[:, -1] < cfg.rank_tol * sv[:, 0]
    traced: list[np.ndarray] = []
    for k in np.flatnonzero(~trap):
        u = pts[k]
        if deficient[k]:
            if any(_polyline_distance(u, c) < cfg.absorb_radius for c in traced):
                continue
            if not _verifies(triple, u, tpl.name, cfg.verify_tol):
                continue
            curve = trace_curve(system, u, cfg)
            if len(curve) >= cfg.trace_min_points:
                traced.append(curve)
                cr = np.linalg.norm(system.residual_jacobian(curve)[0], axis=1)
                out.curves.append(SolutionCurve(tuple(tuple(float(v) for v in p) for p in curve),
                                                float(cr.max()), classify_curve(curve)))
            else:
                out.n_degenerate += 1
            continue
        if _verifies(triple, u, tpl.name, cfg.verify_tol):
            out.isolated.append(_solution(u, rn[k]))
    return out


def _solve_chunk(args) -> list[SolutionSet]:
    name, indices, cfg = args
    tpl = TEMPLATES[name]
    n = cfg.starts
    U0 = np.concatenate([start_points(tpl, int(i), n, cfg.seed) for i in indices])
    pidx = _PIDX[_TRIPLE_IDX[np.repeat(np.asarray(indices), n)]]

    def fun(Ua, rows):
        return residual_jacobian(tpl, Ua, pidx[rows])

    res = levenberg_marquardt(fun, U0, max_iter=cfg.max_iter, ftol=1e-14)
    out = []
    for j, i in enumerate(indices):
        sl = slice(j * n, (j + 1) * n)
        out.append(_postprocess(tpl, triple_from_index(int(i)), res.u[sl], res.residual[sl], cfg))
    return out


def solve_template(system: ReducedSystem, cfg: SolverConfig = SolverConfig()) -> SolutionSet:
    return _solve_chunk((system.template.name, [triple_index(system.triple)], cfg))[0]


def _expand(name: str) -> tuple[str, ...]:
    if name in FAMILIES:
        return FAMILIES[name]
    if name.upper() in FAMILIES:
        return FAMILIES[name.upper()]
    template(name)
    return (name,)


@dataclass
class Catalogue:
    """All solution sets of one sweep, ordered by template and triple index."""

    template: str
    seed: int
    starts: int
    entries: list[SolutionSet]

    def nonempty(self) -> list[SolutionSet]:
        return [e for e in self.entries if e.has_nontrapezoidal]

    def census(self) -> dict[Triple, str]:
        """Triples with non-trapezoidal solutions, tagged ``curve`` or ``isolated``."""
        out: dict[Triple, str] = {}
        for e in self.nonempty():
            tag = "curve" if e.curves else "isolated"
            prev = out.get(e.triple)
            out[e.triple] = "curve" if "curve" in (tag, prev) else tag
        return out

    def normalized_points(self) -> list[tuple[str, Triple, tuple[float, float]]]:
        """Every recorded non-trapezoidal parameter pair, normalized to the canonical region."""
        out = []
        for e in self.nonempty():
            for s in e.isolated:
                out.append(("isolated", e.triple, s.xy))
            for c in e.curves:
                out.extend(("curve", e.triple, xy) for xy in c.canonical)
        return out

    def to_dict(self) -> dict:
        return {"template": self.template, "seed": self.seed, "starts": self.starts,
                "census": [{"triple": list(t), "kind": k} for t, k in self.census().items()],
                "entries": [e.to_dict() for e in self.entries
                            if e.has_nontrapezoidal or e.n_trapezoidal or e.n_degenerate]}

    def to_json(self) -> str:
        return serialize.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Catalogue":
        if "entries" not in d:
            raise MissingCatalogue("catalogue has no entries")
        return cls(d["template"], d["seed"], d["starts"],
                   [SolutionSet.from_dict(e) for e in d["entries"]])

    @classmethod
    def from_json(cls, text: str) -> "Catalogue":
        return cls.from_dict(serialize.loads(text))


def sweep_all(template_name: str = "C", cfg: SolverConfig = SolverConfig(),
              triples: Sequence[int] | None = None, progress=None) -> Catalogue:
    """Solve every triple (or the given triple indices) for a template or template family."""
    indices = list(range(512)) if triples is None else sorted(int(i) for i in triples)
    tasks = []
    for name in _expand(template_name):
        for c in range(0, len(indices), cfg.chunk):
            tasks.append((name, indices[c:c + cfg.chunk], cfg))
    results: list[list[SolutionSet]]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as ex:
            results = list(ex.map(_solve_chunk, tasks))
    else:
        results = []
        for k, t in enumerate(tasks):
            results.append(_solve_chunk(t))
            if progress is not None:
                progress(k + 1, len(tasks))
    entries = [s for chunk in results for s in chunk]
    return Catalogue(template_name, cfg.seed, cfg.starts, entries)


# -- pinned solves and the special quadrangle --------------------------------------

def solve_pinned(triple: Sequence[str], pinned: dict[int, float], template_name: str = "C",
                 cfg: SolverConfig = SolverConfig(), starts: int = 400) -> list[np.ndarray]:
    """Solutions with some unknowns held fixed, deduplicated and verified."""
    tpl = template(template_name)
    system = build_system(triple, template_name)
    free = [j for j in range(len(tpl.unknowns)) if j not in pinned]
    S = start_points(tpl, triple_index(triple), starts, cfg.seed, free)
    U0 = np.empty((starts, len(tpl.unknowns)))
    U0[:, free] = S
    for j, v in pinned.items():
        U0[:, j] = v
    pidx = np.broadcast_to(system.pidx, (starts, 3, 4))

    def fun(Ua, rows):
        return residual_jacobian(tpl, Ua, pidx[rows])

    res = levenberg_marquardt(fun, U0, max_iter=cfg.max_iter, ftol=1e-14, free=np.array(free))
    keep = (res.residual < cfg.converge_tol) & valid_mask(tpl, res.u, cfg)
    pts = _dedupe(res.u[keep], cfg.dedup_radius)
    return [u for u in pts if _verifies(system.triple, u, tpl.name, cfg.verify_tol)]


def reorder_parent(d: Dissection, order: Sequence[int]) -> Dissection:
    """Relist the parent as ``d.parent[order[j]]``; correspondences follow."""
    if d.tile is not None:
        raise ValueError("reordering applies to dissections tiled by their parent")
    o = "".join(str(i + 1) for i in order)
    parent = tuple(d.parent[i] for i in order)
    pieces = tuple(Piece(pc.vertices, pc.map, compose_perms(pc.perm, o)) for pc in d.pieces)
    return Dissection(parent, pieces, d.ctype)


def realize_on(d: Dissection, target: Sequence[Sequence[float]], tol: float = 1e-9) -> Dissection:
    """Carry ``d`` onto an affinely congruent parent ``target`` (vertex order of ``target`` kept)."""
    g, sigma = find_congruence(d.parent, target, tol)
    moved = d.transformed(g)
    s = perm_indices(sigma)
    # moved.parent[i] = target[s[i]]; invert to list by target order
    order = [0] * 4
    for i in range(4):
        order[s[i]] = i
    out = reorder_parent(moved, order)
    return Dissection(tuple(Point2(*map(float, p)) for p in target), out.pieces, d.ctype)


def special_parent() -> tuple[Point2, Point2, Point2, Point2]:
    x0, y0 = special_point()
    return (Point2(0.0, 0.0), Point2(1.0, 0.0), Point2(x0, y0), Point2(0.0, 1.0))


def special_quadrangle_realizations(cfg: SolverConfig = SolverConfig()) -> list[Dissection]:
    """The eight type-C self-affinities of the special quadrangle, on one common parent."""
    x0, y0 = special_point()
    target = special_parent()
    out = []
    for triple in FAMILY_TRIPLES + SINGULAR_TRIPLES[13:]:
        found = None
        for p in eight_parametrizations(x0, y0):
            if not p.x <= p.y + 1e-12:
                continue
            sols = solve_pinned(triple, {0: p.x, 1: p.y}, "C", cfg, starts=200)
            if sols:
                found = dissection_from_solution(triple, sols[0], "C", cfg.verify_tol)
                break
        if found is None:
            raise VerificationFailure(f"no realization found for {'/'.join(triple)}")
        d = realize_on(found, target)
        d.meta["triple"] = triple
        out.append(check(d, cfg.verify_tol))
    return out


def distinct_signatures(ds: Iterable[Dissection]) -> int:
    return len({equivalence_signature(d) for d in ds})


def with_starts(cfg: SolverConfig, starts: int) -> SolverConfig:
    return replace(cfg, starts=starts)
