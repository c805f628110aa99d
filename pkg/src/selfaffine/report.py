"""Reproduction report: checks a template-C catalogue against the known classification."""

from __future__ import annotations

import numpy as np

from .constructions import (
    gamma_closure_residual,
    nonconvex_n_self_affine,
    solve_f_n,
    trapezoid_A,
    trapezoid_B,
    trapezoid_C,
    zeta_identity_residual,
)
from .dissection import verify
from .errors import MissingCatalogue, SelfAffineError
from .families import special_point, table1_solutions
from .solver.sweep import (
    FAMILY_TRIPLES,
    SINGULAR_TRIPLES,
    Catalogue,
    build_system,
    triple_from_index,
    triple_index,
)

EXPECTED_CURVES = {t: f"f{k + 1}" for k, t in enumerate(FAMILY_TRIPLES)}
EXPECTED_ISOLATED = {t: f"s{k + 1}" for k, t in enumerate(SINGULAR_TRIPLES)}


def _criterion(name: str, passed: bool, **detail) -> dict:
    return {"name": name, "passed": bool(passed), **detail}


def check_table1() -> dict:
    worst = 0.0
    closed = 0.0
    for s in table1_solutions():
        worst = max(worst, *(abs(a - b) for a, b in zip(s.value, s.printed)))
        if s.closed_value is not None:
            closed = max(closed, *(abs(a - b) for a, b in zip(s.value, s.closed_value)))
    return _criterion("table1", worst < 1e-5 and closed < 1e-12,
                      max_printed_deviation=worst, max_closed_form_deviation=closed)


def check_census(cat: Catalogue) -> dict:
    found = cat.census()
    expected = {**{t: "curve" for t in EXPECTED_CURVES}, **{t: "isolated" for t in EXPECTED_ISOLATED}}
    missing = sorted(triple_index(t) for t in expected if t not in found)
    extra = sorted(triple_index(t) for t in found if t not in expected)
    wrong = sorted(triple_index(t) for t in expected if t in found and found[t] != expected[t])
    names = {**EXPECTED_CURVES, **EXPECTED_ISOLATED}
    return _criterion("census", not (missing or extra or wrong),
                      found=len(found), expected=len(expected),
                      missing=[names[triple_from_index(i)] for i in missing], extra=extra,
                      wrong_kind=[names[triple_from_index(i)] for i in wrong])


def check_family_recovery(cat: Catalogue) -> dict:
    worst = 0.0
    n = 0
    special_dev = 0.0
    special_res = 0.0
    x0, y0 = special_point()
    seen_special = set()
    for e in cat.nonempty():
        if e.triple in EXPECTED_CURVES:
            for x, y in (xy for c in e.curves for xy in c.canonical):
                worst = max(worst, abs(y - (x * x - x + 1)))
                n += 1
        if e.triple in (SINGULAR_TRIPLES[13], SINGULAR_TRIPLES[14]):
            for s in e.isolated:
                x, y = s.xy
                seen_special.add(e.triple)
                special_dev = max(special_dev, abs(x - x0), abs(y - y0))
                special_res = max(special_res, abs(y * y + x - 1), abs(x * x - x - y + 1))
    ok = n > 0 and worst < 1e-8 and len(seen_special) == 2 and special_dev < 1e-5 \
        and special_res < 1e-10
    return _criterion("family_recovery", ok, curve_points=n, max_curve_deviation=worst,
                      special_found=len(seen_special), special_deviation=special_dev,
                      special_residual=special_res)


def check_constructions(tol: float = 1e-9) -> dict:
    failures = []
    zs = [0.1 * k for k in range(1, 10)]
    builders = [(f"trapezoid_a({z:.1f})", lambda z=z: trapezoid_A(z)) for z in zs]
    builders += [(f"trapezoid_b({z:.1f})", lambda z=z: trapezoid_B(z)) for z in zs]
    builders += [(f"trapezoid_c({z:.1f})", lambda z=z: trapezoid_C(z)) for z in zs]
    builders += [(f"nonconvex({n})", lambda n=n: nonconvex_n_self_affine(n)) for n in range(3, 9)]
    for name, build in builders:
        try:
            if not verify(build(), tol).passed:
                failures.append(name)
        except SelfAffineError:
            failures.append(name)
    ident = max(abs(zeta_identity_residual(z)) for z in zs)
    closure = max(gamma_closure_residual(solve_f_n(n)[0], n) for n in range(3, 9))
    return _criterion("constructions", not failures and ident < 1e-12 and closure < 1e-12,
                      checked=len(builders), failures=failures, zeta_residual=ident,
                      gamma_closure_residual=closure)


def check_refinement(cat: Catalogue, tol: float) -> dict:
    """Polish every isolated solution with plain Newton and report those missing ``tol``."""
    stuck = []
    worst = 0.0
    count = 0
    for e in cat.nonempty():
        if e.template != "C":
            continue
        system = build_system(e.triple, e.template)
        for s in e.isolated:
            u = np.array(s.u)
            r = np.linalg.norm(system.residual(u))
            for _ in range(8):
                if r < tol:
                    break
                step = np.linalg.lstsq(system.jacobian(u), -system.residual(u), rcond=None)[0]
                cand = u + step
                rc = np.linalg.norm(system.residual(cand))
                if not rc < r:
                    break
                u, r = cand, rc
            count += 1
            worst = max(worst, r)
            if not r < tol:
                stuck.append({"index": e.index, "xy": list(s.xy), "residual": float(r)})
    return _criterion("refinement", not stuck, tolerance=tol, solutions=count,
                      max_residual=float(worst), not_converged=stuck)


def report_reproduction(catalogue: Catalogue | None, tol: float = 1e-9) -> dict:
    """Pass/fail per reproduction criterion; raises :class:`MissingCatalogue` without a catalogue."""
    if catalogue is None:
        raise MissingCatalogue("a completed template-C sweep catalogue is required")
    if catalogue.template != "C":
        raise MissingCatalogue(f"expected a template-C catalogue, got {catalogue.template!r}")
    crits = [check_table1(), check_census(catalogue), check_family_recovery(catalogue),
             check_constructions(), check_refinement(catalogue, tol)]
    return {"passed": all(c["passed"] for c in crits), "criteria": crits}
