"""Numerical search for self-affine dissections of convex quadrangles."""

from .sweep import (
    FAMILY_TRIPLES,
    SINGULAR_TRIPLES,
    Catalogue,
    ReducedSystem,
    Solution,
    SolutionCurve,
    SolutionSet,
    SolverConfig,
    all_triples,
    build_system,
    classify_curve,
    dissection_from_solution,
    solve_pinned,
    solve_template,
    special_quadrangle_realizations,
    sweep_all,
    trace_curve,
    triple_from_index,
    triple_index,
)
from .templates import FAMILIES, TEMPLATES, Template, template

__all__ = [
    "FAMILY_TRIPLES", "SINGULAR_TRIPLES", "Catalogue", "ReducedSystem", "Solution",
    "SolutionCurve", "SolutionSet", "SolverConfig", "all_triples", "build_system",
    "classify_curve", "dissection_from_solution", "solve_pinned", "solve_template",
    "special_quadrangle_realizations", "sweep_all", "trace_curve", "triple_from_index",
    "triple_index", "FAMILIES", "TEMPLATES", "Template", "template",
]
