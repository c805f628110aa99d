"""Command-line entry point.

Exit codes: 0 success, 1 domain error, 2 verification failure, 64 malformed usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from dataclasses import dataclass
from typing import Sequence

from . import serialize
from .constructions import (
    nonconvex_chain,
    nonconvex_n_self_affine,
    trapezoid_A,
    trapezoid_B,
    trapezoid_C,
)
from .dissection import Dissection, verify
from .errors import SelfAffineError, UnverifiedDissection, VerificationFailure
from .families import CURVES, is_member, sample_curve, table1_solutions
from .params import classify_shape, eight_parametrizations, normalize_to_P, region_of

EXIT_OK, EXIT_DOMAIN, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    """Malformed command line."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class CliConfig:
    tolerance: float = 1e-9
    seed: int = 0
    starts: int = 2000
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if not 0 < self.tolerance <= 1e-3:
            raise UsageError("tolerance must lie in (0, 1e-3]")
        if self.starts < 1:
            raise UsageError("starts must be at least 1")


def _config(args) -> CliConfig:
    return CliConfig(getattr(args, "tol", 1e-9), getattr(args, "seed", 0),
                     getattr(args, "starts", 2000), getattr(args, "out", None),
                     getattr(args, "format", "json"))


def _emit(text: str | bytes, out: str | None, stdout) -> None:
    if out:
        mode = "wb" if isinstance(text, bytes) else "w"
        with open(out, mode) as fh:
            fh.write(text)
        return
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    stdout.write(text if text.endswith("\n") else text + "\n")


def _json(obj) -> str:
    return serialize.dumps(obj)


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


# -- subcommands -------------------------------------------------------------------

def cmd_classify(args, cfg: CliConfig) -> tuple[str, int]:
    p, label = normalize_to_P(args.x, args.y, cfg.tolerance)
    return _json({"x": p.x, "y": p.y, "input_region": region_of(args.x, args.y, cfg.tolerance),
                  "label": label, "shape": classify_shape(args.x, args.y, cfg.tolerance),
                  "families": sorted(is_member(args.x, args.y))}), EXIT_OK


def cmd_normalize(args, cfg: CliConfig) -> tuple[str, int]:
    if args.all:
        rows = [{"x": p.x, "y": p.y, "region": p.region}
                for p in eight_parametrizations(args.x, args.y, cfg.tolerance)]
        return _json({"parametrizations": rows}), EXIT_OK
    p, label = normalize_to_P(args.x, args.y, cfg.tolerance)
    return _json({"x": p.x, "y": p.y, "region": label}), EXIT_OK


def cmd_member(args, cfg: CliConfig) -> tuple[str, int]:
    return _json({"families": sorted(is_member(args.x, args.y, args.member_tol))}), EXIT_OK


def cmd_sample(args, cfg: CliConfig) -> tuple[str, int]:
    pts = sample_curve(args.curve, args.n)
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y"])
        w.writerows([f"{x:.6f}", f"{y:.6f}"] for x, y in pts)
        return buf.getvalue(), EXIT_OK
    return _json({"curve": args.curve, "points": [list(p) for p in pts]}), EXIT_OK


def cmd_table1(args, cfg: CliConfig) -> tuple[str, int]:
    sols = table1_solutions()
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "eq1", "eq2", "x", "y", "closed_form"])
        for s in sols:
            w.writerow([s.id, s.eq1.format(), s.eq2.format(), f"{s.value[0]:.6f}",
                        f"{s.value[1]:.6f}", s.closed_form or ""])
        return buf.getvalue(), EXIT_OK
    return _json({"solutions": [
        {"id": s.id, "eq1": s.eq1.format(), "eq2": s.eq2.format(), "x": s.value[0],
         "y": s.value[1], "closed_form": s.closed_form} for s in sols]}), EXIT_OK


def cmd_sweep(args, cfg: CliConfig) -> tuple[str, int]:
    from .solver import SolverConfig, sweep_all

    jobs = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    scfg = SolverConfig(seed=cfg.seed, starts=cfg.starts, jobs=max(1, jobs))
    triples = None
    if args.triples:
        triples = [int(t) for t in args.triples.split(",")]
        if any(not 0 <= t < 512 for t in triples):
            raise UsageError("triple indices must lie in [0, 512)")
    cat = sweep_all(args.template.upper(), scfg, triples)
    return cat.to_json(), EXIT_OK


def _construct(args) -> Dissection:
    kind = args.kind
    if kind == "trapezoid-a":
        weights = (1 / 3, 1 / 3, 1 / 3)
        if args.weights:
            try:
                weights = tuple(float(w) for w in args.weights.split(","))
            except ValueError:
                raise UsageError("weights must be comma-separated numbers") from None
        return trapezoid_A(_need(args.z, "--z"), weights)
    if kind == "trapezoid-b":
        return trapezoid_B(_need(args.z, "--z"))
    if kind == "trapezoid-c":
        return trapezoid_C(_need(args.z, "--z"))
    if kind == "nonconvex":
        return nonconvex_n_self_affine(_need(args.n, "--n"))
    return nonconvex_chain((_need(args.x, "--x"), _need(args.y, "--y")), _need(args.k, "--k"))


def _need(v, flag):
    if v is None:
        raise UsageError(f"{flag} is required")
    return v


def cmd_construct(args, cfg: CliConfig) -> tuple[str, int]:
    return _construct(args).to_json(), EXIT_OK


def _report_json(rep) -> dict:
    return {"passed": rep.passed, "area_defect": rep.area_defect,
            "max_affine_residual": rep.max_affine_residual,
            "disjointness_violations": list(rep.disjointness_violations),
            "coverage_violations": list(rep.coverage_violations)}


def cmd_verify(args, cfg: CliConfig) -> tuple[str, int]:
    d = Dissection.from_json(_read(args.input))
    rep = verify(d, cfg.tolerance)
    return _json(_report_json(rep)), EXIT_OK if rep.passed else EXIT_VERIFY


def cmd_render(args, cfg: CliConfig) -> tuple[bytes, int]:
    from .render import RenderOptions, render_dissection, render_parameter_chart
    from .solver import Catalogue

    opts = RenderOptions(labels="vertex-numbers" if args.labels else "none")
    if args.chart:
        cat = Catalogue.from_json(_read(args.input)) if args.input else None
        return render_parameter_chart(cat, opts), EXIT_OK
    if not args.input:
        raise UsageError("--in is required unless --chart is given")
    d = Dissection.from_json(_read(args.input))
    return render_dissection(d, opts, cfg.tolerance), EXIT_OK


def cmd_realizations(args, cfg: CliConfig) -> tuple[str, int]:
    from .solver import SolverConfig, special_quadrangle_realizations

    if not args.special:
        raise UsageError("only --special realizations are available")
    ds = special_quadrangle_realizations(SolverConfig(seed=cfg.seed))
    return _json({"realizations": [
        {"triple": list(d.meta["triple"]), "dissection": d.to_dict()} for d in ds]}), EXIT_OK


def cmd_report(args, cfg: CliConfig) -> tuple[str, int]:
    from .report import report_reproduction
    from .solver import Catalogue

    cat = Catalogue.from_json(_read(args.catalogue)) if args.catalogue else None
    rep = report_reproduction(cat, cfg.tolerance)
    return _json(rep), EXIT_OK if rep["passed"] else EXIT_VERIFY


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="selfaffine", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, func, help_):
        s = sub.add_parser(name, help=help_)
        s.set_defaults(func=func)
        s.add_argument("--tol", type=float, default=1e-9, help="geometric tolerance")
        s.add_argument("--out", help="write output to this path instead of stdout")
        return s

    def xy(s):
        s.add_argument("--x", type=float, required=True)
        s.add_argument("--y", type=float, required=True)

    s = add("classify", cmd_classify, "region, shape and family memberships of Q[x,y]")
    xy(s)
    s = add("normalize", cmd_normalize, "canonical parameters in the region P")
    xy(s)
    s.add_argument("--all", action="store_true", help="list all eight parametrizations")
    s = add("member", cmd_member, "families containing Q[x,y]")
    xy(s)
    s.add_argument("--member-tol", type=float, default=1e-6)
    s = add("sample", cmd_sample, "points on a family curve")
    s.add_argument("--curve", choices=sorted(CURVES), required=True)
    s.add_argument("--n", type=int, default=400)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s = add("table1", cmd_table1, "the thirteen singular solutions")
    s.add_argument("--format", choices=("json", "csv"), default="csv")
    s = add("sweep", cmd_sweep, "multistart sweep over all correspondence triples")
    s.add_argument("--template", choices=("a", "b", "c", "A", "B", "C"), default="c")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--starts", type=int, default=2000)
    s.add_argument("--jobs", type=int, default=None)
    s.add_argument("--triples", help="comma-separated triple indices (default: all 512)")
    s = add("construct", cmd_construct, "explicit self-affine dissections")
    s.add_argument("kind", choices=("trapezoid-a", "trapezoid-b", "trapezoid-c", "nonconvex",
                                    "chain"))
    s.add_argument("--z", type=float)
    s.add_argument("--weights")
    s.add_argument("--n", type=int)
    s.add_argument("--x", type=float)
    s.add_argument("--y", type=float)
    s.add_argument("--k", type=int)
    s = add("verify", cmd_verify, "verify a dissection JSON file")
    s.add_argument("--in", dest="input", required=True)
    s = add("render", cmd_render, "SVG of a dissection or the parameter chart")
    s.add_argument("--in", dest="input")
    s.add_argument("--labels", action="store_true")
    s.add_argument("--chart", action="store_true", help="parameter chart (--in: catalogue)")
    s = add("realizations", cmd_realizations, "the eight dissections of the special quadrangle")
    s.add_argument("--special", action="store_true")
    s.add_argument("--seed", type=int, default=0)
    s = add("report", cmd_report, "reproduction report for a template-C catalogue")
    s.add_argument("--catalogue")
    return p


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        cfg = _config(args)
        text, code = args.func(args, cfg)
        _emit(text, cfg.out, stdout)
        return code
    except UsageError as e:
        stderr.write(f"usage error: {e}\n")
        return EXIT_USAGE
    except (VerificationFailure, UnverifiedDissection) as e:
        stderr.write(f"verification failed: {e}\n")
        return EXIT_VERIFY
    except (SelfAffineError, ValueError, KeyError, OSError) as e:
        stderr.write(f"error: {e}\n")
        return EXIT_DOMAIN


def main() -> None:  # pragma: no cover
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
