"""Command-line front end.

Exit codes: 0 success, 1 internal error, 2 invalid or degenerate input,
3 verify-all completed but recorded findings.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import platform
import random
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import scipy

from . import __version__
from .family import (
    CaseId,
    DegenerateParameterError,
    DomainError,
    classify,
    generators,
    make_pde,
    parameters_for,
    verify_catalog,
)
from .findings import dump_findings
from .symexpr import ParseError, compile_numeric, parse, to_string

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT, EXIT_FINDINGS = 0, 1, 2, 3


class InputError(ValueError):
    """Invalid command-line or config input (exit code 2)."""


def rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def read_config(path: str) -> dict[str, str]:
    """Line-oriented key=value; '#' starts a comment."""
    out = {}
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{n}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


# -- output helpers -------------------------------------------------------------


class Outputs:
    """Collects files written by a command and the manifest describing them."""

    def __init__(self, directory: Optional[str]):
        self.dir = Path(directory) if directory else None
        self.files: dict[str, str] = {}
        if self.dir is not None:
            self.dir.mkdir(parents=True, exist_ok=True)

    def write(self, name: str, text: str) -> None:
        data = text.encode("utf-8")
        self.files[name] = hashlib.sha256(data).hexdigest()
        if self.dir is not None:
            (self.dir / name).write_bytes(data)

    def json(self, name: str, doc) -> None:
        self.write(name, json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n")

    def manifest(self, command: str, args: argparse.Namespace) -> None:
        inputs = {k: (str(v) if isinstance(v, Fraction) else v) for k, v in sorted(vars(args).items()) if k not in ("func", "out")}
        doc = {
            "command": command,
            "inputs": inputs,
            "seed": args.seed,
            "versions": {
                "nfpesym": __version__,
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "python": platform.python_version(),
            },
            "outputs": dict(sorted(self.files.items())),
        }
        if self.dir is not None:
            text = json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"
            (self.dir / "manifest.json").write_text(text, encoding="utf-8")


def emit(args, doc: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(doc, indent=2, sort_keys=True, default=str))
    else:
        print(text)


# -- case selection ------------------------------------------------------------------


def case_from_args(args) -> CaseId:
    fam = args.case
    if fam in ("A", "B"):
        return CaseId(fam, args.part or "i")
    if fam != "C":
        raise InputError(f"unknown case {fam!r}")
    part = args.part or "i"
    if args.k is not None:
        r, k = parameters_for("C", part, args.k)
        case = classify(r, k)
        if case.family != "C":
            raise InputError(f"k = {args.k} on line ({part}) is Case {case.family}, not C")
        return case
    if args.delta is not None:
        return CaseId("C", part, args.delta)
    raise InputError("Case C needs --k or --delta")


# -- commands ------------------------------------------------------------------------


def cmd_classify(args, out: Outputs) -> int:
    case = classify(args.r, args.k)
    pde = make_pde(args.r, args.k, args.omega)
    cat = generators(case)
    status = verify_catalog(pde, cat)
    gens = []
    lines = [f"r = {args.r}, k = {args.k}: {case.label}", f"{len(cat)} generators"]
    for name, vf, ok in zip(cat.names, cat.basis, status):
        comps = [to_string(c) for c in (vf.xi, vf.tau, vf.eta)]
        gens.append({"name": name, "xi": comps[0], "tau": comps[1], "eta": comps[2], "verified": ok})
        lines.append(f"  {name} = {vf}    [{'VERIFIED' if ok else 'FAILED'}]")
        lines.append(f"      xi = {comps[0]}; tau = {comps[1]}; eta = {comps[2]}")
    doc = {"r": str(args.r), "k": str(args.k), "case": case.label, "generators": gens}
    out.json("classify.json", doc)
    emit(args, doc, "\n".join(lines))
    return EXIT_OK if all(status) else EXIT_INTERNAL


def cmd_tables(args, out: Outputs) -> int:
    from .audit import _compare_brackets
    from .family import DELTA
    from .liealg import adjoint_table_numeric, structure_constants
    from .liealg import reference_tables
    from .symexpr import num

    fam = args.case
    if fam not in ("A", "B", "C"):
        raise InputError("case must be A, B or C")
    if fam == "C":
        if args.delta is None:
            raise InputError("Case C needs --delta")
        if args.delta == -1:
            raise InputError("delta = -1 is degenerate: 2(1+delta) = 0 collapses the X3 scaling (this is Case B)")
        if args.delta == 0:
            raise InputError("delta = 0: X4 is undefined")
        sc = structure_constants(generators(CaseId("C", "i", Fraction(1)), DELTA)).bind({"delta": num(args.delta)})
        published = reference_tables.bracket_table("C", num(args.delta))
        dval = float(args.delta)
    else:
        sc = structure_constants(generators(CaseId(fam, "i")))
        published = reference_tables.bracket_table(fam)
        dval = None
    diff = _compare_brackets(sc, published, fam)
    out.write(f"brackets_{fam}.json", sc.to_json() + "\n")
    eps_list = [float(e) for e in args.eps.split(",")]
    adj_doc, devs = {}, []
    names = [f"X{i + 1}" for i in range(sc.n)]
    for eps in eps_list:
        T = adjoint_table_numeric(sc, eps)
        theirs = reference_tables.adjoint_table(fam, eps, dval)
        devs.append(float(np.max(np.abs(T - theirs))))
        adj_doc[f"{eps:g}"] = {
            f"Ad(exp(eps*{names[i]})){names[j]}": [round(float(v), 15) for v in T[i, j]]
            for i in range(sc.n)
            for j in range(sc.n)
        }
    out.json(f"adjoint_{fam}.json", adj_doc)
    ok = diff.ok and max(devs) < 1e-10
    doc = {"case": fam, "brackets": diff.detail, "adjoint_max_deviation": max(devs), "status": "OK" if ok else "DIFF"}
    out.json(f"diff_{fam}.json", doc)
    text = sc.text_table() + f"\n\nbrackets: {diff.detail}\nadjoint max deviation: {max(devs):.2e}\ndiff status: {doc['status']}"
    emit(args, doc, text)
    return EXIT_OK if ok else EXIT_INTERNAL


def _rep_label(rep: str) -> str:
    return {"X1": "c"}.get(rep, rep)


def _recipe_from_args(args):
    from .reduction import recipe

    case = case_from_args(args)
    label = _rep_label(args.rep)
    if case.family == "A" and args.rep == "X1":
        label = "d"
    params = {k: getattr(args, k) for k in ("alpha", "beta", "gamma") if getattr(args, k) is not None}
    return recipe(case, label, params)


def cmd_reduce(args, out: Outputs) -> int:
    from .reduction import verify_reduction

    rec = _recipe_from_args(args)
    rep = verify_reduction(rec, omega=args.omega)
    doc = {"recipe": rec.to_dict(), "verification": {"spread": rep.spread, "certified": rep.certified}}
    if rep.derived_ode is not None:
        doc["verification"]["derived_ode"] = to_string(rep.derived_ode)
    out.json("recipe.json", doc)
    out.write("ode.txt", rec.ode_string() + " = 0\n")
    lines = [
        f"{rec.case.label} representative ({rec.label}): {doc['recipe']['field']}",
        f"ansatz: {rec.ansatz_string()}",
        f"ODE: {rec.ode_string()} = 0",
        f"verification: {rep.summary()}",
    ]
    if args.solve:
        lines += _solve_and_check(rec, args, out, doc)
    emit(args, doc, "\n".join(lines))
    return EXIT_OK


def _solve_and_check(rec, args, out: Outputs, doc: dict) -> list[str]:
    from .numerics import OdeProblem, build_solution, integrate_two_sided, pde_residual
    from .reduction import pde_for_case

    if not rec.stationary:
        raise InputError("--solve is available for the stationary representative only")
    x0 = args.x0
    lo, hi = -args.extent * x0, args.extent * x0
    p = OdeProblem.from_recipe(rec, args.omega, 0.0, args.y0 if args.y0 is not None else x0 / np.sqrt(3 * args.omega), 0.0, hi)
    sol = integrate_two_sided(p, lo, hi)
    xs = np.linspace(lo, hi, args.nx)
    field = build_solution(rec, sol, xs, np.linspace(0.0, 1.0, args.nt))
    res = pde_residual(field, pde_for_case(rec.case, args.omega))
    samples = "zeta,y,dy\n" + "".join(f"{z!r},{y!r},{d!r}\n" for z, y, d in zip(sol.zeta, sol.y, sol.dy))
    out.write("y_samples.csv", samples)
    out.write("grid.csv", field.to_csv())
    out.write("residual.json", res.to_json() + "\n")
    doc["solve"] = {"reason": sol.reason, "residual_sup": res.sup, "residual_l2": res.l2}
    return [f"ODE integration: {sol.reason}", f"grid residual: sup {res.sup:.3e}, L2 {res.l2:.3e}"]


def cmd_solve_ode(args, out: Outputs) -> int:
    from .numerics import OdeProblem, integrate_ode

    rec = _recipe_from_args(args)
    p = OdeProblem.from_recipe(rec, args.omega, args.zeta0, args.y0, args.dy0, args.zeta_end)
    sol = integrate_ode(p)
    out.write("y_samples.csv", "zeta,y,dy\n" + "".join(f"{z!r},{y!r},{d!r}\n" for z, y, d in zip(sol.zeta, sol.y, sol.dy)))
    doc = {"reason": sol.reason, "span": list(sol.span), "points": len(sol.zeta), "y_end": float(sol.y[-1])}
    out.json("ode_solution.json", doc)
    emit(args, doc, f"{rec.ode_string()} = 0\nstopped: {sol.reason} at zeta = {sol.zeta[-1]:.6g}, y = {sol.y[-1]:.6g}")
    return EXIT_OK


def cmd_evolve(args, out: Outputs) -> int:
    from .numerics import CellGrid, cell_averages, evolve_pde

    pde = make_pde(args.r, args.k, args.omega)
    try:
        f0 = compile_numeric(parse(args.initial), ("x",))
    except ParseError as exc:
        raise InputError(f"initial profile: {exc}") from exc
    grid = CellGrid(args.x_min, args.x_max, args.cells)
    u0 = cell_averages(lambda x: np.asarray(f0(x), dtype=float) * np.ones_like(x), grid)
    field = evolve_pde(u0, pde, (0.0, args.t_end), grid, n_out=args.n_out)
    m = field.mass()
    out.write("evolution.csv", field.to_csv())
    doc = {"cells": args.cells, "t_end": args.t_end, "mass_drift": float(np.max(np.abs(m - m[0])) / m[0]), "positive": field.positive}
    out.json("evolution.json", doc)
    emit(args, doc, f"evolved {args.cells} cells to t = {args.t_end}; relative mass drift {doc['mass_drift']:.2e}")
    return EXIT_OK


def cmd_residual(args, out: Outputs) -> int:
    from .numerics import GridField, pde_residual

    field = GridField.from_csv(args.csv)
    rep = pde_residual(field, make_pde(args.r, args.k, args.omega))
    out.write("residual.json", rep.to_json() + "\n")
    emit(args, json.loads(rep.to_json()), f"residual sup {rep.sup:.3e}, L2 {rep.l2:.3e} (dx {rep.dx:g}, dt {rep.dt:g})")
    return EXIT_OK


def _parse_only(items: Sequence[str]) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise InputError(f"--only expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        if k != "case" or v not in ("A", "B", "C"):
            raise InputError("--only supports case=A|B|C")
        out.setdefault(k, []).append(v)
    return out


def cmd_verify_all(args, out: Outputs) -> int:
    from . import audit

    only = _parse_only(args.only)
    families = only.get("case", ["A", "B", "C"])
    report = audit.run_audit(families, seed=args.seed, numerics=not only)
    out.json("report.json", report.to_dict())
    out.write("findings.json", dump_findings(report.findings))
    counts: dict = {}
    for c in report.checks:
        counts[c.group] = counts.get(c.group, 0) + 1
    lines = [f"{'PASS' if c.ok else 'FAIL'} [{c.group}] {c.name}: {c.detail}" for c in report.checks]
    lines.append(f"{len(report.checks)} checks, {sum(not c.ok for c in report.checks)} failed, {len(report.findings)} findings")
    for fam in families:
        lines.append(f"Case {fam}: {len(generators(CaseId(fam, 'i', 1 if fam == 'C' else None)))} generators, "
                     f"{len(__import__('nfpesym.reduction', fromlist=['x']).REPRESENTATIVES[fam])} reductions")
    for f in report.findings:
        lines.append(f"FINDING {f.ident} ({f.anchor}): {f.machine_result}")
    emit(args, report.to_dict(), "\n".join(lines))
    if not report.ok:
        return EXIT_INTERNAL
    return EXIT_FINDINGS if report.findings else EXIT_OK


# -- parser --------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value file; flags override its values")
    p.add_argument("--out", help="output directory (files + manifest.json)")
    p.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p.add_argument("--seed", type=int, default=0)


def _case_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--case", required=True, choices=("A", "B", "C"))
    p.add_argument("--part", choices=("i", "ii", "iii", "iv"))
    p.add_argument("--k", type=rational)
    p.add_argument("--delta", type=rational)
    p.add_argument("--rep", required=True, help="a, b, c, d or X1")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--omega", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nfpesym", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="case, generators and their verification for (r, k)")
    p.add_argument("--r", type=rational, required=True)
    p.add_argument("--k", type=rational, required=True)
    p.add_argument("--omega", type=float, default=1.0)
    _common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("tables", help="commutator and adjoint tables with a diff against the published ones")
    p.add_argument("--case", required=True, choices=("A", "B", "C"))
    p.add_argument("--delta", type=rational)
    p.add_argument("--eps", default="0.1,0.5,1.0", help="comma-separated epsilon values")
    _common(p)
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("reduce", help="invariant ansatz, reduced ODE and its verification")
    _case_args(p)
    p.add_argument("--solve", action="store_true", help="integrate the stationary ODE and check the grid residual")
    p.add_argument("--x0", type=float, default=1.0)
    p.add_argument("--y0", type=float)
    p.add_argument("--extent", type=float, default=0.8)
    p.add_argument("--nx", type=int, default=401)
    p.add_argument("--nt", type=int, default=11)
    _common(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("solve-ode", help="integrate a reduced ODE")
    _case_args(p)
    p.add_argument("--zeta0", type=float, default=0.0)
    p.add_argument("--y0", type=float, required=True)
    p.add_argument("--dy0", type=float, default=0.0)
    p.add_argument("--zeta-end", type=float, required=True)
    _common(p)
    p.set_defaults(func=cmd_solve_ode)

    p = sub.add_parser("evolve", help="evolve the PDE from an initial profile")
    p.add_argument("--r", type=rational, required=True)
    p.add_argument("--k", type=rational, required=True)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--initial", required=True, help="expression in x, e.g. '1 + x^2/2'")
    p.add_argument("--x-min", type=float, default=-1.0)
    p.add_argument("--x-max", type=float, default=1.0)
    p.add_argument("--cells", type=int, default=201)
    p.add_argument("--t-end", type=float, default=0.1)
    p.add_argument("--n-out", type=int, default=11)
    _common(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("residual", help="discrete PDE residual of a grid CSV (columns x,t,u)")
    p.add_argument("--csv", required=True)
    p.add_argument("--r", type=rational, required=True)
    p.add_argument("--k", type=rational, required=True)
    p.add_argument("--omega", type=float, default=1.0)
    _common(p)
    p.set_defaults(func=cmd_residual)

    p = sub.add_parser("verify-all", help="run every check; exit 0 iff nothing failed and no findings")
    p.add_argument("--only", action="append", help="filter, e.g. case=B")
    _common(p)
    p.set_defaults(func=cmd_verify_all)
    return parser


_NEGATIVE = re.compile(r"^-\d+(/\d+)?$|^-\d*\.\d+([eE][-+]?\d+)?$")


def _glue_negatives(argv: list[str]) -> list[str]:
    """Turn ``--k -1/2`` into ``--k=-1/2``; argparse reads a bare -1/2 as a flag."""
    out: list[str] = []
    for tok in argv:
        if out and _NEGATIVE.match(tok) and out[-1].startswith("--") and "=" not in out[-1]:
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def _config_path(argv: Sequence[str]) -> Optional[str]:
    for n, tok in enumerate(argv):
        if tok == "--config" and n + 1 < len(argv):
            return argv[n + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """Parse flags; a --config file supplies defaults that explicit flags override."""
    parser = build_parser()
    argv = _glue_negatives(list(sys.argv[1:] if argv is None else argv))
    path = _config_path(argv)
    command = next((tok for tok in argv if not tok.startswith("-")), None)
    subparsers = parser._subparsers._group_actions[0].choices
    if path and command in subparsers:
        sub = subparsers[command]
        cfg = read_config(path)
        actions = {a.dest: a for a in sub._actions}
        unknown = sorted(set(cfg) - set(actions))
        if unknown:
            raise InputError(f"unknown config key(s): {', '.join(unknown)}")
        for key, value in cfg.items():
            action = actions[key]
            action.required = False
            if isinstance(action, argparse._StoreTrueAction):
                cfg[key] = value.lower() in ("1", "true", "yes", "on")
        sub.set_defaults(**cfg)
    return parser.parse_args(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = parse_args(argv)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as exc:  # argparse usage errors
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    random.seed(args.seed)
    np.random.seed(args.seed)
    out = Outputs(args.out)
    from .numerics import IllPosedError, NonPositiveError, SpanError
    from .reduction import ConstraintError

    try:
        code = args.func(args, out)
    except (InputError, DegenerateParameterError, DomainError, ConstraintError, IllPosedError, NonPositiveError, SpanError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - report, do not crash with a traceback
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    out.manifest(args.command, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
