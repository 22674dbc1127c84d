"""Command-line front end.

    fracsolve solve  FILE [--json-out PATH]
    fracsolve eval   FILE (--z LIST | --grid SPEC) [--csv-out PATH]
    fracsolve verify FILE [--tol T]
    fracsolve reduce FILE

``FILE`` is a problem document (see ``docs/problem_schema.json``) or, for
``eval``, a document written by ``solve --json-out``.

Exit codes: 0 success, 1 malformed input, 2 unsupported regime or domain
violation, 3 verification failed, 4 numerical convergence failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, TypeAdapter, ValidationError

from fracsolve.charpoly import FodeSpec, SystemSpec
from fracsolve.config import default_residual_tol
from fracsolve.errors import ConvergenceError, DomainError, UnsupportedRegime
from fracsolve.pde import EvolutionPde, PdeReduction, SystemPde, lift, reduce_scalar, reduce_system
from fracsolve.solutions import (
    SystemSolution,
    evaluate,
    solution_from_dict,
    solution_to_dict,
    solve_scalar,
    solve_system,
)
from fracsolve.verify import (
    DEFAULT_POINTS,
    DEFAULT_T,
    DEFAULT_X,
    residual_pde_scalar,
    residual_pde_system,
    residual_scalar,
    residual_system,
)

EXIT_OK, EXIT_MALFORMED, EXIT_REGIME, EXIT_VERIFY, EXIT_CONVERGENCE = 0, 1, 2, 3, 4
IMAG_TOL = 1e-10

# a constant is a real number or a [re, im] pair
Constant = Union[float, tuple[float, float]]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class Grid(_Strict):
    x: list[float] = Field(min_length=1)
    t: list[PositiveFloat] = Field(min_length=1)


class ScalarFodeProblem(_Strict):
    kind: Literal["scalar_fode"]
    alpha: float
    coeffs: list[float] = Field(min_length=1, description="a_0 .. a_m")
    branch: Optional[Literal["MittagLeffler", "GenWright", "FoxH", "WrightDegenerate"]] = None
    constants: Optional[list[Constant]] = None
    tolerance: Optional[PositiveFloat] = None
    points: Optional[list[PositiveFloat]] = None


class SystemFodeProblem(_Strict):
    kind: Literal["system_fode"]
    alpha: float
    a_coeffs: list[float] = Field(min_length=1)
    b_coeffs: list[float] = Field(min_length=1)
    constants: Optional[list[Constant]] = None
    tolerance: Optional[PositiveFloat] = None
    points: Optional[list[PositiveFloat]] = None


class ScalarPdeProblem(_Strict):
    kind: Literal["scalar_pde"]
    alpha: float
    coeffs: list[float] = Field(min_length=2, description="a_0 .. a_m")
    b: float
    p: float
    a: float = 0.0
    constants: Optional[list[Constant]] = None
    tolerance: Optional[PositiveFloat] = None
    grid: Optional[Grid] = None


class SystemPdeProblem(_Strict):
    kind: Literal["system_pde"]
    alpha: float
    a1: float
    a2: float
    b1: float
    b2: float
    m1: float
    m2: float
    c: float
    d: float = 0.0
    constants: Optional[list[Constant]] = None
    tolerance: Optional[PositiveFloat] = None
    grid: Optional[Grid] = None


Problem = Annotated[
    Union[ScalarFodeProblem, SystemFodeProblem, ScalarPdeProblem, SystemPdeProblem],
    Field(discriminator="kind"),
]
PROBLEM_ADAPTER = TypeAdapter(Problem)


class MalformedInput(Exception):
    pass


# ------------------------------------------------------------------ helpers


def problem_schema() -> dict:
    return PROBLEM_ADAPTER.json_schema()


def _constants(raw):
    if raw is None:
        return None
    return [complex(*c) if isinstance(c, (tuple, list)) else complex(c) for c in raw]


def _constants_json(c):
    if c is None:
        return None
    return [[v.real, v.imag] for v in c]


def _load(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise MalformedInput(f"{path} must contain a JSON object")
    return data


def _parse_problem(data: dict):
    try:
        return PROBLEM_ADAPTER.validate_python(data)
    except ValidationError as exc:
        raise MalformedInput(f"invalid problem file:\n{exc}") from exc


def _spec_of(problem):
    if isinstance(problem, ScalarFodeProblem):
        return FodeSpec(problem.alpha, problem.coeffs)
    if isinstance(problem, SystemFodeProblem):
        return SystemSpec(problem.alpha, problem.a_coeffs, problem.b_coeffs)
    if isinstance(problem, ScalarPdeProblem):
        return EvolutionPde(problem.alpha, problem.coeffs, problem.b, problem.p, problem.a)
    return SystemPde(
        problem.alpha, problem.a1, problem.a2, problem.b1, problem.b2,
        problem.m1, problem.m2, problem.c, problem.d,
    )


def spec_to_dict(spec) -> dict:
    if isinstance(spec, FodeSpec):
        return {"kind": "scalar_fode", "alpha": spec.alpha, "coeffs": list(spec.coeffs)}
    return {
        "kind": "system_fode",
        "alpha": spec.alpha,
        "a_coeffs": list(spec.a_coeffs),
        "b_coeffs": list(spec.b_coeffs),
    }


def reduction_to_dict(red: PdeReduction) -> dict:
    return {
        "similarity": red.similarity,
        "prefactor": list(red.prefactor),
        "shift": red.shift,
        "target": None if red.target is None else spec_to_dict(red.target),
    }


def reduction_from_dict(data: dict) -> PdeReduction:
    t = data.get("target")
    if t is None:
        target = None
    elif t["kind"] == "scalar_fode":
        target = FodeSpec(t["alpha"], t["coeffs"])
    else:
        target = SystemSpec(t["alpha"], t["a_coeffs"], t["b_coeffs"])
    return PdeReduction(
        float(data["similarity"]), tuple(float(v) for v in data["prefactor"]), float(data["shift"]), target
    )


def _solve(problem):
    """(solution, reduction or None)."""
    spec = _spec_of(problem)
    if isinstance(problem, ScalarFodeProblem):
        return solve_scalar(spec, problem.branch), None
    if isinstance(problem, SystemFodeProblem):
        return solve_system(spec), None
    if isinstance(problem, ScalarPdeProblem):
        red = reduce_scalar(spec)
        return solve_scalar(red.target), red
    red = reduce_system(spec)
    return solve_system(red.target), red


def _solution_document(problem) -> dict:
    sol, red = _solve(problem)
    return {
        "kind": "solution",
        "problem_kind": problem.kind,
        "solution": solution_to_dict(sol),
        "reduction": None if red is None else reduction_to_dict(red),
        "constants": _constants_json(_constants(problem.constants)),
    }


def _parse_list(text: str) -> list[float]:
    """``"0.5,1,2"`` or ``"start:stop:num"``."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, num = text.split(":")
            return list(np.linspace(float(start), float(stop), int(num)))
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise MalformedInput(f"cannot parse number list {text!r}") from exc


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _columns(name: str, values: np.ndarray) -> dict[str, np.ndarray]:
    values = np.asarray(values, dtype=complex)
    scale = np.maximum(np.abs(values), np.finfo(float).tiny)
    if np.all(np.abs(values.imag) <= IMAG_TOL * scale):
        return {name: values.real}
    return {f"{name}_re": values.real, f"{name}_im": values.imag}


def _write_csv(columns: dict[str, np.ndarray], path: Optional[str], out) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = list(columns)
    writer.writerow(names)
    for row in zip(*(columns[n] for n in names)):
        writer.writerow([_fmt(v) for v in row])
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    else:
        out.write(buf.getvalue())


# ---------------------------------------------------------------- commands


def cmd_solve(args, out) -> int:
    doc = _solution_document(_parse_problem(_load(args.file)))
    text = json.dumps(doc, indent=2)
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    out.write(text + "\n")
    return EXIT_OK


def _evaluation_inputs(data: dict):
    """(solution, reduction, constants, default points or grid) from any input document."""
    if data.get("kind") == "solution":
        try:
            sol = solution_from_dict(data["solution"])
            red = None if data.get("reduction") is None else reduction_from_dict(data["reduction"])
            consts = data.get("constants")
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInput(f"invalid solution document: {exc}") from exc
        return sol, red, _constants(consts), None
    problem = _parse_problem(data)
    sol, red = _solve(problem)
    default = getattr(problem, "points", None) or getattr(problem, "grid", None)
    return sol, red, _constants(problem.constants), default


def cmd_eval(args, out) -> int:
    sol, red, consts, default = _evaluation_inputs(_load(args.file))
    tol = None
    if red is None:
        if args.z is not None:
            z = _parse_list(args.z)
        elif args.grid is not None:
            z = _parse_list(args.grid)
        else:
            z = list(default) if default else list(DEFAULT_POINTS)
        z = np.asarray(z, dtype=float)
        if isinstance(sol, SystemSolution):
            phi = evaluate(sol.phi, z, consts, tol)
            psi = evaluate(sol.psi, z, consts, tol)
            cols = {"z": z, **_columns("phi", phi), **_columns("psi", psi)}
        else:
            cols = {"z": z, **_columns("value", evaluate(sol, z, consts, tol))}
    else:
        if args.z is not None:
            raise MalformedInput("PDE problems take --grid 'XLIST;TLIST', not --z")
        if args.grid is not None:
            parts = args.grid.split(";")
            if len(parts) != 2:
                raise MalformedInput("PDE grid must look like 'XLIST;TLIST'")
            xs, ts = _parse_list(parts[0]), _parse_list(parts[1])
        elif default is not None:
            xs, ts = default.x, default.t
        else:
            xs, ts = DEFAULT_X, DEFAULT_T
        X, T = np.meshgrid(np.asarray(xs, float), np.asarray(ts, float), indexing="ij")
        X, T = X.ravel(), T.ravel()
        vals = lift(red, sol, X, T, consts, tol)
        if isinstance(sol, SystemSolution):
            cols = {"x": X, "t": T, **_columns("u", vals[0]), **_columns("v", vals[1])}
        else:
            cols = {"x": X, "t": T, **_columns("u", vals)}
    _write_csv(cols, args.csv_out, out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    problem = _parse_problem(_load(args.file))
    tol = args.tol or problem.tolerance
    consts = _constants(problem.constants)
    spec = _spec_of(problem)
    sol, _ = _solve(problem)
    kw = {} if tol is None else {"tol": tol}
    if isinstance(problem, ScalarFodeProblem):
        reports = {"equation": residual_scalar(spec, sol, consts, problem.points, tol or default_residual_tol())}
    elif isinstance(problem, SystemFodeProblem):
        r1, r2 = residual_system(spec, sol, consts, problem.points, tol or default_residual_tol())
        reports = {"phi_equation": r1, "psi_equation": r2}
    else:
        grid = problem.grid
        xs, ts = (grid.x, grid.t) if grid else (None, None)
        if isinstance(problem, ScalarPdeProblem):
            reports = {"equation": residual_pde_scalar(spec, sol, consts, xs, ts, **kw)}
        else:
            r1, r2 = residual_pde_system(spec, sol, consts, xs, ts, **kw)
            reports = {"u_equation": r1, "v_equation": r2}
    passed = all(r.passed for r in reports.values())
    doc = {"passed": passed, "reports": {k: r.to_dict() for k, r in reports.items()}}
    out.write(json.dumps(doc, indent=2) + "\n")
    for name, r in reports.items():
        status = "PASS" if r.passed else "FAIL"
        sys.stderr.write(f"{status} {name}: max relative residual {r.max_rel:.3e} (tol {r.tol:.1e})\n")
    return EXIT_OK if passed else EXIT_VERIFY


def cmd_reduce(args, out) -> int:
    problem = _parse_problem(_load(args.file))
    if isinstance(problem, ScalarPdeProblem):
        red = reduce_scalar(_spec_of(problem))
    elif isinstance(problem, SystemPdeProblem):
        red = reduce_system(_spec_of(problem))
    else:
        raise MalformedInput("reduce accepts only scalar_pde and system_pde problems")
    out.write(json.dumps(reduction_to_dict(red), indent=2) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracsolve", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="print the closed-form solution as JSON")
    p.add_argument("file")
    p.add_argument("--json-out", metavar="PATH")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("eval", help="evaluate a solution and print CSV")
    p.add_argument("file")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--z", metavar="LIST", help="comma list or start:stop:num")
    g.add_argument("--grid", metavar="SPEC", help="start:stop:num, or 'XLIST;TLIST' for PDEs")
    p.add_argument("--csv-out", metavar="PATH")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="check the residual of the solution")
    p.add_argument("file")
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reduce", help="reduce a PDE problem to an ODE problem")
    p.add_argument("file")
    p.set_defaults(func=cmd_reduce)
    return parser


def run(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_MALFORMED
    try:
        if args.command == "verify" and args.tol is not None and not args.tol > 0:
            raise MalformedInput("--tol must be positive")
        return args.func(args, out)
    except MalformedInput as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_MALFORMED
    except (UnsupportedRegime, DomainError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_REGIME
    except ConvergenceError as exc:
        sys.stderr.write(f"error: numerical convergence failure: {exc}\n")
        return EXIT_CONVERGENCE
    except ValueError as exc:
        # e.g. an unparsable FRACSOLVE_TOL
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_MALFORMED


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
