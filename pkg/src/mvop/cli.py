"""Command-line front end.

Exit codes: 0 success, 1 construction or verification failure, 2 usage error.
Data goes to stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .errors import InconsistentSystem, MvopError, NonTruncating, NormalizationImpossible, SingularMatrix
from .families import (
    SphericalFamily,
    build_family_top,
    build_scalar_family,
    construct_P,
    eigenvalue,
    family_for,
    restrict,
    restrict_y,
    scalar_h,
)
from .numeric import Matrix, rational_str
from .spectra import EigKey, HighestWeight, branch, casimir, gt_dimension
from .verification import run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CONSTRUCTION_ERRORS = (InconsistentSystem, NonTruncating, NormalizationImpossible, SingularMatrix)


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CliConfig:
    mode: str = "exact"
    tol: float = 1e-9
    output: str = "json"
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("exact", "float"):
            raise UsageError(f"mode must be exact or float, got {self.mode!r}")
        if not self.tol > 0:
            raise UsageError("tol must be positive")


def _json_print(obj) -> None:
    print(json.dumps(obj, indent=2))


def _matrix_json(M: Matrix) -> list[list[str]]:
    return M.to_json()


def _num(x, mode: str):
    return float(x) if mode == "float" else rational_str(x)


def _float_str(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--mode", choices=("exact", "float"), default="exact")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--format", dest="output", choices=("json", "csv"), default=None,
                   help="output format (eval defaults to csv, everything else to json)")
    p.add_argument("--seed", type=int, default=0)
    return p


def _family_args() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--n", type=int, help="the pair is (SO(n+1), SO(n))")
    p.add_argument("--p", type=int, help="K-type Lambda^p(C^n)")
    p.add_argument("--top", action="store_true", help="3x3 family, n = 2*ell+1")
    p.add_argument("--scalar", action="store_true", help="scalar family, n = 2*ell")
    p.add_argument("--ell", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--sign", type=int, default=1, choices=(1, -1))
    return p


def _key_args() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--delta", type=int, default=0)
    return p


def _weight_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad weight {text!r}") from exc


def _grid(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvop",
        description="Matrix-valued orthogonal polynomials from spherical functions of (SO(n+1), SO(n)).",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    c, f, k = _common(), _family_args(), _key_args()

    sub.add_parser("params", parents=[c, f], help="family matrices, dimensions and constants")
    sub.add_parser("gen", parents=[c, f, k], help="one polynomial P_{w,delta}")
    seq = sub.add_parser("seq", parents=[c, f], help="all polynomials with w <= wmax")
    seq.add_argument("--wmax", type=int, required=True)
    ver = sub.add_parser("verify", parents=[c, f], help="run the verification suite")
    ver.add_argument("--wmax", type=int, default=6)
    ver.add_argument("--pairs", type=int, default=10, help="random pairs for the symmetry check")
    ev = sub.add_parser("eval", parents=[c, f, k], help="sample Psi P on a grid (CSV)")
    grid = ev.add_mutually_exclusive_group(required=True)
    grid.add_argument("--s", type=_grid, help="comma-separated angles in (0, pi)")
    grid.add_argument("--y", type=_grid, help="comma-separated points in (0, 1)")
    cas = sub.add_parser("casimir", parents=[c], help="Casimir eigenvalue of an SO(n) weight")
    cas.add_argument("--n", type=int, required=True)
    cas.add_argument("--weight", type=_weight_list, required=True)
    br = sub.add_parser("branch", parents=[c], help="SO(n-1) constituents of an SO(n) weight")
    br.add_argument("--n", type=int, required=True)
    br.add_argument("--weight", type=_weight_list, required=True)
    sc = sub.add_parser("scalar", parents=[c], help="scalar family polynomial h_w")
    sc.add_argument("--ell", type=int, required=True)
    sc.add_argument("--d", type=int, required=True)
    sc.add_argument("--w", type=int, required=True)
    sc.add_argument("--sign", type=int, default=1, choices=(1, -1))
    return parser


def resolve_family(args) -> SphericalFamily:
    if args.top and args.scalar:
        raise UsageError("--top and --scalar are exclusive")
    if args.scalar:
        if args.ell is None or args.d is None:
            raise UsageError("--scalar needs --ell and --d")
        return build_scalar_family(args.ell, args.d, args.sign)
    if args.top:
        if args.ell is None:
            raise UsageError("--top needs --ell")
        return build_family_top(args.ell)
    if args.n is None or args.p is None:
        raise UsageError("give --n and --p, or --top --ell, or --scalar --ell --d")
    return family_for(args.n, args.p)


def _config(args) -> CliConfig:
    mode = os.environ.get("MVOP_MODE") or args.mode
    output = args.output or ("csv" if args.command == "eval" else "json")
    return CliConfig(mode=mode, tol=args.tol, output=output, seed=args.seed)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _psi_description(family: SphericalFamily) -> str:
    if family.kind == "2x2":
        return "[[2y-1, 1], [1, 2y-1]]"
    if family.kind == "3x3":
        return "columns (e^{is}, 1, e^{-is}), (1, cos s, 1), (e^{-is}, 1, e^{is}); cos s = 2y-1"
    return "[[1]]"


def cmd_params(args, cfg: CliConfig) -> int:
    fam = resolve_family(args)
    doc = {"family": fam.family_id, "kind": fam.kind, "n": fam.n, "ell": fam.ell}
    if fam.kind == "scalar":
        doc.update({"d": fam.d, "sign": fam.sign})
    else:
        doc["p"] = fam.p
        doc.update({name: _matrix_json(getattr(fam.params, name)) for name in ("C", "U", "V")})
    doc.update({
        "E": _matrix_json(fam.E),
        "N": _matrix_json(fam.N),
        "dims": list(fam.dims),
        "norm_const": fam.norm_const.to_json(),
        "weight_exponent": rational_str(fam.weight_exponent),
        "psi": _psi_description(fam),
    })
    _json_print(doc)
    return EXIT_OK


def _key(fam: SphericalFamily, w: int, delta: int) -> EigKey:
    key = EigKey(w, delta)
    eigenvalue(fam, key)
    return key


def _solution_doc(fam: SphericalFamily, key: EigKey, mode: str) -> dict:
    sol = construct_P(fam, key)
    doc = {"family": fam.family_id, "w": key.w, "delta": key.delta, "lambda": _num(sol.lam, mode)}
    if fam.kind == "scalar":
        doc["coeffs"] = [_num(c, mode) for c in sol.P.entry(0, 0)]
    else:
        doc["coeffs"] = [[_num(x, mode) for x in row] for row in sol.P.column_coeffs()]
        doc["P0"] = [_num(x, mode) for x in sol.P0]
    return doc


def cmd_gen(args, cfg: CliConfig) -> int:
    fam = resolve_family(args)
    key = _key(fam, args.w, args.delta)
    _json_print(_solution_doc(fam, key, cfg.mode))
    return EXIT_OK


def cmd_seq(args, cfg: CliConfig) -> int:
    fam = resolve_family(args)
    if args.wmax < 0:
        raise UsageError("--wmax must be nonnegative")
    docs = [_solution_doc(fam, EigKey(w, dl), cfg.mode)
            for w in range(fam.min_w, args.wmax + 1) for dl in fam.deltas]
    if cfg.output == "csv":
        out = csv.writer(sys.stdout, lineterminator="\n")
        out.writerow(["w", "delta", "lambda", "degree", "component", "coefficient"])
        for doc in docs:
            rows = doc["coeffs"] if fam.kind != "scalar" else [[c] for c in doc["coeffs"]]
            for deg, row in enumerate(rows):
                for comp, val in enumerate(row):
                    out.writerow([doc["w"], doc["delta"], doc["lambda"], deg, comp, val])
    else:
        _json_print({"family": fam.family_id, "wmax": args.wmax, "polynomials": docs})
    return EXIT_OK


def cmd_verify(args, cfg: CliConfig) -> int:
    fam = resolve_family(args)
    if args.wmax < 0:
        raise UsageError("--wmax must be nonnegative")
    report = run_suite(fam, args.wmax, cfg.tol, mode=cfg.mode, seed=cfg.seed,
                       symmetry_pairs=args.pairs)
    _json_print(report.to_json())
    for name in report.failures:
        print(f"check failed: {name}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_eval(args, cfg: CliConfig) -> int:
    fam = resolve_family(args)
    key = _key(fam, args.w, args.delta)
    axis, grid = ("s", args.s) if args.s is not None else ("y", args.y)
    lo, hi = (0.0, np.pi) if axis == "s" else (0.0, 1.0)
    for x in grid:
        if not lo < x < hi:
            raise UsageError(f"{axis} = {x} is outside the open interval ({lo}, {hi})")
    sol = construct_P(fam, key)
    fn = restrict if axis == "s" else restrict_y
    values = [fn(fam, sol, x) for x in grid]
    complex_out = any(np.iscomplexobj(v) for v in values)
    m = fam.size
    if complex_out:
        header = [axis] + [f"h{i + 1}_{part}" for i in range(m) for part in ("re", "im")]
    else:
        header = [axis] + [f"h{i + 1}" for i in range(m)]
    if cfg.output == "json":
        rows = []
        for x, v in zip(grid, values):
            rows.append({axis: x, "h": [[float(z.real), float(z.imag)] for z in v] if complex_out
                         else [float(z) for z in v]})
        _json_print({"family": fam.family_id, "w": key.w, "delta": key.delta, "rows": rows})
        return EXIT_OK
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(header)
    for x, v in zip(grid, values):
        if complex_out:
            cells = [_float_str(part) for z in v for part in (complex(z).real, complex(z).imag)]
        else:
            cells = [_float_str(z) for z in v]
        out.writerow([_float_str(x)] + cells)
    return EXIT_OK


def _weight(n: int, entries) -> HighestWeight:
    return HighestWeight.for_group(n, entries)


def cmd_casimir(args, cfg: CliConfig) -> int:
    m = _weight(args.n, args.weight)
    _json_print({"n": args.n, "weight": list(m.entries), "casimir": rational_str(casimir(m)),
                 "dimension": gt_dimension(args.n, m)})
    return EXIT_OK


def cmd_branch(args, cfg: CliConfig) -> int:
    m = _weight(args.n, args.weight)
    parts = branch(args.n, m)
    if cfg.output == "csv":
        out = csv.writer(sys.stdout, lineterminator="\n")
        out.writerow(["weight", "dimension"])
        for b in parts:
            out.writerow([",".join(map(str, b.entries)), gt_dimension(args.n - 1, b)])
    else:
        _json_print({"n": args.n, "weight": list(m.entries),
                     "constituents": [{"weight": list(b.entries), "dimension": gt_dimension(args.n - 1, b)}
                                      for b in parts]})
    return EXIT_OK


def cmd_scalar(args, cfg: CliConfig) -> int:
    fam = build_scalar_family(args.ell, args.d, args.sign)
    key = _key(fam, args.w, 0)
    h = scalar_h(fam, args.w)
    _json_print({"family": fam.family_id, "w": args.w, "lambda": _num(eigenvalue(fam, key), cfg.mode),
                 "coeffs": [_num(c, cfg.mode) for c in h], "dims": list(fam.dims)})
    return EXIT_OK


COMMANDS = {
    "params": cmd_params,
    "gen": cmd_gen,
    "seq": cmd_seq,
    "verify": cmd_verify,
    "eval": cmd_eval,
    "casimir": cmd_casimir,
    "branch": cmd_branch,
    "scalar": cmd_scalar,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except CONSTRUCTION_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, MvopError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
