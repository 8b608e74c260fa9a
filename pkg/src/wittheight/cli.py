"""Command-line interface.

Every command reads an instance as JSON (``--input FILE`` or ``-`` for stdin),
writes a report as JSON or text, and signals the outcome by exit code:

    0  ok               3  indeterminate certificate
    2  invalid input    4  certificate fail
                        5  enumeration budget exhausted

An input holding ``{"instances": [...]}`` (the output of ``gen``) runs the
command on every instance and reports them in order.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import serialize as ser
from .bilinear_space import (find_isotropic, ortho_basis, radical_certificate, regular_split,
                             siegel_basis)
from .errors import BudgetExceeded, NotAnIsometry, NotIsotropic, WittHeightError
from .generate import KINDS, gen_instance
from .heights import (DEFAULT_PRECISION, height_sq, inhom_height_sq, matrix_height_sq,
                      worst_verdict)
from .isometry import (cartan_dieudonne, reflection, reflection_height_cert, small_reflection)
from .suites import SUITES, run_suite
from .witt_engine import max_totally_isotropic, verify_decomposition, witt_decompose

EXIT_OK, EXIT_INVALID, EXIT_INDETERMINATE, EXIT_FAIL, EXIT_BUDGET = 0, 2, 3, 4, 5
_VERDICT_EXIT = {"pass": EXIT_OK, "indeterminate": EXIT_INDETERMINATE, "fail": EXIT_FAIL}


class InvalidInput(Exception):
    pass


class CheckFailed(Exception):
    def __init__(self, outputs, certs):
        super().__init__("structural verification failed")
        self.outputs = outputs
        self.certs = certs


# -- commands: each maps (instance, args) to (outputs, certificates) ------------------

def _space_heights(spec):
    s = spec.space()
    return {"N": s.N, "L": s.L, "rank": s.rank_r, "H_F_sq": ser.rat(s.height_sq_f),
            "H_Z_sq": ser.rat(s.height_sq_z)}


def cmd_height(spec, args):
    out = _space_heights(spec)
    if spec.vector is not None:
        if not any(spec.vector):
            out["H_x_sq"] = "0"
        else:
            out["H_x_sq"] = ser.rat(height_sq(spec.vector))
        out["h_x_sq"] = ser.rat(inhom_height_sq(spec.vector))
    if spec.isometry is not None:
        out["H_sigma_sq"] = ser.rat(matrix_height_sq(spec.isometry.matrix))
    return out, []


def cmd_witt(spec, args):
    s = spec.space()
    if s.L == 0:
        raise InvalidInput("the subspace is zero; there is nothing to decompose")
    d = witt_decompose(s, max_nodes=args.enum_budget, digits=args.precision_digits)
    out = {"space": _space_heights(spec), "decomposition": ser.decomposition(d)}
    certs = list(d.certificates)
    if s.regular:
        w, c = max_totally_isotropic(s, d, args.precision_digits)
        out["max_totally_isotropic"] = ser.subspace(w)
        certs.append(c)
    rep = verify_decomposition(d, s, max_nodes=args.enum_budget, digits=args.precision_digits)
    out["verification"] = rep.checks
    if not rep.passed:
        raise CheckFailed(out, certs)
    return out, certs


def cmd_orthobasis(spec, args):
    s = spec.space()
    sb, sc = siegel_basis(s.z, args.precision_digits)
    ob, oc = ortho_basis(s, args.precision_digits)
    gram = [[s.form(x, y) for y in ob] for x in ob]
    out = {"siegel_basis": ser.mat(sb), "orthogonal_basis": ser.mat(ob),
           "gram_diagonal": ser.vec(gram[i][i] for i in range(len(ob)))}
    return out, [sc] + ([oc] if oc is not None else [])


def cmd_radical(spec, args):
    s = spec.space()
    split = regular_split(s, args.precision_digits)
    cert = radical_certificate(s, split.radical, args.precision_digits)
    out = {"radical": ser.subspace(split.radical), "regular_part": ser.subspace(split.w),
           "regular": s.regular}
    return out, [cert] + list(split.certificates)


def cmd_isotropic(spec, args):
    s = spec.space()
    o = find_isotropic(s, strategy=args.strategy, max_nodes=args.enum_budget,
                       digits=args.precision_digits)
    return {"isotropy": ser.isotropy(o)}, []


def cmd_factor(spec, args):
    if spec.isometry is None:
        raise InvalidInput("factor needs an \"isometry\" matrix in the input")
    s = spec.space()
    if not s.regular:
        raise InvalidInput("factorization needs a regular space")
    try:
        res = cartan_dieudonne(s, spec.isometry, args.precision_digits)
    except NotAnIsometry as exc:
        raise InvalidInput(str(exc)) from exc
    out = ser.factorization(res)
    out["H_sigma_sq"] = ser.rat(spec.isometry.height_sq)
    if not res.verified:
        raise CheckFailed(out, list(res.certificates))
    return out, list(res.certificates)


def cmd_reflect(spec, args):
    s = spec.space()
    if spec.vector is None:
        if not s.regular or s.L == 0:
            raise InvalidInput("a small reflection needs a regular space of positive dimension")
        r, c = small_reflection(s, args.precision_digits)
        certs = [c]
    else:
        try:
            r = reflection(s, spec.vector)
        except (NotIsotropic, ValueError) as exc:
            raise InvalidInput(str(exc)) from exc
        certs = []
    certs.append(reflection_height_cert(r, s, args.precision_digits))
    return ser.reflection(r), certs


COMMANDS = {
    "height": cmd_height,
    "witt": cmd_witt,
    "orthobasis": cmd_orthobasis,
    "radical": cmd_radical,
    "isotropic": cmd_isotropic,
    "factor": cmd_factor,
    "reflect": cmd_reflect,
}


# -- report assembly ----------------------------------------------------------------------

def _report(op, spec, args, outputs, certs, verdict, code, elapsed=None):
    rep = {"operation": op, "instance": ser.instance(spec), "outputs": outputs,
           "certificates": [ser.certificate(c) for c in certs], "verdict": verdict,
           "precision_digits": args.precision_digits, "seed": args.seed, "exit_code": code}
    if args.enum_budget is not None:
        rep["enum_budget"] = args.enum_budget
    if elapsed is not None:
        rep["timing_seconds"] = round(elapsed, 6)
    return rep


def run_command(op, spec, args) -> tuple[dict, int]:
    t0 = time.perf_counter()
    try:
        outputs, certs = COMMANDS[op](spec, args)
        verdict = worst_verdict(certs) if certs else "pass"
        code = _VERDICT_EXIT[verdict]
    except CheckFailed as exc:
        outputs, certs, verdict, code = exc.outputs, exc.certs, "fail", EXIT_FAIL
    except BudgetExceeded as exc:
        outputs = {"error": str(exc), "nodes": exc.nodes,
                   "bound_sq": ser.rat(exc.bound_sq) if exc.bound_sq is not None else None}
        certs, verdict, code = [], "budget", EXIT_BUDGET
    except (InvalidInput, ser.MalformedInput) as exc:
        outputs, certs, verdict, code = {"error": str(exc)}, [], "invalid", EXIT_INVALID
    elapsed = time.perf_counter() - t0 if args.timing else None
    return _report(op, spec, args, outputs, certs, verdict, code, elapsed), code


def _read_input(path):
    try:
        text = sys.stdin.read() if path in (None, "-") else open(path, encoding="utf-8").read()
        data = json.loads(text)
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"input is not valid JSON: {exc}") from exc
    if isinstance(data, dict) and data.get("type") == "instance":
        data = data["value"]
    items = data["instances"] if isinstance(data, dict) and "instances" in data else [data]
    try:
        return [ser.parse_instance(d) for d in items]
    except (ser.MalformedInput, WittHeightError, ValueError) as exc:
        raise InvalidInput(str(exc)) from exc


def _worst_code(codes):
    # fail dominates budget, which dominates indeterminate
    for c in (EXIT_INVALID, EXIT_FAIL, EXIT_BUDGET, EXIT_INDETERMINATE):
        if c in codes:
            return c
    return EXIT_OK


# -- text rendering ------------------------------------------------------------------------

def render_text(data, indent=0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(data, dict):
        for k, v in data.items():
            if isinstance(v, (dict, list)) and v and not _is_flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_flat(v)}")
    elif isinstance(data, list):
        for i, v in enumerate(data):
            if isinstance(v, (dict, list)) and not _is_flat(v):
                lines.append(f"{pad}[{i}]")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_flat(v)}")
    else:
        lines.append(f"{pad}{data}")
    return "\n".join(lines)


def _is_flat(v) -> bool:
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) for x in v) or all(
            isinstance(x, list) and all(not isinstance(y, (dict, list)) for y in x) for x in v)
    return not isinstance(v, dict)


def _flat(v) -> str:
    if isinstance(v, list):
        if v and isinstance(v[0], list):
            return "[" + "; ".join(" ".join(map(str, r)) for r in v) + "]"
        return "(" + ", ".join(map(str, v)) + ")"
    if v is None:
        return "-"
    return str(v)


def emit(data, fmt, stream=None):
    stream = stream or sys.stdout
    stream.write(ser.dumps(data) if fmt == "json" else render_text(data) + "\n")


# -- argument parsing ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("json", "text"), default="json")
    common.add_argument("--precision-digits", type=int, default=DEFAULT_PRECISION,
                        help="starting precision of bound enclosures (decimal digits)")
    common.add_argument("--enum-budget", type=int, default=None,
                        help="node budget for lattice enumeration")
    common.add_argument("--timing", action="store_true",
                        help="include wall-clock timings (makes reports non-reproducible)")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="wittheight", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in [("height", "heights of a form, subspace, vector or isometry"),
                           ("witt", "Witt decomposition with certificates"),
                           ("orthobasis", "small-height and orthogonal bases"),
                           ("radical", "radical and regular part"),
                           ("isotropic", "smallest isotropic vector or proof of anisotropy"),
                           ("factor", "factor an isometry into reflections"),
                           ("reflect", "reflection in a vector (or a small reflection)")]:
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("--input", default="-", help="instance JSON file, or - for stdin")
        if name == "isotropic":
            sp.add_argument("--strategy", choices=("hybrid", "enumeration"), default="hybrid")
    g = sub.add_parser("gen", parents=[common], help="seeded random instances")
    g.add_argument("--kind", choices=KINDS, default="form")
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--l", type=int, default=None)
    g.add_argument("--coeff-bound", type=int, default=10)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--count", type=int, default=1)
    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("--suite", default="all")
    v.add_argument("--count", type=int, default=20)
    v.add_argument("--workers", type=int, default=1)
    return p


def _cmd_gen(args) -> int:
    if args.count < 0:
        raise InvalidInput("count must be nonnegative")
    try:
        insts = [gen_instance(args.kind, args.n, args.seed, args.l, args.coeff_bound, args.k, i)
                 for i in range(args.count)]
    except ValueError as exc:
        raise InvalidInput(str(exc)) from exc
    emit({"operation": "gen", "kind": args.kind, "seed": args.seed,
          "params": {"n": args.n, "l": args.l, "coeff_bound": args.coeff_bound, "k": args.k},
          "instances": [ser.instance(s) for s in insts]}, args.output)
    return EXIT_OK


def _cmd_verify(args) -> int:
    if args.suite not in SUITES:
        raise InvalidInput(f"unknown suite {args.suite!r}; expected one of {', '.join(SUITES)}")
    if args.count < 0:
        raise InvalidInput("count must be nonnegative")
    t0 = time.perf_counter()
    rep = run_suite(args.suite, args.count, args.seed, args.workers, args.enum_budget)
    if args.timing:
        rep["timing_seconds"] = round(time.perf_counter() - t0, 6)
    s = rep["summary"]
    code = (EXIT_FAIL if s["fail"] else EXIT_BUDGET if s["budget"]
            else EXIT_INDETERMINATE if s["indeterminate"] else EXIT_OK)
    rep["exit_code"] = code
    emit(rep, args.output)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "verify":
            return _cmd_verify(args)
        specs = _read_input(args.input)
    except InvalidInput as exc:
        emit({"operation": args.command, "error": str(exc), "exit_code": EXIT_INVALID}, args.output)
        return EXIT_INVALID
    reports, codes = [], []
    for spec in specs:
        rep, code = run_command(args.command, spec, args)
        reports.append(rep)
        codes.append(code)
    emit(reports[0] if len(reports) == 1 else {"reports": reports}, args.output)
    return _worst_code(codes)


if __name__ == "__main__":
    sys.exit(main())
