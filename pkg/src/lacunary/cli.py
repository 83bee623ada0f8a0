"""Command-line front end.

Every command prints JSON by default. ``--output text`` renders the same
data as indented ``key: value`` lines, and any other ``--output`` value is
taken as a file path that receives the JSON. Exit status is 0 on success,
1 when ``verify`` finds a failure and 2 on malformed input.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import reduce as _fold
from typing import Any, List, Optional, Sequence

from . import oracle
from .gcd_engine import GcdCertificate, SparseSystem, sparse_gcd, structural_failures
from .multiplicity import find_any_witness, find_witness
from .osculating import OsculatingInstance, pirola_check
from .poly import DEFAULT_DEGREE_CEILING, DegreeCeilingError
from .reduction import DEFAULT_BOUND, ReductionConfig, reduce
from .torus import MonomialMap

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# parsing


def _load_json_text(text: str, where: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{where}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _load_json_file(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return _load_json_text(text, path)


def parse_int_list(text: str, field: str) -> List[int]:
    """A JSON list of integers; entries may be decimal strings of any length."""
    obj = _load_json_text(text, field)
    if not isinstance(obj, list) or not obj:
        raise InputError(f"{field}: expected a non-empty JSON list")
    out = []
    for i, x in enumerate(obj):
        if isinstance(x, bool) or not isinstance(x, (int, str)):
            raise InputError(f"{field}[{i}]: expected an integer or decimal string, got {x!r}")
        try:
            out.append(int(str(x).strip()))
        except ValueError as exc:
            raise InputError(f"{field}[{i}]: {x!r} is not an integer") from exc
    return out


def _fraction(x: Any, field: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise InputError(f"{field}: expected an integer or 'p/q' string, got {x!r}")
    try:
        return Fraction(str(x).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{field}: {x!r} is not a rational number") from exc


def parse_gamma(text: str) -> List[List[Fraction]]:
    """One coefficient row ``[4,-4,1]`` or several ``[[..],[..]]``."""
    obj = _load_json_text(text, "--gamma")
    if not isinstance(obj, list) or not obj:
        raise InputError("--gamma: expected a non-empty JSON list")
    rows = obj if isinstance(obj[0], list) else [obj]
    return [[_fraction(c, f"--gamma[{i}][{j}]") for j, c in enumerate(r)] for i, r in enumerate(rows)]


def _system_from_obj(obj: Any, where: str) -> SparseSystem:
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected a JSON object with fields 'gamma' and 'a'")
    for key in ("gamma", "a"):
        if key not in obj:
            raise InputError(f"{where}: missing field '{key}'")
    if not isinstance(obj["gamma"], list) or not all(isinstance(r, list) for r in obj["gamma"]):
        raise InputError(f"{where}: field 'gamma' must be a list of coefficient rows")
    if not isinstance(obj["a"], list):
        raise InputError(f"{where}: field 'a' must be a list of exponents")
    gamma = [[_fraction(c, f"{where}: gamma[{i}][{j}]") for j, c in enumerate(r)] for i, r in enumerate(obj["gamma"])]
    a = parse_int_list(json.dumps([str(x) for x in obj["a"]]), f"{where}: a")
    try:
        return SparseSystem(tuple(map(tuple, gamma)), tuple(a))
    except ValueError as exc:
        raise InputError(f"{where}: {exc}") from exc


def _system_from_args(args) -> SparseSystem:
    if args.input:
        obj = _load_json_file(args.input)
        if isinstance(obj, dict) and "system" in obj:
            obj = obj["system"]
        return _system_from_obj(obj, args.input)
    if args.gamma is None or args.exponents is None:
        raise InputError("give --input FILE or both --gamma and --exponents")
    gamma = parse_gamma(args.gamma)
    a = parse_int_list(args.exponents, "--exponents")
    try:
        return SparseSystem(tuple(map(tuple, gamma)), tuple(a))
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _config(args) -> ReductionConfig:
    schedule = None
    if getattr(args, "schedule", None):
        schedule = tuple(parse_int_list(args.schedule, "--schedule"))
    try:
        return ReductionConfig(bound=args.bound, schedule=schedule)
    except ValueError as exc:
        raise InputError(f"--bound/--schedule: {exc}") from exc


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _nonnegative(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _ceiling(text: str) -> Optional[int]:
    if text.lower() == "none":
        return None
    return _positive(text)


def default_jobs() -> int:
    env = os.environ.get("LACUNARY_JOBS")
    if env is None:
        return 1
    try:
        return max(1, int(env))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# output


def render_text(obj: Any, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        if all(not isinstance(v, (dict, list)) for v in obj):
            return pad + "[" + ", ".join(_scalar(v) for v in obj) + "]"
        return "\n".join(
            (f"{pad}-\n" + render_text(v, indent + 1)) if isinstance(v, (dict, list)) else f"{pad}- {_scalar(v)}"
            for v in obj
        )
    return pad + _scalar(obj)


def _scalar(v: Any) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (dict, list)):
        return json.dumps(v)
    return str(v)


def emit(obj: Any, output: str, out=None) -> None:
    out = sys.stdout if out is None else out
    if output == "text":
        out.write(render_text(obj) + "\n")
        return
    text = json.dumps(obj, indent=2) + "\n"
    if output == "json":
        out.write(text)
        return
    with open(output, "w", encoding="utf-8") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_gcd(args) -> int:
    system = _system_from_args(args)
    cert = sparse_gcd(system, _config(args), order_bound=args.order_bound,
                      degree_ceiling=args.degree_ceiling)
    emit({"system": system.to_json(), "certificate": cert.to_json()}, args.output)
    return EXIT_OK


def cmd_multiple(args) -> int:
    if args.gamma is None or args.exponents is None:
        raise InputError("multiple needs --gamma and --exponents")
    rows = parse_gamma(args.gamma)
    if len(rows) != 1:
        raise InputError("--gamma: multiple takes a single coefficient row")
    a = parse_int_list(args.exponents, "--exponents")
    finder = find_any_witness if args.split else find_witness
    try:
        w = finder(rows[0], a, _config(args), args.degree_ceiling)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    emit({"gamma": [str(c) for c in rows[0]], "a": [str(x) for x in a],
          "witness": None if w is None else w.to_json()}, args.output)
    return EXIT_OK


def cmd_reduce(args) -> int:
    a = parse_int_list(args.exponents, "--exponents")
    try:
        res = reduce(MonomialMap.curve(a), _config(args))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    emit(res.to_json(), args.output)
    return EXIT_OK


def _pirola_one(task):
    a, bound, box, full = task
    rep = pirola_check(OsculatingInstance(a), ReductionConfig(bound=bound), box)
    if full:
        return rep.to_json()
    return {
        "a": [str(x) for x in rep.a],
        "verdict": rep.verdict,
        "torsion_point": {"rank_deficient": rep.torsion_point_flagged, "torsion": True},
        "checked": len(rep.witness_subspaces),
        "candidates": [w.to_json() for w in rep.witness_subspaces if w.candidate],
        "discrepancies": list(rep.discrepancies),
    }


def pirola_instances(n: int, max_d: int) -> List[tuple]:
    """Coprime ``0 < a_1 < ... < a_n <= max_d`` in lex order.

    Exponent vectors with a common factor ``d`` describe the same curve as
    ``a/d``, which is already in the list.
    """
    return [a for a in itertools.combinations(range(1, max_d + 1), n) if _fold(math.gcd, a, 0) == 1]


def cmd_pirola(args) -> int:
    if args.exponents is not None:
        a = parse_int_list(args.exponents, "--exponents")
        try:
            inst = OsculatingInstance(tuple(a))
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        rep = pirola_check(inst, ReductionConfig(bound=args.bound), args.theta_box)
        emit(rep.to_json(), args.output)
        return EXIT_OK
    if args.n is None or args.max_d is None:
        raise InputError("pirola needs --exponents, or --n and --max-d for a scan")
    if args.n < 2 or args.n > 4:
        raise InputError("--n must be 2, 3 or 4")
    box = args.theta_box if args.theta_box is not None else 2 * args.max_d * args.bound
    tasks = [(a, args.bound, box, args.full) for a in pirola_instances(args.n, args.max_d)]
    start = time.perf_counter()
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(_pirola_one, tasks, chunksize=16))
    else:
        results = [_pirola_one(t) for t in tasks]
    summary = {}
    for r in results:
        summary[r["verdict"]] = summary.get(r["verdict"], 0) + 1
    emit({
        "n": args.n,
        "max_d": args.max_d,
        "bound": args.bound,
        "theta_box": box,
        "instances": results,
        "summary": summary,
        "seconds": round(time.perf_counter() - start, 3),
    }, args.output)
    return EXIT_OK


def verify_certificate(system: SparseSystem, cert: GcdCertificate, ceiling: int) -> dict:
    """Structural checks always; the dense oracle as well when ``D <= ceiling``."""
    failures = structural_failures(system, cert)
    oracle_used = system.D <= ceiling and cert.g.nvars == 1
    if oracle_used:
        g = oracle.densify(cert.g, 10 * ceiling)
        for i, f in enumerate(system.polys()):
            if f.is_zero:
                continue
            q, r = oracle.densify(f, 2 * ceiling).divmod(g)
            if not r.is_zero:
                failures.append(f"g = {cert.g} does not divide f_{i + 1}; remainder {r}")
    return {"ok": not failures, "oracle": oracle_used, "failures": failures}


def cmd_verify(args) -> int:
    system = _system_from_args(args)
    obj = _load_json_file(args.certificate)
    if isinstance(obj, dict) and "certificate" in obj:
        obj = obj["certificate"]
    try:
        cert = GcdCertificate.from_json(obj)
    except ValueError as exc:
        raise InputError(f"{args.certificate}: {exc}") from exc
    report = verify_certificate(system, cert, args.ceiling)
    emit(report, args.output)
    return EXIT_OK if report["ok"] else EXIT_FAILED


def bench_system(D: int) -> SparseSystem:
    """``(t**D - 2)(t**(D-1) - 3)`` and ``(t**D - 2)(t**(D-1) - 5)``: the gcd is ``t**D - 2``."""
    q = D - 1
    rows = ((6, -3, -2, 1), (10, -5, -2, 1))
    return SparseSystem(rows, (D, q, D + q))


def cmd_bench(args) -> int:
    table = []
    for e in range(args.min_exp, args.max_exp + 1):
        D = 10 ** e
        system = bench_system(D)
        best = math.inf
        for _ in range(args.repeat):
            start = time.perf_counter()
            cert = sparse_gcd(system, ReductionConfig(bound=args.bound), order_bound=0,
                              with_exceptional=False)
            best = min(best, time.perf_counter() - start)
        table.append({"D": str(D), "seconds": round(best, 6), "k": cert.k, "g": str(cert.g)})
    emit({"family": "(t^D - 2)(t^(D-1) - c), c in {3, 5}", "rows": table}, args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lacunary", description="Sparse gcd certificates and multiple-root witnesses.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, system=True, bound=True):
        sp.add_argument("--output", default="json", help="json, text, or a file path for JSON")
        if system:
            sp.add_argument("--input", help="system JSON file with fields 'gamma' and 'a'")
            sp.add_argument("--gamma", help="coefficient rows as JSON, e.g. '[[1,2,3]]'")
            sp.add_argument("--exponents", help="exponents as JSON, e.g. '[\"1000000\", 3]'")
        if bound:
            sp.add_argument("--bound", type=_positive, default=DEFAULT_BOUND, help="relation bound per level")
            sp.add_argument("--schedule", help="per-level bounds as JSON list")
            sp.add_argument("--degree-ceiling", type=_ceiling, default=DEFAULT_DEGREE_CEILING,
                            help="max degree spread for the reduced gcd ('none' for no limit)")

    sp = sub.add_parser("gcd", help="gcd certificate of a sparse system")
    common(sp)
    sp.add_argument("--order-bound", type=_nonnegative, default=None, help="torsion scan bound (0 skips)")
    sp.set_defaults(func=cmd_gcd)

    sp = sub.add_parser("multiple", help="structure witness for a multiple root")
    common(sp)
    sp.add_argument("--split", action="store_true", help="also search partitions of the terms")
    sp.set_defaults(func=cmd_multiple)

    sp = sub.add_parser("reduce", help="factor the monomial curve through small subtori")
    sp.add_argument("--output", default="json", help="json, text, or a file path for JSON")
    sp.add_argument("--exponents", required=True, help="exponents as JSON")
    sp.add_argument("--bound", type=_positive, default=DEFAULT_BOUND)
    sp.add_argument("--schedule", help="per-level bounds as JSON list")
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("pirola", help="osculating-space rank checks")
    sp.add_argument("--output", default="json", help="json, text, or a file path for JSON")
    sp.add_argument("--exponents", help="a single instance as JSON")
    sp.add_argument("--n", type=int, help="scan: number of exponents")
    sp.add_argument("--max-d", type=_positive, help="scan: largest exponent")
    sp.add_argument("--bound", type=_positive, default=4)
    sp.add_argument("--theta-box", type=_positive, default=None)
    sp.add_argument("--full", action="store_true", help="scan: full report per instance")
    sp.add_argument("--jobs", type=_positive, default=default_jobs(), help="worker processes (env LACUNARY_JOBS)")
    sp.set_defaults(func=cmd_pirola)

    sp = sub.add_parser("verify", help="re-check a gcd certificate")
    common(sp, bound=False)
    sp.add_argument("--certificate", required=True, help="certificate JSON (as emitted by gcd)")
    sp.add_argument("--ceiling", type=_positive, default=oracle.DEFAULT_ORACLE_CEILING,
                    help="use the dense oracle when D is at most this")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("bench", help="timing table of sparse_gcd over D = 10^e")
    sp.add_argument("--output", default="json", help="json, text, or a file path for JSON")
    sp.add_argument("--min-exp", type=_positive, default=3)
    sp.add_argument("--max-exp", type=_positive, default=9)
    sp.add_argument("--repeat", type=_positive, default=3)
    sp.add_argument("--bound", type=_positive, default=DEFAULT_BOUND)
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegreeCeilingError as exc:
        print(f"error: {exc}; raise --degree-ceiling or lower --bound", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
