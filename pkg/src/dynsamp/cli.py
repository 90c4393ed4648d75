"""``dynsamp`` command line: check, spark, construct, simulate, search.

Exit codes: 0 frame (or success), 2 not a frame, 3 never a frame, 1 bad
input, 4 when the testers disagree or the level partition is ambiguous.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import io
from .constructors import (
    ConstructionError,
    consecutive_set,
    gcd_pair_set,
    periodic_W_set,
    prime_any_set,
    prime_power_uniform_set,
    search_minimal,
    sym2d_periodic_set,
    sym2d_set,
)
from .frames import (
    FRAME,
    NEVER_FRAME,
    NOT_FRAME,
    PeriodicPlan,
    bind,
    frame_test_direct,
    frame_test_projection,
    periodic_frame_test,
    smallest_uniform_depth,
)
from .groups import RANK_TOL, make_group
from .recon import reconstruct, simulate_samples
from .spark import RowSelection, SparkCapExceeded, spark_witness
from .spectral import GROUP_TOL, PartitionAmbiguityWarning, level_partition

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_FRAME = 2
EXIT_NEVER_FRAME = 3
EXIT_AMBIGUOUS = 4

VERDICT_EXIT = {FRAME: EXIT_OK, NOT_FRAME: EXIT_NOT_FRAME, NEVER_FRAME: EXIT_NEVER_FRAME}


class InputError(Exception):
    pass


def _json_arg(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"--{what}: invalid JSON ({exc})") from exc


def _read_doc(path: str | None, inline: str | None, what: str, required: bool = True):
    if path and inline:
        raise InputError(f"give --{what} or --{what}-json, not both")
    if inline:
        return _json_arg(inline, f"{what}-json")
    if path:
        try:
            text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from exc
        return _json_arg(text, what)
    if required:
        raise InputError(f"--{what} or --{what}-json is required")
    return None


def _load_kernel(args):
    return io.kernel_from_dict(_read_doc(args.kernel, args.kernel_json, "kernel"))


def _load_plan(args, required: bool = True):
    doc = _read_doc(args.plan, args.plan_json, "plan", required)
    return None if doc is None else io.plan_from_dict(doc)


def _emit(args, obj) -> None:
    text = io.dumps(obj)
    if getattr(args, "output", None):
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _add_common(p: argparse.ArgumentParser, kernel: bool = True, plan: bool = True) -> None:
    if kernel:
        p.add_argument("--kernel", metavar="FILE", help="kernel JSON file ('-' for stdin)")
        p.add_argument("--kernel-json", metavar="JSON", help="kernel as an inline JSON string")
    if plan:
        p.add_argument("--plan", metavar="FILE", help="sampling plan JSON file")
        p.add_argument("--plan-json", metavar="JSON", help="sampling plan as an inline JSON string")
    p.add_argument("--rank-tol", type=float, default=RANK_TOL, help="relative singular value cutoff")
    p.add_argument("--group-tol", type=float, default=GROUP_TOL, help="eigenvalue grouping tolerance")
    p.add_argument("--output", "-o", metavar="FILE", help="write JSON here instead of stdout")


# -- subcommands ------------------------------------------------------------------


def cmd_check(args) -> int:
    kernel = _load_kernel(args)
    raw = _load_plan(args)
    plan = io.as_sampling_plan(raw)
    if plan.group != kernel.group:
        raise InputError(f"plan lives on {plan.group.factors}, kernel on {kernel.group.factors}")
    if args.depth is not None:
        plan = plan.with_depths(args.depth)
    direct = frame_test_direct(kernel, plan, args.rank_tol, args.group_tol)
    proj = frame_test_projection(kernel, plan, args.rank_tol, args.group_tol)
    out = {
        "schema": io.SCHEMA,
        "type": "check",
        "plan": io.plan_to_dict(bind(plan, kernel, group_tol=args.group_tol)),
        "direct": io.report_to_dict(direct),
        "projection": io.report_to_dict(proj),
    }
    out["smallest_uniform_depth"] = smallest_uniform_depth(kernel, plan, args.rank_tol, args.group_tol)
    verdicts = {direct.verdict, proj.verdict}
    ambiguous = direct.ambiguous or proj.ambiguous
    if isinstance(raw, PeriodicPlan) and args.depth is None:
        per = periodic_frame_test(kernel, raw, args.rank_tol, args.group_tol)
        out["periodic"] = io.report_to_dict(per)
        verdicts.add(per.verdict)
        ambiguous |= per.ambiguous
    out["agree"] = len(verdicts) == 1
    out["verdict"] = direct.verdict if out["agree"] else "disagree"
    out["ambiguous"] = ambiguous
    _emit(args, out)
    if not out["agree"] or ambiguous:
        return EXIT_AMBIGUOUS
    return VERDICT_EXIT[direct.verdict]


def cmd_spark(args) -> int:
    if args.factors is not None:
        group = make_group(_json_arg(args.factors, "factors"))
    elif args.d is not None:
        group = make_group(args.d)
    else:
        raise InputError("--d or --factors is required")
    rows = _json_arg(args.rows, "rows")
    if not isinstance(rows, list) or not rows:
        raise InputError("--rows must be a nonempty JSON list")
    rows = [r if isinstance(r, int) else tuple(r) for r in rows]
    sel = RowSelection.of(group, rows)
    if len(sel) > group.order:
        raise InputError("more rows than group elements")
    try:
        s, witness = spark_witness(sel.matrix(), args.rank_tol, args.cap)
    except SparkCapExceeded as exc:
        raise InputError(str(exc)) from exc
    M = len(sel)
    out = {
        "schema": io.SCHEMA,
        "type": "spark",
        "factors": list(group.factors),
        "rows": [io.point_to_json(group, i) for i in sel.rows],
        "spark": s,
        "full_spark": s == M + 1,
        "witness": None if witness is None else [io.point_to_json(group, i) for i in witness],
    }
    _emit(args, out)
    return EXIT_OK


def _ints(text: str | None, name: str) -> list:
    if text is None:
        raise InputError(f"--{name} is required for this recipe")
    val = _json_arg(text, name)
    if not isinstance(val, list):
        raise InputError(f"--{name} must be a JSON list")
    return val


def _need(value, name: str):
    if value is None:
        raise InputError(f"--{name} is required for this recipe")
    return value


def _build(args):
    kind = args.recipe
    d = _need(args.d, "d")
    if kind == "consecutive":
        return consecutive_set(d, _need(args.L, "L"))
    if kind == "gcd-pair":
        return gcd_pair_set(d, _need(args.i1, "i1"), _need(args.i2, "i2"))
    if kind == "prime-any":
        return prime_any_set(d, _ints(args.omega, "omega"))
    if kind == "prime-power-uniform":
        return prime_power_uniform_set(d, _ints(args.omega, "omega"))
    if kind == "periodic-W":
        return periodic_W_set(d, _need(args.m, "m"), _ints(args.W, "W"))
    params = [] if args.params is None else _ints(args.params, "params")
    sym = kind.removeprefix("sym-")
    if sym.endswith("-periodic"):
        return sym2d_periodic_set(d, _need(args.m, "m"), sym.removesuffix("-periodic"), params, args.variant)
    return sym2d_set(d, sym, params, args.variant)


RECIPES = (
    "consecutive", "gcd-pair", "prime-any", "prime-power-uniform", "periodic-W",
    "sym-linf", "sym-quadrantal", "sym-diagonal", "sym-octagonal",
    "sym-linf-periodic", "sym-quadrantal-periodic", "sym-diagonal-periodic", "sym-octagonal-periodic",
)


def cmd_construct(args) -> int:
    try:
        plan = _build(args)
    except ConstructionError as exc:
        print(json.dumps(exc.to_dict()), file=sys.stderr)
        return EXIT_INPUT
    out = io.plan_to_dict(plan)
    code = EXIT_OK
    if args.kernel or args.kernel_json:
        kernel = _load_kernel(args)
        sp = io.as_sampling_plan(plan)
        rep = frame_test_direct(kernel, sp, args.rank_tol, args.group_tol)
        out = {"schema": io.SCHEMA, "type": "construct", "plan": out,
               "bound_plan": io.plan_to_dict(bind(sp, kernel, group_tol=args.group_tol)),
               "report": io.report_to_dict(rep)}
        code = EXIT_AMBIGUOUS if rep.ambiguous else VERDICT_EXIT[rep.verdict]
    _emit(args, out)
    return code


def cmd_simulate(args) -> int:
    kernel = _load_kernel(args)
    plan = io.as_sampling_plan(_load_plan(args))
    if plan.group != kernel.group:
        raise InputError(f"plan lives on {plan.group.factors}, kernel on {kernel.group.factors}")
    if args.f is not None:
        doc = _json_arg(args.f, "f")
        if isinstance(doc, dict):
            f = io.complex_from_json(doc.get("re"), doc.get("im"))
        else:
            f = np.asarray(doc, dtype=complex)
    else:
        rng = np.random.default_rng(args.seed)
        f = rng.standard_normal(kernel.order) + 1j * rng.standard_normal(kernel.order)
    if f.size != kernel.order:
        raise InputError(f"state has length {f.size}, group order is {kernel.order}")
    samples = simulate_samples(kernel, f, plan, args.noise, args.seed)
    res = reconstruct(kernel, plan, samples, args.rank_tol, args.group_tol)
    s_re, s_im = io.complex_to_json([r.value for r in samples])
    f_re, f_im = io.complex_to_json(f)
    out = {
        "schema": io.SCHEMA,
        "type": "simulation",
        "f_re": f_re,
        "f_im": f_im,
        "samples": {"sensor": [r.sensor for r in samples], "time": [r.time for r in samples],
                    "value_re": s_re, "value_im": s_im},
        "reconstruction": io.reconstruction_to_dict(res),
        "error_norm": float(np.linalg.norm(res.estimate - f)),
    }
    _emit(args, out)
    rep = res.frame_report
    return EXIT_AMBIGUOUS if rep.ambiguous else VERDICT_EXIT[rep.verdict]


def cmd_search(args) -> int:
    kernel = _load_kernel(args)
    part = level_partition(kernel, args.group_tol)
    hits = search_minimal(kernel, args.max_size, args.rank_tol, args.group_tol,
                          verify_fraction=args.verify_fraction, seed=args.seed)
    g = kernel.group
    out = {
        "schema": io.SCHEMA,
        "type": "search",
        "factors": list(g.factors),
        "lower_bound": part.max_size,
        "size": len(hits[0]) if hits else None,
        "count": len(hits),
        "sets": [[io.point_to_json(g, i) for i in h] for h in hits],
        "ambiguous": part.ambiguous,
    }
    _emit(args, out)
    if part.ambiguous:
        return EXIT_AMBIGUOUS
    return EXIT_OK if hits else EXIT_NOT_FRAME


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dynsamp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="test whether a plan yields a frame for a kernel")
    _add_common(p)
    p.add_argument("--depth", type=int, help="override every sensor depth")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("spark", help="spark of a set of Fourier rows")
    _add_common(p, kernel=False, plan=False)
    p.add_argument("--d", type=int, help="cyclic group order")
    p.add_argument("--factors", metavar="JSON", help="group factors, e.g. '[5, 5]'")
    p.add_argument("--rows", required=True, metavar="JSON", help="row indices, ints or [i1, i2] lists")
    p.add_argument("--cap", type=int, default=2_000_000, help="maximum number of subsets to examine")
    p.set_defaults(func=cmd_spark)

    p = sub.add_parser("construct", help="build a universal sampling plan from a recipe")
    _add_common(p, plan=False)
    p.add_argument("recipe", choices=RECIPES)
    p.add_argument("--d", type=int)
    p.add_argument("--L", type=int)
    p.add_argument("--i1", type=int)
    p.add_argument("--i2", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--omega", metavar="JSON")
    p.add_argument("--W", metavar="JSON")
    p.add_argument("--params", metavar="JSON", help="symmetric-pattern parameters")
    p.add_argument("--variant", choices=("row", "col"), default="row")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("simulate", help="sample an evolving state and reconstruct it")
    _add_common(p)
    p.add_argument("--f", metavar="JSON", help="initial state: a real list or {'re': [...], 'im': [...]}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0, help="standard deviation of complex noise")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("search", help="exhaustive search for minimal admissible sensor sets")
    _add_common(p, plan=False)
    p.add_argument("--max-size", type=int)
    p.add_argument("--verify-fraction", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_search)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PartitionAmbiguityWarning)
            return args.func(args)
    except (InputError, io.SchemaError, ValueError, IndexError, KeyError, TypeError) as exc:
        print(f"dynsamp: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
