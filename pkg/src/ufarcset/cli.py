"""Command-line interface: separate, verify, cutloop, gen, oracle-check.

Exit codes: 0 member / success, 1 violated (a cut was found or a cut is invalid),
2 input error, 3 infeasible LP, 4 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import oracle
from .arcset import (CutInequality, InstanceError, Verdict, format_cut, load_instance,
                     parse_cut)
from .knapsack import cut_maximum
from .netdesign import (PROFILES, LoopSettings, NetworkInstance, generate, load_network,
                        root_cut_loop)
from .refine import LiftOrder
from .separator import separate

EXIT_MEMBER = 0
EXIT_VIOLATED = 1
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_BUDGET = 4


def _num(v):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else str(v)
    return v


def render_text(obj, indent: int = 0) -> str:
    """Plain-text rendering of a JSON report."""
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v) if not isinstance(v, str) else v}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {v}")
    else:
        lines.append(f"{pad}{obj}")
    return "\n".join(lines)


def emit(report: dict, fmt: str):
    if fmt == "json":
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        print(render_text(report))


def _shared(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0, help="random seed (generation)")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--tolerance", type=float, default=1e-6, help="violation threshold for reporting cuts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ufarcset", description="Exact separation for unsplittable flow arc sets")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("separate", help="separate the point stored in an arc-set instance file")
    _shared(p)
    p.add_argument("--instance", required=True)
    p.add_argument("--lift-order", choices=("lift1", "lift2", "lift3", "lift4"), default="lift4")
    p.add_argument("--no-closed-form", action="store_true", help="always use row generation")
    p.add_argument("--no-strengthen", action="store_true", help="disable point strengthening")

    p = sub.add_parser("verify", help="check validity, violation and facet rank of an inequality")
    _shared(p)
    p.add_argument("--instance", required=True)
    p.add_argument("--cut", required=True, help="file with an inequality (text or JSON), or the inequality itself")

    p = sub.add_parser("cutloop", help="root-node cutting-plane loop on a network instance")
    _shared(p)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--instance")
    src.add_argument("--gen", help="profile,seed,nodes,commodities")
    p.add_argument("--max-rounds", type=int, default=50)
    p.add_argument("--lift-order", choices=("lift1", "lift2", "lift3", "lift4"), default="lift4")
    p.add_argument("--no-upper-bound", action="store_true")
    p.add_argument("--with-cuts", action="store_true", help="include every added cut in the report")

    p = sub.add_parser("gen", help="generate a network instance")
    _shared(p)
    p.add_argument("--profile", default="3_1_1", choices=sorted(PROFILES))
    p.add_argument("--nodes", type=int, default=12)
    p.add_argument("--commodities", type=int, default=5)
    p.add_argument("--out")

    p = sub.add_parser("oracle-check", help="compare the separator with brute-force enumeration")
    _shared(p)
    p.add_argument("--instance", required=True)
    return parser


def _read_cut(arg: str, nq: int, nt: int) -> CutInequality:
    text = arg
    if os.path.exists(arg):
        with open(arg) as fh:
            text = fh.read().strip()
    if text.startswith("{"):
        try:
            return CutInequality.from_dict(json.loads(text))
        except (KeyError, ValueError, json.JSONDecodeError) as exc:
            raise InstanceError(f"malformed cut JSON: {exc}") from exc
    return parse_cut(text, nq, nt)


def cmd_separate(args) -> int:
    inst, point = load_instance(args.instance)
    if point is None:
        raise InstanceError(f"{args.instance}: missing field 'point'")
    out = separate(inst, point, order=LiftOrder(args.lift_order.upper()), tolerance=args.tolerance,
                   use_closed_form=not args.no_closed_form,
                   use_strengthening=not args.no_strengthen)
    report = out.to_dict()
    report["iterations"] = out.details.get("lp_solves", 0)
    emit(report, args.format)
    return EXIT_VIOLATED if out.verdict is Verdict.VIOLATED else EXIT_MEMBER


def cmd_verify(args) -> int:
    inst, point = load_instance(args.instance)
    cut = _read_cut(args.cut, inst.n_commodities, inst.n_facilities)
    value, wx, wy = cut_maximum(cut.alpha, cut.beta, cut.gamma, inst.demands, inst.capacities,
                                inst.existing)
    valid = value <= 0
    report = {"cut": format_cut(cut), "valid": bool(valid),
              "max_value": _num(value) if value != float("inf") else "inf",
              "witness": None if wx is None else {"x": list(wx), "y": list(wy)}}
    if point is not None:
        report["violation"] = float(cut.violation(point))
    if valid:
        oracle.check_budget(inst)
        rank = oracle.facet_rank(inst, cut)
        report["rank"] = rank
        report["dimension"] = inst.dim
        report["facet"] = rank == inst.dim
    emit(report, args.format)
    return EXIT_MEMBER if valid else EXIT_VIOLATED


def cmd_cutloop(args) -> int:
    if args.gen:
        parts = args.gen.split(",")
        if len(parts) != 4:
            raise InstanceError("--gen expects profile,seed,nodes,commodities")
        try:
            inst = generate(int(parts[1]), int(parts[2]), int(parts[3]), parts[0])
        except ValueError as exc:
            raise InstanceError(f"--gen: {exc}") from exc
    else:
        inst = load_network(args.instance)
    settings = LoopSettings(max_rounds=args.max_rounds, order=LiftOrder(args.lift_order.upper()),
                            tolerance=args.tolerance, compute_upper_bound=not args.no_upper_bound)
    rep = root_cut_loop(inst, settings)
    d = rep.to_dict()
    if not args.with_cuts:
        d.pop("cuts")
    emit(d, args.format)
    return EXIT_INFEASIBLE if rep.status != "Optimal" else EXIT_MEMBER


def cmd_gen(args) -> int:
    inst = generate(args.seed, args.nodes, args.commodities, args.profile)
    text = json.dumps(inst.to_dict(), sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        emit({"written": args.out, "arcs": len(inst.arcs), "commodities": len(inst.commodities)},
             args.format)
    else:
        print(text)
    return EXIT_MEMBER


def cmd_oracle_check(args) -> int:
    inst, point = load_instance(args.instance)
    if point is None:
        raise InstanceError(f"{args.instance}: missing field 'point'")
    oracle.check_budget(inst)
    mem = oracle.membership(inst, point)
    full = oracle.full_separation(inst, point)
    out = separate(inst, point, tolerance=args.tolerance)
    pipeline_member = out.verdict is Verdict.MEMBER
    report = {"oracle_member": mem.member, "oracle_value": full.value,
              "pipeline_verdict": out.verdict.value, "pipeline_cut": out.cut.render() if out.cut else None,
              "pipeline_violation": out.violation, "cut_dropped": out.cut_dropped,
              "agree": (mem.member == pipeline_member) or out.cut_dropped}
    emit(report, args.format)
    return EXIT_MEMBER if mem.member else EXIT_VIOLATED


COMMANDS = {"separate": cmd_separate, "verify": cmd_verify, "cutloop": cmd_cutloop,
            "gen": cmd_gen, "oracle-check": cmd_oracle_check}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except oracle.BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
