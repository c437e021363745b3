"""Command line interface: one subcommand per workbench operation.

Exit codes: 0 success, 1 domain error (bad input values, failed
check), 2 usage error.  Every run echoes its invocation so results can
be reproduced; --json emits machine-readable output.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import SCHEMA_VERSIONS, __version__, accept, relations
from .diagrams import (
    LinComb,
    diagram_from_json,
    diagram_from_key,
    enumerate_chord,
    enumerate_trees,
    enumerate_trivalent,
    key_from_str,
    key_to_str,
)
from . import milnor as milnor_mod
from . import csintegral


def _parse_indices(text: str) -> tuple[int, ...]:
    # "1,2:3" means invariant mu(1,2;3); a plain comma list also works
    if ":" in text:
        left, right = text.split(":", 1)
        parts = [p for p in left.split(",") if p] + [right]
    else:
        parts = text.split(",")
    return tuple(int(p) for p in parts)


def _load_lincomb(text: str) -> LinComb:
    if text.strip().startswith("{"):
        obj = json.loads(text)
    else:
        with open(text) as fh:
            obj = json.load(fh)
    coeffs = obj.get("coeffs", obj)
    return LinComb.from_terms(
        (key_from_str(k), Fraction(str(v))) for k, v in coeffs.items()
    )


def _load_diagram(text: str):
    if text.strip().startswith("q"):
        return diagram_from_key(key_from_str(text.strip()))
    with open(text) as fh:
        obj = json.load(fh)
    return diagram_from_json(obj)


def _emit(args, payload: dict, text_lines):
    if args.json:
        payload["invocation"] = sys.argv[1:] if args._argv is None else args._argv
        payload["schema"] = SCHEMA_VERSIONS
        print(json.dumps(payload, indent=None, sort_keys=True))
    else:
        print(f"# homlink {' '.join(args._argv or [])}")
        for line in text_lines:
            print(line)


def _cmd_enum(args) -> int:
    n, m = args.order, args.strands
    if args.kind == "chord":
        keys = enumerate_chord(
            n, m, touch_all=not args.full, distinct_pairs=not args.full
        )
    elif args.kind == "trivalent":
        keys = enumerate_trivalent(n, m, max_free=args.max_free)
        if not args.full:
            keys = [k for k in keys if all(q > 0 for q in k.qs)]
    elif args.kind == "trees":
        import itertools

        keys = []
        for labels in itertools.combinations(range(1, m + 1), n + 1):
            keys.extend(enumerate_trees(labels, m))
    else:
        raise ValueError(f"unknown kind {args.kind}")
    if args.count:
        _emit(args, {"count": len(keys)}, [str(len(keys))])
    else:
        _emit(
            args,
            {"count": len(keys), "keys": [key_to_str(k) for k in keys]},
            [key_to_str(k) for k in keys],
        )
    return 0


def _cmd_cocycles(args) -> int:
    cs = relations.cocycle_basis(args.order, args.strands)
    payload = relations.basis_to_json(cs)
    lines = [f"dim {cs.dim}"]
    for vec in cs.vectors():
        lines.append(
            "  ".join(f"{c}*{key_to_str(k)}" for k, c in sorted(vec.items()))
        )
    _emit(args, payload, lines)
    return 0


def _cmd_filtration(args) -> int:
    filt = relations.filtration(args.order, args.strands)
    dims = filt.dims()
    payload = {
        "n": args.order,
        "m": args.strands,
        "dims": list(dims),
        "quotients": list(filt.quotient_dims()),
    }
    _emit(args, payload, [" ".join(str(d) for d in dims)])
    return 0


def _cmd_complete_tree(args) -> int:
    tree = _load_lincomb(args.tree)
    cocycle, indet = relations.complete_tree_to_cocycle(
        args.order, args.strands, tree
    )
    payload = {
        "coeffs": {key_to_str(k): str(c) for k, c in sorted(cocycle.items())},
        "indeterminacy_dim": indet.dim,
    }
    lines = [f"{c}*{key_to_str(k)}" for k, c in sorted(cocycle.items())]
    lines.append(f"indeterminacy dim {indet.dim}")
    _emit(args, payload, lines)
    return 0


def _cmd_stu_graph(args) -> int:
    if args.diagram:
        key = key_from_str(args.diagram)
        comps = relations.stu_graph_components(key, args.order, args.strands)
        _emit(args, {"components": comps}, [str(comps)])
        return 0
    ok = relations.stu_graphs_all_connected(args.order, args.strands)
    _emit(args, {"all_connected": ok}, ["connected" if ok else "disconnected"])
    return 0


def _cmd_milnor(args) -> int:
    braid = milnor_mod.PureBraid.parse(args.braid, args.strands)
    value = milnor_mod.mu(braid, _parse_indices(args.indices))
    _emit(args, {"value": value}, [str(value)])
    return 0


def _cmd_weights(args) -> int:
    diagram = _load_diagram(args.diagram)
    inter = (
        [int(x) for x in args.interleaving.split(",")]
        if args.interleaving
        else None
    )
    value = milnor_mod.weight_on_chord_diagram(
        _parse_indices(args.invariant), diagram, inter
    )
    _emit(args, {"value": value}, [str(value)])
    return 0


def _cmd_integrate(args) -> int:
    if args.link:
        link = csintegral.PolyLink.load(args.link)
    elif args.link_braid:
        link = csintegral.from_braid(args.link_braid, args.strands)
    else:
        raise ValueError("need --link or --link-braid")
    if args.cocycle:
        comb = _load_lincomb(args.cocycle)
        est = csintegral.integrate_cocycle(
            comb, link, args.samples, args.seed, args.threads
        )
    else:
        if not args.diagram:
            raise ValueError("need --diagram or --cocycle")
        diagram = _load_diagram(args.diagram)
        est = csintegral.integrate_diagram(
            diagram, link, args.samples, args.seed, args.threads
        )
    payload = est.to_json()
    payload["backend"] = csintegral.kernel_backend()
    _emit(
        args,
        payload,
        [f"value {est.value:.6g}", f"stderr {est.std_error:.3g}", f"seed {est.seed}"],
    )
    return 0


def _cmd_check(args) -> int:
    ok = accept.run(level=args.level)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="homlink",
        description="graph cocycles, Milnor invariants, and configuration space integrals",
    )
    p.add_argument(
        "--version",
        action="version",
        version=f"homlink {__version__} (schemas: "
        + ", ".join(f"{k}={v}" for k, v in SCHEMA_VERSIONS.items())
        + ")",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, order=True):
        if order:
            sp.add_argument("--order", type=int, required=True)
        sp.add_argument("--strands", type=int, required=True)
        sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("enum", help="enumerate diagrams")
    common(sp)
    sp.add_argument("--kind", choices=("chord", "trivalent", "trees"), default="chord")
    sp.add_argument("--count", action="store_true")
    sp.add_argument("--full", action="store_true", help="lift the touch-all/distinct-pairs restriction")
    sp.add_argument("--max-free", type=int, default=None)
    sp.set_defaults(func=_cmd_enum)

    sp = sub.add_parser("cocycles", help="STU cocycle basis")
    common(sp)
    sp.set_defaults(func=_cmd_cocycles)

    sp = sub.add_parser("filtration", help="free-vertex filtration dimensions")
    common(sp)
    sp.set_defaults(func=_cmd_filtration)

    sp = sub.add_parser("complete-tree", help="extend a tree combination to a cocycle")
    common(sp)
    sp.add_argument("--tree", required=True, help="inline JSON or path: {key: coeff}")
    sp.set_defaults(func=_cmd_complete_tree)

    sp = sub.add_parser("stu-graph", help="leg-exchange graph connectivity")
    common(sp)
    sp.add_argument("--diagram", help="canonical key string")
    sp.set_defaults(func=_cmd_stu_graph)

    sp = sub.add_parser("milnor", help="Milnor invariant of a pure braid")
    sp.add_argument("--strands", type=int, required=True)
    sp.add_argument("--braid", required=True)
    sp.add_argument("--indices", required=True, help="e.g. 1,2:3")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=_cmd_milnor)

    sp = sub.add_parser("weights", help="weight of an invariant on a chord diagram")
    sp.add_argument("--invariant", required=True)
    sp.add_argument("--diagram", required=True, help="key string or JSON path")
    sp.add_argument("--interleaving")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=_cmd_weights)

    sp = sub.add_parser("integrate", help="Monte Carlo configuration space integral")
    sp.add_argument("--diagram", help="key string or JSON path")
    sp.add_argument("--cocycle", help="inline JSON or path")
    sp.add_argument("--link", help="PolyLink JSON path")
    sp.add_argument("--link-braid", help="A(i,j) braid word")
    sp.add_argument("--strands", type=int)
    sp.add_argument("--samples", type=int, default=100000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=_cmd_integrate)

    sp = sub.add_parser("check", help="run the acceptance suites")
    sp.add_argument("--level", choices=("fast", "full"), default="full")
    sp.set_defaults(func=_cmd_check)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, 0 on --help/--version
        return int(exc.code or 0)
    args._argv = list(argv) if argv is not None else sys.argv[1:]
    if not hasattr(args, "json"):
        args.json = False
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
