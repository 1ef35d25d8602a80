"""Command-line interface: validate, compile, eval, walk, oracle, export-dot.

Exit codes: 0 success, 1 violation or failed check, 2 usage or input error.
Every command accepts ``--json`` for a machine-readable report; ``walk --json``
emits exactly the trace document that the browser walker also produces.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import oracle as oracle_mod
from .compiler import CompilerConfig, compile_diagram
from .diagram import load_model, model_fingerprint, validate
from .dtree import DTree, STOP
from .errors import (
    BudgetTooLargeError,
    DefaultTreeError,
    FingerprintMismatchError,
    IllegalResponseError,
    OracleCapError,
    SchemaError,
)
from .inference import InferenceEngine

EVAL_TOL = 1e-9


def _emit(args, report: dict, lines: list[str]) -> None:
    if getattr(args, "json", False):
        print(json.dumps(report, indent=2))
    else:
        for line in lines:
            print(line)


def _load_tree(path, diagram=None, engine=None) -> DTree:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return DTree.from_json(text, diagram, engine)


def cmd_validate(args) -> int:
    diagram = load_model(args.model)
    violations = validate(diagram)
    report = {
        "command": "validate",
        "model": args.model,
        "violations": [str(v) for v in violations],
        "ok": not violations,
    }
    lines = [f"{args.model}: {'OK' if not violations else 'INVALID'}"]
    lines += [f"  - {v}" for v in violations]
    _emit(args, report, lines)
    return 0 if not violations else 1


def _config_from_args(args) -> CompilerConfig:
    doc = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        unknown = set(doc) - set(CompilerConfig().to_dict())
        if unknown:
            raise DefaultTreeError(f"unknown config fields {sorted(unknown)}")
    cfg = CompilerConfig(**doc)
    if args.algo is not None:
        cfg.algorithm = args.algo
    if args.depth is not None:
        cfg.depth = args.depth
    if args.enumeration is not None:
        cfg.enumeration = args.enumeration
    if args.max_enodes is not None:
        cfg.max_enodes = args.max_enodes
    if args.min_gain is not None:
        cfg.min_gain = args.min_gain
    if args.eu_fraction is not None:
        cfg.eu_fraction_target = args.eu_fraction
    cfg.validate()
    return cfg


def cmd_compile(args) -> int:
    diagram = load_model(args.model)
    violations = validate(diagram)
    if violations:
        _emit(args, {"command": "compile", "ok": False,
                     "violations": [str(v) for v in violations]},
              [f"{args.model}: INVALID"] + [f"  - {v}" for v in violations])
        return 1
    cfg = _config_from_args(args)
    tree, stats = compile_diagram(diagram, cfg)
    tree_text = tree.to_json()
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(tree_text)
    stats_path = args.output + ".stats.json"
    with open(stats_path, "w", encoding="utf-8") as fh:
        json.dump({"config": cfg.to_dict(), "stats": stats.to_dict()}, fh, indent=2)
        fh.write("\n")
    eu = stats.eu_trace[-1]
    report = {
        "command": "compile",
        "ok": True,
        "model": args.model,
        "tree": args.output,
        "stats_file": stats_path,
        "eu": eu,
        "enodes": stats.enodes,
        "nodes": stats.nodes,
        "iterations": stats.iterations,
        "inference_calls": stats.inference_calls,
    }
    lines = [
        f"compiled {args.model} -> {args.output}",
        f"  algorithm={cfg.algorithm} depth={cfg.depth} enumeration={cfg.enumeration}",
        f"  enodes={stats.enodes} nodes={stats.nodes} iterations={stats.iterations}",
        f"  network evaluations={stats.inference_calls}",
        f"  EU={eu!r}",
    ]
    if args.with_oracle:
        bound = oracle_mod.optimal_policy_eu(diagram)
        ratio = eu / bound if bound else float("nan")
        report["optimal_policy_eu"] = bound
        report["optimality_ratio"] = ratio
        lines.append(f"  optimal policy EU={bound!r} ratio={ratio:.6f}")
    _emit(args, report, lines)
    return 0


def cmd_eval(args) -> int:
    diagram = load_model(args.model)
    tree = _load_tree(args.tree)
    fp = model_fingerprint(diagram)
    if tree.fingerprint != fp:
        raise FingerprintMismatchError(
            f"tree was compiled from a different model (tree {tree.fingerprint[:12]}…, model {fp[:12]}…)"
        )
    engine = InferenceEngine(diagram)
    tree = DTree(tree.root, diagram, engine, fingerprint=tree.fingerprint)
    direct = tree.eu_direct()
    via_gains = tree.eu_theorem1()
    diff = abs(direct - via_gains)
    compiles = tree.dt_compiles(diagram)
    ok = compiles and diff <= EVAL_TOL
    report = {
        "command": "eval",
        "ok": ok,
        "eu_direct": direct,
        "eu_by_decomposition": via_gains,
        "difference": diff,
        "dt_compiles": compiles,
    }
    lines = [
        f"EU (leaf sum)      = {direct!r}",
        f"EU (decomposition) = {via_gains!r}",
        f"difference         = {diff:.3e}",
        f"covers every evidence state: {'yes' if compiles else 'NO — does not DT-compile'}",
    ]
    _emit(args, report, lines)
    return 0 if ok else 1


def cmd_walk(args) -> int:
    tree = _load_tree(args.tree)
    if args.interactive:
        trace = _walk_interactive(tree)
    else:
        responses = [r.strip() for r in args.responses.split(",")] if args.responses else []
        trace = tree.walk(responses)
    report = trace.to_dict()
    lines = [f"visited nodes: {' -> '.join(str(i) for i in trace.visited)}"]
    for item, value in trace.responses:
        lines.append(f"  {item} = {value}")
    if trace.status == "stopped-early":
        lines.append(f"stopped early; default decision: {', '.join(trace.decisions)}")
    else:
        lines.append(f"decision: {', '.join(trace.decisions)}")
    _emit(args, report, lines)
    return 0


def _walk_interactive(tree: DTree):
    def ask(item, node):
        while True:
            try:
                raw = input(f"{item}? ({'/'.join(node.branch_labels)} or stop) ").strip()
            except EOFError:
                return STOP
            if raw == STOP or raw in node.branch_labels:
                return raw
            print(f"  '{raw}' is not a value of {item}; try again")

    return tree.walk(ask)


def cmd_oracle(args) -> int:
    if args.oracle_cmd == "policy-eu":
        diagram = load_model(args.model)
        eu = oracle_mod.optimal_policy_eu(diagram)
        _emit(args, {"command": "oracle.policy-eu", "ok": True, "eu": eu},
              [f"optimal full-observation policy EU = {eu!r}"])
        return 0
    if args.oracle_cmd == "optimal-dtree":
        diagram = load_model(args.model)
        tree, eu = oracle_mod.optimal_dtree(diagram, args.max_enodes)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(tree.to_json())
        _emit(args, {"command": "oracle.optimal-dtree", "ok": True, "eu": eu,
                     "enodes": len(tree.enodes()),
                     "tree": args.output},
              [f"best tree with <= {args.max_enodes} evidence nodes: EU = {eu!r}"])
        return 0
    if args.oracle_cmd == "property3":
        diagram = load_model(args.model)
        engine = InferenceEngine(diagram)
        if args.tree:
            tree = _load_tree(args.tree, diagram, engine)
        else:
            tree = DTree.initial(diagram, engine)
        rep = oracle_mod.verify_property3(diagram, tree, args.budget)
        _emit(args, {"command": "oracle.property3", "ok": rep.status != "FAIL",
                     **rep.to_dict()},
              [f"property3: {rep.status}"] + [f"  {w}" for w in rep.witnesses])
        return 0 if rep.status != "FAIL" else 1
    if args.oracle_cmd == "gen":
        spec = oracle_mod.NetworkGenSpec(
            seed=args.seed,
            hidden=args.hidden,
            items=args.items,
            alternatives=args.alternatives,
            sharpness=args.sharpness,
        )
        diagram = oracle_mod.generate_network(spec)
        from .diagram import save_model

        save_model(diagram, args.output)
        _emit(args, {"command": "oracle.gen", "ok": True, "model": args.output,
                     "fingerprint": model_fingerprint(diagram)},
              [f"wrote {args.output}"])
        return 0
    raise DefaultTreeError(f"unknown oracle subcommand {args.oracle_cmd!r}")


def cmd_export_dot(args) -> int:
    tree = _load_tree(args.tree)
    text = tree.to_dot()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    _emit(args, {"command": "export-dot", "ok": True, "output": args.output}, [])
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="defaulttrees",
        description="Compile decision networks into anytime default trees.",
    )
    sub = p.add_subparsers(dest="cmd", required=True)

    v = sub.add_parser("validate", help="check a model file")
    v.add_argument("model")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_validate)

    c = sub.add_parser("compile", help="compile a model into a default tree")
    c.add_argument("model")
    c.add_argument("-o", "--output", required=True, help="tree output path")
    c.add_argument("--algo", choices=["dd", "ddn"], default=None)
    c.add_argument("--depth", type=int, default=None)
    c.add_argument("--enumeration", choices=["greedy", "exhaustive"], default=None)
    c.add_argument("--max-enodes", type=int, default=None)
    c.add_argument("--min-gain", type=float, default=None)
    c.add_argument("--eu-fraction", type=float, default=None)
    c.add_argument("--config", help="JSON config file (same field names)")
    c.add_argument("--with-oracle", action="store_true",
                   help="also report EU / optimal policy EU")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_compile)

    e = sub.add_parser("eval", help="evaluate a tree against its model")
    e.add_argument("tree")
    e.add_argument("model")
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_eval)

    w = sub.add_parser("walk", help="execute a tree")
    w.add_argument("tree")
    mode = w.add_mutually_exclusive_group(required=True)
    mode.add_argument("--interactive", action="store_true")
    mode.add_argument("--responses", help="comma-separated values; 'stop' allowed")
    w.add_argument("--json", action="store_true")
    w.set_defaults(func=cmd_walk)

    o = sub.add_parser("oracle", help="brute-force ground-truth checks")
    osub = o.add_subparsers(dest="oracle_cmd", required=True)
    op = osub.add_parser("policy-eu")
    op.add_argument("model")
    op.add_argument("--json", action="store_true")
    ot = osub.add_parser("optimal-dtree")
    ot.add_argument("model")
    ot.add_argument("--max-enodes", type=int, required=True)
    ot.add_argument("-o", "--output")
    ot.add_argument("--json", action="store_true")
    o3 = osub.add_parser("property3")
    o3.add_argument("model")
    o3.add_argument("--tree")
    o3.add_argument("--budget", type=int, default=2)
    o3.add_argument("--json", action="store_true")
    og = osub.add_parser("gen")
    og.add_argument("--seed", type=int, required=True)
    og.add_argument("--hidden", type=int, default=2)
    og.add_argument("--items", type=int, default=3)
    og.add_argument("--alternatives", type=int, default=2)
    og.add_argument("--sharpness", type=float, default=1.0)
    og.add_argument("-o", "--output", required=True)
    og.add_argument("--json", action="store_true")
    for sp in (op, ot, o3, og):
        sp.set_defaults(func=cmd_oracle)

    d = sub.add_parser("export-dot", help="Graphviz text for a tree")
    d.add_argument("tree")
    d.add_argument("-o", "--output")
    d.add_argument("--json", action="store_true")
    d.set_defaults(func=cmd_export_dot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (SchemaError, FingerprintMismatchError, IllegalResponseError,
            OracleCapError, BudgetTooLargeError, DefaultTreeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
