"""Command-line front end: run workloads on a simulated machine and report costs."""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import core, lang
from .algorithms import (AlignmentProblem, classical_dijkstra, classical_nw, closure_bits,
                         closure_run, hop_limited_bellman_ford, parse_graph_file,
                         temporal_dijkstra, temporal_nw_run, validate_tree)
from .algorithms.graph import Graph
from .errors import RangeViolation, TropicalError
from .machine import CostTable, Machine, MachineConfig, _MACHINE_KEYS
from .memory import OverflowPolicy, RangeConfig
from .report import (build_report, format_table, load_bindings, plot_report, write_report,
                     write_trace_csv)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_ERROR = 2


class CliError(Exception):
    pass


def _load_cost_model(path) -> dict:
    if path is None:
        return {}
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict):
        raise CliError("cost model must be a JSON object")
    return data


def _costs(model: dict) -> CostTable:
    return CostTable.from_dict({k: v for k, v in model.items() if k not in _MACHINE_KEYS})


def _policy(args, model) -> OverflowPolicy:
    return OverflowPolicy(args.overflow_policy or model.get("overflow_policy", "strict"))


def _names(values, g: Graph) -> dict:
    return {g.nodes[i]: v for i, v in enumerate(values)}


def _emit(args, report, trace, costs) -> int:
    print(format_table(report))
    if args.out:
        write_report(report, args.out)
    if args.csv:
        write_trace_csv(trace, costs, args.csv)
    if args.plot:
        plot_report(report, trace, args.plot)
    if report.oracle_match is False:
        print("oracle mismatch", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


# -- subcommands -----------------------------------------------------------------------

def cmd_dijkstra(args) -> int:
    model = _load_cost_model(args.cost_model)
    g = parse_graph_file(args.graph)
    src = g.nodes[g.index(args.source)]
    bits = args.bits or int(model.get("bits", 5))
    costs = _costs(model)
    res = temporal_dijkstra(g, src, bits=bits, overflow_policy=_policy(args, model), costs=costs,
                            registers=int(model.get("registers", 8)),
                            literal_f=args.paper_literal_f)
    ref_dist, _ = classical_dijkstra(g, src)
    problems = validate_tree(g, src, res.parent_matrix, ref_dist)
    match = list(res.distances) == list(ref_dist) and not problems
    warnings = list(problems)
    if args.paper_literal_f:
        warnings.insert(0, "running the literal f := d -| e update without the visited mask")
    results = {
        "distances": _names(res.distances, g),
        "tree_edges": [{"parent": g.nodes[i], "child": g.nodes[j], "weight": w}
                       for i, j, w in res.tree_edges()],
        "visit_order": [g.nodes[i] for i in res.visit_order],
        "norm_constants": list(res.norm_constants),
    }
    report = build_report(
        "dijkstra", {"graph": str(args.graph), "source": src, "bits": bits,
                     "literal_f": args.paper_literal_f},
        results, res.trace, res.config, warnings=warnings,
        oracle={"distances": _names(ref_dist, g), "tree_problems": problems}, oracle_match=match)
    return _emit(args, report, res.trace, costs)


def cmd_nw(args) -> int:
    model = _load_cost_model(args.cost_model)
    p = AlignmentProblem(args.x, args.y, sigma=args.indel, m=args.mismatch)
    costs = _costs(model)
    res = temporal_nw_run(p, bits=args.bits or model.get("bits"), costs=costs)
    ref = classical_nw(p)
    report = build_report(
        "nw", {"x": args.x, "y": args.y, "indel": args.indel, "mismatch": args.mismatch},
        {"cost": res.cost}, res.trace, res.config,
        oracle={"cost": ref}, oracle_match=res.cost == ref)
    return _emit(args, report, res.trace, costs)


def cmd_closure(args) -> int:
    model = _load_cost_model(args.cost_model)
    g = parse_graph_file(args.graph)
    s = g.index(args.source)
    A = g.adjacency_matrix()
    x = core.onehot(len(g), s)
    costs = _costs(model)
    bits = args.bits or model.get("bits") or closure_bits(A, x, args.hops)
    res = closure_run(A, x, args.hops, bits=int(bits), costs=costs)
    ref = hop_limited_bellman_ford(A, x, args.hops)
    report = build_report(
        "closure", {"graph": str(args.graph), "source": args.source, "hops": args.hops},
        {"distances": _names(res.distances, g)}, res.trace, res.config,
        oracle={"distances": _names(ref, g)}, oracle_match=tuple(res.distances) == tuple(ref))
    return _emit(args, report, res.trace, costs)


def cmd_eval(args) -> int:
    model = _load_cost_model(args.cost_model)
    if args.expr is None and args.expr_file is None:
        raise CliError("one of --expr or --expr-file is required")
    src = args.expr if args.expr is not None else Path(args.expr_file).read_text()
    bindings = load_bindings(args.bind) if args.bind else {}
    expr = lang.parse(src)
    compiled = lang.compile_expr(expr)
    width = len(next(iter(bindings.values()))) if bindings else 1
    costs = _costs(model)
    config = MachineConfig(width=width, registers=max(8, compiled.registers_needed), matrix_banks=0,
                           range=RangeConfig(args.bits or int(model.get("bits", 5)),
                                             _policy(args, model)),
                           costs=costs)
    result, _, trace = lang.run_compiled(compiled, bindings, Machine(config))
    ref = lang.direct_eval(expr, bindings)
    report = build_report(
        "eval", {"expr": src.strip(), "bindings": {k: list(v) for k, v in bindings.items()}},
        {"wavefront": list(result), "transitions": sum(e.transitions_consumed for e in trace),
         "program": [str(i) for i in compiled.program]},
        trace, config, oracle={"wavefront": list(ref)},
        oracle_match=tuple(result) == tuple(ref))
    return _emit(args, report, trace, costs)


def _random_graph(rng: random.Random, n: int, p: float = 0.3, wmax: int = 7) -> Graph:
    g = Graph.from_edges([], nodes=[f"n{i}" for i in range(n)])
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < p:
                g.add_edge(f"n{i}", f"n{j}", rng.randint(1, wmax))
    return g


def cmd_selftest(args) -> int:
    """Randomized oracle checks across every workload."""
    rng = random.Random(args.seed)
    failures = 0
    counts = {"dijkstra": 0, "nw": 0, "closure": 0, "eval": 0}
    for _ in range(args.repeat):
        g = _random_graph(rng, rng.randint(2, 16))
        try:
            res = temporal_dijkstra(g, "n0")
        except RangeViolation:
            res = temporal_dijkstra(g, "n0", bits=8)
        ref, _ = classical_dijkstra(g, "n0")
        ok = list(res.distances) == list(ref) and not validate_tree(g, "n0", res.parent_matrix, ref)
        failures += not ok
        counts["dijkstra"] += 1

        n = rng.randint(1, 8)
        p = AlignmentProblem("".join(rng.choice("GATC") for _ in range(n)),
                             "".join(rng.choice("GATC") for _ in range(n)),
                             sigma=rng.randint(1, 3), m=rng.randint(1, 3))
        failures += temporal_nw_run(p).cost != classical_nw(p)
        counts["nw"] += 1

        A = g.adjacency_matrix()
        x = core.onehot(len(g), 0)
        hops = rng.randint(0, len(g))
        failures += closure_run(A, x, hops).distances != hop_limited_bellman_ford(A, x, hops)
        counts["closure"] += 1

        width = rng.randint(1, 6)
        binds = {name: tuple(rng.choice([0, 1, 2, 3, core.INF]) for _ in range(width))
                 for name in "abcd"}
        ops = ["+", "^", "*", "-|"]
        text = f"(a {rng.choice(ops)} b) {rng.choice(ops)} (c {rng.choice(ops)} d)"
        failures += lang.evaluate(text, binds) != lang.direct_eval(lang.parse(text), binds)
        counts["eval"] += 1
    for name, k in counts.items():
        print(f"{name:>9}: {k} cases")
    print(f"failures: {failures}")
    return EXIT_OK if failures == 0 else EXIT_MISMATCH


# -- parser ----------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bits", type=int, default=None, help="dynamic range in bits (t_max = 2^bits - 1)")
    p.add_argument("--overflow-policy", choices=[o.value for o in OverflowPolicy], default=None)
    p.add_argument("--cost-model", metavar="PATH", help="JSON cost table / machine config")
    p.add_argument("--out", metavar="PATH", help="write the JSON report here")
    p.add_argument("--csv", metavar="PATH", help="write the per-instruction trace as CSV")
    p.add_argument("--plot", metavar="PATH", help="write an energy breakdown figure (PNG/PDF/SVG)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tropical-machine", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dijkstra", help="shortest-path tree on the temporal machine")
    p.add_argument("--graph", required=True, metavar="PATH")
    p.add_argument("--source", required=True)
    p.add_argument("--paper-literal-f", action="store_true",
                   help="use f := d -| e without masking edges into visited nodes")
    _common(p)
    p.set_defaults(func=cmd_dijkstra)

    p = sub.add_parser("nw", help="Needleman-Wunsch alignment cost")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--indel", type=int, default=1)
    p.add_argument("--mismatch", type=int, default=1)
    _common(p)
    p.set_defaults(func=cmd_nw)

    p = sub.add_parser("closure", help="multi-hop reachability by repeated VMM")
    p.add_argument("--graph", required=True, metavar="PATH")
    p.add_argument("--source", required=True)
    p.add_argument("--hops", type=int, required=True)
    _common(p)
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("eval", help="compile and run a tropical expression")
    p.add_argument("--expr")
    p.add_argument("--expr-file", metavar="PATH")
    p.add_argument("--bind", metavar="PATH", help='JSON object of name -> list ("inf" allowed)')
    _common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("selftest", help="randomized oracle comparison")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeat", type=int, default=20)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RangeViolation as exc:
        print(f"error: RangeViolation: {exc}", file=sys.stderr)
    except (TropicalError, CliError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
