"""Command-line pipeline: gen, fan, synth, eval, bench, export, verify."""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import baselines, codegen, nns, policy as pol, sampling
from .core import CostDomain, format_feasible_set
from .fan import build_fan
from .feasibility import FeasibilityOracle
from .instances import make_instance
from .synth import SynthConfig, SynthesisError, parse_schedule, synthesize, synthesize_greedy


class CliError(Exception):
    pass


# -- helpers --------------------------------------------------------------

def _add_instance_args(p):
    p.add_argument("--class", dest="cls", choices=["knp", "cut", "tsp"],
                   help="generated instance class")
    p.add_argument("--d", type=int, help="class size parameter")
    p.add_argument("--in", dest="path", help="custom feasible-set file")


def _load_instance(args):
    if args.path:
        X, dom = make_instance("custom", path=args.path)
        label = f"custom({Path(args.path).name})"
    elif args.cls:
        X, dom = make_instance(args.cls, args.d)
        label = f"{args.cls}({args.d})"
    else:
        raise CliError("name an instance with --class/--d or --in")
    return X, dom, label


def _emit(report: dict, path=None) -> None:
    text = json.dumps(report, indent=2) + "\n"
    if path:
        Path(path).write_text(text)
    sys.stdout.write(text)


def _flags(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def _parse_costs(path, n):
    costs = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        row = [Fraction(tok) for tok in line.replace(",", " ").split()]
        if len(row) != n:
            raise CliError(f"{path}:{lineno}: expected {n} costs, got {len(row)}")
        costs.append(tuple(row))
    if not costs:
        raise CliError(f"{path}: no cost vectors")
    return costs


def _sampled_costs(dom: CostDomain, n, queries, seed):
    pts = sampling.sample_ball_orthant(n, dom, seed, queries)
    return sampling.to_fractions(pts), pts


def _objective(c, x):
    return sum(ci * xi for ci, xi in zip(c, x) if xi)


def _build_policy(X, dom, label, mode, schedule=None, budget=None):
    oracle = FeasibilityOracle()
    fan = build_fan(X, oracle)
    config = SynthConfig(budget=budget)
    meta = {"instance": label, "x_hash": X.content_hash()}
    if mode == "greedy":
        return synthesize_greedy(fan, dom, config=config, oracle=oracle, meta=meta)
    return synthesize(fan, dom, schedule=schedule, config=config, oracle=oracle, meta=meta)


# -- subcommands ----------------------------------------------------------

def cmd_gen(args):
    X, dom, label = _load_instance(args)
    text = format_feasible_set(X, dom)
    if args.out:
        Path(args.out).write_text(text)
        _emit({"instance": label, "n": X.dim, "points": len(X),
               "x_hash": X.content_hash(), "out": args.out})
    else:
        sys.stdout.write(text)
    return 0


def cmd_fan(args):
    X, dom, label = _load_instance(args)
    t0 = time.perf_counter()
    fan = build_fan(X, adjacency=args.adjacency)
    report = {"command": "fan", "instance": label, "x_hash": X.content_hash()}
    report.update(fan.report())
    report["seconds"] = round(time.perf_counter() - t0, 6)
    report["flags"] = _flags(args)
    _emit(report, args.report)
    return 0


def cmd_synth(args):
    X, dom, label = _load_instance(args)
    oracle = FeasibilityOracle()
    t0 = time.perf_counter()
    fan = build_fan(X, oracle)
    fan_seconds = time.perf_counter() - t0
    meta = {"instance": label, "x_hash": X.content_hash()}
    config = SynthConfig(budget=args.budget, progress_only=not args.all_dividers)
    report = {"command": "synth", "instance": label, "x_hash": X.content_hash(),
              "fan_seconds": round(fan_seconds, 6)}
    runs = {}
    modes = ["greedy", "iterative"] if args.mode == "both" else [args.mode]
    policy = None
    for mode in modes:
        if mode == "greedy":
            p, r = synthesize_greedy(fan, dom, config=config, oracle=oracle, meta=meta)
        else:
            schedule = parse_schedule(args.schedule, len(fan.dividers))
            p, r = synthesize(fan, dom, schedule=schedule, config=config,
                              oracle=oracle, meta=meta)
        runs[mode] = r.as_dict()
        policy = p
    report["runs"] = runs
    if len(runs) == 2:
        g, it = runs["greedy"]["depth"], runs["iterative"]["depth"]
        report["gap"] = None if g is None or it is None else g - it
    report["depth"] = policy.depth
    report["completed"] = all(r["completed"] for r in runs.values())
    report["flags"] = _flags(args)
    if args.out:
        pol.save(policy, args.out)
    _emit(report, args.report)
    return 0


def _policy_and_instance(args):
    if args.cls or args.path:
        X, dom, _ = _load_instance(args)
        return pol.load(args.policy, X), X, dom
    return pol.load(args.policy), None, None


def cmd_eval(args):
    policy, X, dom = _policy_and_instance(args)
    if args.costs:
        costs = _parse_costs(args.costs, policy.dim)
    else:
        if X is None:
            raise CliError("--random sampling needs the instance (--class/--d or --in)")
        costs, _ = _sampled_costs(dom, policy.dim, args.random, args.seed)
    rows = []
    for c in costs:
        x, steps = policy.evaluate(c, exact=True)
        rows.append({"solution": list(x), "objective": str(_objective(c, x)), "depth": steps})
    stats = pol.eval_stats(policy, costs)
    report = {"command": "eval", "policy": args.policy, "queries": len(rows),
              "stats": stats.as_dict(), "flags": _flags(args)}
    if args.show:
        report["results"] = rows
    _emit(report, args.report)
    return 0


def _time_per_query(fn, costs, repeat=1):
    t0 = time.perf_counter_ns()
    for _ in range(repeat):
        for c in costs:
            fn(c)
    return (time.perf_counter_ns() - t0) / (len(costs) * repeat)


def cmd_bench(args):
    X, dom, label = _load_instance(args)
    if args.policy:
        policy = pol.load(args.policy, X)
    else:
        policy, _ = _build_policy(X, dom, label, "greedy")
    _, floats = _sampled_costs(dom, X.dim, args.queries, args.seed)
    costs = [tuple(float(v) for v in row) for row in floats]
    backends = {"ldt": lambda c: policy.evaluate(c),
                "brute": lambda c: baselines.brute_force(X, c)}
    if args.cls:
        backends["baseline"] = lambda c: baselines.class_baseline(args.cls, args.d, c)
    if X.is_binary():
        index = nns.nns_policy_build(X)
        backends["nns-kd"] = lambda c: index.query(c)
        backends["nns-scan"] = lambda c: nns.linear_scan(index.S, c)
    chosen = args.backend or list(backends)
    timings = {}
    for name in chosen:
        if name not in backends:
            raise CliError(f"backend {name!r} is not available for {label}")
        timings[name] = round(_time_per_query(backends[name], costs, args.repeat), 1)
    report = {"command": "bench", "instance": label, "queries": len(costs), "seed": args.seed,
              "nanos_per_query": timings, "policy_depth": policy.depth, "flags": _flags(args)}
    _emit(report, args.report)
    return 0


def cmd_export(args):
    policy = pol.load(args.policy)
    if args.format != "c":
        raise CliError(f"unsupported format {args.format!r}")
    text = codegen.emit_c(policy)
    if args.out:
        Path(args.out).write_text(text)
        digest = hashlib.sha256(text.encode()).hexdigest()
        _emit({"command": "export", "out": args.out, "lines": text.count("\n"),
               "sha256": digest})
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args):
    X, dom, label = _load_instance(args)
    if args.policy:
        policy = pol.load(args.policy, X)
    else:
        policy, _ = _build_policy(X, dom, label, args.mode, budget=args.budget)
    costs, _ = _sampled_costs(dom, X.dim, args.queries, args.seed)
    checks = {"policy_vs_brute": 0, "baseline_vs_brute": 0, "nns_vs_brute": 0,
              "codegen_vs_policy": 0, "leaf_in_X": 0}
    members = set(X.points)
    index = nns.nns_policy_build(X) if X.is_binary() else None
    _, tree = codegen.parse_c(codegen.emit_c(policy))
    for c in costs:
        _, opt = baselines.brute_force(X, c)
        x, _ = policy.evaluate(c, exact=True)
        if _objective(c, x) != opt:
            checks["policy_vs_brute"] += 1
        if x not in members:
            checks["leaf_in_X"] += 1
        if args.cls:
            _, bval = baselines.class_baseline(args.cls, args.d, c)
            if bval != opt:
                checks["baseline_vs_brute"] += 1
        if index is not None:
            if _objective(c, nns.nns_policy_query(index, c)) != opt:
                checks["nns_vs_brute"] += 1
        if codegen.interpret(tree, c, exact=True)[0] != x:
            checks["codegen_vs_policy"] += 1
    skipped = []
    if not args.cls:
        skipped.append("baseline_vs_brute")
    if index is None:
        skipped.append("nns_vs_brute")
    results = {}
    for name, bad in checks.items():
        status = "skip" if name in skipped else ("pass" if bad == 0 else "fail")
        results[name] = {"status": status, "mismatches": bad}
        print(f"{name}: {status.upper()} ({bad} mismatches / {len(costs)} queries)",
              file=sys.stderr)
    ok = all(r["status"] != "fail" for r in results.values())
    report = {"command": "verify", "instance": label, "x_hash": X.content_hash(),
              "queries": len(costs), "seed": args.seed, "policy_depth": policy.depth,
              "checks": results, "ok": ok, "flags": _flags(args)}
    _emit(report, args.report)
    return 0 if ok else 1


# -- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ldtpolicy",
                                     description="Linear-decision-tree policies for small ILPs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a feasible set")
    _add_instance_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("fan", help="normal fan statistics")
    _add_instance_args(p)
    p.add_argument("--adjacency", choices=["facet", "ray"], default="facet")
    p.add_argument("--report")
    p.set_defaults(func=cmd_fan)

    p = sub.add_parser("synth", help="synthesize a policy")
    _add_instance_args(p)
    p.add_argument("--mode", choices=["iterative", "greedy", "both"], default="iterative")
    p.add_argument("--schedule", default="full",
                   help="full, greedy, geometric or a comma list of kappa values")
    p.add_argument("--budget", type=float, help="wall-clock limit in seconds")
    p.add_argument("--all-dividers", action="store_true",
                   help="also branch on dividers that leave a child with every cone")
    p.add_argument("--out", help="policy file to write")
    p.add_argument("--report")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval", help="evaluate a stored policy")
    p.add_argument("--policy", required=True)
    _add_instance_args(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--costs", help="file with one cost vector per line")
    g.add_argument("--random", type=int, metavar="N", help="sample N costs from the domain")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--show", action="store_true", help="include per-query results")
    p.add_argument("--report")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="time queries across backends")
    _add_instance_args(p)
    p.add_argument("--policy")
    p.add_argument("--queries", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--backend", action="append",
                   choices=["ldt", "brute", "baseline", "nns-kd", "nns-scan"])
    p.add_argument("--report")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("export", help="emit a policy as C source")
    p.add_argument("--policy", required=True)
    p.add_argument("--format", default="c")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("verify", help="cross-check policy, brute force, baseline and NNS")
    _add_instance_args(p)
    p.add_argument("--policy")
    p.add_argument("--mode", choices=["iterative", "greedy"], default="greedy")
    p.add_argument("--budget", type=float)
    p.add_argument("--queries", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report")
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ValueError, SynthesisError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
