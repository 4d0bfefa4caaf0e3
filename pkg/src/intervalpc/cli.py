"""Command line front end.

Subcommands: solve (path covers / HP questions), verify (check a cover
file against a graph file), oracle (differential engine-vs-oracle runs),
bench (engine scaling and kernel backend comparison), gen (random
instance files).

Exit codes: 0 success, 1 failed verification or oracle mismatch, 2 parse
error, 3 invalid claimed ordering, 4 instance too large for the oracle.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

from . import kernels
from .bipartite import (hp_biconvex, hp_xconvex, onehp_biconvex,
                        onehp_xconvex, parse_bipartite_file,
                        write_bipartite_file)
from .engine import parse_cover, serialize_cover, solve_1pc
from .generators import GenSpec, gen_biconvex, gen_interval
from .graphcore import (OrderingViolation, build_ordering, parse_adjacency_file,
                        parse_interval_file, validate_ordering,
                        write_interval_file)
from .oracle import (InstanceTooLarge, check_nesting, diff_engine_vs_oracle,
                     validate_cover)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_ORDERING = 3
EXIT_TOO_LARGE = 4


def _load_graph(path, fmt):
    text = open(path).read()
    if fmt == "interval":
        return build_ordering(parse_interval_file(text))
    if fmt == "adj":
        n, edges, pi = parse_adjacency_file(text)
        return validate_ordering(n, edges, pi)
    raise ValueError(f"unsupported graph format {fmt!r}")


def _guess_format(path):
    if path.endswith(".adj"):
        return "adj"
    if path.endswith(".bip"):
        return "bipartite"
    return "interval"


def cmd_solve(args):
    fmt = args.format or _guess_format(args.input)
    try:
        if fmt == "bipartite":
            return _solve_bipartite(args)
        g = _load_graph(args.input, fmt)
    except OrderingViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ORDERING
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    trace = [] if args.trace else None
    cover = solve_1pc(g, terminal=args.terminal, trace=trace)
    if trace:
        for i, op, detail in trace:
            print(f"# step {i}: {op} ({detail})", file=sys.stderr)
    text = serialize_cover(cover)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"lambda={cover.lam}")
    if args.hp:
        print("hp=yes" if cover.lam == 1 else "hp=no")
    return EXIT_OK


def _solve_bipartite(args):
    from .bipartite import ConvexityViolation, StartNotInY, UnsupportedCase
    try:
        g = parse_bipartite_file(open(args.input).read())
    except (OSError, ValueError, ConvexityViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        if args.terminal is not None:
            start = g.Y[args.terminal - 1]
            path = (onehp_biconvex(g, start) if g.convexity == "bi"
                    else onehp_xconvex(g, start))
        else:
            path = hp_biconvex(g) if g.convexity == "bi" else hp_xconvex(g)
    except (UnsupportedCase, StartNotInY, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if path is None:
        print("hp=no")
    else:
        print("hp=yes")
        print(" ".join(str(lab) for _, lab in path))
    return EXIT_OK


def cmd_verify(args):
    try:
        fmt = args.format or _guess_format(args.graph)
        g = _load_graph(args.graph, fmt)
        cover = parse_cover(open(args.cover).read())
    except OrderingViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ORDERING
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    violations = validate_cover(g, cover, cover.terminal)
    violations += check_nesting(g, cover)
    if violations:
        for kind, msg in violations:
            print(f"{kind}: {msg}")
        return EXIT_FAIL
    print("ok")
    return EXIT_OK


def _labelled_models(args):
    if args.exhaustive is not None:
        from .generators import exhaustive_interval_models
        n = args.exhaustive
        for idx, model in enumerate(exhaustive_interval_models(n)):
            yield (f"exhaustive-n{n}-{idx}", model)
    else:
        spec = GenSpec(kind="interval", n=args.n, density=args.density,
                       seed=args.seed, count=args.random)
        for idx, model in enumerate(gen_interval(spec)):
            yield (f"random-seed{args.seed}-{idx}", model)


def cmd_oracle(args):
    models = list(_labelled_models(args))
    try:
        report = diff_engine_vs_oracle(models, prefix_mode=args.prefix)
    except InstanceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    if args.exhaustive is not None:
        repro = f"intervalpc oracle --exhaustive n={args.exhaustive}"
    else:
        repro = (f"intervalpc oracle --random count={args.random} "
                 f"--n {args.n} --density {args.density} --seed {args.seed}")
    if args.json:
        print(report.to_json())
    else:
        print(f"# repro: {repro}")
        sys.stdout.write(report.to_text())
    if not report.ok and args.corpus:
        # append failing instances so the regression suite replays them
        failing = {m["instance"] for m in report.mismatches}
        failing |= {v["instance"] for v in report.violations}
        by_label = dict(models)
        with open(args.corpus, "a") as fh:
            for label in sorted(failing):
                fh.write(json.dumps({
                    "label": label,
                    "repro": repro,
                    "intervals": [[lab, str(lo), str(hi)]
                                  for lab, lo, hi in by_label[label]],
                }) + "\n")
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_bench(args):
    sizes = [int(s) for s in args.sizes.split(",")]
    reps = args.reps
    print(f"kernel backend: {kernels.backend_name()}")
    rows = []
    for n in sizes:
        spec = GenSpec(kind="interval", n=n, density=args.density,
                       seed=args.seed, count=reps)
        models = gen_interval(spec)
        times = []
        lam = None
        for model in models:
            g = build_ordering(model)
            t0 = time.perf_counter()
            cover = solve_1pc(g, terminal=(n // 2 or None))
            times.append(time.perf_counter() - t0)
            lam = cover.lam
        times.sort()
        med = times[len(times) // 2]
        rows.append((n, med))
        print(f"n={n:>7d}  median={med * 1000:10.2f} ms  lambda={lam}")
    if len(rows) >= 2:
        xs = [math.log(n) for n, _ in rows]
        ys = [math.log(max(t, 1e-9)) for _, t in rows]
        mean_x = sum(xs) / len(xs)
        mean_y = sum(ys) / len(ys)
        slope = (sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
                 / sum((x - mean_x) ** 2 for x in xs))
        print(f"log-log scaling exponent: {slope:.2f}")
    if args.kernels:
        _bench_kernels(args)
    return EXIT_OK


def _bench_kernels(args):
    from .oracle import adjacency_masks
    spec = GenSpec(kind="interval", n=10, density=0.5, seed=args.seed, count=20)
    models = gen_interval(spec)
    adjs = [adjacency_masks(build_ordering(m)) for m in models]
    for pure in (False, True):
        if not pure and not kernels.USING_NUMBA:
            continue
        name = "pure" if pure else "numba"
        # warm up compilation outside the timed region
        kernels.cover_tables(adjs[0], 10, pure=pure)
        t0 = time.perf_counter()
        for adj in adjs:
            _, g_tab = kernels.cover_tables(adj, 10, pure=pure)
            reach = kernels.reach_table(adj, 10, pure=pure)
            kernels.terminal_sizes(g_tab, reach, 10, pure=pure)
        dt = time.perf_counter() - t0
        print(f"oracle kernels [{name:5s}]: {dt * 1000 / len(adjs):8.2f} ms/instance")


def cmd_gen(args):
    spec = GenSpec(kind=args.kind, n=args.n, nx=args.nx, ny=args.ny,
                   density=args.density, seed=args.seed, count=args.count)
    if args.kind == "interval":
        for idx, model in enumerate(gen_interval(spec)):
            path = f"{args.out}-{idx}.ivl" if spec.count > 1 else f"{args.out}.ivl"
            with open(path, "w") as fh:
                fh.write(write_interval_file(model))
            print(path)
    else:
        for idx, g in enumerate(gen_biconvex(spec)):
            path = f"{args.out}-{idx}.bip" if spec.count > 1 else f"{args.out}.bip"
            with open(path, "w") as fh:
                fh.write(write_bipartite_file(g))
            print(path)
    return EXIT_OK


def _parse_kv_int(value):
    # accepts "n=6" style values used by --exhaustive / --random
    if "=" in value:
        value = value.split("=", 1)[1]
    return int(value)


def build_parser():
    ap = argparse.ArgumentParser(prog="intervalpc")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="minimum path cover / 1PC / HP questions")
    p.add_argument("input")
    p.add_argument("--terminal", type=int, default=None,
                   help="fixed endpoint (vertex index; Y index for bipartite)")
    p.add_argument("--hp", action="store_true", help="report lambda == 1")
    p.add_argument("--format", choices=["interval", "adj", "bipartite"])
    p.add_argument("--trace", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="validate a cover file against a graph")
    p.add_argument("graph")
    p.add_argument("cover")
    p.add_argument("--format", choices=["interval", "adj"])
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="differential engine-vs-oracle runs")
    p.add_argument("--exhaustive", type=_parse_kv_int, metavar="n=K")
    p.add_argument("--random", type=_parse_kv_int, metavar="count=C", default=100)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--prefix", action="store_true")
    p.add_argument("--json", action="store_true")
    p.add_argument("--corpus", help="append failing instances to this file")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="engine timing table and scaling fit")
    p.add_argument("--sizes", default="1000,2000,4000")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--density", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--kernels", action="store_true",
                   help="also compare numba vs pure oracle kernels")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="write random instance files")
    p.add_argument("--kind", choices=["interval", "biconvex"], default="interval")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--nx", type=int, default=4)
    p.add_argument("--ny", type=int, default=4)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out", default="instance")
    p.set_defaults(func=cmd_gen)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
