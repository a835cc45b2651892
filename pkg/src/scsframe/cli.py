"""Command line entry point: gen, sample, cluster, select, run, bench, hist, viz."""
import argparse
import json
import os
import sys
from pathlib import Path

from . import io
from .clustering import micro_cluster
from .diversity import SolowPolaskyConfig, pairwise_matrix
from .generators import PRESETS, generate
from .pipeline import ALL_ALGOS, ScsParams, average, bench, make_problem, measure_row, run_scs, sample
from .selection import CRITERIA, SelectionCriterion, select, setup
from .viz import export_histogram, export_superimposition


def _params(args, **extra):
    keys = ("n", "delta", "theta", "min_clique", "max_reps", "lam", "beta", "criterion", "scope", "seed", "cap", "spp_view")
    kw = {k: getattr(args, k, None) for k in keys}
    kw.update(extra)
    return ScsParams.from_env(**kw)


def _add_cluster_args(p):
    p.add_argument("--delta", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--min-clique", dest="min_clique", type=int)
    p.add_argument("--max-reps", dest="max_reps", type=int)


def _add_select_args(p):
    p.add_argument("--criterion", choices=CRITERIA)
    p.add_argument("--scope", choices=("all", "cluster"))
    p.add_argument("--beta", type=float)


def _add_sample_args(p):
    p.add_argument("--n", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--spp-view", dest="spp_view", choices=("sets", "cells"))


def _cluster_solutions(cluster_path, doc):
    """Load the solutions file a clusters document points to (relative to that document)."""
    if "solutions" not in doc:
        raise ValueError("cluster file does not reference a solutions file")
    return io.load_solutions(Path(cluster_path).resolve().parent / doc["solutions"])


def cmd_gen(args):
    problem, size = args.problem, args.size
    if problem in PRESETS:
        problem, size = PRESETS[problem]
    if size is None:
        raise ValueError("--size is required unless --problem names a preset")
    inst = generate(problem, size, args.seed)
    io.save_instance(inst, args.out)
    print(f"wrote {problem} instance to {args.out}")


def cmd_sample(args):
    params = _params(args)
    inst = io.load_instance(args.instance)
    problem = make_problem(inst, params)
    sols = sample(problem, params.n, params.seed)
    elems = [problem.element_set(s) for s in sols]
    header = {"instance": str(args.instance), "problem": problem.name, "seed": params.seed,
              "lam": params.lam, "spp_view": params.spp_view}
    io.save_solutions(args.out, sols, elems, header)
    print(f"wrote {len(sols)} solutions ({len(set(elems))} distinct) to {args.out}")


def cmd_cluster(args):
    params = _params(args)
    _, _, elems = io.load_solutions(args.solutions)
    matrix = pairwise_matrix(elems)
    cp = params.cluster
    cliques = micro_cluster(matrix, cp)
    clusters = setup(elems, cliques)
    doc = {
        "solutions": os.path.relpath(Path(args.solutions).resolve(), Path(args.out).resolve().parent),
        "params": {"delta": cp.delta, "theta": cp.theta, "min_size": cp.min_size, "max_reps": cp.max_reps},
        "cliques": [list(c) for c in cliques],
        "clusters": clusters,
    }
    io.save_json(doc, args.out)
    print(f"{len(cliques)} cliques, {len(clusters)} clusters after setup -> {args.out}")


def cmd_select(args):
    params = _params(args)
    doc = io.load_json(args.clusters)
    _, _, elems = _cluster_solutions(args.clusters, doc)
    matrix = pairwise_matrix(elems)
    crit = SelectionCriterion(params.criterion, SolowPolaskyConfig(params.beta), params.scope)
    rng = args.seed if args.seed is not None else None
    sel = select(doc["clusters"], matrix, crit, rng)
    out = {"criterion": params.criterion, "scope": params.scope, "beta": params.beta,
           "seed": args.seed, "ns": len(sel), "selected": sel}
    io.save_json(out, args.out)
    print(f"selected {len(sel)} solutions -> {args.out}")


def cmd_run(args):
    params = _params(args)
    out = Path(args.out)
    if args.instance:
        inst = io.load_instance(args.instance)
    else:
        if not args.problem:
            raise ValueError("give --instance or --problem")
        problem, size = args.problem, args.size
        if problem in PRESETS:
            problem, size = PRESETS[problem]
        inst = generate(problem, size, args.instance_seed)
    io.save_instance(inst, out / "instance.json")
    res = run_scs(inst, params)
    problem = make_problem(inst, params)
    io.save_solutions(out / "solutions.jsonl", res.solutions, res.elements,
                      {"problem": problem.name, "seed": params.seed, "lam": params.lam, "spp_view": params.spp_view})
    io.save_json({"solutions": "solutions.jsonl", "cliques": [list(c) for c in res.cliques],
                  "clusters": res.clusters}, out / "clusters.json")
    io.save_json({"criterion": params.criterion, "scope": params.scope, "beta": params.beta,
                  "ns": res.n_s, "selected": res.selected}, out / "selection.json")
    row = measure_row("", f"SCS-{params.criterion.upper()}", [res.elements[i] for i in res.selected], params.beta, float("nan"))
    io.write_metrics(out / "metrics.csv", [row])
    if len(res.elements) >= 2:
        export_histogram(res.matrix, out / "histogram.csv")
    for k, c in enumerate(res.clusters[: args.max_figures]):
        export_superimposition(inst, [res.elements[i] for i in c], out / f"cluster_{k:02d}.svg",
                               title=f"cluster {k} ({len(c)} solutions)", spp_view=params.spp_view)
    # wall-clock times vary between runs, so they live outside the byte-stable artefacts
    (out / "timings.json").write_text(json.dumps(res.timings, indent=1, sort_keys=True) + "\n")
    print(f"n_s={res.n_s} clusters={len(res.clusters)} -> {out}")


def cmd_bench(args):
    params = _params(args)
    files = sorted(Path(args.instances).glob("*.json"))
    if not files:
        raise ValueError(f"no instance files in {args.instances}")
    insts = [io.load_instance(f) for f in files]
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    for a in algos:
        if a not in ALL_ALGOS:
            raise ValueError(f"unknown algorithm {a!r}; choose from {','.join(ALL_ALGOS)}")
    reports = bench(insts, params, algos, [f.stem for f in files], eval_beta=args.eval_beta)
    rows = [r for rep in reports for r in rep.rows] + average(reports)
    io.write_metrics(args.out, rows)
    for r in average(reports):
        print(f"{r.algorithm:8s} Dmin={r.Dmin:.3f} ns={r.ns:.2f} Dmin_impr={r.impr['Dmin']:+.1f}%")


def cmd_hist(args):
    _, _, elems = io.load_solutions(args.solutions)
    pct = export_histogram(pairwise_matrix(elems), args.out)
    print(f"wrote {args.out} ({pct.sum():.6f}% total)")


def cmd_viz(args):
    inst = io.load_instance(args.instance)
    doc = io.load_json(args.cluster)
    head, _, elems = _cluster_solutions(args.cluster, doc)
    key = "cliques" if args.raw else "clusters"
    members = doc[key][args.index]
    export_superimposition(inst, [elems[i] for i in members], args.out,
                           title=f"cluster {args.index} ({len(members)} solutions)",
                           spp_view=head.get("spp_view", "sets"))
    print(f"wrote {args.out}")


def build_parser():
    ap = argparse.ArgumentParser(prog="scsframe", description="Sample-cluster-select for diverse solutions.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="generate an instance")
    p.add_argument("--problem", required=True, help="sp-grid, sp-eud, tsp, spp or a preset like SP-Grid-100")
    p.add_argument("--size", help="10x10 (grid), 100 (points), 10x10:100 (spp)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("sample", help="sample local optima")
    p.add_argument("--instance", required=True)
    _add_sample_args(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("cluster", help="micro-cluster sampled solutions")
    p.add_argument("--solutions", required=True)
    _add_cluster_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_cluster)

    p = sub.add_parser("select", help="pick one representative per cluster")
    p.add_argument("--clusters", required=True)
    _add_select_args(p)
    p.add_argument("--seed", type=int, help="random tie-breaking; lowest index when omitted")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_select)

    p = sub.add_parser("run", help="sample, cluster and select end to end")
    p.add_argument("--instance")
    p.add_argument("--problem")
    p.add_argument("--size")
    p.add_argument("--instance-seed", dest="instance_seed", type=int, default=0)
    _add_sample_args(p)
    _add_cluster_args(p)
    _add_select_args(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-figures", dest="max_figures", type=int, default=3)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("bench", help="compare SCS with the baselines")
    p.add_argument("--instances", required=True, help="directory of instance .json files")
    p.add_argument("--algos", default=",".join(ALL_ALGOS))
    _add_sample_args(p)
    _add_cluster_args(p)
    _add_select_args(p)
    p.add_argument("--eval-beta", dest="eval_beta", type=float, help="beta for reported D_SP (default: --beta)")
    p.add_argument("--cap", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("hist", help="dissimilarity histogram")
    p.add_argument("--solutions", required=True)
    p.add_argument("--out", required=True, help="CSV path; an .svg is written next to it")
    p.set_defaults(fn=cmd_hist)

    p = sub.add_parser("viz", help="superimpose a cluster on its instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--cluster", required=True, help="clusters .json from the cluster command")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--raw", action="store_true", help="draw the raw clique instead of the disjoint cluster")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_viz)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.fn(args)
    except (ValueError, RuntimeError, TypeError, OSError, KeyError, IndexError) as e:
        print(f"scsframe {args.cmd}: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
