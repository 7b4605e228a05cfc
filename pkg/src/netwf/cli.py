"""Command-line entry point: ``netwf <subcommand> ...``.

Every subcommand prints a JSON summary on stdout. Options may also come
from a JSON file given with ``--config``; explicit flags win over it.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from contextlib import nullcontext
from pathlib import Path

import numpy as np

from . import datagen, evaluation, io
from .filter import FilterConfig, impute_missing, netwf, postprocess
from .network import WeightedNetwork
from .noise import Diagonal, homogenize_noise, naive_noise_guess
from .shrinker import optimal_shrink
from .similarity import (
    psn_threshold,
    source_profile_similarity,
    target_profile_similarity,
    undirected_profile_similarity,
)

THREADS_ENV = "NETWF_NUM_THREADS"


class UsageError(Exception):
    pass


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return None if not math.isfinite(f) else f
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2)


def _add_input(p, name="--input"):
    p.add_argument(name, required=True, help="matrix CSV or tab-separated edge list")
    p.add_argument("--format", choices=["auto", "matrix", "edgelist"], default="auto")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--directed", dest="directed", action="store_const", const=True, default=None)
    g.add_argument("--undirected", dest="directed", action="store_const", const=False)


def _add_filter_args(p):
    p.add_argument("--mode", choices=["cg", "direct"], default="cg")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--cg-tol", type=float, default=1e-8)
    p.add_argument("--cg-max-iter", type=int, default=None)
    p.add_argument("--variant", choices=["source_target", "source_source"], default="source_target")
    p.add_argument("--no-demean", action="store_true")
    p.add_argument("--exclude-pair", action="store_true",
                   help="drop each node pair's own columns from its profiles")
    p.add_argument("--no-precondition", action="store_true", help="plain CG without the Kronecker preconditioner")


def _filter_config(args) -> FilterConfig:
    return FilterConfig(
        epsilon=args.epsilon,
        cg_tol=args.cg_tol,
        cg_max_iter=args.cg_max_iter,
        mode=args.mode,
        demean=not args.no_demean,
        directed_variant=args.variant,
        exclude_pair=args.exclude_pair,
        precondition=not args.no_precondition,
    )


def _read_input(args, attr="input") -> WeightedNetwork:
    return io.read_network(getattr(args, attr), args.format, args.directed)


def _write_net(path, net: WeightedNetwork):
    if Path(path).suffix.lower() in (".tsv", ".txt", ".edges"):
        io.write_edge_list(path, net)
    else:
        io.write_matrix_csv(path, net.weights, net.node_ids)


def _echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config")}


def cmd_psn(args):
    net, _ = impute_missing(_read_input(args))
    kind = args.kind or ("source" if net.directed else "undirected")
    fn = {"undirected": undirected_profile_similarity, "source": source_profile_similarity,
          "target": target_profile_similarity}[kind]
    psn = fn(net, exclude_pair=args.exclude_pair)
    if args.out:
        io.write_matrix_csv(args.out, psn.matrix, psn.node_ids)
    out = {"kind": kind, "n_nodes": psn.v}
    if args.cutoff is not None:
        out["cutoff"] = args.cutoff
        out["n_edges_above_cutoff"] = len(psn_threshold(psn, args.cutoff))
    return out


def _noise_for(args, net, variances):
    if args.noise == "naive":
        return naive_noise_guess(net)
    if args.noise:
        return io.parse_noise_spec(args.noise, net)
    if variances is not None:
        return Diagonal(variances)
    raise UsageError("give --noise or --variances")


def cmd_denoise(args):
    raw = _read_input(args)
    var = io.read_variance_csv(args.variances, raw.node_ids) if args.variances else None
    net, var = impute_missing(raw, var)
    noise = _noise_for(args, net, var)
    if args.homogenize:
        noise = homogenize_noise(noise, net.v)
    res = netwf(net, noise, _filter_config(args))
    res = postprocess(res, args.remove_self_links, args.truncate_negative)
    if args.out:
        _write_net(args.out, res.to_network())
    out = {
        "n_nodes": net.v,
        "n_imputed": int((~raw.observed).sum()),
        "global_mean": res.global_mean_restored,
        "prefactor": res.prefactor_used,
        "epsilon": res.epsilon_used,
        "noise_mean_variance": noise.mean_variance(net.v),
    }
    if res.cg_report is not None:
        out["cg"] = {
            "iterations": res.cg_report.iterations,
            "relative_residual": res.cg_report.final_relative_residual,
            "converged": res.cg_report.converged,
        }
    return out


def cmd_shrink(args):
    raw = _read_input(args)
    var = io.read_variance_csv(args.variances, raw.node_ids) if args.variances else None
    net, var = impute_missing(raw, var)
    if args.sigma2 is not None:
        sigma2 = args.sigma2
    else:
        sigma2 = homogenize_noise(_noise_for(args, net, var), net.v).sigma2
    den, report = optimal_shrink(net, sigma2)
    res_net = den
    if args.remove_self_links or args.truncate_negative:
        W = den.filled()
        if args.remove_self_links:
            np.fill_diagonal(W, 0.0)
        if args.truncate_negative:
            W[W < 0] = 0.0
        res_net = den.with_weights(W)
    if args.out:
        _write_net(args.out, res_net)
    return report.to_dict()


def cmd_eval(args):
    scores = io.read_network(args.scores, args.format, args.directed)
    metrics, breakdown = {}, {}
    if args.reference:
        ref = io.read_network(args.reference, args.format, scores.directed, node_universe=scores.node_ids)
        if ref.node_ids != scores.node_ids:
            raise io.DataError("reference and scores have different node labels")
        mask = scores.observed & ref.observed & ~np.eye(scores.v, dtype=bool)
        und = not scores.directed
        metrics["mse"] = evaluation.mse(scores.filled(), ref.filled(), mask, und)
        metrics["r2"] = evaluation.r_squared(scores.filled(), ref.filled(), mask, und)
    for path in args.benchmark or []:
        bench = io.read_benchmark(path)
        summ = evaluation.benchmark_summary(scores, bench, args.top_k)
        for key, val in summ.items():
            metrics[f"{bench.name}.{key}"] = val
    if args.thresholds:
        neg, pos = (float(x) for x in args.thresholds.split(","))
        n_neg, n_pos = evaluation.threshold_counts(scores, neg, pos)
        metrics["n_negative"], metrics["n_positive"] = n_neg, n_pos
    report = evaluation.EvaluationReport(metrics, breakdown, {})
    return report.to_dict(_echo(args))


def cmd_crossval(args):
    raw = _read_input(args)
    var = io.read_variance_csv(args.variances, raw.node_ids) if args.variances else None
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    report = evaluation.cross_validate(raw, var, args.k, args.seed, methods, _filter_config(args))
    return report.to_dict(_echo(args))


def cmd_synth(args):
    if args.kind == "two-community":
        truth = datagen.two_community_network(args.v, args.w_in, args.w_out)
    else:
        svals = [float(s) for s in args.singular_values.split(",")] if args.singular_values else []
        truth = datagen.planted_lowrank(args.v, svals, args.seed, symmetric=args.symmetric)
    inst = datagen.add_gaussian_noise(truth, args.sigma, args.seed)
    if args.out_truth:
        io.write_matrix_csv(args.out_truth, inst.truth.weights, truth.node_ids)
    if args.out_noisy:
        io.write_matrix_csv(args.out_noisy, inst.noisy.weights, truth.node_ids)
    return {
        "kind": args.kind,
        "n_nodes": truth.v,
        "sigma2": inst.noise_model.sigma2,
        "seed": args.seed,
        "mse_noisy": evaluation.mse(inst.noisy.weights, inst.truth.weights,
                                    ~np.eye(truth.v, dtype=bool), not truth.directed),
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netwf", description="Network Wiener filtering toolkit")
    parser.add_argument("--config", help="JSON file of option defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("psn", help="profile similarity network")
    _add_input(p)
    p.add_argument("--kind", choices=["undirected", "source", "target"])
    p.add_argument("--cutoff", type=float)
    p.add_argument("--exclude-pair", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_psn)

    p = sub.add_parser("denoise", help="run the network Wiener filter")
    _add_input(p)
    p.add_argument("--noise", help="noise JSON, path to one, or 'naive'")
    p.add_argument("--variances", help="per-edge noise variance matrix CSV")
    p.add_argument("--homogenize", action="store_true", help="replace noise by its mean variance")
    _add_filter_args(p)
    p.add_argument("--remove-self-links", action="store_true")
    p.add_argument("--truncate-negative", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("shrink", help="optimal singular value shrinkage")
    _add_input(p)
    p.add_argument("--sigma2", type=float)
    p.add_argument("--noise")
    p.add_argument("--variances")
    p.add_argument("--remove-self-links", action="store_true")
    p.add_argument("--truncate-negative", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_shrink)

    p = sub.add_parser("eval", help="score a network against a reference and benchmarks")
    _add_input(p, "--scores")
    p.add_argument("--reference")
    p.add_argument("--benchmark", action="append")
    p.add_argument("--top-k", type=int, default=1000)
    p.add_argument("--thresholds", help="NEG,POS (write as --thresholds=-0.12,0.16)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("crossval", help="k-fold hold-out test")
    _add_input(p)
    p.add_argument("--variances")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--methods", default="netwf,os,mi")
    _add_filter_args(p)
    p.set_defaults(func=cmd_crossval)

    p = sub.add_parser("synth", help="synthetic truth/noisy pair")
    p.add_argument("--kind", choices=["two-community", "lowrank"], default="two-community")
    p.add_argument("--v", type=int, default=40)
    p.add_argument("--w-in", type=float, default=1.0)
    p.add_argument("--w-out", type=float, default=0.1)
    p.add_argument("--singular-values")
    p.add_argument("--symmetric", action="store_true")
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-truth")
    p.add_argument("--out-noisy")
    p.set_defaults(func=cmd_synth)
    return parser


def _parse(parser, argv):
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config {args.config}: {exc}")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in sub._actions}
    unknown = set(cfg) - known
    if unknown:
        parser.error(f"unknown config keys: {sorted(unknown)}")
    sub.set_defaults(**cfg)
    return parser.parse_args(argv)


def _thread_limit():
    n = os.environ.get(THREADS_ENV)
    if not n:
        return nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(int(n))


def main(argv=None) -> int:
    parser = build_parser()
    args = _parse(parser, argv)
    try:
        with _thread_limit():
            out = args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"netwf: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"netwf: error: {exc}", file=sys.stderr)
        return 1
    print(dump_json(out))
    return 0


if __name__ == "__main__":
    sys.exit(main())
