"""Command-line entry point.

Subcommands: `dedup` runs the full pipeline (parameters, sampling, class
minimization, report); `sample-stats` characterizes the two samplers against
their exact reference distributions; `gadget` generates a hardness-reduction
graph from an exact-cover instance; `vcdim-check` evaluates the class
capacity bounds; `serve` runs `dedup` with the interactive human oracle and
hosts the labeling UI.

Every report is JSON with a top-level `version` field, written with sorted
keys so identical runs are byte-identical.  Errors leave on stderr as one
JSON object with a stable `code`.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path

from .core import ClusteringClass, load_dataset, load_flat_clustering, load_tree
from .erm import erm, query_budget_bound, required_sample_size
from .errors import DedupError, ParameterError, SchemaError
from .metrics import (
    DISTANCE_KINDS,
    DistanceModel,
    informativeness,
    lambda_sweep,
    load_distance_matrix,
)
from .oracle import InteractiveOracle, OracleSession, SimulatedOracle
from .pcc import GadgetParams, build_gadget, load_x3c, save_graph, solve_pcc_cliquecover
from .sampling import (
    build_neighbor_index,
    collect_sample,
    empirical_distribution,
    exact_reference_distribution,
    sample_negative,
    sample_positive,
    tv_distance,
)
from .server import OracleHttpServer
from .vcdim import class_vc_bound, vc_report

REPORT_VERSION = 1


def _seed_default() -> int:
    raw = os.environ.get("DEDUP_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise ParameterError(f"DEDUP_SEED must be an integer, got {raw!r}") from None


def _write_report(report: dict, path) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _class_files(sources):
    files = []
    for source in sources:
        p = Path(source)
        if p.is_dir():
            files.extend(sorted(p.glob("*.json")))
        else:
            files.append(p)
    return files


def _load_class(sources, dataset) -> ClusteringClass:
    flats, trees = [], []
    for path in _class_files(sources):
        with open(path, "r", encoding="utf-8") as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}: invalid JSON ({exc.msg})") from exc
        if isinstance(obj, dict) and "clusters" in obj:
            flats.append(load_flat_clustering(path, expected_ids=dataset.ids))
        elif isinstance(obj, dict) and ("leaf" in obj or "children" in obj):
            trees.append(load_tree(path, expected_ids=dataset.ids))
        else:
            raise SchemaError(f"{path}: neither a flat clustering nor a tree")
    cls = ClusteringClass(flats=flats, trees=trees)
    cls.validate_against(dataset.ids)
    return cls


def _build_model(args, dataset) -> DistanceModel:
    if args.distance == "precomputed":
        if not args.matrix:
            raise ParameterError("--distance precomputed needs --matrix")
        return load_distance_matrix(args.matrix, dataset)
    return DistanceModel(args.distance)


# ---------------------------------------------------------------------------
# dedup / serve


def _cmd_dedup(args, force_interactive: bool = False) -> int:
    dataset = load_dataset(args.data)
    if dataset.n < 2:
        raise ParameterError("dedup needs at least two records")
    cls = _load_class(args.clazz, dataset)
    model = _build_model(args, dataset)
    index = build_neighbor_index(dataset, model, args.lam)

    truth = dataset.truth_clustering() if dataset.has_ground_truth else None
    info = None
    if truth is not None:
        info = informativeness(
            dataset, model, args.lam, args.w1, args.w2, gamma=args.gamma
        )
    if args.mu is not None:
        mu = args.mu
    elif info is not None:
        mu = info.mu
    else:
        raise ParameterError("without ground truth, provide --mu explicitly")

    vc = class_vc_bound(cls)
    m_default = required_sample_size(vc, args.epsilon, args.delta, args.a)
    m_plus = args.m_plus if args.m_plus is not None else m_default
    m_minus = args.m_minus if args.m_minus is not None else m_default

    interactive = force_interactive or args.oracle == "interactive"
    server = None
    if interactive:
        backend = InteractiveOracle(
            dataset,
            timeout=args.timeout,
            log_path=args.answer_log,
            resume=args.resume,
        )
        server = OracleHttpServer(
            backend, dataset, host=args.host, port=args.port, ui_dir=args.ui_dir
        )
        server.start()
        sys.stderr.write(
            json.dumps({"listening": f"http://{args.host}:{server.port}"}) + "\n"
        )
        sys.stderr.flush()
    else:
        backend = SimulatedOracle(dataset)

    try:
        session = OracleSession(backend, cache=True, count_cached=args.count_cached)
        rng_neg = random.Random(f"{args.seed}:neg")
        rng_pos = random.Random(f"{args.seed}:pos")
        s_minus = collect_sample("negative", m_minus, dataset, session, rng_neg)
        s_plus = collect_sample("positive", m_plus, dataset, session, rng_pos, index=index)
        result = erm(cls, s_plus, s_minus, mu, truth=truth)
    finally:
        if server is not None:
            backend.close()
            server.stop()

    budget = failure = None
    if info is not None and info.beta > 0 and info.gamma < 1:
        budget, failure = query_budget_bound(
            m_plus, m_minus, info.beta, info.gamma, args.nu
        )

    report = {
        "version": REPORT_VERSION,
        "subcommand": "dedup",
        "config": {
            "data": str(args.data),
            "distance": args.distance,
            "lambda": args.lam,
            "w1": args.w1,
            "w2": args.w2,
            "epsilon": args.epsilon,
            "delta": args.delta,
            "a": args.a,
            "nu": args.nu,
            "seed": args.seed,
            "oracle": "interactive" if interactive else "simulated",
            "count_cached": bool(args.count_cached),
        },
        "dataset": {"n": dataset.n, "ground_truth": dataset.has_ground_truth},
        "class": {"flats": len(cls.flats), "trees": len(cls.trees), "vc_bound": vc},
        "parameters": info.as_json() if info is not None else {"mu": mu},
        "samples": {
            "m_plus": m_plus,
            "m_minus": m_minus,
            "queries_spent": result.queries_spent,
            "query_budget_bound": budget,
            "budget_failure_prob": failure,
        },
        "result": result.as_json(),
    }
    if args.lambda_sweep:
        report["lambda_sweep"] = lambda_sweep(dataset, model)
    _write_report(report, args.report)
    return 0


# ---------------------------------------------------------------------------
# sample-stats


def _cmd_sample_stats(args) -> int:
    dataset = load_dataset(args.data)
    if dataset.n < 2:
        raise ParameterError("sample-stats needs at least two records")
    model = _build_model(args, dataset)
    index = build_neighbor_index(dataset, model, args.lam)
    info = informativeness(dataset, model, args.lam, 1.0, 1.0)
    gamma0 = info.gamma0

    # Uncached sessions: every draw pays its oracle call, which is what the
    # per-sample query statistics are about.
    def fresh_session():
        return OracleSession(SimulatedOracle(dataset), cache=False)

    ref_neg = exact_reference_distribution("P-minus", dataset)
    ref_pos = exact_reference_distribution("K-plus-uniform", dataset, index=index)

    rng = random.Random(f"{args.seed}:stats-neg")
    session = fresh_session()
    draws = [sample_negative(dataset, session, rng) for _ in range(args.draws)]
    tv_neg = tv_distance(empirical_distribution(draws), ref_neg)

    rng = random.Random(f"{args.seed}:stats-pos")
    session = fresh_session()
    draws = [sample_positive(dataset, index, session, rng) for _ in range(args.draws)]
    tv_pos = tv_distance(empirical_distribution(draws), ref_pos)

    def mean_queries(kind: str) -> float:
        total = 0
        rng_local = random.Random(f"{args.seed}:stats-{kind}-mean")
        for _ in range(args.samples):
            s = fresh_session()
            collect_sample(
                kind,
                args.sample_size,
                dataset,
                s,
                rng_local,
                index=index if kind == "positive" else None,
            )
            total += s.query_count
        return total / (args.samples * args.sample_size)

    report = {
        "version": REPORT_VERSION,
        "subcommand": "sample-stats",
        "config": {
            "data": str(args.data),
            "distance": args.distance,
            "lambda": args.lam,
            "seed": args.seed,
            "draws": args.draws,
            "samples": args.samples,
            "sample_size": args.sample_size,
        },
        "parameters": info.as_json(),
        "negative": {
            "tv_to_reference": tv_neg,
            "mean_queries_per_accepted": mean_queries("negative"),
            "expected_queries_bound": 1.0 / (1.0 - gamma0),
        },
        "positive": {
            "tv_to_reference": tv_pos,
            "mean_queries_per_accepted": mean_queries("positive"),
            "expected_queries_bound": 1.0 / info.beta,
        },
    }
    _write_report(report, args.report)
    return 0


# ---------------------------------------------------------------------------
# gadget


def _cmd_gadget(args) -> int:
    params = GadgetParams(p=args.p, t=args.t)
    instance = load_x3c(args.x3c)
    build = build_gadget(instance, params)
    if args.out_graph:
        save_graph(build.graph, args.out_graph)
    if args.out_inclusion:
        _write_report(build.gadget_clustering(0, inclusion=True).as_json(), args.out_inclusion)
    if args.out_exclusion:
        _write_report(build.all_exclusion_clustering().as_json(), args.out_exclusion)
    report = {
        "version": REPORT_VERSION,
        "subcommand": "gadget",
        "config": {"x3c": str(args.x3c), "p": args.p, "t": args.t},
        "instance": {"q": instance.q, "m": instance.m},
        "stats": build.stats(),
    }
    if args.decide:
        cover = solve_pcc_cliquecover(build.graph, params.p)
        report["decision"] = "YES" if cover is not None else "NO"
    _write_report(report, args.report)
    return 0


# ---------------------------------------------------------------------------
# vcdim-check


def _cmd_vcdim_check(args) -> int:
    report = {
        "version": REPORT_VERSION,
        "subcommand": "vcdim-check",
        "report": vc_report(args.kind, args.s).as_json(),
    }
    _write_report(report, args.report)
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common_dedup_flags(sub):
    sub.add_argument("--data", required=True, help="JSON-lines dataset file")
    sub.add_argument(
        "--class",
        dest="clazz",
        required=True,
        nargs="+",
        help="clustering-class files or directories of .json files",
    )
    sub.add_argument("--lambda", dest="lam", type=float, required=True)
    sub.add_argument("--distance", choices=DISTANCE_KINDS, default="normalized-edit")
    sub.add_argument("--matrix", help="CSV id1,id2,distance for --distance precomputed")
    sub.add_argument("--w1", type=float, default=1.0)
    sub.add_argument("--w2", type=float, default=1.0)
    sub.add_argument("--epsilon", type=float, default=0.1)
    sub.add_argument("--delta", type=float, default=0.1)
    sub.add_argument("--a", type=float, default=1.0, help="sample-size constant")
    sub.add_argument("--nu", type=float, default=0.5, help="query-budget slack")
    sub.add_argument("--gamma", type=float, default=None, help="skew bound, defaults to exact")
    sub.add_argument("--mu", type=float, default=None, help="override the derived loss weight")
    sub.add_argument("--m-plus", type=int, default=None, help="override positive sample size")
    sub.add_argument("--m-minus", type=int, default=None, help="override negative sample size")
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--count-cached", action="store_true", help="count cache hits as queries")
    sub.add_argument("--lambda-sweep", action="store_true", help="add an alpha/beta grid to the report")
    sub.add_argument("--report", default=None, help="report file, stdout when omitted")
    sub.add_argument("--host", default="127.0.0.1")
    sub.add_argument("--port", type=int, default=7341)
    sub.add_argument("--ui-dir", default=None, help="static UI bundle to host")
    sub.add_argument("--timeout", type=float, default=None, help="seconds to wait per human answer")
    sub.add_argument("--answer-log", default=None, help="append-only JSON-lines answer log")
    sub.add_argument("--resume", action="store_true", help="preload answers from the log")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dedupcc",
        description="Record de-duplication by correlation clustering over a restricted class",
    )
    subs = parser.add_subparsers(dest="subcommand", required=True)

    dedup = subs.add_parser("dedup", help="run the full pipeline")
    _add_common_dedup_flags(dedup)
    dedup.add_argument("--oracle", choices=["simulated", "interactive"], default="simulated")

    serve = subs.add_parser("serve", help="dedup with the interactive oracle and UI")
    _add_common_dedup_flags(serve)

    stats = subs.add_parser("sample-stats", help="sampler diagnostics")
    stats.add_argument("--data", required=True)
    stats.add_argument("--lambda", dest="lam", type=float, required=True)
    stats.add_argument("--distance", choices=DISTANCE_KINDS, default="normalized-edit")
    stats.add_argument("--matrix", default=None)
    stats.add_argument("--draws", type=int, default=100000)
    stats.add_argument("--samples", type=int, default=200)
    stats.add_argument("--sample-size", type=int, default=100)
    stats.add_argument("--seed", type=int, default=None)
    stats.add_argument("--report", default=None)

    gadget = subs.add_parser("gadget", help="build a hardness-reduction graph")
    gadget.add_argument("--x3c", required=True, help="exact-cover instance file")
    gadget.add_argument("--p", type=int, default=4)
    gadget.add_argument("--t", type=int, default=2)
    gadget.add_argument("--out-graph", default=None)
    gadget.add_argument("--out-inclusion", default=None)
    gadget.add_argument("--out-exclusion", default=None)
    gadget.add_argument("--decide", action="store_true", help="run the clique-cover decision")
    gadget.add_argument("--report", default=None)

    vc = subs.add_parser("vcdim-check", help="class capacity bound")
    vc.add_argument("--kind", choices=["flat", "tree"], required=True)
    vc.add_argument("--s", type=int, required=True)
    vc.add_argument("--report", default=None)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "seed", None) is None:
            args.seed = _seed_default()
        if args.subcommand == "dedup":
            return _cmd_dedup(args)
        if args.subcommand == "serve":
            return _cmd_dedup(args, force_interactive=True)
        if args.subcommand == "sample-stats":
            return _cmd_sample_stats(args)
        if args.subcommand == "gadget":
            return _cmd_gadget(args)
        if args.subcommand == "vcdim-check":
            return _cmd_vcdim_check(args)
        parser.error(f"unknown subcommand {args.subcommand!r}")
    except DedupError as exc:
        sys.stderr.write(json.dumps(exc.to_json()) + "\n")
        return 2
    except OSError as exc:
        sys.stderr.write(json.dumps({"code": "io", "message": str(exc)}) + "\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
