"""Command-line front end: synth -> stats -> transform -> evaluate.

All configuration comes from explicit flags (no environment variables), and
every command overwrites its outputs with identical bytes when rerun with an
identical config and seed, regardless of --threads. Timings are printed to
stdout only, never written into output files.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .features import concat_features, feature_matrix
from .graphs import TIERS
from .ingest import (
    FORMS,
    SIZE_PROFILES,
    dataset_stats,
    generate_synthetic_dataset,
    load_dataset,
    save_dataset,
    stats_table,
)
from .ml import EvalReport, ForestConfig, evaluate
from .transforms import BUILDERS, VARIANTS, require_attributes


def _map_graphs(fn, graphs, threads: int):
    """Apply fn per graph; results keep input order for any thread count."""
    if threads > 1 and len(graphs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, graphs))
    return [fn(g) for g in graphs]


def _dedup(variants):
    seen = []
    for v in variants:
        if v not in seen:
            seen.append(v)
    return seen


def cmd_synth(args) -> int:
    manifest = generate_synthetic_dataset(
        profile=args.profile, n_per_class=args.per_class, seed=args.seed
    )
    out = save_dataset(manifest, args.out)
    print(f"wrote {manifest.n_graphs} graphs to {out}")
    return 0


def cmd_stats(args) -> int:
    name = Path(args.dataset).name
    per_tier = {}
    for tier in TIERS:
        manifest = load_dataset(args.dataset, tier=tier, form=args.form)
        per_tier[tier] = dataset_stats(manifest)
    print(stats_table(name, args.form, per_tier))
    return 0


def cmd_transform(args) -> int:
    variants = _dedup(args.variant)
    if not variants:
        return 0
    manifest = load_dataset(args.dataset, tier=args.tier, form=args.form)
    probe = manifest.graphs[0]
    for variant in variants:
        require_attributes(probe, variant)  # fail before any file is written
    out = Path(args.out)
    for variant in variants:
        builder = BUILDERS[variant]
        started = time.perf_counter()
        mapped = _map_graphs(builder, manifest.graphs, args.threads)
        elapsed = time.perf_counter() - started
        variant_dir = out / variant
        variant_dir.mkdir(parents=True, exist_ok=True)
        width = max(4, len(str(len(mapped) - 1)))
        with open(variant_dir / "summary.csv", "w", encoding="utf-8", newline="") as sfh:
            sfh.write("graph_id,nodes,edges\n")
            for i, t in enumerate(mapped):
                graph_id = f"graph_{i:0{width}d}"
                sfh.write(f"{graph_id},{t.node_count},{t.edge_count}\n")
                with open(
                    variant_dir / f"{graph_id}.csv", "w", encoding="utf-8", newline=""
                ) as fh:
                    fh.write("from_tx,to_tx,weight\n")
                    for a, b, w in t.edges:
                        fh.write(f"{a},{b},{format(w, '.12g')}\n")
        total_nodes = sum(t.node_count for t in mapped)
        total_edges = sum(t.edge_count for t in mapped)
        print(
            f"{variant}: graphs={len(mapped)} nodes={total_nodes} "
            f"edges={total_edges} seconds={elapsed:.3f}"
        )
    return 0


def _report_rows(reports: list[EvalReport]) -> list[str]:
    rows = ["dataset,variant,mean_f1,std_f1,n_repeats,pct_increase_vs_tn,seed"]
    for r in reports:
        pct = "" if r.pct_increase is None else f"{r.pct_increase:.4f}"
        rows.append(
            f"{r.dataset},{r.variant},{r.mean_f1:.6f},{r.std_f1:.6f},"
            f"{r.n_repeats},{pct},{r.seed}"
        )
    return rows


def cmd_evaluate(args) -> int:
    variants = _dedup(args.variant)
    manifest = load_dataset(args.dataset, tier=args.tier, form=args.form)
    name = Path(args.dataset).name
    probe = manifest.graphs[0]
    for variant in variants:
        require_attributes(probe, variant)
    config = ForestConfig(n_trees=args.trees, seed=args.seed)
    labels = manifest.labels
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tn = feature_matrix(manifest.graphs, labels, variant="tn", threads=args.threads)
    tn.to_csv(out / "features_tn.csv")
    tn_report = evaluate(
        tn, config, n_repeats=args.repeats, dataset_name=name, variant="tn"
    )
    reports = [tn_report]
    for variant in variants:
        mapped = _map_graphs(BUILDERS[variant], manifest.graphs, args.threads)
        mapped_matrix = feature_matrix(mapped, labels, variant=variant, threads=args.threads)
        mapped_matrix.to_csv(out / f"features_{variant}.csv")
        fused = concat_features(tn, mapped_matrix)
        report = evaluate(
            fused,
            config,
            n_repeats=args.repeats,
            pca_dim=tn.n_columns,
            dataset_name=name,
            variant=f"tn+{variant}",
        ).with_baseline(tn_report)
        reports.append(report)
    rows = _report_rows(reports)
    (out / "report.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    text = _render_report(reports)
    (out / "report.txt").write_text(text + "\n", encoding="utf-8")
    print(text)
    return 0


def _render_report(reports: list[EvalReport]) -> str:
    headers = ["dataset", "variant", "mean_f1", "std_f1", "repeats", "%increase", "seed"]
    table = [headers]
    for r in reports:
        table.append(
            [
                r.dataset,
                r.variant,
                f"{r.mean_f1:.4f}",
                f"{r.std_f1:.4f}",
                str(r.n_repeats),
                "-" if r.pct_increase is None else f"{r.pct_increase:+.2f}%",
                str(r.seed),
            ]
        )
    widths = [max(len(row[i]) for row in table) for i in range(len(headers))]
    return "\n".join("  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in table)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsgn",
        description="Transaction subgraph networks: synthesize, inspect, map, evaluate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="write a synthetic labeled dataset directory")
    synth.add_argument("--profile", default="etherg1", choices=sorted(SIZE_PROFILES))
    synth.add_argument("--per-class", type=int, default=350)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--out", required=True)
    synth.set_defaults(func=cmd_synth)

    stats = sub.add_parser("stats", help="print dataset statistics for all tiers")
    stats.add_argument("--dataset", required=True)
    stats.add_argument("--form", default="net", choices=FORMS)
    stats.set_defaults(func=cmd_stats)

    transform = sub.add_parser("transform", help="write mapped subgraph networks")
    transform.add_argument("--dataset", required=True)
    transform.add_argument(
        "--variant", action="append", default=[], choices=VARIANTS,
        help="repeatable; one output directory per variant",
    )
    transform.add_argument("--tier", default="directed", choices=TIERS)
    transform.add_argument("--form", default="net", choices=FORMS)
    transform.add_argument("--out", required=True)
    transform.add_argument("--threads", type=int, default=1)
    transform.set_defaults(func=cmd_transform)

    ev = sub.add_parser("evaluate", help="run the classification protocol")
    ev.add_argument("--dataset", required=True)
    ev.add_argument(
        "--variant", action="append", default=[], choices=VARIANTS,
        help="repeatable; each is fused with the original features",
    )
    ev.add_argument("--tier", default="directed", choices=TIERS)
    ev.add_argument("--form", default="net", choices=FORMS)
    ev.add_argument("--repeats", type=int, default=300)
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--trees", type=int, default=100)
    ev.add_argument("--out", required=True)
    ev.add_argument("--threads", type=int, default=1)
    ev.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
