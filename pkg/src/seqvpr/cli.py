"""Command-line interface.

Subcommands:
    run     execute a configured sweep and write reports/plots
    synth   generate a synthetic descriptor dataset (files + gt + config)
    encode  HOG-encode an image directory into an SVPR1 descriptor file
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .dataset import generate_synthetic, load_image_set, write_ground_truth_csv
from .descriptor import encode_set, export_descriptors
from .harness import (
    FULL_K_VALUES,
    PAPER_K_VALUES,
    emit_reports,
    load_config,
    run_experiment,
)


def _add_run(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("run", help="run a (technique x dataset x K) sweep")
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--k-sweep", choices=["paper", "full"],
                   help="override K grid: paper={1,2,5,10,15}, full=1..15")
    p.add_argument("--cost-model", choices=["naive", "cached"],
                   help="sequence encoding cost model for PCU")
    p.add_argument("--out", help="output directory (overrides config)")
    p.add_argument("--seed", type=int, help="seed recorded in outputs")
    p.add_argument("--gt-tolerance", type=int,
                   help="frame tolerance for aligned ground truth")


def _add_synth(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("synth", help="emit a synthetic descriptor dataset")
    p.add_argument("--places", type=int, required=True, help="number of places N")
    p.add_argument("--dim", type=int, required=True, help="descriptor dimensionality")
    p.add_argument("--sigma", type=float, required=True, help="query noise sigma")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")


def _add_encode(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("encode", help="HOG-encode an image directory to SVPR1")
    p.add_argument("--dataset", required=True, help="directory of PNG/JPEG frames")
    p.add_argument("--out", required=True, help="output SVPR1 file")
    p.add_argument("--manifest", help="manifest path (default: <out>.manifest.json)")


def cmd_run(args: argparse.Namespace) -> int:
    k_values = {"paper": PAPER_K_VALUES, "full": FULL_K_VALUES, None: None}[args.k_sweep]
    config = load_config(
        args.config,
        k_values=k_values,
        cost_model=args.cost_model,
        output_dir=args.out,
        seed=args.seed,
        gt_tolerance=args.gt_tolerance,
    )
    result = run_experiment(config)
    emit_reports(result, config.output_dir)
    for s in result.skipped:
        cell = f"{s.dataset}/{s.technique}" + (f"/k={s.k}" if s.k is not None else "")
        print(f"skipped {cell}: {s.reason}", file=sys.stderr)
    print(f"{'dataset':<16} {'technique':<14} {'k':>3} {'auc':>8} {'p_r100':>8} "
          f"{'pcu':>8} {'boost%':>8}")
    for r in result.reports:
        pcu_s = f"{r.pcu:.4f}" if r.pcu is not None else "n/a"
        boost_s = f"{r.boost_pct_vs_k1:.2f}" if r.boost_pct_vs_k1 is not None else "n/a"
        print(f"{r.dataset_name:<16} {r.technique_name:<14} {r.k:>3} {r.auc:>8.4f} "
              f"{r.p_r100:>8.4f} {pcu_s:>8} {boost_s:>8}")
    print(f"wrote reports to {config.output_dir}")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    queries, refs, gt = generate_synthetic(args.places, args.dim, args.sigma, args.seed)
    export_descriptors(out / "query.svpr", queries, out / "manifest.json")
    export_descriptors(out / "ref.svpr", refs)
    write_ground_truth_csv(gt, out / "gt.csv")
    config = {
        "datasets": [{"name": "synthetic", "gt": "gt.csv"}],
        "techniques": [{
            "name": "synthetic", "kind": "import",
            "data": {"synthetic": {"query": "query.svpr", "ref": "ref.svpr",
                                   "manifest": "manifest.json"}},
        }],
        "k_values": PAPER_K_VALUES,
        "cost_model": "naive",
        "output_dir": "out",
        "seed": args.seed,
    }
    (out / "config.json").write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")
    print(f"wrote synthetic dataset ({args.places} places, dim {args.dim}, "
          f"sigma {args.sigma}) to {out}")
    return 0


def cmd_encode(args: argparse.Namespace) -> int:
    images = load_image_set(args.dataset)
    descriptors = encode_set(images)
    manifest = Path(args.manifest) if args.manifest else Path(args.out + ".manifest.json")
    export_descriptors(args.out, descriptors, manifest)
    print(f"encoded {len(images)} frames (dim {descriptors.dim}, "
          f"{descriptors.encode_time_per_frame:.4f} s/frame) to {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="seqvpr",
        description="Sequence-based filtering and evaluation for visual place recognition",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_run(sub)
    _add_synth(sub)
    _add_encode(sub)
    args = parser.parse_args(argv)
    handler = {"run": cmd_run, "synth": cmd_synth, "encode": cmd_encode}[args.command]
    try:
        return handler(args)
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
