"""Command-line interface: segment, eval, bench, plot, synth."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import baselines, bench, io, plot, refine
from .errors import InputError, OutputError, TwsegError
from .evaluate import (
    aggregate,
    background_keep_indices,
    evaluate_pair,
    filter_background,
    match_across_videos,
)
from .synth import SynthSpec, generate
from .types import GroundTruth, Partition, relabel_dense

METHODS = ("twfinch", "finch", "kmeans", "equalsplit")
EXIT_OK, EXIT_INPUT, EXIT_OUTPUT, EXIT_INTERNAL = 0, 2, 3, 4


def _workers_default() -> int:
    try:
        return max(1, int(os.environ.get("TWSEG_WORKERS", "1")))
    except ValueError:
        return 1


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def _dump_json(path: Path, doc) -> None:
    _write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------- segment

def _segment_one(seq, k: int, method: str, args) -> tuple[Partition, bool]:
    if method == "twfinch":
        res = refine.segment(seq, k)
        return res.partition, res.fallback
    if method == "finch":
        _, p = baselines.finch(seq, k)
        return p, p.num_clusters != k
    if method == "kmeans":
        cfg = baselines.KmeansConfig(
            k=k, max_iters=args.kmeans_iters, seed=args.seed, restarts=args.kmeans_restarts
        )
        return baselines.kmeans(seq, cfg), False
    if method == "equalsplit":
        return baselines.equal_split(seq.n, k), False
    raise InputError(f"unknown method {method!r}")


def cmd_segment(args) -> int:
    out_dir = Path(args.output_dir)
    if args.features:
        if args.k is None:
            raise InputError("--features mode requires an explicit --k")
        if args.tau is not None:
            raise InputError("--tau needs ground-truth labels; use --manifest")
        seq = io.load_features(args.features)
        p, fallback = _segment_one(seq, args.k, args.method, args)
        out = out_dir / f"{seq.video_id}.seg"
        _save_partition(p, out)
        records = [_segment_record(seq.video_id, args.k, p, fallback, out)]
    else:
        manifest = io.load_manifest(args.manifest)
        # Activity-average K is the default policy for manifest-driven runs.
        use_activity_avg = args.k_activity_avg or (
            args.k is None and not args.k_per_video_gt
        )
        activity_k = io.compute_activity_k(manifest) if use_activity_avg else {}

        def run(entry):
            seq = io.load_features(entry.feature_path)
            gt = io.load_labels(entry.label_path, manifest.background_label)
            if seq.n != gt.n:
                raise InputError(
                    f"{entry.video_id}: {seq.n} frames but {gt.n} labels"
                )
            keep = None
            if args.tau is not None:
                seq, gt, keep = filter_background(seq, gt, args.tau, args.seed)
            if entry.k_override is not None:
                k = entry.k_override
            elif args.k is not None:
                k = args.k
            elif args.k_per_video_gt:
                k = gt.distinct_count(include_background=manifest.k_counts_background)
            else:
                k = activity_k[entry.activity]
            p, fallback = _segment_one(seq, k, args.method, args)
            return entry.video_id, k, p, fallback, keep

        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(run, manifest.entries))

        records = []
        for video_id, k, p, fallback, keep in results:
            out = out_dir / f"{video_id}.seg"
            _save_partition(p, out)
            if keep is not None:
                _save_indices(keep, out_dir / f"{video_id}.keep")
            records.append(_segment_record(video_id, k, p, fallback, out))

    summary = {
        "method": args.method,
        "tau": args.tau,
        "seed": args.seed,
        "videos": records,
    }
    _dump_json(out_dir / "run_summary.json", summary)
    for rec in records:
        flag = " (fallback: k unreachable)" if rec["fallback"] else ""
        print(f"{rec['video_id']}: {rec['num_clusters']} clusters -> "
              f"{out_dir / rec['path']}{flag}")
    return EXIT_OK


def _segment_record(video_id, k, p, fallback, out) -> dict:
    return {
        "video_id": video_id,
        "k": int(k),
        "num_clusters": p.num_clusters,
        "n_frames": p.n,
        "fallback": bool(fallback),
        "path": out.name,  # relative to the summary's directory
    }


def _save_partition(p: Partition, path: Path) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        io.save_partition(p, path)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def _save_indices(indices, path: Path) -> None:
    try:
        io.save_indices(indices, path)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


# ------------------------------------------------------------------- eval

def _apply_tau_to_full_length(pred: Partition, gt: GroundTruth, args,
                              who: str) -> tuple[Partition, GroundTruth]:
    """Subsample a full-length prediction with the same filter as the gt."""
    if pred.n != gt.n:
        raise InputError(
            f"{who}: --tau on full-length predictions requires {gt.n} rows, found {pred.n}"
        )
    keep = background_keep_indices(gt, args.tau, args.seed)
    gt_f = GroundTruth(gt.labels[keep], gt.label_names, gt.background_label)
    return relabel_dense(np.asarray(pred.labels)[keep]), gt_f


def _load_eval_item(entry, manifest, pred_dir: Path, args, table):
    gt = io.load_labels(entry.label_path, manifest.background_label, table)
    pred_path = pred_dir / f"{entry.video_id}.seg"
    if not pred_path.is_file():
        raise InputError(f"{entry.video_id}: missing prediction {pred_path}")
    pred = io.load_partition(pred_path)
    keep_path = pred_dir / f"{entry.video_id}.keep"
    if keep_path.is_file():  # predictions were made on pre-filtered frames
        keep = io.load_indices(keep_path)
        if pred.n != keep.size:
            raise InputError(
                f"{entry.video_id}: {pred.n} predictions but {keep.size} kept frames"
            )
        gt = GroundTruth(gt.labels[keep], gt.label_names, gt.background_label)
    elif args.tau is not None:
        pred, gt = _apply_tau_to_full_length(pred, gt, args, entry.video_id)
    if pred.n != gt.n:
        raise InputError(f"{entry.video_id}: {pred.n} predictions vs {gt.n} labels")
    return entry.video_id, entry.activity, pred, gt


def cmd_eval(args) -> int:
    if args.pred:
        if not args.labels:
            raise InputError("--pred mode requires --labels")
        gt = io.load_labels(args.labels, args.background_label)
        pred = io.load_partition(args.pred)
        if args.tau is not None:
            pred, gt = _apply_tau_to_full_length(pred, gt, args, str(args.pred))
        elif pred.n != gt.n:
            raise InputError(f"{args.pred}: {pred.n} predictions vs {gt.n} labels")
        items = [(Path(args.pred).stem, "all", pred, gt)]
    else:
        manifest = io.load_manifest(args.manifest)
        pred_dir = Path(args.pred_dir)
        tables: dict[str, tuple[str, ...]] = {}
        pinned = manifest.label_table()
        items = []
        for entry in manifest.entries:  # sequential: activity tables grow in order
            table = pinned if pinned is not None else tables.get(entry.activity)
            item = _load_eval_item(entry, manifest, pred_dir, args, table)
            tables[entry.activity] = item[3].label_names
            items.append(item)

    mappings: dict[str, dict[int, int]] = {}
    if args.match_per_activity:
        by_activity: dict[str, list] = {}
        for item in items:
            by_activity.setdefault(item[1], []).append(item)
        for activity, group in by_activity.items():
            mappings[activity] = match_across_videos([(p, g) for _, _, p, g in group])

    reports = []
    for video_id, activity, pred, gt in items:
        mapping = mappings.get(activity) if args.match_per_activity else None
        reports.append((video_id, gt, evaluate_pair(pred, gt, mapping, args.f1_average)))

    agg = aggregate([r for _, _, r in reports], args.aggregate)
    for video_id, gt, rep in reports:
        print(_report_line(f"video {video_id}", rep))
    print(_report_line(f"aggregate ({args.aggregate})", agg))

    if args.json:
        doc = {
            "config": {
                "aggregate": args.aggregate,
                "f1_average": args.f1_average,
                "match_per_activity": bool(args.match_per_activity),
                "seed": args.seed,
                "tau": args.tau,
            },
            "videos": [
                {"video_id": vid, **rep.as_dict(gt.label_names)}
                for vid, gt, rep in reports
            ],
            "aggregate": agg.as_dict(),
        }
        _dump_json(Path(args.json), doc)
    return EXIT_OK


def _report_line(prefix: str, rep) -> str:
    return (
        f"{prefix}: mof {rep.mof:.4f} iou {rep.iou:.4f} f1 {rep.f1:.4f} "
        f"midpoint_p {rep.midpoint_precision:.4f} midpoint_r {rep.midpoint_recall:.4f} "
        f"purity {rep.purity:.4f}"
    )


# ------------------------------------------------------------------ bench

def cmd_bench(args) -> int:
    sizes = tuple(int(s) for s in args.sizes.split(","))
    result = bench.run_scaling_benchmark(
        sizes=sizes, dims=args.dims, k=args.k, repeats=args.repeats, seed=args.seed
    )
    for n, seconds in result.rows():
        print(f"n={n:>6d}  {seconds * 1000:10.1f} ms")
    print(f"log-log slope: {result.slope:.3f}")
    if args.json:
        _dump_json(Path(args.json), {
            "dims": result.dims,
            "k": result.k,
            "sizes": list(result.sizes),
            "seconds": list(result.seconds),
            "slope": result.slope,
        })
    return EXIT_OK


# ------------------------------------------------------------------- plot

def cmd_plot(args) -> int:
    gt = io.load_labels(args.labels, args.background_label)
    names = args.names.split(",") if args.names else []
    tracks = []
    for i, pred_path in enumerate(args.pred):
        pred = io.load_partition(pred_path)
        if pred.n != gt.n:
            raise InputError(f"{pred_path}: {pred.n} predictions vs {gt.n} labels")
        name = names[i] if i < len(names) else Path(pred_path).stem
        tracks.append((name, pred))
    _write_text(Path(args.out), plot.render_segmentation_svg(tracks, gt))
    print(f"wrote {args.out}")
    return EXIT_OK


# ------------------------------------------------------------------ synth

def cmd_synth(args) -> int:
    pattern = tuple(args.repeat_pattern.split()) if args.repeat_pattern else None
    k = args.k if args.k is not None else (len(pattern) if pattern else 4)
    spec = SynthSpec(
        k=k, n=args.n, d=args.dims, sep=args.sep, noise_sigma=args.noise_sigma,
        background_frac=args.background_frac, repeat_pattern=pattern, seed=args.seed,
        background_label=args.background_label,
    )
    seq, gt = generate(spec)
    try:
        Path(args.out_features).parent.mkdir(parents=True, exist_ok=True)
        io.save_features(seq, args.out_features, fmt=args.format)
        tokens = [gt.label_names[i] for i in gt.labels]
        Path(args.out_labels).write_text("".join(f"{t}\n" for t in tokens))
    except OSError as exc:
        raise OutputError(f"cannot write outputs: {exc}") from exc
    print(f"wrote {seq.n} frames x {seq.dim} dims to {args.out_features}, "
          f"{gt.num_labels} labels to {args.out_labels}")
    return EXIT_OK


# ----------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twseg",
        description="Training-free temporal action segmentation and evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    seg = sub.add_parser("segment", help="cluster frames into K segments")
    src = seg.add_mutually_exclusive_group(required=True)
    src.add_argument("--features", help="single feature file (binary or .csv)")
    src.add_argument("--manifest", help="dataset manifest JSON")
    kpol = seg.add_mutually_exclusive_group()
    kpol.add_argument("--k", type=int, help="fixed cluster count")
    kpol.add_argument("--k-per-video-gt", action="store_true",
                      help="K = distinct ground-truth labels per video")
    kpol.add_argument("--k-activity-avg", action="store_true",
                      help="K = rounded mean action count of the video's activity "
                           "(default for manifest runs)")
    seg.add_argument("--method", choices=METHODS, default="twfinch")
    seg.add_argument("--output-dir", default=".")
    seg.add_argument("--tau", type=float, default=None,
                     help="fraction of background frames to remove before clustering")
    seg.add_argument("--seed", type=int, default=0)
    seg.add_argument("--workers", type=int, default=_workers_default(),
                     help="parallel videos (default: TWSEG_WORKERS or 1)")
    seg.add_argument("--kmeans-iters", type=int, default=100)
    seg.add_argument("--kmeans-restarts", type=int, default=10)
    seg.set_defaults(func=cmd_segment)

    ev = sub.add_parser("eval", help="score predictions against ground truth")
    esrc = ev.add_mutually_exclusive_group(required=True)
    esrc.add_argument("--manifest", help="dataset manifest JSON (with --pred-dir)")
    esrc.add_argument("--pred", help="single partition file (with --labels)")
    ev.add_argument("--pred-dir", default=".", help="directory of <video_id>.seg files")
    ev.add_argument("--labels", help="ground-truth label file for --pred mode")
    ev.add_argument("--background-label", default="SIL")
    ev.add_argument("--tau", type=float, default=None)
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--match-per-activity", action="store_true",
                    help="pool overlaps across each activity before matching")
    ev.add_argument("--aggregate", choices=("video", "frame"), default="video")
    ev.add_argument("--f1-average", choices=("micro", "macro"), default="micro")
    ev.add_argument("--json", help="also write a JSON report here")
    ev.set_defaults(func=cmd_eval)

    be = sub.add_parser("bench", help="time the pipeline across sequence lengths")
    be.add_argument("--sizes", default=",".join(str(s) for s in bench.DEFAULT_SIZES))
    be.add_argument("--dims", type=int, default=64)
    be.add_argument("--k", type=int, default=2)
    be.add_argument("--repeats", type=int, default=3)
    be.add_argument("--seed", type=int, default=0)
    be.add_argument("--json", help="write timings as JSON here")
    be.set_defaults(func=cmd_bench)

    pl = sub.add_parser("plot", help="render segmentation color bars as SVG")
    pl.add_argument("--labels", required=True, help="ground-truth label file")
    pl.add_argument("--pred", action="append", required=True,
                    help="partition file (repeat for several methods)")
    pl.add_argument("--names", help="comma-separated display names for --pred files")
    pl.add_argument("--background-label", default="SIL")
    pl.add_argument("--out", required=True, help="output SVG path")
    pl.set_defaults(func=cmd_plot)

    sy = sub.add_parser("synth", help="generate a synthetic feature/label pair")
    sy.add_argument("--k", type=int, default=None,
                    help="planted run count (default 4, or the repeat-pattern length)")
    sy.add_argument("--n", type=int, default=800)
    sy.add_argument("--dims", type=int, default=64)
    sy.add_argument("--sep", type=float, default=8.0)
    sy.add_argument("--noise-sigma", type=float, default=1.0)
    sy.add_argument("--background-frac", type=float, default=0.0)
    sy.add_argument("--repeat-pattern", help='space-separated classes, e.g. "A B A"')
    sy.add_argument("--seed", type=int, default=0)
    sy.add_argument("--background-label", default="BG")
    sy.add_argument("--format", choices=("binary", "csv"), default="binary")
    sy.add_argument("--out-features", required=True)
    sy.add_argument("--out-labels", required=True)
    sy.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if (getattr(args, "command", None) == "segment" and args.features
            and args.k is None and (args.k_per_video_gt or args.k_activity_avg)):
        print("segment: ground-truth-driven K policies need --manifest; "
              "use --k N with --features", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TwsegError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
