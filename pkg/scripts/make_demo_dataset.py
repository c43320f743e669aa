#!/usr/bin/env python3
"""Build a small synthetic manifest dataset on disk for CLI experiments."""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from twseg import io  # noqa: E402
from twseg.synth import SynthSpec, generate  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir", help="directory to create the dataset in")
    parser.add_argument("--videos-per-activity", type=int, default=3)
    parser.add_argument("--activities", type=int, default=2)
    parser.add_argument("--frames", type=int, default=600)
    parser.add_argument("--dims", type=int, default=64)
    parser.add_argument("--background-frac", type=float, default=0.2)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    seed = args.seed
    for a in range(args.activities):
        k = 4 + a  # a different action count per activity
        for v in range(args.videos_per_activity):
            vid = f"act{a}_vid{v}"
            seq, gt = generate(SynthSpec(
                k=k, n=args.frames, d=args.dims, seed=seed,
                background_frac=args.background_frac, background_label="SIL",
            ))
            io.save_features(seq, out / f"{vid}.bin")
            (out / f"{vid}.txt").write_text(
                "".join(f"{gt.label_names[i]}\n" for i in gt.labels)
            )
            entries.append({"video_id": vid, "activity": f"act{a}",
                            "feature_path": f"{vid}.bin", "label_path": f"{vid}.txt"})
            seed += 1

    manifest = out / "manifest.json"
    manifest.write_text(json.dumps(
        {"entries": entries, "background_label": "SIL"}, indent=2
    ) + "\n")
    print(f"wrote {len(entries)} videos and {manifest}")
    print(f"try: twseg segment --manifest {manifest} --output-dir {out / 'pred'}")
    print(f"     twseg eval --manifest {manifest} --pred-dir {out / 'pred'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
