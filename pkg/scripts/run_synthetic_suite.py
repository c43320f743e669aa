#!/usr/bin/env python3
"""Compare all four methods on the seeded synthetic suite.

Prints a MoF/IoU table over the plain half (distinct visual classes) and the
repeated-class half (one class occurs twice, where purely visual clustering
merges the repeats).
"""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import twseg  # noqa: E402
from twseg.baselines import KmeansConfig, equal_split, finch, kmeans  # noqa: E402
from twseg.evaluate import evaluate_pair  # noqa: E402
from twseg.synth import SynthSpec, generate  # noqa: E402


def suite_spec(seed: int, repeated: bool) -> SynthSpec:
    k = 4 + seed % 7
    pattern = None
    if repeated:
        pattern = tuple(f"c{i}" for i in range(k - 1)) + ("c0",)
    return SynthSpec(k=k, n=800, sep=8.0, seed=seed,
                     repeat_pattern=pattern, length_alpha=8.0)


def run_method(name: str, seq, k: int, seed: int):
    if name == "twfinch":
        return twseg.segment(seq, k).partition
    if name == "finch":
        return finch(seq, k)[1]
    if name == "kmeans":
        return kmeans(seq, KmeansConfig(k=k, seed=seed))
    return equal_split(seq.n, k)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=50)
    args = parser.parse_args()

    methods = ("equalsplit", "kmeans", "finch", "twfinch")
    for half, repeated in (("plain", False), ("repeated-class", True)):
        scores = {m: {"mof": [], "iou": []} for m in methods}
        for seed in range(args.seeds):
            spec = suite_spec(seed, repeated)
            seq, gt = generate(spec)
            for m in methods:
                rep = evaluate_pair(run_method(m, seq, spec.k, seed), gt)
                scores[m]["mof"].append(rep.mof)
                scores[m]["iou"].append(rep.iou)
        print(f"\n{half} half ({args.seeds} seeds, k = 4 + seed % 7, N = 800):")
        print(f"  {'method':<12} {'MoF':>8} {'IoU':>8}")
        for m in methods:
            print(f"  {m:<12} {np.mean(scores[m]['mof']):8.4f} "
                  f"{np.mean(scores[m]['iou']):8.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
