#!/usr/bin/env python3
"""Convert a CSV feature file (one frame per line) to the binary format."""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from twseg import io  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv_path", help="input CSV feature file")
    parser.add_argument("bin_path", help="output binary feature file")
    args = parser.parse_args()
    seq = io.load_features(args.csv_path)
    io.save_features(seq, args.bin_path, fmt="binary")
    print(f"{args.csv_path} ({seq.n} frames x {seq.dim} dims) -> {args.bin_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
