#!/usr/bin/env python3
"""Refit the banded-classifier boundaries from a pipeline output directory.

Reads every *_out1_features.json under --run-dir, groups permutation entropy
and Petrosian dimension by the waveform shape encoded in the file name, and
places band edges at the midpoints between adjacent shape means (sine ->
triangle -> square).  The square detector edge goes halfway between the
largest non-square Petrosian value and the smallest square one.  Edges are
nudged apart if the corpus does not actually separate the classes, so the
emitted file is always valid for the classifier's ordering checks.
"""

import argparse
import json
import statistics
from pathlib import Path

SHAPES = ("sine", "triangle", "square")
MIN_BAND = 1e-4


def collect(run_dir: Path):
    sp = {s: [] for s in SHAPES}
    dp = {s: [] for s in SHAPES}
    for path in sorted(run_dir.glob("*_out1_features.json")):
        shape = path.name.split("_", 1)[0]
        if shape not in SHAPES:
            raise SystemExit(f"unrecognized shape prefix in {path.name}")
        fv = json.loads(path.read_text())
        sp[shape].append(float(fv["perm_entropy"]))
        dp[shape].append(float(fv["petrosian_fd"]))
    for s in SHAPES:
        if not sp[s]:
            raise SystemExit(f"no feature files for shape '{s}' under {run_dir}")
    return sp, dp


def fit(sp, dp):
    means = {s: statistics.mean(sp[s]) for s in SHAPES}
    sine_max = 0.5 * (means["sine"] + means["triangle"])
    triangle_max = 0.5 * (means["triangle"] + means["square"])
    if triangle_max - sine_max < MIN_BAND:
        mid = 0.5 * (sine_max + triangle_max)
        sine_max, triangle_max = mid - 0.5 * MIN_BAND, mid + 0.5 * MIN_BAND

    non_square_dp = max(max(dp["sine"]), max(dp["triangle"]))
    square_min = 0.5 * (non_square_dp + min(dp["square"]))

    return {
        "version": 1,
        "sp_sine_max": round(sine_max, 6),
        "sp_triangle_max": round(triangle_max, 6),
        "dp_square_min": round(square_min, 6),
        "conf_scale_sp": round(max(0.5 * (triangle_max - sine_max), 0.01), 6),
        "conf_scale_dp": round(max(0.1 * abs(square_min - non_square_dp), 0.001), 6),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--run-dir", type=Path, required=True,
                    help="pipeline output directory holding *_out1_features.json")
    ap.add_argument("--out", type=Path,
                    default=Path(__file__).resolve().parent.parent
                    / "share" / "calibration" / "classifier_thresholds.json")
    args = ap.parse_args()

    thresholds = fit(*collect(args.run_dir))
    args.out.write_text(json.dumps(thresholds, indent=2) + "\n")
    print(f"wrote {args.out}")
    for k, v in thresholds.items():
        print(f"  {k} = {v}")


if __name__ == "__main__":
    main()
