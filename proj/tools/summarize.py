#!/usr/bin/env python3
"""Recompute aggregates from tomsim CSV output, independently of summary.json.

Usage:
  tools/summarize.py OUTDIR            # summarize every *.csv in OUTDIR
  tools/summarize.py path/to/trace.csv # summarize one file

Groups rows by (delta, omega, seed) into episodes, then reports per
(delta, omega) cell: episode count, cumulative and per-trial rewards for both
players, trigger rate, mean first trigger trial, and the false-belief rate
(trials where the modal belief misses the true type; the true type is not in
the CSV, so the rate is reported against the modal-type-switch proxy only when
--true-type is given). Exits non-zero if a CSV is malformed.
"""
import argparse
import csv
import json
import math
import statistics
import sys
from collections import defaultdict
from pathlib import Path


def load_episodes(path):
    episodes = defaultdict(list)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        need = {"seed", "delta", "omega", "trial", "reward_a", "reward_b"}
        missing = need - set(reader.fieldnames or ())
        if missing:
            raise SystemExit(f"{path}: missing columns {sorted(missing)}")
        for row in reader:
            key = (float(row["delta"]), float(row["omega"]), int(row["seed"]))
            episodes[key].append(row)
    for key, rows in episodes.items():
        rows.sort(key=lambda r: int(r["trial"]))
    return episodes


def belief_cols(row):
    return [float(row[k]) for k in ("belief_0", "belief_1", "belief_2") if k in row]


def summarize_file(path, true_type):
    episodes = load_episodes(path)
    cells = defaultdict(list)
    for (delta, omega, seed), rows in episodes.items():
        cum_a = sum(float(r["reward_a"]) for r in rows)
        cum_b = sum(float(r["reward_b"]) for r in rows)
        trigger = next((int(r["trial"]) for r in rows if r.get("triggered") == "1"), 0)
        false_belief = None
        if true_type is not None:
            false_belief = sum(
                1
                for r in rows
                if (b := belief_cols(r)) and b.index(max(b)) != true_type
            ) / len(rows)
        cells[(delta, omega)].append(
            dict(seed=seed, trials=len(rows), cum_a=cum_a, cum_b=cum_b,
                 trigger=trigger, false_belief=false_belief)
        )

    print(f"== {path}")
    for (delta, omega), eps in sorted(cells.items()):
        n = len(eps)
        trials = eps[0]["trials"]
        mean_a = statistics.fmean(e["cum_a"] for e in eps)
        mean_b = statistics.fmean(e["cum_b"] for e in eps)
        sd_b = statistics.pstdev(e["cum_b"] for e in eps) if n > 1 else 0.0
        trig = [e["trigger"] for e in eps if e["trigger"] > 0]
        line = (
            f"delta={delta:g} omega={omega:g} n={n} trials={trials} "
            f"cum_a={mean_a:.3f} cum_b={mean_b:.3f} (sd {sd_b:.3f}) "
            f"per_trial_b={mean_b / trials:.4f} "
            f"trigger_rate={len(trig) / n:.2f}"
        )
        if trig:
            line += f" first_trigger={statistics.fmean(trig):.1f}"
        if eps[0]["false_belief"] is not None:
            line += (
                f" false_belief={statistics.fmean(e['false_belief'] for e in eps):.3f}"
            )
        ratio = mean_a / mean_b if mean_b else math.inf
        line += f" ratio_a_over_b={ratio:.3f}"
        print(line)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("target", help="results directory or one CSV file")
    ap.add_argument(
        "--true-type", type=int, default=None,
        help="true sender type index 0..2 for false-belief rates"
    )
    args = ap.parse_args()

    target = Path(args.target)
    files = sorted(target.glob("*.csv")) if target.is_dir() else [target]
    if not files:
        raise SystemExit(f"{target}: no CSV files")
    for f in files:
        summarize_file(f, args.true_type)
    if target.is_dir():
        cj = target / "compare.json"
        if cj.exists():
            paired = json.loads(cj.read_text()).get("paired", {})
            if paired:
                print(f"== {cj}")
                print(
                    "ratio_off={ratio_off:.3f} ratio_on={ratio_on:.3f} "
                    "reduction={ratio_reduction:.1%}".format(**paired)
                )


if __name__ == "__main__":
    sys.exit(main())
