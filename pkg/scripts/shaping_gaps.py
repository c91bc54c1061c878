"""Required-SNR gaps at a target rate for QAM and GAM of one size.

Sweeps only a window around the capacity SNR of the target, so a 1024-point
run takes about a minute on one core.

    python3 scripts/shaping_gaps.py --n 1024 --target 8
"""

import argparse

import numpy as np

from gamkit.constellation import build
from gamkit.gaps import capacity_snr_db, gap_report
from gamkit.metrics import entropy_bits
from gamkit.mi import mi_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1024)
    ap.add_argument("--target", type=float, default=8.0)
    ap.add_argument("--schemes", default="qam,disc,gb-hr")
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--step", type=float, default=0.25)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    lo = capacity_snr_db(args.target)
    grid = np.arange(lo - 0.25, lo + 3.0 + 1e-9, args.step)
    curves, entropies = {}, {}
    for name in args.schemes.split(","):
        c = build(name, args.n)
        table = mi_sweep(c, grid, n_samples=args.samples, seed=args.seed)
        curves[name] = ([r.snr_db for r in table], [r.mi_bits for r in table])
        entropies[name] = entropy_bits(c)
    print(gap_report(curves, args.target, entropies).to_text())


if __name__ == "__main__":
    main()
