"""MI versus SNR for several schemes at one size, written as one CSV.

    python3 scripts/mi_curves.py --n 1024 --snr 0:30:1 --out mi_1024.csv
"""

import argparse

from gamkit import build
from gamkit.cli import parse_snr_list
from gamkit.mi import SweepTable, capacity_rows, mi_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1024)
    ap.add_argument("--schemes", default="qam,disc,gb-hr")
    ap.add_argument("--snr", type=parse_snr_list, default=parse_snr_list("0:30:1"))
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="mi_curves.csv")
    args = ap.parse_args()

    table = SweepTable()
    for name in args.schemes.split(","):
        rows = mi_sweep(build(name, args.n), args.snr, n_samples=args.samples, seed=args.seed)
        table.rows += rows.rows
        print(f"{name}: {len(rows)} points")
    table.rows += capacity_rows(args.snr)
    table.to_csv(args.out)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
