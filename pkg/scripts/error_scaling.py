"""Quantile of the relative product error against sketch size, with a log-log fit."""

import argparse
import json

from nucsketch import DatasetFamily, sweep_error_vs_t


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--ts", type=int, nargs="+", default=[32, 64, 128, 256, 512])
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--quantile", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=3)
    p.add_argument("--csv", help="optional path for the sweep table")
    args = p.parse_args()

    x, y = DatasetFamily.exponential_pair(40, 60, 40).sample(args.seed)
    table = sweep_error_vs_t(x, y, args.ts, args.trials, args.quantile, args.seed)
    for t, q in table.rows:
        print(f"t={t:5d}  q{args.quantile:g} error={q:.5f}")
    print(f"fitted slope {table.fitted_slope:.3f} (expected near -0.5)")
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(table.to_csv())
    print(json.dumps(table.to_dict()))


if __name__ == "__main__":
    main()
