"""Calibrate the planner multiplier on a dataset family and validate it on fresh seeds."""

import argparse
import json

from nucsketch import DatasetFamily, SketchConfig, calibrate, mc_family_failure_rate


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--family", choices=["exp-pair", "near-line"], default="exp-pair")
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=101)
    p.add_argument("--validate-seed", type=int, default=202)
    args = p.parse_args()

    family = DatasetFamily.exponential_pair() if args.family == "exp-pair" else DatasetFamily.near_line()
    cal = calibrate(family, args.eps, args.delta, args.trials, args.seed)
    cfg = SketchConfig(epsilon=args.eps, delta=args.delta, c_mult=cal.c_mult)
    fresh = mc_family_failure_rate(family, cfg, args.trials, args.validate_seed)
    print(f"c_mult={cal.c_mult:.5f}  t per member={cal.t_by_member}  grid points tried={len(cal.evaluated)}")
    print(f"calibration failure rate {cal.failure_rate:.3f}, fresh-seed failure rate {fresh.failure_rate:.3f}")
    print(json.dumps({"family": family.to_dict(), "c_mult": cal.c_mult, "fresh": fresh.to_dict()}))


if __name__ == "__main__":
    main()
