"""Smallest sketch size reaching a distortion level on near-line data as the ambient dimension grows."""

import argparse

from nucsketch import SketchConfig, gen_near_line, min_dimension_for_distortion, plan_jl, plan_nuclear, summarize


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--dims", type=int, nargs="+", default=[256, 1024, 4096])
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--spread", type=float, default=0.01)
    p.add_argument("--level", type=float, default=0.4)
    p.add_argument("--quantile", type=float, default=0.9)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--eps", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=606)
    args = p.parse_args()

    t_jl = plan_jl(args.n, args.eps)
    cfg = SketchConfig(epsilon=args.eps)
    for d in args.dims:
        a = gen_near_line(args.n, d, args.spread, args.seed)
        nr = summarize(a).nuclear_rank
        t_min = min_dimension_for_distortion(a, args.level, args.quantile, args.trials, args.seed, range(1, 257))
        t_nuc = plan_nuclear(nr, nr, cfg).t_total
        print(f"d={d:5d}  nr={nr:.3f}  empirical t={t_min}  planned t (c_mult=1)={t_nuc}  JL t={t_jl}")


if __name__ == "__main__":
    main()
