"""Command-line interface.

    nucsketch gen near-line --n 200 --d 512 --spread 0.01 --seed 7 --out a.csv
    nucsketch summary --in a.csv
    nucsketch mm --x x.csv --y y.csv --eps 0.25 --delta 0.1 --seed 1
    nucsketch embed --in a.csv --eps 0.2 --delta 0.1 --cmult 0.12 --out emb.csv
    nucsketch verify sweep --x x.csv --y y.csv --t-list 32,64,128 --out sweep.csv
    nucsketch diag --in a.csv --eps 0.1

Every JSON report carries a ``manifest`` with the resolved parameters and the
argv that produced it.  Exit codes: 0 success, 1 a guarantee check failed,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .datagen import SpectrumSpec, gen_gaussian, gen_near_line, gen_spectrum
from .diagnostics import verify_proof_invariants
from .embedding import check_embedding, build_embedding
from .errors import NucSketchError
from .linalg import summarize, svd
from .matrix_io import read_matrix, write_matrix
from .sketch import SketchConfig, approx_mm, gen_sketch, mm_error, plan_jl, plan_nuclear
from .verify import (
    DatasetFamily,
    binomial_slack,
    calibrate,
    mc_gaussian_tail,
    mc_mm_failure_rate,
    sweep_error_vs_t,
)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(NucSketchError):
    pass


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _common(p: argparse.ArgumentParser, *, sketch=False, trials=False) -> None:
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--json", dest="json_path", help="also write the JSON report here")
    if sketch:
        p.add_argument("--eps", type=float, default=0.25)
        p.add_argument("--delta", type=float, default=0.1)
        p.add_argument("--c1", type=float, default=1.0)
        p.add_argument("--c2", type=float, default=18.0)
        p.add_argument("--c3", type=float, default=2.0)
        p.add_argument("--cmult", type=float, default=1.0)
    if trials:
        p.add_argument("--trials", type=int, default=200)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nucsketch", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"nucsketch {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a synthetic matrix as CSV")
    gsub = gen.add_subparsers(dest="kind", required=True)
    p = gsub.add_parser("near-line")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--spread", type=float, default=0.01)
    p = gsub.add_parser("spectrum")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--decay", choices=("exponential", "power", "explicit"), default="exponential")
    p.add_argument("--length", type=int)
    p.add_argument("--param", type=float, default=1.0, help="decay rate or power-law exponent")
    p.add_argument("--values", type=_float_list, help="explicit singular values")
    p = gsub.add_parser("gaussian")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    for p in gsub.choices.values():
        _common(p)
        p.add_argument("--out", required=True)

    p = sub.add_parser("summary", help="norms and ranks of a matrix")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--rank-tol", type=float, default=1e-10)
    p.add_argument("--json", dest="json_path")

    p = sub.add_parser("mm", help="sketched product and its relative error")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--t", type=int, help="sketch size; bypasses the planner")
    p.add_argument("--out", help="write the approximate product as CSV")
    _common(p, sketch=True)

    p = sub.add_parser("embed", help="data-driven random linear embedding")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", help="write the embedded rows as CSV")
    _common(p, sketch=True)

    verify = sub.add_parser("verify", help="Monte Carlo checks")
    vsub = verify.add_subparsers(dest="check", required=True)
    p = vsub.add_parser("failure", help="failure rate of the product bound")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--t", type=int, help="sketch size; default is the planned size")
    _common(p, sketch=True, trials=True)
    p = vsub.add_parser("tail", help="Gaussian operator-norm tail")
    p.add_argument("--x", required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--tau", type=float, required=True)
    _common(p, trials=True)
    p = vsub.add_parser("sweep", help="error quantile versus sketch size")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--t-list", type=_int_list, required=True)
    p.add_argument("--quantile", type=float, default=0.9)
    p.add_argument("--out", help="write the table as CSV")
    _common(p, trials=True)
    p = vsub.add_parser("calibrate", help="calibrate the dimension multiplier")
    p.add_argument("--family", choices=("exp-pair", "near-line"), required=True)
    p.add_argument("--n", type=int, default=40)
    p.add_argument("--d", type=int, default=60)
    p.add_argument("--m", type=int, default=40)
    p.add_argument("--rate", type=float, default=1.0)
    p.add_argument("--spread", type=float, default=0.01)
    p.add_argument("--members", type=int, default=4)
    p.add_argument("--cap", type=float, default=64.0)
    _common(p, sketch=True, trials=True)

    p = sub.add_parser("diag", help="deterministic bucket diagnostics")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--json", dest="json_path")
    return parser


def _config(args) -> SketchConfig:
    return SketchConfig(
        epsilon=args.eps, delta=args.delta, c1=args.c1, c2=args.c2, c3=args.c3,
        c_mult=args.cmult, seed=args.seed,
    )


def _manifest(args, argv, params: dict, inputs=None, outputs=None) -> dict:
    return {
        "command": " ".join(filter(None, [args.command, getattr(args, "kind", None), getattr(args, "check", None)])),
        "params": params,
        "inputs": inputs or {},
        "outputs": outputs or {},
        "version": __version__,
        "argv": list(argv),
    }


def _cfg_params(cfg: SketchConfig, **extra) -> dict:
    out = cfg.to_dict()
    out.update(extra)
    return out


def _emit(report: dict, args) -> None:
    text = json.dumps(report, indent=2, sort_keys=False)
    print(text)
    if getattr(args, "json_path", None):
        Path(args.json_path).write_text(text + "\n")


def cmd_gen(args, argv) -> tuple[dict, int]:
    if args.kind == "near-line":
        a = gen_near_line(args.n, args.d, args.spread, args.seed)
        params = {"n": args.n, "d": args.d, "spread": args.spread, "seed": args.seed}
    elif args.kind == "spectrum":
        if args.decay == "explicit":
            if not args.values:
                raise UsageError("--values is required for an explicit spectrum")
            spec = SpectrumSpec.explicit(args.values)
        else:
            length = args.length or min(args.n, args.d)
            spec = SpectrumSpec(args.decay, length, (args.param,))
        a = gen_spectrum(args.n, args.d, spec, args.seed)
        params = {"n": args.n, "d": args.d, "decay": spec.kind, "length": spec.length,
                  "parameters": list(spec.parameters), "seed": args.seed}
    else:
        a = gen_gaussian(args.n, args.d, args.seed)
        params = {"n": args.n, "d": args.d, "seed": args.seed}
    write_matrix(args.out, a)
    report = {"rows": a.shape[0], "cols": a.shape[1]}
    report["manifest"] = _manifest(args, argv, params, outputs={"matrix": args.out})
    return report, EXIT_OK


def cmd_summary(args, argv) -> tuple[dict, int]:
    a = read_matrix(args.input)
    report = {"rows": a.shape[0], "cols": a.shape[1], **summarize(a, args.rank_tol).to_dict()}
    report["manifest"] = _manifest(args, argv, {"rank_tolerance": args.rank_tol}, {"matrix": args.input})
    return report, EXIT_OK


def cmd_mm(args, argv) -> tuple[dict, int]:
    cfg = _config(args)
    x, y = read_matrix(args.x), read_matrix(args.y)
    sx, sy = summarize(x), summarize(y)
    if sx.spectral_norm == 0.0 or sy.spectral_norm == 0.0:
        raise UsageError("x and y must both be nonzero")
    plan = plan_nuclear(sx.nuclear_rank, sy.nuclear_rank, cfg)
    t = args.t if args.t is not None else plan.t_total
    if t < 1:
        raise UsageError("--t must be positive")
    g = gen_sketch(t, x.shape[1], cfg.seed)
    product = approx_mm(x, y, g)
    err = mm_error(x, y, product)
    if args.out:
        write_matrix(args.out, product)
    report = {
        "t": t,
        "t_planned": plan.t_total,
        "t_override": args.t is not None,
        **{f"plan_{k}": v for k, v in plan.to_dict().items()},
        "nuclear_rank_x": sx.nuclear_rank,
        "nuclear_rank_y": sy.nuclear_rank,
        "relative_error": err,
        "pass": err <= cfg.epsilon,
    }
    report["manifest"] = _manifest(
        args, argv, _cfg_params(cfg, t=args.t), {"x": args.x, "y": args.y},
        {"product": args.out} if args.out else None,
    )
    return report, EXIT_OK if report["pass"] else EXIT_CHECK_FAILED


def cmd_embed(args, argv) -> tuple[dict, int]:
    cfg = _config(args)
    a = read_matrix(args.input)
    res = build_embedding(a, cfg)
    ok, dist = check_embedding(a, res.sketch, cfg.epsilon)
    if args.out:
        write_matrix(args.out, res.embedded)
    n = a.shape[0]
    t_jl = plan_jl(n, cfg.epsilon) if n >= 2 else None
    report = {
        "n": n,
        "d": a.shape[1],
        "t": res.plan.t_total,
        **{f"plan_{k}": v for k, v in res.plan.to_dict().items()},
        "spectral_norm_a": res.spectral_norm_a,
        "nuclear_norm_a": res.nuclear_norm_a,
        "nuclear_rank_a": res.nuclear_rank,
        "log_n": math.log(n),
        "t_jl": t_jl,
        "t_ratio_nuclear_over_jl": res.plan.t_total / t_jl if t_jl else None,
        **{f"distortion_{k}": v for k, v in dist.to_dict().items()},
        "threshold": 2.0 * cfg.epsilon * res.spectral_norm_a**2,
        "pass": ok,
    }
    report["manifest"] = _manifest(
        args, argv, _cfg_params(cfg), {"matrix": args.input},
        {"embedded": args.out} if args.out else None,
    )
    return report, EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_verify(args, argv) -> tuple[dict, int]:
    status = EXIT_OK
    if args.check == "failure":
        cfg = _config(args)
        x, y = read_matrix(args.x), read_matrix(args.y)
        t = args.t
        if t is None:
            sx, sy = summarize(x), summarize(y)
            if sx.spectral_norm == 0.0 or sy.spectral_norm == 0.0:
                raise UsageError("x and y must both be nonzero")
            t = plan_nuclear(sx.nuclear_rank, sy.nuclear_rank, cfg).t_total
        rep = mc_mm_failure_rate(x, y, t, cfg.epsilon, args.trials, args.seed, delta=cfg.delta)
        report = {"t": t, **rep.to_dict(), "slack_3sigma": binomial_slack(cfg.delta, rep.trials)}
        report["pass"] = rep.failure_rate <= cfg.delta + report["slack_3sigma"]
        params = _cfg_params(cfg, t=args.t, trials=args.trials)
        inputs = {"x": args.x, "y": args.y}
    elif args.check == "tail":
        x = read_matrix(args.x)
        rep = mc_gaussian_tail(x, args.t, args.tau, args.trials, args.seed)
        slack = binomial_slack(rep.theoretical_bound, rep.trials)
        report = {"t": args.t, "tau": args.tau, **rep.to_dict(), "slack_3sigma": slack,
                  "pass": rep.failure_rate <= rep.theoretical_bound + slack}
        params = {"t": args.t, "tau": args.tau, "trials": args.trials, "seed": args.seed}
        inputs = {"x": args.x}
    elif args.check == "sweep":
        x, y = read_matrix(args.x), read_matrix(args.y)
        table = sweep_error_vs_t(x, y, args.t_list, args.trials, args.quantile, args.seed)
        if args.out:
            Path(args.out).write_text(table.to_csv())
        report = table.to_dict()
        params = {"t_list": args.t_list, "trials": args.trials, "quantile": args.quantile, "seed": args.seed}
        inputs = {"x": args.x, "y": args.y}
    else:
        if args.family == "exp-pair":
            family = DatasetFamily.exponential_pair(args.n, args.d, args.m, args.rate)
        else:
            family = DatasetFamily.near_line(args.n, args.d, args.spread)
        res = calibrate(
            family, args.eps, args.delta, args.trials, args.seed,
            c1=args.c1, c2=args.c2, c3=args.c3, members=args.members, cap=args.cap,
        )
        report = {"c_mult": res.c_mult, "t_by_member": res.t_by_member,
                  "failure_rate": res.failure_rate, "family": family.to_dict(),
                  "grid_points_evaluated": len(res.evaluated)}
        params = {"eps": args.eps, "delta": args.delta, "c1": args.c1, "c2": args.c2, "c3": args.c3,
                  "trials": args.trials, "seed": args.seed, "members": args.members, "cap": args.cap}
        inputs = {}
    if report.get("pass") is False:
        status = EXIT_CHECK_FAILED
    outputs = {"csv": args.out} if getattr(args, "out", None) else None
    report["manifest"] = _manifest(args, argv, params, inputs, outputs)
    return report, status


def cmd_diag(args, argv) -> tuple[dict, int]:
    a = read_matrix(args.input)
    f = svd(a)
    rep = verify_proof_invariants(f, args.eps)
    report = rep.to_dict()
    report["manifest"] = _manifest(args, argv, {"eps": args.eps}, {"matrix": args.input})
    return report, EXIT_OK if rep.passed else EXIT_CHECK_FAILED


COMMANDS = {
    "gen": cmd_gen,
    "summary": cmd_summary,
    "mm": cmd_mm,
    "embed": cmd_embed,
    "verify": cmd_verify,
    "diag": cmd_diag,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report, status = COMMANDS[args.command](args, argv)
    except (NucSketchError, OSError) as exc:
        print(f"nucsketch {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(report, args)
    return status


if __name__ == "__main__":
    sys.exit(main())
