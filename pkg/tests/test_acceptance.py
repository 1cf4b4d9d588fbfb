"""Exit criteria for the toolkit, one test per criterion.

Each test records a PASS/FAIL line that is echoed in the pytest terminal summary.
Tolerances and runtime budgets are fixed here and never tuned after the fact.
"""

import math
import time

import numpy as np
import pytest

from nucsketch.datagen import SpectrumSpec, gen_near_line, gen_spectrum
from nucsketch.diagnostics import bucket_horizon, bucket_matrices, bucketize, verify_proof_invariants
from nucsketch.embedding import build_embedding, check_embedding, max_distortion
from nucsketch.linalg import summarize, svd, truncate_rank
from nucsketch.seeding import derive_seed, rng_for
from nucsketch.sketch import SketchConfig, gen_sketch, plan_jl, plan_nuclear, plan_stable
from nucsketch.verify import (
    DatasetFamily,
    binomial_slack,
    calibrate,
    mc_family_failure_rate,
    mc_gaussian_tail,
    min_dimension_for_distortion,
    sweep_error_vs_t,
)

REL_TOL = 1e-10


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def random_spectrum_matrix(seed):
    rng = rng_for(seed)
    n, d = (int(v) for v in rng.integers(2, 30, size=2))
    k = int(rng.integers(1, min(n, d) + 1))
    kind = ("exponential", "power", "explicit")[seed % 3]
    if kind == "exponential":
        spec = SpectrumSpec.exponential(k, float(rng.uniform(0.05, 3.0)))
    elif kind == "power":
        spec = SpectrumSpec.power(k, float(rng.uniform(0.1, 3.0)))
    else:
        spec = SpectrumSpec.explicit(np.sort(rng.uniform(1e-6, 10.0, size=k))[::-1])
    return gen_spectrum(n, d, spec, derive_seed(seed, 0))


def test_ac1_deterministic_spectral_suite(acceptance_log):
    acceptance_log["name"] = "AC1 deterministic spectral suite (100 spectra)"
    with Timer() as timer:
        for seed in range(100):
            a = random_spectrum_matrix(seed)
            f = svd(a)
            s = summarize(a)
            assert s.spectral_norm <= s.frobenius_norm * (1 + REL_TOL)
            assert s.frobenius_norm <= s.nuclear_norm * (1 + REL_TOL)
            assert s.stable_rank <= s.nuclear_rank * (1 + REL_TOL)
            assert s.nuclear_rank <= s.rank * (1 + REL_TOL)

            theta = seed % (f.values.size + 1)
            head, rest = truncate_rank(f, theta)
            scale = np.linalg.norm(a, "fro")
            assert np.linalg.norm(head + rest - a, "fro") <= REL_TOL * scale
            optimal = math.sqrt(float(np.sum(f.values[theta:] ** 2)))
            assert abs(np.linalg.norm(rest, "fro") - optimal) <= REL_TOL * scale

            eps = (0.05, 0.1, 0.25, 0.5)[seed % 4]
            L = bucket_horizon(eps)
            d = bucketize(f, L)
            members = sorted([i for b in d.buckets for i in b] + list(d.tail_indices))
            assert members == [i for i, v in enumerate(d.normalized_singular_values) if v > 0]
            total = np.sum(bucket_matrices(f, d), axis=0)
            top = f.values[0]
            above = f.reconstruct(np.where(f.values / top >= math.exp(-L), f.values / top, 0.0))
            assert np.linalg.norm(total - above, "fro") <= REL_TOL

            rep = verify_proof_invariants(f, eps)
            assert rep.passed, rep.to_dict()
            agg = rep["aggregation"]
            assert agg.observed <= agg.bound * (1 + REL_TOL)
    acceptance_log["detail"] = f"all checks hold on seeds 0-99 in {timer.elapsed:.2f}s"
    assert timer.elapsed < 10


def test_ac2_unbiasedness(acceptance_log):
    acceptance_log["name"] = "AC2 E[G^T G] = I"
    t, d, trials = 64, 20, 2000
    with Timer() as timer:
        acc = np.zeros((d, d))
        for k in range(trials):
            g = gen_sketch(t, d, derive_seed(2, k)).entries
            acc += g.T @ g
        dev = float(np.max(np.abs(acc / trials - np.eye(d))))
    acceptance_log["detail"] = f"max |mean - I| = {dev:.4f} (tol 0.05) in {timer.elapsed:.2f}s"
    assert dev <= 0.05
    assert timer.elapsed < 30


def test_ac3_error_scaling_exponent(acceptance_log):
    acceptance_log["name"] = "AC3 error-vs-t log-log slope"
    x, y = DatasetFamily.exponential_pair(40, 60, 40).sample(3)
    with Timer() as timer:
        table = sweep_error_vs_t(x, y, [32, 64, 128, 256, 512], trials=200, quantile=0.9, seed=3)
    slope = table.fitted_slope
    acceptance_log["detail"] = f"slope {slope:.3f} (band [-0.6, -0.4]) in {timer.elapsed:.1f}s"
    assert -0.6 <= slope <= -0.4
    assert timer.elapsed < 120


def test_ac4_gaussian_operator_tail(acceptance_log):
    acceptance_log["name"] = "AC4 operator-norm tail bound"
    parts = []
    with Timer() as timer:
        for tau in (2.0, 3.0, 4.0):
            rep = mc_gaussian_tail(np.eye(8), 32, tau, 10_000, seed=int(tau))
            limit = rep.theoretical_bound + binomial_slack(rep.theoretical_bound, rep.trials)
            parts.append((tau, rep.failure_rate, limit))
    acceptance_log["detail"] = ", ".join(
        f"tau={tau:g}: {rate:.4f} <= {limit:.4f}" for tau, rate, limit in parts
    ) + f" in {timer.elapsed:.1f}s"
    assert all(rate <= limit for _, rate, limit in parts)
    assert timer.elapsed < 60


def test_ac5_product_bound_with_calibrated_constant(acceptance_log):
    acceptance_log["name"] = "AC5 product bound at calibrated t"
    eps, delta = 0.25, 0.1
    family = DatasetFamily.exponential_pair(40, 60, 40)
    with Timer() as timer:
        cal = calibrate(family, eps, delta, trials=200, seed=101)
        cfg = SketchConfig(epsilon=eps, delta=delta, c_mult=cal.c_mult)
        rep = mc_family_failure_rate(family, cfg, trials=200, seed=202)
    limit = delta + binomial_slack(delta, rep.trials)
    acceptance_log["detail"] = (
        f"c_mult={cal.c_mult:.4f} t={cal.t_by_member[0]} fresh failure rate "
        f"{rep.failure_rate:.3f} <= {limit:.3f} in {timer.elapsed:.1f}s"
    )
    assert rep.failure_rate <= limit
    assert timer.elapsed < 120


def test_ac6_embedding_additive_guarantee(acceptance_log):
    acceptance_log["name"] = "AC6 pairwise additive guarantee"
    eps, delta = 0.2, 0.1
    with Timer() as timer:
        cal = calibrate(DatasetFamily.near_line(200, 512, 0.01), eps, delta, trials=200, seed=303)
        a = gen_near_line(200, 512, 0.01, 404)
        failures = 0
        for k in range(200):
            cfg = SketchConfig(epsilon=eps, delta=delta, c_mult=cal.c_mult, seed=derive_seed(505, k))
            res = build_embedding(a, cfg)
            ok, _ = check_embedding(a, res.sketch, eps)
            failures += not ok
    rate = failures / 200
    limit = delta + binomial_slack(delta, 200)
    acceptance_log["detail"] = (
        f"c_mult={cal.c_mult:.4f} t={res.plan.t_total} violation rate {rate:.3f} <= {limit:.3f} "
        f"in {timer.elapsed:.1f}s"
    )
    assert rate <= limit
    assert timer.elapsed < 120


def test_ac7_dimension_independence(acceptance_log):
    acceptance_log["name"] = "AC7 dimension independence vs JL"
    eps, delta = 0.2, 0.1
    t_grid = range(1, 257)
    found = {}
    with Timer() as timer:
        for d in (256, 4096):
            a = gen_near_line(200, d, 0.01, 606)
            found[d] = min_dimension_for_distortion(a, 0.4, 0.9, trials=100, seed=707, t_grid=t_grid)
            nr = summarize(a).nuclear_rank
            found[f"t_nuc_{d}"] = plan_nuclear(nr, nr, SketchConfig(epsilon=eps, delta=delta)).t_total
    t_jl = plan_jl(200, eps)
    assert found[256] is not None and found[4096] is not None
    ratio = max(found[256], found[4096]) / min(found[256], found[4096])
    nuc_over_jl = found["t_nuc_4096"] / t_jl
    acceptance_log["detail"] = (
        f"min t: d=256 -> {found[256]}, d=4096 -> {found[4096]} (ratio {ratio:.2f} <= 1.5); "
        f"JL t={t_jl} for both; nuclear-rank t / JL t = {found['t_nuc_4096']}/{t_jl} = {nuc_over_jl:.2f} "
        f"in {timer.elapsed:.1f}s"
    )
    assert ratio <= 1.5
    assert plan_jl(200, eps) == t_jl
    assert timer.elapsed < 180


def brute_force_max(a, g):
    best = 0.0
    for i in range(a.shape[0]):
        for j in range(i + 1, a.shape[0]):
            w = a[i] - a[j]
            best = max(best, abs(float(np.sum((g @ w) ** 2) - np.sum(w**2))))
    return best


def test_ac8_embedding_identity_oracle(acceptance_log):
    acceptance_log["name"] = "AC8 max_distortion vs per-pair brute force"
    worst = 0.0
    for k in range(20):
        rng = rng_for(derive_seed(808, k))
        n, d, t = int(rng.integers(2, 51)), int(rng.integers(2, 40)), int(rng.integers(1, 60))
        a = rng.standard_normal((n, d))
        g = gen_sketch(t, d, derive_seed(909, k))
        diff = abs(max_distortion(a, g).max_abs_distortion - brute_force_max(a, g.entries))
        worst = max(worst, diff)
    acceptance_log["detail"] = f"largest disagreement {worst:.2e} (tol 1e-10) over 20 instances"
    assert worst <= 1e-10


def test_ac9_planner_arithmetic(acceptance_log):
    acceptance_log["name"] = "AC9 planner arithmetic"
    plan = plan_nuclear(2, 2, SketchConfig(epsilon=0.5, delta=0.5, c1=1, c3=1, c_mult=1))
    hand = 16 + 8 * math.log(16) / 0.25 + math.log(2) / 0.25
    stable = plan_stable(2, 2, 0.5, 1)
    acceptance_log["detail"] = (
        f"plan_nuclear -> {plan.t_total} (theta {plan.theta}, {plan.delta_term:.3f}, "
        f"{plan.loglog_term:.3f}); plan_stable -> {stable}"
    )
    assert plan.theta == 16
    assert plan.delta_term == pytest.approx(88.723, abs=5e-4)
    assert plan.loglog_term == pytest.approx(2.773, abs=5e-4)
    assert plan.t_total == math.ceil(hand) == 108
    assert stable == 64
