"""Monte Carlo checks of the probabilistic guarantees, plus constant calibration.

Trial ``k`` of a run with master seed ``s`` draws its sketch from
``derive_seed(s, k)``, so every report is a pure function of its arguments and
does not depend on how trials are scheduled across workers.  The worker count
comes from the ``NUCSKETCH_THREADS`` environment variable (0 or unset = auto).
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .embedding import max_distortion
from .errors import CalibrationError, InputError, ParameterError
from .linalg import as_matrix, summarize
from .datagen import SpectrumSpec, gen_near_line, gen_spectrum
from .seeding import check_seed, derive_seed
from .sketch import SketchConfig, gen_sketch, plan_nuclear

# stream tags keep sketch seeds and dataset seeds from colliding
SKETCH_STREAM = 0
MEMBER_STREAM = 0x6D656D62


def default_workers() -> int:
    raw = os.environ.get("NUCSKETCH_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ParameterError(f"NUCSKETCH_THREADS must be an integer, got {raw!r}")
    if n < 0:
        raise ParameterError("NUCSKETCH_THREADS must be nonnegative")
    return n if n > 0 else min(8, os.cpu_count() or 1)


def _run_trials(fn, count: int, workers: int | None) -> list:
    """``[fn(0), ..., fn(count - 1)]``, possibly evaluated in parallel."""
    workers = default_workers() if workers is None else workers
    if workers <= 1 or count < 2:
        return [fn(k) for k in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


def _check_trials(trials: int) -> int:
    if not (isinstance(trials, (int, np.integer)) and trials >= 1):
        raise ParameterError(f"trials must be a positive integer, got {trials!r}")
    return int(trials)


def nearest_rank_quantile(values, q: float) -> float:
    """Nearest-rank empirical quantile: the ``ceil(q n)``-th smallest value."""
    if not 0.0 < q < 1.0:
        raise ParameterError(f"quantile must lie in (0, 1), got {q}")
    v = np.sort(np.asarray(values, dtype=np.float64))
    if v.size == 0:
        raise InputError("quantile of an empty sample")
    rank = max(1, math.ceil(round(q * v.size, 9)))
    return float(v[rank - 1])


def binomial_slack(p: float, trials: int, sigmas: float = 3.0) -> float:
    return sigmas * math.sqrt(p * (1.0 - p) / trials)


@dataclass(frozen=True)
class McReport:
    trials: int
    failures: int
    failure_rate: float
    theoretical_bound: float | None
    master_seed: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SweepTable:
    rows: tuple[tuple[int, float], ...]
    quantile: float
    fitted_slope: float | None

    def to_dict(self) -> dict:
        return {
            "rows": [{"t": t, "quantile_error": e} for t, e in self.rows],
            "quantile": self.quantile,
            "fitted_slope": self.fitted_slope,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "quantile_error"])
        for t, e in self.rows:
            w.writerow([t, repr(e)])
        return buf.getvalue()


class _Product:
    """Cached pieces of one ``(X, Y)`` pair for repeated sketched-product trials."""

    def __init__(self, x, y):
        self.x = as_matrix(x, "x")
        self.y = as_matrix(y, "y")
        if self.x.shape[1] != self.y.shape[0]:
            raise InputError(f"inner dimensions disagree: x {self.x.shape}, y {self.y.shape}")
        nx = np.linalg.norm(self.x, 2)
        ny = np.linalg.norm(self.y, 2)
        if nx == 0.0 or ny == 0.0:
            raise InputError("relative error is undefined when x or y is zero")
        self.scale = nx * ny
        self.exact = self.x @ self.y

    @property
    def d(self) -> int:
        return self.x.shape[1]

    def error(self, t: int, seed: int) -> float:
        g = gen_sketch(t, self.d, seed).entries
        approx = (self.x @ g.T) @ (g @ self.y)
        return float(np.linalg.norm(approx - self.exact, 2) / self.scale)


def mc_mm_failure_rate(
    x, y, t: int, epsilon: float, trials: int, seed: int, *, delta: float | None = None, workers=None
) -> McReport:
    """Fraction of sketches whose relative product error exceeds `epsilon`.

    `delta`, when given, is recorded as the theoretical bound.
    """
    trials = _check_trials(trials)
    seed = check_seed(seed)
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    if t < 1:
        raise ParameterError(f"t must be positive, got {t}")
    case = _Product(x, y)
    errs = _run_trials(lambda k: case.error(t, derive_seed(seed, k, SKETCH_STREAM)), trials, workers)
    failures = int(sum(e > epsilon for e in errs))
    return McReport(
        trials=trials,
        failures=failures,
        failure_rate=failures / trials,
        theoretical_bound=None if delta is None else float(delta),
        master_seed=seed,
    )


def gaussian_tail_threshold(x, t: int, tau: float) -> float:
    x = as_matrix(x, "x")
    s = summarize(x)
    return s.frobenius_norm / math.sqrt(t) + s.spectral_norm + tau * s.spectral_norm / math.sqrt(t)


def mc_gaussian_tail(x, t: int, tau: float, trials: int, seed: int, *, workers=None) -> McReport:
    """Exceedance rate of ``||X G^T|| >= ||X||_F/sqrt(t) + ||X|| + tau ||X||/sqrt(t)``.

    The theoretical bound is ``exp(-tau^2 / 8)``.
    """
    trials = _check_trials(trials)
    seed = check_seed(seed)
    if not tau > 0:
        raise ParameterError(f"tau must be positive, got {tau}")
    if t < 1:
        raise ParameterError(f"t must be positive, got {t}")
    x = as_matrix(x, "x")
    if not np.any(x):
        raise InputError("tail check needs a nonzero matrix")
    threshold = gaussian_tail_threshold(x, t, tau)

    def exceeds(k):
        g = gen_sketch(t, x.shape[1], derive_seed(seed, k, SKETCH_STREAM)).entries
        return np.linalg.norm(x @ g.T, 2) >= threshold

    hits = _run_trials(exceeds, trials, workers)
    failures = int(sum(hits))
    return McReport(
        trials=trials,
        failures=failures,
        failure_rate=failures / trials,
        theoretical_bound=math.exp(-(tau**2) / 8.0),
        master_seed=seed,
    )


def fit_loglog_slope(ts, values) -> float | None:
    ts = np.asarray(ts, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if ts.size < 2 or np.any(values <= 0):
        return None
    slope, _ = np.polyfit(np.log(ts), np.log(values), 1)
    return float(slope)


def sweep_error_vs_t(
    x, y, t_list, trials: int, quantile: float, seed: int, *, workers=None
) -> SweepTable:
    """Empirical `quantile` of the relative product error at each sketch size.

    Trial ``k`` uses the same seed at every ``t``, so rows for a shared ``t`` agree
    across sweeps with the same master seed.
    """
    trials = _check_trials(trials)
    seed = check_seed(seed)
    if not 0.0 < quantile < 1.0:
        raise ParameterError(f"quantile must lie in (0, 1), got {quantile}")
    ts = [int(t) for t in t_list]
    if not ts:
        raise ParameterError("t_list must be nonempty")
    if ts[0] < 1 or any(b <= a for a, b in zip(ts, ts[1:])):
        raise ParameterError("t_list must be strictly increasing positive integers")
    case = _Product(x, y)
    rows = []
    for t in ts:
        errs = _run_trials(lambda k: case.error(t, derive_seed(seed, k, SKETCH_STREAM)), trials, workers)
        rows.append((t, nearest_rank_quantile(errs, quantile)))
    return SweepTable(
        rows=tuple(rows),
        quantile=quantile,
        fitted_slope=fit_loglog_slope([r[0] for r in rows], [r[1] for r in rows]),
    )


@dataclass(frozen=True)
class DatasetFamily:
    """Seeded family of ``(X, Y)`` pairs.

    ``spectrum``   X is ``n x d`` and Y is ``d x m``, both with the spectrum `spec`
                   and independent random singular vectors.
    ``near_line``  ``X = A`` and ``Y = A^T`` for near-line points ``A`` (``n x d``).
    """

    kind: str
    n: int
    d: int
    m: int = 0
    spec: SpectrumSpec | None = None
    spread: float = 0.01

    @classmethod
    def exponential_pair(cls, n=40, d=60, m=40, rate=1.0) -> "DatasetFamily":
        return cls("spectrum", n, d, m, SpectrumSpec.exponential(min(n, d, m), rate))

    @classmethod
    def near_line(cls, n=200, d=512, spread=0.01) -> "DatasetFamily":
        return cls("near_line", n, d, spread=spread)

    def sample(self, seed: int) -> tuple[np.ndarray, np.ndarray]:
        if self.kind == "spectrum":
            if self.spec is None:
                raise ParameterError("spectrum family needs a SpectrumSpec")
            x = gen_spectrum(self.n, self.d, self.spec, derive_seed(seed, 0))
            y = gen_spectrum(self.d, self.m, self.spec, derive_seed(seed, 1))
            return x, y
        if self.kind == "near_line":
            a = gen_near_line(self.n, self.d, self.spread, seed)
            return a, a.T
        raise ParameterError(f"unknown dataset family kind {self.kind!r}")

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "n": self.n, "d": self.d}
        if self.kind == "spectrum":
            out.update(m=self.m, spectrum=self.spec.kind, length=self.spec.length,
                       parameters=list(self.spec.parameters))
        else:
            out.update(spread=self.spread)
        return out


def calibration_grid(grid_min: float = 1 / 64, factor: float = 1.25, cap: float = 64.0) -> list[float]:
    grid = []
    c = grid_min
    while c <= cap * (1 + 1e-12):
        grid.append(c)
        c *= factor
    return grid


@dataclass
class CalibrationResult:
    c_mult: float
    t_by_member: list[int]
    failure_rate: float
    evaluated: list[dict] = field(default_factory=list)


class _FamilyTrials:
    """Family members and their planned sketch sizes for one master seed.

    Trial ``k`` uses member ``k % members`` and sketch seed ``derive_seed(seed, k)``.
    """

    def __init__(self, family: DatasetFamily, seed: int, members: int):
        if members < 1:
            raise ParameterError("members must be positive")
        self.seed = check_seed(seed)
        self.cases = [
            _Product(*family.sample(derive_seed(self.seed, i, MEMBER_STREAM))) for i in range(members)
        ]
        self.ranks = [(summarize(c.x).nuclear_rank, summarize(c.y).nuclear_rank) for c in self.cases]

    def plan(self, cfg: SketchConfig) -> list[int]:
        return [plan_nuclear(nx, ny, cfg).t_total for nx, ny in self.ranks]

    def count_failures(self, cfg: SketchConfig, trials: int, workers, stop_above=None) -> tuple[int, int]:
        """``(failures, trials_run)``; stops early once failures exceed `stop_above`."""
        ts = self.plan(cfg)
        m = len(self.cases)

        def failed(k):
            return self.cases[k % m].error(ts[k % m], derive_seed(self.seed, k, SKETCH_STREAM)) > cfg.epsilon

        workers = default_workers() if workers is None else workers
        chunk = trials if stop_above is None else max(1, workers) * 4
        failures = done = 0
        while done < trials and (stop_above is None or failures <= stop_above):
            batch = range(done, min(trials, done + chunk))
            failures += sum(_run_trials(lambda j: failed(batch[j]), len(batch), workers))
            done = batch.stop
        return failures, done


def mc_family_failure_rate(
    family: DatasetFamily, cfg: SketchConfig, trials: int, seed: int, *, members: int = 4, workers=None
) -> McReport:
    """Failure rate of the product bound at the planned size, over a dataset family."""
    trials = _check_trials(trials)
    runner = _FamilyTrials(family, seed, members)
    failures, _ = runner.count_failures(cfg, trials, workers)
    return McReport(trials, failures, failures / trials, cfg.delta, runner.seed)


def calibrate(
    family: DatasetFamily,
    epsilon: float,
    delta: float,
    trials: int,
    seed: int,
    *,
    c1: float = 1.0,
    c2: float = 18.0,
    c3: float = 2.0,
    members: int = 4,
    grid_min: float = 1 / 64,
    factor: float = 1.25,
    cap: float = 64.0,
    workers=None,
) -> CalibrationResult:
    """Smallest grid multiplier whose planned dimension keeps failures at or below `delta`.

    The same trials are replayed at every grid point, scanning upward from
    `grid_min`.  A grid point is abandoned as soon as its failures exceed
    ``delta * trials``.
    """
    trials = _check_trials(trials)
    SketchConfig(epsilon=epsilon, delta=delta, c1=c1, c2=c2, c3=c3)
    runner = _FamilyTrials(family, seed, members)
    allowed = math.floor(round(delta * trials, 9))
    evaluated = []
    for c in calibration_grid(grid_min, factor, cap):
        cfg = SketchConfig(epsilon=epsilon, delta=delta, c1=c1, c2=c2, c3=c3, c_mult=c)
        failures, done = runner.count_failures(cfg, trials, workers, stop_above=allowed)
        ts = runner.plan(cfg)
        evaluated.append({"c_mult": c, "t": ts, "trials_run": done, "failures": failures})
        if failures <= allowed:
            return CalibrationResult(c, ts, failures / trials, evaluated)
    raise CalibrationError(f"no multiplier up to {cap} kept the failure rate at or below {delta}")


def calibrate_cmult(family: DatasetFamily, epsilon: float, delta: float, trials: int, seed: int, **kw) -> float:
    return calibrate(family, epsilon, delta, trials, seed, **kw).c_mult


def min_dimension_for_distortion(
    a, level: float, quantile: float, trials: int, seed: int, t_grid, *, workers=None
) -> int | None:
    """Smallest ``t`` in `t_grid` whose `quantile` of normalized max distortion is <= `level`.

    Normalized distortion is the largest pairwise squared-distance change divided
    by ``||A||^2``.  Returns None when no grid point qualifies.
    """
    trials = _check_trials(trials)
    seed = check_seed(seed)
    a = as_matrix(a, "a")
    for t in t_grid:
        t = int(t)
        vals = _run_trials(
            lambda k: max_distortion(a, gen_sketch(t, a.shape[1], derive_seed(seed, k, SKETCH_STREAM))).normalized,
            trials,
            workers,
        )
        if nearest_rank_quantile(vals, quantile) <= level:
            return t
    return None
