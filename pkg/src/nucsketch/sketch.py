"""Gaussian sketches, target-dimension planners and the sketched product ``X G^T G Y``."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .diagnostics import bucket_horizon
from .errors import InputError, ParameterError
from .linalg import as_matrix
from .seeding import check_seed, rng_for


def _open_unit(name: str, value: float) -> float:
    if not 0.0 < value < 1.0:
        raise ParameterError(f"{name} must lie in (0, 1), got {value}")
    return float(value)


def _positive(name: str, value: float) -> float:
    if not (value > 0.0 and math.isfinite(value)):
        raise ParameterError(f"{name} must be positive and finite, got {value}")
    return float(value)


def _ceil(x: float) -> int:
    # absorb rounding noise so that e.g. 64.00000000000001 maps to 64
    return max(1, math.ceil(round(x, 9)))


@dataclass(frozen=True)
class SketchConfig:
    """Accuracy target and constants for the nuclear-rank planner.

    c1 stands in for the Hanson-Wright constant, c2 is the net-cardinality base,
    c3 scales the truncation rank and c_mult is a global multiplier on the planned
    dimension, meant to be set by :func:`nucsketch.verify.calibrate_cmult`.
    """

    epsilon: float = 0.25
    delta: float = 0.1
    c1: float = 1.0
    c2: float = 18.0
    c3: float = 2.0
    c_mult: float = 1.0
    seed: int = 0

    def __post_init__(self):
        _open_unit("epsilon", self.epsilon)
        _open_unit("delta", self.delta)
        _positive("c1", self.c1)
        _positive("c2", self.c2)
        _positive("c_mult", self.c_mult)
        if not self.c3 >= 1.0:
            raise ParameterError(f"c3 must be at least 1, got {self.c3}")
        check_seed(self.seed)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SketchPlan:
    theta: int
    delta_term: float
    loglog_term: float
    t_total: int

    def to_dict(self) -> dict:
        return asdict(self)


def plan_nuclear(nr_x: float, nr_y: float, cfg: SketchConfig) -> SketchPlan:
    """Sketch dimension from the nuclear ranks of the two factors.

    ``t = ceil(c_mult * (theta + 8 ln(8/delta)/eps^2 + ln(ceil(ln(e/eps)))/(c1 eps^2)))``
    with ``theta = floor(c3 (nr_x + nr_y) / eps^2)``.
    """
    for name, nr in (("nr_x", nr_x), ("nr_y", nr_y)):
        if not (nr >= 1.0 and math.isfinite(nr)):
            raise ParameterError(f"{name} must be a finite nuclear rank >= 1, got {nr}")
    eps2 = cfg.epsilon**2
    # floor with the same rounding guard as the ceiling
    theta = math.floor(round(cfg.c3 * (nr_x + nr_y) / eps2, 9))
    delta_term = 8.0 * math.log(8.0 / cfg.delta) / eps2
    loglog_term = math.log(bucket_horizon(cfg.epsilon)) / (cfg.c1 * eps2)
    t_total = _ceil(cfg.c_mult * (theta + delta_term + loglog_term))
    return SketchPlan(theta=theta, delta_term=delta_term, loglog_term=loglog_term, t_total=t_total)


def plan_stable(sr_x: float, sr_y: float, epsilon: float, c_mult: float = 1.0) -> int:
    """Stable-rank planner ``ceil(c_mult (sr_x + sr_y) / eps^4)``."""
    for name, sr in (("sr_x", sr_x), ("sr_y", sr_y)):
        if not (sr >= 1.0 and math.isfinite(sr)):
            raise ParameterError(f"{name} must be a finite stable rank >= 1, got {sr}")
    _open_unit("epsilon", epsilon)
    _positive("c_mult", c_mult)
    return _ceil(c_mult * (sr_x + sr_y) / epsilon**4)


def plan_jl(n: int, epsilon: float, c_mult: float = 1.0) -> int:
    """Johnson-Lindenstrauss dimension ``ceil(c_mult ln(n) / eps^2)`` for `n` points."""
    if not n >= 2:
        raise ParameterError(f"n must be at least 2, got {n}")
    _open_unit("epsilon", epsilon)
    _positive("c_mult", c_mult)
    return _ceil(c_mult * math.log(n) / epsilon**2)


@dataclass(frozen=True, eq=False)
class GaussianSketch:
    """A ``t x d`` matrix with i.i.d. N(0, 1/t) entries, fully determined by `seed`."""

    t: int
    d: int
    seed: int
    entries: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, GaussianSketch):
            return NotImplemented
        return (self.t, self.d, self.seed) == (other.t, other.d, other.seed) and np.array_equal(
            self.entries, other.entries
        )

    __hash__ = None


def gen_sketch(t: int, d: int, seed: int) -> GaussianSketch:
    if t < 1 or d < 1:
        raise ParameterError(f"sketch shape must be positive, got ({t}, {d})")
    seed = check_seed(seed)
    z = rng_for(seed).standard_normal((t, d))
    entries = z / math.sqrt(t)
    entries.flags.writeable = False
    return GaussianSketch(t=int(t), d=int(d), seed=seed, entries=entries)


def sketch_matrix(g) -> np.ndarray:
    if isinstance(g, GaussianSketch):
        return g.entries
    return as_matrix(g, "sketch")


def sketch_factors(x, y, g) -> tuple[np.ndarray, np.ndarray]:
    """Return the sketched factors ``(X G^T, G Y)``."""
    x = as_matrix(x, "x")
    y = as_matrix(y, "y")
    gm = sketch_matrix(g)
    if not x.shape[1] == y.shape[0] == gm.shape[1]:
        raise InputError(
            f"inner dimensions disagree: x {x.shape}, y {y.shape}, sketch {gm.shape}"
        )
    return x @ gm.T, gm @ y


def approx_mm(x, y, g) -> np.ndarray:
    x_hat, y_hat = sketch_factors(x, y, g)
    return x_hat @ y_hat


def mm_error(x, y, product) -> float:
    """Relative spectral error ``||product - XY|| / (||X|| ||Y||)``."""
    x = as_matrix(x, "x")
    y = as_matrix(y, "y")
    product = as_matrix(product, "product")
    if x.shape[1] != y.shape[0] or product.shape != (x.shape[0], y.shape[1]):
        raise InputError("product shape does not match x @ y")
    nx = np.linalg.norm(x, 2)
    ny = np.linalg.norm(y, 2)
    if nx == 0.0 or ny == 0.0:
        raise InputError("relative error is undefined when x or y is zero")
    return float(np.linalg.norm(product - x @ y, 2) / (nx * ny))
