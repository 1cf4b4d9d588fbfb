"""Data-driven random linear embedding and its pairwise-distance check.

The sketch is ``t x d`` and acts on rows: the embedded point set is ``A G^T``.
Pairwise distortion is evaluated exhaustively over all ``i < j``, which keeps
``n`` at desk scale (a few thousand rows at most).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, ParameterError
from .linalg import as_matrix, summarize
from .sketch import GaussianSketch, SketchConfig, SketchPlan, gen_sketch, plan_nuclear, sketch_matrix


@dataclass(frozen=True, eq=False)
class EmbeddingResult:
    sketch: GaussianSketch
    embedded: np.ndarray
    plan: SketchPlan
    spectral_norm_a: float
    nuclear_norm_a: float

    @property
    def nuclear_rank(self) -> float:
        return self.nuclear_norm_a / self.spectral_norm_a

    def __eq__(self, other):
        if not isinstance(other, EmbeddingResult):
            return NotImplemented
        return (
            self.sketch == other.sketch
            and np.array_equal(self.embedded, other.embedded)
            and self.plan == other.plan
            and self.spectral_norm_a == other.spectral_norm_a
            and self.nuclear_norm_a == other.nuclear_norm_a
        )

    __hash__ = None


@dataclass(frozen=True)
class DistortionReport:
    max_abs_distortion: float
    argmax_pair: tuple[int, int] | None
    normalized: float
    pair_count: int

    def to_dict(self) -> dict:
        return {
            "max_abs_distortion": self.max_abs_distortion,
            "argmax_pair": list(self.argmax_pair) if self.argmax_pair else None,
            "normalized": self.normalized,
            "pair_count": self.pair_count,
        }


def build_embedding(a, cfg: SketchConfig) -> EmbeddingResult:
    """Plan ``t`` from the exact nuclear rank of `a` and embed its rows.

    The self-product ``A A^T`` is what the guarantee controls, so the planner is
    called with ``nr_x = nr_y = nr(A)``.
    """
    a = as_matrix(a, "a")
    summary = summarize(a)
    if summary.spectral_norm == 0.0:
        raise InputError("cannot embed the zero matrix")
    plan = plan_nuclear(summary.nuclear_rank, summary.nuclear_rank, cfg)
    g = gen_sketch(plan.t_total, a.shape[1], cfg.seed)
    return EmbeddingResult(
        sketch=g,
        embedded=a @ g.entries.T,
        plan=plan,
        spectral_norm_a=summary.spectral_norm,
        nuclear_norm_a=summary.nuclear_norm,
    )


def pairwise_distortions(a, g) -> np.ndarray:
    """Matrix ``D[i, j] = ||G (a_i - a_j)||^2 - ||a_i - a_j||^2`` (signed).

    Computed from the Gram difference ``M = A G^T G A^T - A A^T`` as
    ``M_ii + M_jj - 2 M_ij``, i.e. twice the quadratic form of `M` at
    ``(e_i - e_j)/sqrt(2)``.
    """
    a = as_matrix(a, "a")
    gm = sketch_matrix(g)
    if gm.shape[1] != a.shape[1]:
        raise InputError(f"sketch has {gm.shape[1]} columns but data has {a.shape[1]}")
    e = a @ gm.T
    m = e @ e.T - a @ a.T
    diag = np.diag(m)
    return diag[:, None] + diag[None, :] - 2.0 * m


def max_distortion(a, g) -> DistortionReport:
    a = as_matrix(a, "a")
    n = a.shape[0]
    dist = pairwise_distortions(a, g)
    if n < 2:
        return DistortionReport(0.0, None, 0.0, 0)
    iu, ju = np.triu_indices(n, k=1)
    vals = np.abs(dist[iu, ju])
    k = int(np.argmax(vals))
    worst = float(vals[k])
    scale = float(np.linalg.norm(a, 2)) ** 2
    return DistortionReport(
        max_abs_distortion=worst,
        argmax_pair=(int(iu[k]), int(ju[k])),
        normalized=worst / scale if scale > 0 else 0.0,
        pair_count=int(vals.size),
    )


def check_embedding(a, g, epsilon: float) -> tuple[bool, DistortionReport]:
    """True iff every pairwise squared distance moves by at most ``2 eps ||A||^2``."""
    if not 0.0 < epsilon < 1.0:
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    report = max_distortion(a, g)
    threshold = 2.0 * epsilon * float(np.linalg.norm(as_matrix(a, "a"), 2)) ** 2
    return report.max_abs_distortion <= threshold, report
