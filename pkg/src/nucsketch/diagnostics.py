"""Dyadic singular-value buckets and the deterministic inequalities built on them.

After scaling a matrix to unit spectral norm, each positive singular value is
assigned to the band ``I_l = {e^-l <= sigma < e^(-l+1)}`` for ``l = 1..L``; the
top band is closed at 1 so the leading value belongs to ``I_1``.  Values below
``e^-L`` form the tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, ParameterError
from .linalg import SvdFactors, nuclear_norm, spectral_norm

# slack on band-boundary comparisons
BOUNDARY_TOL = 1e-12
RECONSTRUCTION_TOL = 1e-10


def bucket_horizon(epsilon: float) -> int:
    """Number of bands needed for the tail to have norm below ``epsilon / e``."""
    if not 0.0 < epsilon < 1.0:
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    return math.ceil(math.log(math.e / epsilon))


@dataclass(frozen=True)
class BucketDecomposition:
    normalized_singular_values: np.ndarray
    horizon_L: int
    buckets: tuple[tuple[int, ...], ...]
    tail_indices: tuple[int, ...]

    def levels(self) -> list[int]:
        """1-based levels of the nonempty buckets, in increasing order."""
        return [l + 1 for l, idx in enumerate(self.buckets) if idx]


def _level(sigma: float) -> int:
    return max(1, math.ceil(-math.log(sigma) - BOUNDARY_TOL))


def bucketize(f: SvdFactors, L: int) -> BucketDecomposition:
    if L < 1:
        raise ParameterError(f"horizon L must be a positive integer, got {L}")
    top = float(f.values[0]) if f.values.size else 0.0
    if top <= 0.0:
        raise InputError("cannot bucketize an all-zero spectrum")
    sigma = f.values / top
    buckets: list[list[int]] = [[] for _ in range(L)]
    tail = []
    for i, s in enumerate(sigma):
        if s <= 0.0:
            continue
        l = _level(float(s))
        if l > L:
            tail.append(i)
        else:
            buckets[l - 1].append(i)
    return BucketDecomposition(
        normalized_singular_values=sigma,
        horizon_L=L,
        buckets=tuple(tuple(b) for b in buckets),
        tail_indices=tuple(tail),
    )


def _partial(f: SvdFactors, d: BucketDecomposition, indices) -> np.ndarray:
    idx = list(indices)
    return (f.left[:, idx] * d.normalized_singular_values[idx]) @ f.right[:, idx].T


def _check_pair(f: SvdFactors, d: BucketDecomposition) -> None:
    if d.normalized_singular_values.shape != f.values.shape:
        raise InputError("bucket decomposition does not match the SVD factors")
    top = float(f.values[0])
    if not np.allclose(d.normalized_singular_values * top, f.values, rtol=1e-12, atol=0.0):
        raise InputError("bucket decomposition does not match the SVD factors")


def bucket_matrices(f: SvdFactors, d: BucketDecomposition) -> list[np.ndarray]:
    """One normalized matrix per nonempty bucket, ordered by level (see ``d.levels()``)."""
    _check_pair(f, d)
    return [_partial(f, d, idx) for idx in d.buckets if idx]


def tail_matrix(f: SvdFactors, d: BucketDecomposition) -> np.ndarray:
    _check_pair(f, d)
    return _partial(f, d, d.tail_indices)


@dataclass(frozen=True)
class CheckResult:
    name: str
    bound: float
    observed: float
    passed: bool

    def to_dict(self) -> dict:
        return {"check": self.name, "bound": self.bound, "observed": self.observed, "pass": self.passed}


@dataclass(frozen=True)
class DiagnosticReport:
    epsilon: float
    horizon_L: int
    bucket_sizes: tuple[int, ...]
    tail_size: int
    checks: tuple[CheckResult, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "horizon_L": self.horizon_L,
            "bucket_sizes": list(self.bucket_sizes),
            "tail_size": self.tail_size,
            "pass": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }


def verify_proof_invariants(f: SvdFactors, epsilon: float) -> DiagnosticReport:
    """Run the five bucket checks on the normalized matrix.

    reconstruction
        the bucket matrices sum to the above-tail part, Frobenius error <= 1e-10
    bucket_rank
        each bucket matrix has rank equal to its cardinality
    bucket_norm
        ``||X^l|| <= e^(-l+1)``; observed is the worst ratio to that bound
    tail_norm
        ``||tail|| <= e^-L``, with ``e^-L <= epsilon`` as well
    aggregation
        ``sum_l card(I_l) ||X^l|| <= e * ||sum_l X^l||_*``
    """
    L = bucket_horizon(epsilon)
    if not f.values.size or f.values[0] <= 0.0:
        raise InputError("diagnostics need a nonzero matrix")
    d = bucketize(f, L)
    mats = bucket_matrices(f, d)
    levels = d.levels()
    sizes = [len(b) for b in d.buckets if b]

    head_idx = [i for b in d.buckets for i in b]
    head_mask = np.zeros(f.values.size)
    head_mask[head_idx] = 1.0
    head = f.reconstruct(d.normalized_singular_values * head_mask)
    summed = np.sum(mats, axis=0) if mats else np.zeros(f.shape)
    rec_err = float(np.linalg.norm(summed - head, "fro"))

    rank_gap = 0
    norm_ratio = 0.0
    lhs = 0.0
    for l, size, m in zip(levels, sizes, mats):
        s = np.linalg.svd(m, compute_uv=False)
        r = int(np.count_nonzero(s > RECONSTRUCTION_TOL * max(s[0], 1e-300)))
        rank_gap = max(rank_gap, abs(r - size))
        norm_ratio = max(norm_ratio, float(s[0]) / math.exp(1 - l))
        lhs += size * float(s[0])

    tail_norm = spectral_norm(tail_matrix(f, d)) if d.tail_indices else 0.0
    tail_bound = math.exp(-L)
    rhs = math.e * nuclear_norm(summed) if mats else 0.0

    checks = (
        CheckResult("reconstruction", RECONSTRUCTION_TOL, rec_err, rec_err <= RECONSTRUCTION_TOL),
        CheckResult("bucket_rank", 0.0, float(rank_gap), rank_gap == 0),
        CheckResult("bucket_norm", 1.0, norm_ratio, norm_ratio <= 1.0 + BOUNDARY_TOL),
        CheckResult(
            "tail_norm",
            tail_bound,
            tail_norm,
            tail_norm <= tail_bound * (1.0 + BOUNDARY_TOL) and tail_bound <= epsilon,
        ),
        CheckResult("aggregation", rhs, lhs, lhs <= rhs * (1.0 + BOUNDARY_TOL)),
    )
    return DiagnosticReport(
        epsilon=epsilon,
        horizon_L=L,
        bucket_sizes=tuple(len(b) for b in d.buckets),
        tail_size=len(d.tail_indices),
        checks=checks,
    )
