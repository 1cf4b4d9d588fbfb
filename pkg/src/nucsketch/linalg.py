"""Dense matrices, thin SVD and the norm/rank functionals built on it.

Matrices are plain 2-D ``float64`` numpy arrays.  Every functional here is
derived from a single SVD so the quantities in a :class:`SpectralSummary` are
mutually consistent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, ParameterError

DEFAULT_RANK_TOL = 1e-10


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Validate `m` as a finite, non-empty 2-D real array and return a float64 copy-free view."""
    arr = np.asarray(m, dtype=np.float64)
    if arr.ndim != 2:
        raise InputError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InputError(f"{name} must have at least one row and one column, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} has non-finite entries")
    return arr


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD ``m = left @ diag(values) @ right.T`` with ``k = min(rows, cols)`` triplets.

    `right` holds the right singular vectors as columns (not transposed).
    """

    left: np.ndarray
    values: np.ndarray
    right: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return (self.left.shape[0], self.right.shape[0])

    def reconstruct(self, values: np.ndarray | None = None) -> np.ndarray:
        """Rebuild the matrix, optionally with a substitute spectrum of the same length."""
        s = self.values if values is None else np.asarray(values, dtype=np.float64)
        return (self.left * s) @ self.right.T


@dataclass(frozen=True)
class SpectralSummary:
    spectral_norm: float
    frobenius_norm: float
    nuclear_norm: float
    rank: int
    stable_rank: float
    nuclear_rank: float

    def to_dict(self) -> dict:
        return {
            "spectral_norm": self.spectral_norm,
            "frobenius_norm": self.frobenius_norm,
            "nuclear_norm": self.nuclear_norm,
            "rank": self.rank,
            "stable_rank": self.stable_rank,
            "nuclear_rank": self.nuclear_rank,
        }


def svd(m) -> SvdFactors:
    m = as_matrix(m)
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    # LAPACK can return -0.0 or tiny negatives for an all-zero input
    s = np.maximum(s, 0.0)
    return SvdFactors(left=u, values=s, right=vt.T)


def _values(m) -> np.ndarray:
    if isinstance(m, SvdFactors):
        return m.values
    return np.maximum(np.linalg.svd(as_matrix(m), compute_uv=False), 0.0)


def spectral_norm(m) -> float:
    s = _values(m)
    return float(s[0]) if s.size else 0.0


def frobenius_norm(m) -> float:
    if isinstance(m, SvdFactors):
        return float(np.linalg.norm(m.values))
    return float(np.linalg.norm(as_matrix(m), "fro"))


def nuclear_norm(m) -> float:
    return float(np.sum(_values(m)))


def numerical_rank(values: np.ndarray, rank_tolerance: float = DEFAULT_RANK_TOL) -> int:
    """Count singular values above ``rank_tolerance * values[0]``."""
    if values.size == 0 or values[0] <= 0.0:
        return 0
    return int(np.count_nonzero(values > rank_tolerance * values[0]))


def summarize(m, rank_tolerance: float = DEFAULT_RANK_TOL) -> SpectralSummary:
    """All norms and ranks of `m` from one SVD.

    `rank_tolerance` is relative to the largest singular value.  The zero matrix
    maps to an all-zero summary.
    """
    if not rank_tolerance > 0:
        raise ParameterError("rank_tolerance must be positive")
    s = _values(m)
    top = float(s[0]) if s.size else 0.0
    if top == 0.0:
        return SpectralSummary(0.0, 0.0, 0.0, 0, 0.0, 0.0)
    # ratios from the normalized spectrum so tiny matrices do not underflow
    r = s / top
    return SpectralSummary(
        spectral_norm=top,
        frobenius_norm=top * float(np.sqrt(np.sum(r**2))),
        nuclear_norm=float(np.sum(s)),
        rank=numerical_rank(s, rank_tolerance),
        stable_rank=float(np.sum(r**2)),
        nuclear_rank=float(np.sum(r)),
    )


def truncate_rank(f: SvdFactors, theta: int) -> tuple[np.ndarray, np.ndarray]:
    """Split the matrix into its best rank-`theta` approximation and the residual."""
    if theta < 0:
        raise ParameterError(f"theta must be nonnegative, got {theta}")
    full = f.reconstruct()
    keep = np.where(np.arange(f.values.size) < theta, f.values, 0.0)
    head = f.reconstruct(keep)
    return head, full - head
