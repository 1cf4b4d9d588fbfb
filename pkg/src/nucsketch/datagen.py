"""Synthetic matrices with controlled nuclear and stable rank."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .seeding import rng_for

SPECTRUM_KINDS = ("explicit", "exponential", "power")


@dataclass(frozen=True)
class SpectrumSpec:
    """Prescribed singular values.

    ``explicit``     values given in `parameters`
    ``exponential``  ``exp(-rate * i)`` for ``i = 1..length``, ``parameters = (rate,)``
    ``power``        ``i ** -exponent`` for ``i = 1..length``, ``parameters = (exponent,)``
    """

    kind: str
    length: int
    parameters: tuple[float, ...] = ()

    @classmethod
    def explicit(cls, values) -> "SpectrumSpec":
        values = tuple(float(v) for v in values)
        return cls("explicit", len(values), values)

    @classmethod
    def exponential(cls, length: int, rate: float = 1.0) -> "SpectrumSpec":
        return cls("exponential", length, (float(rate),))

    @classmethod
    def power(cls, length: int, exponent: float = 1.0) -> "SpectrumSpec":
        return cls("power", length, (float(exponent),))

    def values(self) -> np.ndarray:
        if self.kind not in SPECTRUM_KINDS:
            raise ParameterError(f"unknown spectrum kind {self.kind!r}")
        if self.length < 1:
            raise ParameterError("spectrum length must be positive")
        i = np.arange(1, self.length + 1, dtype=np.float64)
        if self.kind == "explicit":
            s = np.asarray(self.parameters, dtype=np.float64)
            if s.size != self.length:
                raise ParameterError("explicit spectrum length does not match its values")
            if np.any(s < 0) or np.any(np.diff(s) > 0) or not np.all(np.isfinite(s)):
                raise ParameterError("explicit spectrum must be finite, nonnegative, nonincreasing")
            return s
        if len(self.parameters) != 1:
            raise ParameterError(f"{self.kind} spectrum takes exactly one parameter")
        (p,) = self.parameters
        if not p >= 0:
            raise ParameterError(f"{self.kind} spectrum parameter must be nonnegative")
        if self.kind == "exponential":
            return np.exp(-p * i)
        return i**-p


def random_orthonormal(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """`cols` orthonormal columns in R^rows from QR of a Gaussian matrix (sign-fixed)."""
    q, r = np.linalg.qr(rng.standard_normal((rows, cols)))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def gen_spectrum(n: int, d: int, spec: SpectrumSpec, seed: int) -> np.ndarray:
    """``U diag(sigma) V^T`` with random orthonormal `U`, `V` and `sigma` from `spec`."""
    if n < 1 or d < 1:
        raise ParameterError("matrix shape must be positive")
    sigma = spec.values()
    k = sigma.size
    if k > min(n, d):
        raise ParameterError(f"spectrum of length {k} does not fit a {n}x{d} matrix")
    rng = rng_for(seed)
    u = random_orthonormal(n, k, rng)
    v = random_orthonormal(d, k, rng)
    return (u * sigma) @ v.T


def gen_near_line(n: int, d: int, spread: float, seed: int) -> np.ndarray:
    """Points ``s_k v + spread * noise_k`` scattered around a line through the origin.

    `v` is a random unit direction, ``s_k ~ U[-1, 1]`` and each ``noise_k`` is an
    isotropic Gaussian vector with unit total variance (coordinates N(0, 1/d)),
    so the geometry does not drift with the ambient dimension.
    """
    if n < 2 or d < 2:
        raise ParameterError(f"near-line data needs n >= 2 and d >= 2, got ({n}, {d})")
    if not (spread >= 0 and np.isfinite(spread)):
        raise ParameterError(f"spread must be a finite nonnegative number, got {spread}")
    rng = rng_for(seed)
    v = rng.standard_normal(d)
    v /= np.linalg.norm(v)
    s = rng.uniform(-1.0, 1.0, size=n)
    noise = rng.standard_normal((n, d)) / np.sqrt(d)
    return np.outer(s, v) + spread * noise


def gen_gaussian(n: int, d: int, seed: int) -> np.ndarray:
    if n < 1 or d < 1:
        raise ParameterError("matrix shape must be positive")
    return rng_for(seed).standard_normal((n, d))
