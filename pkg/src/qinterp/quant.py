"""Linear-scaling pre-quantization and its inverse.

A value ``d`` is mapped to the integer ``q = round(d / 2 eps)`` and restored
as ``2 q eps``, which keeps every restored value within ``eps`` of the
original.  Only this lossy stage is modelled; prediction and entropy coding
that follow it in real compressors are lossless and irrelevant here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .grid import ContractError, DegenerateInputError, as_grid

_INDEX_LIMIT = 2.0**62


@dataclass(frozen=True)
class ErrorBound:
    """Either an absolute bound or one relative to the data's value range."""

    value: float
    mode: Literal["absolute", "relative"] = "absolute"

    def __post_init__(self):
        if self.mode not in ("absolute", "relative"):
            raise ContractError(f"unknown error-bound mode {self.mode!r}")
        if not self.value > 0:
            raise ContractError("error bound must be positive")

    @classmethod
    def absolute(cls, value: float) -> "ErrorBound":
        return cls(float(value), "absolute")

    @classmethod
    def relative(cls, value: float) -> "ErrorBound":
        return cls(float(value), "relative")


@dataclass(frozen=True)
class QuantizedField:
    """Quantization indices (int64) and the absolute bound that produced them."""

    indices: np.ndarray
    eps_abs: float

    def __post_init__(self):
        idx = np.ascontiguousarray(self.indices, dtype=np.int64)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "eps_abs", float(self.eps_abs))
        if not self.eps_abs > 0:
            raise ContractError("eps_abs must be positive")

    @property
    def dims(self) -> tuple[int, ...]:
        return self.indices.shape


def value_range(data) -> float:
    data = np.asarray(data, dtype=np.float64)
    return float(data.max() - data.min())


def resolve_eps(bound: ErrorBound, data) -> float:
    """Absolute error bound implied by `bound` for `data`."""
    if bound.mode == "absolute":
        return bound.value
    rng = value_range(data)
    if rng <= 0:
        raise DegenerateInputError("relative error bound needs a nonzero value range")
    return bound.value * rng


def round_half_away(x: np.ndarray) -> np.ndarray:
    """Round to nearest integer with ties away from zero (C ``round``)."""
    whole = np.trunc(x)
    frac = x - whole  # exact for binary floats
    return whole + np.where(np.abs(frac) >= 0.5, np.sign(frac), 0.0)


def quantize(data, eps_abs: float) -> QuantizedField:
    """Quantization indices of `data` under absolute bound `eps_abs`.

    Indices are ``round(data / (2 eps))`` with ties away from zero, except at
    floating-point ties where the rounded index would reconstruct to a value
    just outside ``eps``; there the neighboring index is taken instead so that
    ``|data - dequantize(q)| <= eps`` holds exactly in float64.
    """
    data = as_grid(data)
    if not eps_abs > 0:
        raise ContractError("eps_abs must be positive")
    scaled = data / (2.0 * eps_abs)
    if scaled.size and np.max(np.abs(scaled)) >= _INDEX_LIMIT:
        raise OverflowError("quantization index exceeds the 64-bit integer range")
    idx = round_half_away(scaled)
    # near exact ties 2*q*eps can land one ulp outside the bound; step toward d
    over = np.abs(data - 2.0 * idx * eps_abs) > eps_abs
    idx[over] -= np.sign(idx[over] - scaled[over])
    return QuantizedField(idx.astype(np.int64), eps_abs)


def dequantize(q: QuantizedField) -> np.ndarray:
    """Reconstructed ("decompressed") values ``2 q eps``."""
    return 2.0 * q.indices.astype(np.float64) * q.eps_abs
