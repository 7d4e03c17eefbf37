"""Smoothing filters used as comparison points for the compensation.

All filters work on a ``window**k`` neighborhood with edge replication.
They are written in terms of differences to the center voxel, so constant
regions come out bit-for-bit unchanged.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Literal

import numpy as np

from .grid import ContractError, as_grid


@dataclass(frozen=True)
class FilterSpec:
    kind: Literal["gaussian", "uniform", "wiener"]
    sigma: float = 1.0
    window: int = 3
    noise_power: float | None = None

    def __post_init__(self):
        if self.kind not in ("gaussian", "uniform", "wiener"):
            raise ContractError(f"unknown filter kind {self.kind!r}")
        if self.window < 1 or self.window % 2 == 0:
            raise ContractError("filter window must be a positive odd integer")
        if self.kind == "gaussian" and not self.sigma > 0:
            raise ContractError("gaussian sigma must be positive")
        if self.noise_power is not None and self.noise_power < 0:
            raise ContractError("noise power must be nonnegative")

    @classmethod
    def wiener_for(cls, eps_abs: float, window: int = 3) -> "FilterSpec":
        """Wiener filter assuming uniform quantization noise of variance eps**2/3."""
        return cls("wiener", window=window, noise_power=eps_abs**2 / 3.0)


def _offsets(x: np.ndarray, window: int) -> Iterator[tuple[tuple[int, ...], np.ndarray]]:
    """Yield (offset, x shifted by offset) over the neighborhood, edges replicated."""
    r = window // 2
    padded = np.pad(x, r, mode="edge")
    for off in itertools.product(range(-r, r + 1), repeat=x.ndim):
        sl = tuple(slice(r + o, r + o + n) for o, n in zip(off, x.shape))
        yield off, padded[sl]


def gaussian_taps(sigma: float, window: int = 3) -> np.ndarray:
    t = np.arange(window) - window // 2
    k = np.exp(-(t**2) / (2.0 * sigma**2))
    return k / k.sum()


def gaussian_filter(data, spec: FilterSpec = FilterSpec("gaussian")) -> np.ndarray:
    """Gaussian kernel truncated to the window and renormalized."""
    x = as_grid(data)
    taps = gaussian_taps(spec.sigma, spec.window)
    r = spec.window // 2
    acc = np.zeros_like(x)
    for off, shifted in _offsets(x, spec.window):
        if any(off):
            wt = np.prod([taps[o + r] for o in off])
            acc += wt * (shifted - x)
    return x + acc


def _local_mean(x: np.ndarray, window: int) -> np.ndarray:
    acc = np.zeros_like(x)
    for off, shifted in _offsets(x, window):
        if any(off):
            acc += shifted - x
    return x + acc / window**x.ndim


def uniform_filter(data, spec: FilterSpec = FilterSpec("uniform")) -> np.ndarray:
    """Mean over the neighborhood."""
    return _local_mean(as_grid(data), spec.window)


def wiener_filter(data, spec: FilterSpec) -> np.ndarray:
    """Local adaptive Wiener filter.

    ``out = mu + max(var - nu, 0) / max(var, nu) * (x - mu)`` with local mean
    ``mu``, local population variance ``var`` and noise power ``nu``.
    """
    if spec.noise_power is None:
        raise ContractError("wiener filter needs a noise power (use FilterSpec.wiener_for)")
    x = as_grid(data)
    n = spec.window**x.ndim
    d1 = np.zeros_like(x)
    d2 = np.zeros_like(x)
    for _, shifted in _offsets(x, spec.window):
        d = shifted - x
        d1 += d
        d2 += d * d
    m = d1 / n
    var = np.maximum(d2 / n - m * m, 0.0)
    mu = x + m
    nu = spec.noise_power
    denom = np.maximum(var, nu)
    gain = np.ones_like(x)
    np.divide(np.maximum(var - nu, 0.0), denom, out=gain, where=denom > 0)
    return np.where(gain == 1.0, x, mu + gain * (x - mu))


def apply_filter(data, spec: FilterSpec) -> np.ndarray:
    if spec.kind == "gaussian":
        return gaussian_filter(data, spec)
    if spec.kind == "uniform":
        return uniform_filter(data, spec)
    return wiener_filter(data, spec)
