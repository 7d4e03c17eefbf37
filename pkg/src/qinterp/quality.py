"""Distortion metrics: windowed SSIM, PSNR and maximum errors."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .grid import ContractError, DegenerateInputError

_CHUNK_VALUES = 1 << 22


@dataclass(frozen=True)
class SsimParams:
    window: int = 7
    stride: int = 2
    c1: float = 1e-4
    c2: float = 9e-4

    def __post_init__(self):
        if self.window < 1 or self.window % 2 == 0:
            raise ContractError("SSIM window must be a positive odd integer")
        if self.stride < 1:
            raise ContractError("SSIM stride must be positive")
        if not (self.c1 > 0 and self.c2 > 0):
            raise ContractError("SSIM constants must be positive")


@dataclass(frozen=True)
class QualityReport:
    ssim: float
    psnr_db: float
    max_abs_err: float
    max_rel_err: float
    eps_used: float = math.nan
    method: str = ""


def _pair(ref, test) -> tuple[np.ndarray, np.ndarray]:
    ref = np.asarray(ref, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if ref.shape != test.shape:
        raise ContractError(f"dims differ: {ref.shape} vs {test.shape}")
    return ref, test


def window_starts(n: int, window: int, stride: int) -> np.ndarray:
    """Origin-anchored window starts; the last window is clamped to end at ``n``."""
    starts = list(range(0, n - window + 1, stride))
    if starts[-1] != n - window:
        starts.append(n - window)
    return np.asarray(starts)


def ssim(ref, test, params: SsimParams = SsimParams()) -> float:
    """Mean windowed SSIM after normalizing both grids by the reference range.

    Windows are ``window`` voxels wide along every axis, placed every
    ``stride`` voxels from the origin plus a final window flush with the far
    edge.  Means, variances and the covariance use 1/n normalization.
    """
    ref, test = _pair(ref, test)
    w = params.window
    if any(n < w for n in ref.shape):
        raise ContractError(f"window {w} does not fit dims {ref.shape}")
    lo = ref.min()
    rng = ref.max() - lo
    if rng == 0:
        if np.array_equal(ref, test):
            return 1.0
        raise DegenerateInputError("SSIM undefined for a constant reference")
    x = (ref - lo) / rng
    y = (test - lo) / rng

    starts = [window_starts(n, w, params.stride) for n in ref.shape]
    wx = sliding_window_view(x, (w,) * x.ndim)
    wy = sliding_window_view(y, (w,) * y.ndim)
    per_slab = int(np.prod([len(s) for s in starts[1:]])) * w**x.ndim
    step = max(1, _CHUNK_VALUES // per_slab)

    total = 0.0
    count = 0
    for k in range(0, len(starts[0]), step):
        first = starts[0][k : k + step]
        sel = np.ix_(first, *starts[1:])
        a = wx[sel].reshape(-1, w**x.ndim)
        b = wy[sel].reshape(-1, w**x.ndim)
        mu_a = a.mean(axis=1)
        mu_b = b.mean(axis=1)
        da = a - mu_a[:, None]
        db = b - mu_b[:, None]
        var_a = np.mean(da * da, axis=1)
        var_b = np.mean(db * db, axis=1)
        cov = np.mean(da * db, axis=1)
        vals = ((2 * mu_a * mu_b + params.c1) * (2 * cov + params.c2)
                / ((mu_a**2 + mu_b**2 + params.c1) * (var_a + var_b + params.c2)))
        total += vals.sum()
        count += vals.size
    return float(total / count)


def psnr(ref, test) -> float:
    """``20 log10(range(ref) / sqrt(MSE))``; ``inf`` when the grids match."""
    ref, test = _pair(ref, test)
    mse = float(np.mean((ref - test) ** 2))
    if mse == 0:
        return math.inf
    rng = float(ref.max() - ref.min())
    if rng == 0:
        raise DegenerateInputError("PSNR undefined for a constant reference")
    return 20.0 * math.log10(rng / math.sqrt(mse))


def max_errors(ref, test) -> tuple[float, float]:
    """Maximum absolute error and that error relative to the reference range."""
    ref, test = _pair(ref, test)
    abs_err = float(np.max(np.abs(ref - test)))
    rng = float(ref.max() - ref.min())
    if rng == 0:
        if abs_err == 0:
            return 0.0, 0.0
        raise DegenerateInputError("relative error undefined for a constant reference")
    return abs_err, abs_err / rng


def assess(ref, test, eps_used: float = math.nan, method: str = "",
           params: SsimParams = SsimParams()) -> QualityReport:
    abs_err, rel_err = max_errors(ref, test)
    return QualityReport(ssim(ref, test, params), psnr(ref, test), abs_err, rel_err,
                         float(eps_used), method)
