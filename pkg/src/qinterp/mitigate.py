"""Quantization-aware interpolation of the compression error.

The pipeline runs in five steps over the quantization indices ``Q``:

A. mark quantization boundaries (``Q`` changes across a face) and seed an
   error sign there from the first differing neighbor;
B. feature transform of those boundaries (distance + nearest voxel);
C. give every voxel the sign of its nearest boundary and mark the voxels
   where that propagated sign changes (sign-flip boundaries);
D. distance transform of the sign-flip boundaries;
E. inverse-distance weighting between the two boundary sets, giving a
   compensation in ``[-eta*eps, eta*eps]`` that is added to the
   decompressed data.

Since the compensation is at most ``eta*eps`` in magnitude, the output is
always within ``(1 + eta) * eps`` of the original.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .edt import FeatureTransform, feature_transform
from .grid import ContractError, as_grid, interior
from .quant import QuantizedField, dequantize

DEFAULT_ETA = 0.9


@dataclass(frozen=True)
class MitigationConfig:
    eps_abs: float
    eta: float = DEFAULT_ETA

    def __post_init__(self):
        if not self.eps_abs > 0:
            raise ContractError("eps_abs must be positive")
        if not 0.0 <= self.eta <= 1.0:
            raise ContractError("eta must lie in [0, 1]")

    @property
    def amplitude(self) -> float:
        """Assumed error magnitude at quantization boundaries, ``eta * eps``."""
        return self.eta * self.eps_abs

    @property
    def relaxed_bound(self) -> float:
        return (1.0 + self.eta) * self.eps_abs


@dataclass(frozen=True)
class BoundaryArtifacts:
    boundary: np.ndarray
    boundary_signs: np.ndarray


@dataclass(frozen=True)
class ErrorEstimate:
    """Every intermediate of one pipeline run, mostly for inspection and tests."""

    boundary: np.ndarray
    boundary_signs: np.ndarray
    boundary_ft: FeatureTransform
    signs: np.ndarray
    flip_boundary: np.ndarray
    flip_ft: FeatureTransform
    compensation: np.ndarray


def _indices_of(q) -> np.ndarray:
    return q.indices if isinstance(q, QuantizedField) else np.asarray(q)


def _shifted(a: np.ndarray, axis: int, step: int) -> np.ndarray:
    """View of `a` offset by `step` along `axis`, aligned with ``a[interior]``."""
    sl = [slice(1, -1)] * a.ndim
    sl[axis] = slice(1 + step, a.shape[axis] - 1 + step)
    return a[tuple(sl)]


def _has_interior(shape) -> bool:
    return all(n >= 3 for n in shape)


def get_boundary(field: np.ndarray) -> np.ndarray:
    """Interior voxels whose value differs from at least one face neighbor."""
    field = np.asarray(field)
    out = np.zeros(field.shape, dtype=bool)
    if not _has_interior(field.shape):
        return out
    center = field[interior(field.ndim)]
    flags = out[interior(field.ndim)]
    for axis in range(field.ndim):
        for step in (1, -1):
            flags |= _shifted(field, axis, step) != center
    return out


def get_boundary_and_sign_map(q) -> BoundaryArtifacts:
    """Quantization boundaries and their error-sign seeds.

    The sign at a boundary voxel is ``sgn(q_nb - q)`` for the first differing
    face neighbor in the order axis0+, axis1+, axis2+, axis0-, axis1-,
    axis2-.  It is reset to 0 where the central-difference gradient
    ``|q(+1) - q(-1)| / 2`` reaches 1 on any axis (fast-varying region).
    Voxels on the domain boundary are never marked.
    """
    qi = _indices_of(q).astype(np.int64, copy=False)
    boundary = get_boundary(qi)
    signs = np.zeros(qi.shape, dtype=np.int8)
    if not boundary.any():
        return BoundaryArtifacts(boundary, signs)
    inner = interior(qi.ndim)
    center = qi[inner]
    s = signs[inner]
    order = [(axis, step) for step in (1, -1) for axis in range(qi.ndim)]
    for axis, step in reversed(order):
        nb = _shifted(qi, axis, step)
        differs = nb != center
        s[differs] = np.sign(nb - center)[differs]
    steep = np.zeros(center.shape, dtype=bool)
    for axis in range(qi.ndim):
        steep |= np.abs(_shifted(qi, axis, 1) - _shifted(qi, axis, -1)) >= 2
    s[steep] = 0
    return BoundaryArtifacts(boundary, signs)


def propagate_signs(artifacts: BoundaryArtifacts,
                    ft1: FeatureTransform) -> tuple[np.ndarray, np.ndarray]:
    """Complete sign map from nearest boundaries, and the sign-flip boundary.

    The sign-flip boundary holds voxels whose propagated sign differs from a
    face neighbor, excluding quantization-boundary voxels themselves: across a
    quantization step the error jumps from about ``+eps`` to ``-eps``, so the
    sign change there is not a zero crossing.
    """
    shape = artifacts.boundary.shape
    if not artifacts.boundary.any():
        return np.zeros(shape, dtype=np.int8), np.zeros(shape, dtype=bool)
    if ft1.nearest is None:
        raise ContractError("sign propagation needs a feature transform with indices")
    signs = artifacts.boundary_signs.reshape(-1)[ft1.nearest.reshape(-1)].reshape(shape)
    return signs, flip_boundary(signs, artifacts.boundary)


def flip_boundary(signs: np.ndarray, boundary: np.ndarray) -> np.ndarray:
    """Sign changes that are not quantization boundaries."""
    return get_boundary(signs) & ~boundary


def interpolate(k1: float, k2: float, s: int, amp: float) -> float:
    """Compensation at one voxel from its two boundary distances.

    Inverse-distance weighting with value ``s*amp`` at distance `k1` and 0 at
    distance `k2`, written as ``k2 / (k1 + k2) * s * amp`` so that ``k1 = 0``
    is finite.  Missing boundaries (infinite distance) give 0.
    """
    if math.isinf(k1) or math.isinf(k2) or k2 == 0:
        return 0.0
    if k1 == 0:
        return s * amp
    return k2 / (k1 + k2) * s * amp


def interpolate_field(dist1: np.ndarray, dist2: np.ndarray, signs: np.ndarray,
                      amp: float) -> np.ndarray:
    """Vectorized :func:`interpolate` over whole grids."""
    weight = np.zeros(dist1.shape)
    usable = np.isfinite(dist1) & np.isfinite(dist2) & (dist2 > 0)
    at_boundary = usable & (dist1 == 0)
    between = usable & (dist1 > 0)
    weight[at_boundary] = 1.0
    weight[between] = dist2[between] / (dist1[between] + dist2[between])
    return weight * signs * amp


def estimate_compensation(q: QuantizedField, cfg: MitigationConfig) -> ErrorEstimate:
    """Run steps A to E and return the compensation with all intermediates."""
    art = get_boundary_and_sign_map(q)
    ft1 = feature_transform(art.boundary)
    signs, flips = propagate_signs(art, ft1)
    ft2 = feature_transform(flips, indices=False)
    comp = interpolate_field(ft1.distances(), ft2.distances(), signs, cfg.amplitude)
    return ErrorEstimate(art.boundary, art.boundary_signs, ft1, signs, flips, ft2, comp)


def check_consistent(decomp: np.ndarray, q: QuantizedField) -> None:
    """Raise ContractError unless `decomp` is ``dequantize(q)`` (exactly or in float32)."""
    if decomp.shape != q.dims:
        raise ContractError(f"decompressed dims {decomp.shape} != index dims {q.dims}")
    expected = dequantize(q)
    if np.array_equal(decomp, expected):
        return
    if np.array_equal(decomp.astype(np.float32), expected.astype(np.float32)):
        return
    raise ContractError("decompressed data is not the dequantized index field")


def compensate(decomp, q: QuantizedField, cfg: MitigationConfig) -> np.ndarray:
    """Decompressed data plus the interpolated error estimate."""
    decomp = as_grid(decomp)
    check_consistent(decomp, q)
    return decomp + estimate_compensation(q, cfg).compensation


@dataclass(frozen=True)
class BoundCheck:
    ok: bool
    max_abs: float
    max_rel: float


def verify_relaxed_bound(orig, comp, cfg: MitigationConfig) -> BoundCheck:
    """Whether ``max|orig - comp| <= (1 + eta) * eps``, with the attained errors."""
    orig = np.asarray(orig, dtype=np.float64)
    comp = np.asarray(comp, dtype=np.float64)
    if orig.shape != comp.shape:
        raise ContractError(f"dims differ: {orig.shape} vs {comp.shape}")
    max_abs = float(np.max(np.abs(orig - comp))) if orig.size else 0.0
    rng = float(orig.max() - orig.min())
    if rng > 0:
        max_rel = max_abs / rng
    else:
        max_rel = 0.0 if max_abs == 0 else math.inf
    return BoundCheck(max_abs <= cfg.relaxed_bound, max_abs, max_rel)
