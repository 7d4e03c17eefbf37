"""Slow, direct reference implementations used only to check the library."""

import itertools
import math

import numpy as np


def brute_force_edt(mask):
    """Minimum squared distance to any foreground voxel, by exhaustive search.

    Returns (dist_sq, sites) where `sites` is the (F, k) coordinate array of
    the foreground; dist_sq is -1 where the foreground is empty.
    """
    mask = np.asarray(mask, dtype=bool)
    coords = np.indices(mask.shape).reshape(mask.ndim, -1).T.astype(np.int64)
    sites = coords[mask.reshape(-1)]
    if len(sites) == 0:
        return np.full(mask.shape, -1, dtype=np.int64), sites
    best = np.full(len(coords), np.iinfo(np.int64).max)
    for start in range(0, len(sites), 512):
        chunk = sites[start:start + 512]
        d = ((coords[:, None, :] - chunk[None, :, :]) ** 2).sum(axis=2)
        best = np.minimum(best, d.min(axis=1))
    return best.reshape(mask.shape), sites


def _starts(n, w, stride):
    out = []
    s = 0
    while s + w <= n:
        out.append(s)
        s += stride
    if out[-1] + w < n:
        out.append(n - w)
    return out


def ssim_direct(ref, test, window=7, stride=2, c1=1e-4, c2=9e-4, lo=None, rng=None):
    """Windowed SSIM by explicit per-window summation.

    Both grids are normalized with `lo` and `rng`, taken from `ref` unless given.
    """
    ref = np.asarray(ref, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    lo = ref.min() if lo is None else lo
    rng = ref.max() - ref.min() if rng is None else rng
    x = (ref - lo) / rng
    y = (test - lo) / rng
    values = []
    for corner in itertools.product(*[_starts(n, window, stride) for n in ref.shape]):
        sl = tuple(slice(c, c + window) for c in corner)
        a = x[sl].ravel().tolist()
        b = y[sl].ravel().tolist()
        n = len(a)
        ma = math.fsum(a) / n
        mb = math.fsum(b) / n
        va = math.fsum((u - ma) ** 2 for u in a) / n
        vb = math.fsum((v - mb) ** 2 for v in b) / n
        cov = math.fsum((u - ma) * (v - mb) for u, v in zip(a, b)) / n
        values.append((2 * ma * mb + c1) * (2 * cov + c2)
                      / ((ma * ma + mb * mb + c1) * (va + vb + c2)))
    return math.fsum(values) / len(values)


def psnr_direct(ref, test):
    a = np.asarray(ref, dtype=np.float64).ravel().tolist()
    b = np.asarray(test, dtype=np.float64).ravel().tolist()
    mse = math.fsum((u - v) ** 2 for u, v in zip(a, b)) / len(a)
    return 20 * math.log10((max(a) - min(a)) / math.sqrt(mse))
