import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qinterp.baselines import (
    FilterSpec,
    apply_filter,
    gaussian_filter,
    gaussian_taps,
    uniform_filter,
    wiener_filter,
)
from qinterp.grid import ContractError
from qinterp.synthetic import random_smooth_field


def test_spec_contract():
    with pytest.raises(ContractError):
        FilterSpec("median")
    with pytest.raises(ContractError):
        FilterSpec("uniform", window=4)
    with pytest.raises(ContractError):
        FilterSpec("gaussian", sigma=0.0)
    assert FilterSpec.wiener_for(0.3).noise_power == pytest.approx(0.03)


@pytest.mark.parametrize("spec", [FilterSpec("gaussian"), FilterSpec("uniform"),
                                  FilterSpec("wiener", noise_power=0.01)])
@pytest.mark.parametrize("shape", [(9,), (5, 6), (4, 5, 6)])
def test_constant_preserved(spec, shape):
    c = np.full(shape, 0.7123)
    assert np.array_equal(apply_filter(c, spec), c)


def test_gaussian_impulse_center():
    x = np.zeros((5, 5, 5))
    x[2, 2, 2] = 1.0
    k = np.exp(-np.array([1.0, 0.0, 1.0]) / 2)
    w0 = k[1] / k.sum()
    assert gaussian_filter(x)[2, 2, 2] == pytest.approx(w0**3, rel=1e-12)
    assert gaussian_taps(1.0)[1] == pytest.approx(w0)


def test_gaussian_wide_sigma_is_uniform(rng):
    x = random_smooth_field(rng, (8, 9, 10))
    wide = gaussian_filter(x, FilterSpec("gaussian", sigma=1e6))
    assert np.allclose(wide, uniform_filter(x), rtol=0, atol=1e-9)


def test_uniform_edge_replication():
    x = np.zeros(6)
    x[1] = 1.0
    out = uniform_filter(x)
    assert out[0] == pytest.approx(1 / 3)
    assert out[1] == pytest.approx(1 / 3)
    assert out[3] == 0.0


def test_uniform_keeps_ramp_interior():
    x = np.arange(10.0)
    assert np.allclose(uniform_filter(x)[1:-1], x[1:-1])


def test_wiener_zero_noise_is_identity(rng):
    x = random_smooth_field(rng, (7, 8, 9))
    assert np.array_equal(wiener_filter(x, FilterSpec("wiener", noise_power=0.0)), x)


def test_wiener_dominant_noise_gives_local_mean(rng):
    x = 1e-3 * random_smooth_field(rng, (7, 8, 9))
    out = wiener_filter(x, FilterSpec("wiener", noise_power=1.0))
    assert np.allclose(out, uniform_filter(x), rtol=0, atol=1e-15)


def test_wiener_needs_noise_power():
    with pytest.raises(ContractError):
        wiener_filter(np.zeros(4), FilterSpec("wiener"))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.lists(st.integers(1, 9), min_size=1, max_size=3).map(tuple),
       st.sampled_from(["gaussian", "uniform"]))
def test_convex_combination(seed, shape, kind):
    x = np.random.default_rng(seed).standard_normal(shape)
    out = apply_filter(x, FilterSpec(kind))
    pad = np.pad(x, 1, mode="edge")
    lo = np.full(shape, np.inf)
    hi = np.full(shape, -np.inf)
    for off in np.ndindex(*(3,) * x.ndim):
        sl = tuple(slice(o, o + n) for o, n in zip(off, shape))
        lo = np.minimum(lo, pad[sl])
        hi = np.maximum(hi, pad[sl])
    tol = 1e-12 * (1 + np.abs(x).max())
    assert np.all(out >= lo - tol) and np.all(out <= hi + tol)
