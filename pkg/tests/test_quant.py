import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from qinterp.grid import ContractError, DegenerateInputError
from qinterp.quant import ErrorBound, QuantizedField, dequantize, quantize, resolve_eps


def test_resolve_eps_examples():
    data = np.linspace(0, 100, 11)
    assert resolve_eps(ErrorBound.absolute(0.5), data) == 0.5
    assert resolve_eps(ErrorBound.relative(0.01), data) == pytest.approx(1.0)
    with pytest.raises(DegenerateInputError):
        resolve_eps(ErrorBound.relative(0.001), np.full(5, 3.0))


def test_error_bound_must_be_positive():
    with pytest.raises(ContractError):
        ErrorBound.absolute(0.0)
    with pytest.raises(ContractError):
        ErrorBound("nonsense", "weird")


def test_quantize_examples():
    assert quantize([0.9], 0.5).indices[0] == 1
    assert quantize([0.0], 0.37).indices[0] == 0
    assert quantize([-1.3], 0.5).indices[0] == -1


def test_quantize_ties_go_away_from_zero():
    # d / 2eps lands exactly on .5
    q = quantize([0.5, -0.5, 1.5, -1.5], 0.5)
    assert q.indices.tolist() == [1, -1, 2, -2]


def test_dequantize_examples():
    assert dequantize(QuantizedField(np.array([1]), 0.5))[0] == 1.0
    assert dequantize(QuantizedField(np.array([0]), 0.5))[0] == 0.0
    assert dequantize(QuantizedField(np.array([-3]), 0.1))[0] == pytest.approx(-0.6)


def test_quantize_tie_stays_within_bound():
    # 0.5 / 0.2 rounds to 3 but 2*3*0.1 overshoots 0.5 by more than 0.1 in float64
    d = np.array([0.5])
    q = quantize(d, 0.1)
    assert abs(d[0] - dequantize(q)[0]) <= 0.1


def test_quantize_overflow():
    with pytest.raises(OverflowError):
        quantize([1e30], 1e-6)


finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@given(arrays(np.float64, st.integers(1, 40), elements=finite),
       st.floats(1e-6, 1e3, allow_nan=False))
def test_quantizer_bound_and_idempotence(data, eps):
    q = quantize(data, eps)
    recon = dequantize(q)
    assert np.all(np.abs(data - recon) <= eps)
    assert np.array_equal(quantize(recon, eps).indices, q.indices)
