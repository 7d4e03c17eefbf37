"""Artifact mitigation for pre-quantization based lossy compressors.

Typical use::

    from qinterp import quantize, dequantize, compensate, MitigationConfig

    q = quantize(data, eps)
    decomp = dequantize(q)
    improved = compensate(decomp, q, MitigationConfig(eps))
"""

from .baselines import FilterSpec, apply_filter, gaussian_filter, uniform_filter, wiener_filter
from .edt import FeatureTransform, feature_transform
from .grid import BlockSpec, ContractError, DegenerateInputError, extract_block
from .mitigate import (
    MitigationConfig,
    compensate,
    estimate_compensation,
    get_boundary_and_sign_map,
    propagate_signs,
    verify_relaxed_bound,
)
from .parallel import Strategy, decompose, run_strategy, strategy_report
from .quality import QualityReport, SsimParams, assess, max_errors, psnr, ssim
from .quant import ErrorBound, QuantizedField, dequantize, quantize, resolve_eps

__version__ = "0.1.0"
