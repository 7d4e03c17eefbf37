"""Command-line front end.

Volumes are headerless little-endian float32 files in row-major order;
quantization indices are little-endian int32.  ``--dims`` lists extents
slowest-varying first, e.g. ``--dims 100,500,500``.

Exit codes: 0 success, 2 input contract violation, 3 degenerate input,
4 decompressed data inconsistent with the index file.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from pathlib import Path

import numpy as np

from .baselines import FilterSpec, apply_filter
from .grid import ContractError, DegenerateInputError
from .mitigate import DEFAULT_ETA, MitigationConfig, check_consistent, estimate_compensation
from .parallel import Strategy, decompose, run_strategy
from .quality import max_errors, psnr, ssim
from .quant import ErrorBound, QuantizedField, dequantize, quantize, resolve_eps

EXIT_CONTRACT = 2
EXIT_DEGENERATE = 3
EXIT_INCONSISTENT = 4

DEFAULT_SWEEP = (1e-4, 5e-4, 1e-3, 5e-3, 1e-2, 5e-2)
SWEEP_METHODS = ("none", "compensate", "gaussian", "uniform", "wiener")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _fmt(x: float) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.9g}"


def parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(t) for t in text.replace("x", ",").split(",") if t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dims {text!r}")
    if not 1 <= len(dims) <= 3 or any(n < 1 for n in dims):
        raise argparse.ArgumentTypeError(f"bad dims {text!r}")
    return dims


def parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(",") if t)


def read_volume(path, dims, dtype="<f4") -> np.ndarray:
    n = int(np.prod(dims))
    itemsize = np.dtype(dtype).itemsize
    size = os.path.getsize(path)
    if size != n * itemsize:
        raise CliError(f"{path}: {size} bytes, expected {n * itemsize} for dims {dims}",
                       EXIT_CONTRACT)
    return np.fromfile(path, dtype=dtype).reshape(dims)


def write_volume(path, values: np.ndarray) -> np.ndarray:
    """Write float32 and return the values exactly as stored."""
    stored = np.asarray(values, dtype="<f4")
    stored.tofile(path)
    return stored


def write_indices(path, indices: np.ndarray) -> None:
    info = np.iinfo(np.int32)
    if indices.size and (indices.min() < info.min or indices.max() > info.max):
        raise CliError("quantization indices do not fit in int32", EXIT_CONTRACT)
    indices.astype("<i4").tofile(path)


def sidecar_path(q_path) -> Path:
    return Path(str(q_path) + ".eps")


def write_sidecar(q_path, eps_abs: float, dims) -> None:
    sidecar_path(q_path).write_text(
        f"eps_abs={eps_abs!r}\ndims={','.join(map(str, dims))}\n")


def read_sidecar_eps(q_path) -> float | None:
    p = sidecar_path(q_path)
    if not p.exists():
        return None
    for line in p.read_text().splitlines():
        key, _, value = line.partition("=")
        if key.strip() == "eps_abs":
            return float(value)
    return None


def _bound(args) -> ErrorBound:
    if args.eps_abs is not None:
        return ErrorBound.absolute(args.eps_abs)
    return ErrorBound.relative(args.eps_rel)


def _load_pair(args):
    """Decompressed volume, index field and config for mitigate/parallel."""
    decomp = read_volume(args.decomp, args.dims).astype(np.float64)
    indices = read_volume(args.indices, args.dims, "<i4").astype(np.int64)
    eps = args.eps_abs if args.eps_abs is not None else read_sidecar_eps(args.indices)
    if eps is None:
        raise CliError("no --eps-abs given and no sidecar next to the index file", EXIT_CONTRACT)
    q = QuantizedField(indices, eps)
    try:
        check_consistent(decomp, q)
    except ContractError as exc:
        raise CliError(str(exc), EXIT_INCONSISTENT)
    return decomp, q, MitigationConfig(eps, args.eta)


def cmd_quantize(args) -> int:
    data = read_volume(args.input, args.dims).astype(np.float64)
    eps = resolve_eps(_bound(args), data)
    q = quantize(data, eps)
    write_indices(args.out_q, q.indices)
    stored = write_volume(args.out, dequantize(q))
    write_sidecar(args.out_q, eps, args.dims)
    abs_err, rel_err = max_errors(data, stored) if np.ptp(data) > 0 else (0.0, 0.0)
    print(f"eps_abs={_fmt(eps)} max_abs_err={_fmt(abs_err)} max_rel_err={_fmt(rel_err)}")
    return 0


def cmd_mitigate(args) -> int:
    decomp, q, cfg = _load_pair(args)
    comp = estimate_compensation(q, cfg).compensation
    stored = write_volume(args.out, decomp + comp)
    applied = float(np.max(np.abs(stored - decomp))) if stored.size else 0.0
    print(f"max_abs_compensation={_fmt(applied)}")
    return 0


def cmd_metrics(args) -> int:
    ref = read_volume(args.ref, args.dims).astype(np.float64)
    test = read_volume(args.test, args.dims).astype(np.float64)
    abs_err, rel_err = max_errors(ref, test)
    row = [_fmt(ssim(ref, test)), _fmt(psnr(ref, test)), _fmt(abs_err), _fmt(rel_err)]
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["ssim", "psnr", "max_abs", "max_rel"])
    w.writerow(row)
    return 0


def sweep_rows(data: np.ndarray, bounds, methods, eta: float = DEFAULT_ETA):
    """EB-distortion rows: every relative bound against every method."""
    rows = []
    for eps_rel in bounds:
        eps = resolve_eps(ErrorBound.relative(eps_rel), data)
        q = quantize(data, eps)
        decomp = dequantize(q)
        cfg = MitigationConfig(eps, eta)
        for method in methods:
            if method == "none":
                out = decomp
            elif method == "compensate":
                out = decomp + estimate_compensation(q, cfg).compensation
            elif method == "wiener":
                out = apply_filter(decomp, FilterSpec.wiener_for(eps))
            else:
                out = apply_filter(decomp, FilterSpec(method))
            abs_err, rel_err = max_errors(data, out)
            rows.append({
                "eps_rel": eps_rel,
                "method": method,
                "ssim": ssim(data, out),
                "psnr": psnr(data, out),
                "max_rel_err": rel_err,
                "bound_ok": abs_err <= cfg.relaxed_bound,
            })
    return rows


SWEEP_COLUMNS = ("eps_rel", "method", "ssim", "psnr", "max_rel_err", "bound_ok")


def cmd_sweep(args) -> int:
    bounds = tuple(args.bounds)
    if any(b <= 0 for b in bounds) or list(bounds) != sorted(bounds):
        raise CliError("bounds must be positive and ascending", EXIT_CONTRACT)
    bad = set(args.methods) - set(SWEEP_METHODS)
    if bad:
        raise CliError(f"unknown methods {sorted(bad)}", EXIT_CONTRACT)
    data = read_volume(args.input, args.dims).astype(np.float64)
    rows = sweep_rows(data, bounds, args.methods, args.eta)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for r in rows:
            w.writerow([_fmt(r["eps_rel"]), r["method"], _fmt(r["ssim"]), _fmt(r["psnr"]),
                        _fmt(r["max_rel_err"]), _fmt(r["bound_ok"])])
    return 0


def cmd_parallel(args) -> int:
    decomp, q, cfg = _load_pair(args)
    if len(args.splits) != len(args.dims):
        raise CliError(f"--splits needs {len(args.dims)} values", EXIT_CONTRACT)
    dec = decompose(args.dims, args.splits)
    res = run_strategy(decomp, q, cfg, dec, args.strategy, workers=args.workers)
    write_volume(args.out, res.output)
    log_path = args.log or str(args.out) + ".log.csv"
    with open(log_path, "w", newline="", encoding="utf-8") as fh:
        res.log.write_csv(fh)
    print(f"strategy={args.strategy} rounds={len(res.log.rounds())} "
          f"messages={res.log.messages()} bytes={res.log.volume()}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qinterp", description=__doc__.splitlines()[0])
    p.add_argument("--workers", type=int, default=1,
                   help="threads driving block-parallel stages (results do not change)")
    sub = p.add_subparsers(dest="command", required=True)

    def dims_arg(sp):
        sp.add_argument("--dims", type=parse_dims, required=True,
                        help="extents, slowest-varying first, e.g. 100,500,500")

    sp = sub.add_parser("quantize", help="pre-quantize a float32 volume")
    sp.add_argument("input")
    dims_arg(sp)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--eps-rel", type=float)
    g.add_argument("--eps-abs", type=float)
    sp.add_argument("--out", required=True, help="decompressed float32 volume")
    sp.add_argument("--out-q", required=True, help="int32 quantization indices")
    sp.set_defaults(func=cmd_quantize)

    def pair_args(sp):
        sp.add_argument("decomp", help="decompressed float32 volume")
        sp.add_argument("indices", help="int32 quantization indices")
        dims_arg(sp)
        sp.add_argument("--eps-abs", type=float, help="defaults to the index file's sidecar")
        sp.add_argument("--eta", type=float, default=DEFAULT_ETA)
        sp.add_argument("--out", required=True)

    sp = sub.add_parser("mitigate", help="add the interpolated error estimate")
    pair_args(sp)
    sp.set_defaults(func=cmd_mitigate)

    sp = sub.add_parser("metrics", help="SSIM, PSNR and max errors as one CSV row")
    sp.add_argument("ref")
    sp.add_argument("test")
    dims_arg(sp)
    sp.set_defaults(func=cmd_metrics)

    sp = sub.add_parser("sweep", help="EB-distortion table over bounds and methods")
    sp.add_argument("input")
    dims_arg(sp)
    sp.add_argument("--bounds", type=parse_floats, default=DEFAULT_SWEEP,
                    help="comma-separated relative bounds, ascending")
    sp.add_argument("--methods", type=lambda s: tuple(s.split(",")), default=SWEEP_METHODS)
    sp.add_argument("--eta", type=float, default=DEFAULT_ETA)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("parallel", help="block-parallel compensation")
    pair_args(sp)
    sp.add_argument("--splits", type=parse_dims, required=True, help="blocks per axis")
    sp.add_argument("--strategy", choices=[s.value for s in Strategy], default="approximate")
    sp.add_argument("--log", help="exchange log CSV (default: <out>.log.csv)")
    sp.set_defaults(func=cmd_parallel)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"qinterp: {exc}", file=sys.stderr)
        return exc.code
    except DegenerateInputError as exc:
        print(f"qinterp: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ContractError, OverflowError) as exc:
        print(f"qinterp: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
