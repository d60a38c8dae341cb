"""Benchmark the twisted-convolution kernels: compiled vs numpy vs FFT.

The algebra product spends nearly all its time accumulating modulated row
convolutions.  Three implementations exist:

* the Cython routine ``mod_conv_accum`` (fuses modulation + convolution),
* the numpy pair ``modulated`` + ``conv_accum_direct``,
* the FFT path with cached transforms (wins for long rows).

This script times all available variants over a range of row lengths and
an end-to-end projection-field product, so the DIRECT_CUTOFF crossover
can be sanity-checked on the host machine.

Usage:  python3 benchmarks/bench_kernels.py [--repeat 7] [--quick]
"""

import argparse
import time

import numpy as np

from fliptrace import _kernels_py
from fliptrace.kernels import HAVE_EXT, backend_name

if HAVE_EXT:
    from fliptrace import _kernels as _cext

THETA = 0.6180339887498949


def _rows(rng, wa_len, wb_len):
    wa = rng.normal(size=wa_len) + 1j * rng.normal(size=wa_len)
    wb = rng.normal(size=wb_len) + 1j * rng.normal(size=wb_len)
    return wa, wb


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_row_pair(shape, repeat, rng):
    """Best-of-N seconds for one accumulated row product per variant."""
    wa_len, wb_len = shape
    wa, wb = _rows(rng, wa_len, wb_len)
    t = 0.2371  # representative fractional twist
    bm0 = -wb_len // 2
    out_len = wa_len + wb_len - 1
    results = {}

    if HAVE_EXT:
        out = np.zeros(out_len, dtype=np.complex128)
        results["cython"] = _time(
            lambda: _cext.mod_conv_accum(out, 0, wa, wb, t, bm0), repeat)

    out2 = np.zeros(out_len, dtype=np.complex128)

    def numpy_direct():
        wbm = _kernels_py.modulated(wb, t, bm0)
        _kernels_py.conv_accum_direct(out2, 0, wa, wbm)

    results["numpy"] = _time(numpy_direct, repeat)

    out3 = np.zeros(out_len, dtype=np.complex128)

    def fft_path():
        cache = {}
        wbm = _kernels_py.modulated(wb, t, bm0)
        _kernels_py.fft_pair_accum(cache, out3, 0, 0, wa, wbm)

    results["fft"] = _time(fft_path, repeat)
    return results


def bench_field_product(repeat):
    """End-to-end: squaring the approximately central projection of the
    shallowest golden standing pair, through whichever backend is live."""
    from fliptrace.algebra import ThetaValue
    from fliptrace.arithmetic import ConvergentPair
    from fliptrace.fields import build_e

    theta = ThetaValue.named("golden")
    e = build_e(ConvergentPair(1, 2, 2, 3, theta), theta)
    sec = _time(lambda: e * e, repeat)
    return e.support_size(), sec


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=7,
                    help="best-of-N timing repeats (default 7)")
    ap.add_argument("--quick", action="store_true",
                    help="small widths only")
    args = ap.parse_args()

    rng = np.random.default_rng(20260823)
    # symmetric pairs probe the crossover; asymmetric ones mirror the
    # typical field product (one long row, one short band)
    shapes = [(64, 64), (256, 256), (1024, 1024), (2048, 16), (16384, 8)]
    if args.quick:
        shapes = shapes[:3]

    print(f"active backend: {backend_name()}  (extension built: {HAVE_EXT})")
    header = (f"{'shape':>14} {'cython':>12} {'numpy':>12} {'fft':>12}"
              "  winner")
    print(header)
    print("-" * len(header))
    for shape in shapes:
        res = bench_row_pair(shape, args.repeat, rng)
        cells = []
        for name in ("cython", "numpy", "fft"):
            if name in res:
                cells.append(f"{res[name] * 1e6:>10.1f}us")
            else:
                cells.append(f"{'n/a':>12}")
        winner = min(res, key=res.get)
        label = f"{shape[0]}x{shape[1]}"
        print(f"{label:>14} {cells[0]} {cells[1]} {cells[2]}  {winner}")
        if HAVE_EXT:
            ratio = res["numpy"] / res["cython"]
            print(f"{'':>14} cython speedup over numpy: {ratio:.2f}x")

    support, sec = bench_field_product(max(3, args.repeat // 2))
    print(f"\nfield product: support {support} squared in {sec * 1e3:.1f} ms "
          f"({backend_name()} backend)")


if __name__ == "__main__":
    main()
