"""Kernel dispatch: compiled extension when present, numpy otherwise.

The twisted product reduces to, per pair of rows (n1 of a, n2 of b),

    out[n1+n2]  +=  wa  *  (wb scaled by e(theta*n1*m2))     (convolution in m)

Small pairs go to a direct convolution -- the compiled Cython routine when
the extension was built, ``numpy.convolve`` otherwise.  Large pairs use an
FFT path with cached a-row transforms.  ``backend`` forces a variant
("auto", "direct", "fft", "reference"); the benchmark uses that hook.
"""

import os

import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _cext
except ImportError:  # extension not built; numpy fallback
    _cext = None

HAVE_EXT = _cext is not None

#: products with len(wa)*len(wb) at or below this go through the direct path
DIRECT_CUTOFF = 1 << 17

_workers = min(4, os.cpu_count() or 1)


def backend_name():
    return "cython" if HAVE_EXT else "numpy"


def _plan_output(rows_a, rows_b):
    """Allocate output rows spanning every contributing pair."""
    lo, hi = {}, {}
    for n1, (am0, wa) in rows_a.items():
        for n2, (bm0, wb) in rows_b.items():
            n = n1 + n2
            start = am0 + bm0
            end = start + len(wa) + len(wb) - 1
            lo[n] = min(lo.get(n, start), start)
            hi[n] = max(hi.get(n, end), end)
    return {
        n: (lo[n], np.zeros(hi[n] - lo[n], dtype=np.complex128)) for n in lo
    }


def mul_rows(rows_a, rows_b, tmap, backend="auto"):
    """Twisted product of row dictionaries; returns unpruned output rows.

    rows: dict n -> (m0, complex array); tmap: dict n1 -> frac(theta*n1).
    """
    if backend == "reference":
        return _kernels_py.mul_rows_reference(rows_a, rows_b, tmap)
    out = _plan_output(rows_a, rows_b)
    cache = {}
    for n1, (am0, wa) in rows_a.items():
        t = tmap[n1]
        for n2, (bm0, wb) in rows_b.items():
            om0, ow = out[n1 + n2]
            off = am0 + bm0 - om0
            work = len(wa) * len(wb)
            direct = work <= DIRECT_CUTOFF if backend == "auto" else backend == "direct"
            if direct:
                if _cext is not None:
                    _cext.mod_conv_accum(ow, off, wa, wb, t, bm0)
                else:
                    wbm = _kernels_py.modulated(wb, t, bm0)
                    _kernels_py.conv_accum_direct(ow, off, wa, wbm)
            else:
                wbm = _kernels_py.modulated(wb, t, bm0)
                wk = _workers if len(ow) >= 4096 else 1
                _kernels_py.fft_pair_accum(cache, ow, off, n1, wa, wbm, workers=wk)
    return out


def band_operator(items, N, phi0=0.0):
    """Build the truncated-lattice band operator (see _kernels_py)."""
    wk = _workers if N >= 2048 else 1
    return _kernels_py.BandOperator(items, N, phi0=phi0, workers=wk)
