"""Numpy implementations of the hot kernels.

Two jobs live here:

* the twisted row-convolution behind the algebra product, in a direct
  (``numpy.convolve``) and an FFT-cached variant chosen per row pair, plus
  a deliberately naive reference version used to validate the fast paths;
* a banded lattice operator for norm estimation: the image of an element
  under the truncated representation  (U x)(k) = x(k-1),
  (V x)(k) = e(k*theta + phi0) x(k),  applied row-by-row with cached FFTs.

The compiled extension (see ``_kernels.pyx``) accelerates small direct
convolutions; everything here works without it.
"""

import numpy as np
import scipy.fft as sfft

TWO_PI = 2.0 * np.pi


def modulated(wb, t, bm0):
    """wb scaled entrywise by e(t * m) over its m-range."""
    if t == 0.0:
        return wb
    ms = bm0 + np.arange(len(wb))
    return wb * np.exp(2j * np.pi * ((t * ms) % 1.0))


def conv_accum_direct(out_w, off, wa, wb_mod):
    out_w[off : off + len(wa) + len(wb_mod) - 1] += np.convolve(wa, wb_mod)


def fft_pair_accum(cache, out_w, off, akey, wa, wb_mod, workers=1):
    """Accumulate the linear convolution wa * wb_mod via FFT, caching the
    transform of the a-row under (akey, L)."""
    W = len(wa) + len(wb_mod) - 1
    L = sfft.next_fast_len(W)
    key = (akey, L)
    fa = cache.get(key)
    if fa is None:
        fa = sfft.fft(wa, L, workers=workers)
        cache[key] = fa
    fb = sfft.fft(wb_mod, L, workers=workers)
    conv = sfft.ifft(fa * fb, workers=workers)[:W]
    out_w[off : off + W] += conv


def mul_rows_reference(rows_a, rows_b, tmap):
    """Naive triple loop over stored entries; the correctness oracle."""
    acc = {}
    for n1, (am0, wa) in rows_a.items():
        t = tmap[n1]
        for n2, (bm0, wb) in rows_b.items():
            for i in range(len(wa)):
                ca = wa[i]
                if ca == 0:
                    continue
                m1 = am0 + i
                for j in range(len(wb)):
                    cb = wb[j]
                    if cb == 0:
                        continue
                    m2 = bm0 + j
                    ph = np.exp(2j * np.pi * ((t * m2) % 1.0))
                    key = (m1 + m2, n1 + n2)
                    acc[key] = acc.get(key, 0.0) + ca * cb * ph
    rows = {}
    per_row = {}
    for (m, n), c in acc.items():
        per_row.setdefault(n, []).append((m, c))
    for n, entries in per_row.items():
        m0 = min(m for m, _ in entries)
        m1 = max(m for m, _ in entries)
        w = np.zeros(m1 - m0 + 1, dtype=np.complex128)
        for m, c in entries:
            w[m - m0] += c
        rows[n] = (m0, w)
    return rows


class BandOperator:
    """Truncated-lattice image of a Fourier polynomial.

    On the basis (delta_k), |k| <= N, the generators act by
    (U x)(k) = x(k-1) and (V x)(k) = e(k*theta + phi0) x(k), so the rows
    of the element become bands.  ``items`` supplies, per V-degree n, the
    fractional part ``tn`` of n*theta, the leading U-degree ``m0`` and the
    twisted coefficient array  w~[i] = c_{m0+i, n} e(-theta n (m0+i)).
    """

    def __init__(self, items, N, phi0=0.0, workers=1):
        self.N = N
        self.workers = workers
        npts = 2 * N + 1
        maxw = max((len(w) for _, _, _, w in items), default=1)
        self.L = sfft.next_fast_len(npts + maxw - 1)
        k = np.arange(-N, N + 1)
        self.rows = []
        for n, tn, m0, w in items:
            fw = sfft.fft(w, self.L, workers=workers)
            phase = np.exp(2j * np.pi * (((tn * k) % 1.0) + ((n * phi0) % 1.0)))
            self.rows.append((m0, len(w), fw, phase))

    def apply(self, xi):
        return self.apply_block(xi[:, None])[:, 0]

    def apply_block(self, X):
        """Apply to several vectors at once (columns of X)."""
        npts = 2 * self.N + 1
        nv = X.shape[1]
        fxi = sfft.fft(X, n=self.L, axis=0, workers=self.workers)
        out = np.zeros((npts, nv), dtype=np.complex128)
        idx = np.arange(npts)
        for m0, W, fw, phase in self.rows:
            conv = sfft.ifft(fw[:, None] * fxi, axis=0,
                             workers=self.workers)[: W + npts - 1]
            s = idx - m0
            sel = (s >= 0) & (s < W + npts - 1)
            seg = np.zeros((npts, nv), dtype=np.complex128)
            seg[sel] = conv[s[sel]]
            out += phase[:, None] * seg
        return out
