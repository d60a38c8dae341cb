# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twisted-convolution kernel.

One routine: modulate a coefficient row by e(t*m) and convolve-accumulate
it against another row, all in C loops.  Used for small/medium row pairs
where FFT overhead dominates; the numpy fallback covers everything else.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, floor, sin

cnp.import_array()

cdef double TWO_PI = 6.283185307179586476925287


def mod_conv_accum(cnp.complex128_t[::1] out, Py_ssize_t off,
                   cnp.complex128_t[::1] wa, cnp.complex128_t[::1] wb,
                   double t, long bm0):
    """out[off+i+j] += wa[i] * wb[j] * e(t*(bm0+j))."""
    cdef Py_ssize_t na = wa.shape[0]
    cdef Py_ssize_t nb = wb.shape[0]
    cdef Py_ssize_t i, j
    cdef double arg
    cdef double complex a
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] tmp = np.empty(nb, dtype=np.complex128)
    cdef cnp.complex128_t[::1] bmod = tmp

    if t == 0.0:
        for j in range(nb):
            bmod[j] = wb[j]
    else:
        for j in range(nb):
            arg = t * (bm0 + j)
            arg = arg - floor(arg)
            arg = arg * TWO_PI
            bmod[j] = wb[j] * (cos(arg) + 1j * sin(arg))

    for i in range(na):
        a = wa[i]
        if a.real == 0.0 and a.imag == 0.0:
            continue
        for j in range(nb):
            out[off + i + j] = out[off + i + j] + a * bmod[j]
