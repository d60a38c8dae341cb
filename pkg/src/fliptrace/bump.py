"""Smooth step profiles f_t, g_t and their periodized Fourier data.

f_t is an even C-infinity bump on [-1/2, 1/2], equal to 1 on
[1/2-t, t-1/2], built from a flat-ended interpolant h with h(-1/2) = 0
and h(-t/2) = 1/2.  Its companion g_t = sqrt(f_t (1 - f_t)) lives on the
right transition window [t-1/2, 1/2] and satisfies g_t(t-x) = g_t(x).
Together they are the matrix data of the projection fields built in
``fields``; everything downstream needs their Fourier coefficients

    fhat(n) = integral f_t(x) e(-n x) dx     (same for g),

which equal the coefficients of the 1-periodizations F_t, G_t.  The
module also provides the Poisson-summation checks, including the parity
split into even and odd frequencies.
"""

import csv
import math

import numpy as np
import scipy.fft as sfft

from .errors import ParameterError, ResolutionError

#: default sample count on [-1/2, 1/2]
GRID_N = 4096

#: fixed truncation bound for strict callers (the adaptive default
#: usually lands between ~260 and ~2700 depending on t)
TRUNC_N = 256

#: decay required of the coefficients at the truncation bound.  Measured
#: tails of ghat flatten near 1e-13 (the sqrt at the window edge), so a
#: 1e-14 requirement is unattainable; 1e-12 is reachable on a 16384 grid
#: for every t of interest.
DECAY_TOL = 1e-12


def _sigma(u):
    """exp(-1/u) for u > 0, else 0 -- the flat-ended mollifier germ."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def build_h(t):
    """The C-infinity interpolant on [-1/2, -t/2]: h(-1/2) = 0,
    h(-t/2) = 1/2, all derivatives flat at both endpoints.

    Returns a vectorized evaluator; outside its interval it continues with
    the constant endpoint values (0 to the left, 1/2 to the right), which
    is how the five-branch bump consumes it.
    """
    if not 0.5 <= t < 1.0:
        raise ParameterError(f"branch parameter t={t} outside [1/2, 1)")
    halfwidth = (1.0 - t) / 2.0

    def h(x):
        x = np.asarray(x, dtype=float)
        u = (x + 0.5) / halfwidth
        u = np.clip(u, 0.0, 1.0)
        su = _sigma(u)
        s1 = _sigma(1.0 - u)
        return 0.5 * su / (su + s1 + (su + s1 == 0.0))

    return h


class BumpProfile:
    """Evaluators and Fourier data for one value of t in [1/2, 1)."""

    def __init__(self, t, grid_n=GRID_N):
        if not 0.5 <= t < 1.0:
            raise ParameterError(f"branch parameter t={t} outside [1/2, 1)")
        if grid_n & (grid_n - 1):
            raise ParameterError("grid_n must be a power of two")
        self.t = float(t)
        self.grid_n = int(grid_n)
        self.h = build_h(t)
        self._fhat_full = None
        self._ghat_full = None

    # -- evaluators ----------------------------------------------------

    def f_eval(self, x):
        """The five-branch even bump; zero outside [-1/2, 1/2]."""
        x = np.asarray(x, dtype=float)
        t, h = self.t, self.h
        conds = [
            (x >= -0.5) & (x < -t / 2),
            (x >= -t / 2) & (x < 0.5 - t),
            (x >= 0.5 - t) & (x <= t - 0.5),
            (x > t - 0.5) & (x <= t / 2),
            (x > t / 2) & (x <= 0.5),
        ]
        funcs = [
            h(x),
            1.0 - h(-x - t),
            np.ones_like(x),
            1.0 - h(x - t),
            h(-x),
        ]
        out = np.zeros_like(x)
        for c, v in zip(conds, funcs):
            out = np.where(c, v, out)
        return out if out.ndim else float(out)

    def g_eval(self, x):
        """sqrt(f (1-f)) on the window [t-1/2, 1/2], zero elsewhere.

        Evaluated as sqrt(f(x) f(t-x)) via the exact reflection identity
        1 - f(x) = f(t-x) on [0, 1/2]; the direct form loses the
        symmetry g(t-x) = g(x) to cancellation where f rounds to 1.
        """
        x = np.asarray(x, dtype=float)
        f = np.asarray(self.f_eval(x), dtype=float)
        fr = np.asarray(self.f_eval(self.t - x), dtype=float)
        prod = np.maximum(f * fr, 0.0)  # absorb -1e-17 round-off
        out = np.where((x >= self.t - 0.5) & (x <= 0.5), np.sqrt(prod), 0.0)
        return out if out.ndim else float(out)

    # -- Fourier data --------------------------------------------------

    def _spectra(self):
        if self._fhat_full is None:
            G = self.grid_n
            x = -0.5 + np.arange(G) / G
            signs = np.where(np.arange(G) % 2 == 0, 1.0, -1.0)
            fs = sfft.fft(self.f_eval(x)) / G
            gs = sfft.fft(self.g_eval(x)) / G
            # fhat(n) = (-1)^n FFT[n]/G for the grid x_j = -1/2 + j/G
            self._fhat_full = fs * signs
            self._ghat_full = gs * signs
        return self._fhat_full, self._ghat_full

    def fhat(self, n):
        fs, _ = self._spectra()
        return complex(fs[n % self.grid_n])

    def ghat(self, n):
        _, gs = self._spectra()
        return complex(gs[n % self.grid_n])

    def dump_csv(self, path, npts=512):
        xs = np.linspace(-0.5, 0.5, npts)
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["x", "f", "g"])
            for x in xs:
                wr.writerow([f"{x:.10g}", f"{self.f_eval(x):.12g}", f"{self.g_eval(x):.12g}"])


def build_bump(t, grid_n=GRID_N):
    return BumpProfile(t, grid_n=grid_n)


def coefficients_adaptive(t, decay_tol=DECAY_TOL, max_grid=65536):
    """(profile, fhat, ghat) with the grid doubled until the tails decay.

    The truncation bound is chosen adaptively per profile; the returned
    centered arrays cover |n| <= (len-1)//2.
    """
    g = GRID_N
    while True:
        profile = build_bump(t, grid_n=g)
        try:
            fh, gh = periodize_coeffs(profile, trunc=None, decay_tol=decay_tol)
            return profile, fh, gh
        except ResolutionError:
            if g >= max_grid:
                raise
            g *= 2


def periodize_coeffs(profile, trunc=None, decay_tol=DECAY_TOL):
    """Centered coefficient arrays (fhat, ghat) for |n| <= trunc.

    With ``trunc=None`` the bound is chosen adaptively: the smallest n0
    such that all |fhat|, |ghat| beyond n0 (up to Nyquist/2) stay below
    decay_tol.  A fixed bound whose tail has not decayed raises
    ``ResolutionError`` -- raise grid_n (and the bound) in that case.
    """
    fs, gs = profile._spectra()
    G = profile.grid_n
    limit = G // 2 - 1

    def centered(full, bound):
        n = np.arange(-bound, bound + 1)
        return full[n % G]

    mags = np.maximum(np.abs(fs), np.abs(gs))
    folded = np.maximum(mags[1 : limit + 1], mags[G - limit : G][::-1])
    if trunc is None:
        above = np.flatnonzero(folded >= decay_tol)
        if len(above) and above[-1] + 1 >= limit:
            raise ResolutionError(
                f"coefficients do not decay below {decay_tol} before "
                f"Nyquist at grid_n={G}; raise grid_n"
            )
        bound = int(above[-1] + 1) + 1 if len(above) else 1
        return centered(fs, bound), centered(gs, bound)
    trunc = int(trunc)
    if trunc > limit:
        raise ParameterError(f"truncation {trunc} exceeds grid Nyquist {limit}")
    tail = folded[max(trunc - 8, 0) : trunc]
    if tail.size and tail.max() >= decay_tol:
        raise ResolutionError(
            f"coefficients at the truncation bound {trunc} are "
            f"{tail.max():.2e} >= {decay_tol}; raise grid_n or the bound"
        )
    return centered(fs, trunc), centered(gs, trunc)


# ---------------------------------------------------------------------------
# Poisson summation
# ---------------------------------------------------------------------------


class GaussianWindow:
    """H(x) = exp(-pi (x/s)^2), Hhat(n) = s exp(-pi (s n)^2)."""

    def __init__(self, scale=1.0):
        self.scale = float(scale)

    def value(self, x):
        return math.exp(-math.pi * (x / self.scale) ** 2)

    def fourier(self, n):
        return self.scale * math.exp(-math.pi * (self.scale * n) ** 2)

    value_halfwidth = 8.0
    fourier_halfwidth = 24


class ProfileWindow:
    """Adapter exposing f_t with its tabulated Fourier coefficients."""

    def __init__(self, profile, trunc=TRUNC_N):
        self.profile = profile
        fh, _ = periodize_coeffs(profile, trunc=trunc, decay_tol=1.0)
        self.trunc = trunc
        self._fh = fh

    def value(self, x):
        return float(self.profile.f_eval(x))

    def fourier(self, n):
        if abs(n) > self.trunc:
            return 0.0
        return self._fh[n + self.trunc]

    value_halfwidth = 2.0

    @property
    def fourier_halfwidth(self):
        return self.trunc


def poisson_check(H, x):
    """Both sides of the three summation identities at the point x.

    Returns a dict with keys "plain", "even", "odd":

        plain:  sum Hhat(n) e(n x)            = sum H(x + n)
        even:   sum Hhat(2n) e(n x)           = (1/2) sum [H(x/2 + n) + H(x/2 + 1/2 + n)]
        odd:    sum Hhat(2n+1) e(n x)         = (1/2) e(-x/2) sum [H(x/2 + n) - H(x/2 + 1/2 + n)]
    """
    K = int(math.ceil(H.value_halfwidth)) + 1
    M = int(H.fourier_halfwidth)

    def e(tv):
        return complex(np.exp(2j * np.pi * tv))

    lhs_plain = sum(H.fourier(n) * e(n * x) for n in range(-M, M + 1))
    rhs_plain = sum(H.value(x + n) for n in range(-K, K + 1))

    lhs_even = sum(H.fourier(2 * n) * e(n * x) for n in range(-M // 2, M // 2 + 1))
    rhs_even = 0.5 * sum(
        H.value(x / 2 + n) + H.value(x / 2 + 0.5 + n) for n in range(-K, K + 1)
    )

    lhs_odd = sum(H.fourier(2 * n + 1) * e(n * x) for n in range(-M // 2 - 1, M // 2 + 1))
    rhs_odd = (
        0.5
        * e(-x / 2)
        * sum(H.value(x / 2 + n) - H.value(x / 2 + 0.5 + n) for n in range(-K, K + 1))
    )

    return {
        "plain": (complex(lhs_plain), complex(rhs_plain)),
        "even": (complex(lhs_even), complex(rhs_even)),
        "odd": (complex(lhs_odd), complex(rhs_odd)),
    }
