"""Quadrature side of the standing-wave module over R x Z_q x Z_q'.

The approximately central projection admits a second construction that
never touches the twisted convolution algebra: a vector built from the
bump profile generates a module over the phase-space group, and the two
module inner products recover the identity on one side and the
projection on the other.  This file computes those inner products by
direct numerical integration, together with the auxiliary series
(images of the circle-algebra generators under the inverse of the
corner isomorphism), their parity-trace closed forms, the scalar limit
functions describing the compressed generators, and the pair of
flip-symmetric functionals on the circle algebra.

Everything here is an independent check route: the only shared
ingredient with the field constructions is the bump profile itself.
Fourier coefficients at integer frequencies are obtained from the FFT
of the sampled integrand (the integrands are smooth with flat ends, so
trapezoid sampling converges faster than any power of the step);
coefficients at the non-integer frequencies m/tau fall back to adaptive
Gauss-Kronrod quadrature.
"""

import csv
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np
import scipy.fft as sfft
from scipy.integrate import quad

from .algebra import FourierElement, adjoint, max_coeff_diff
from .arithmetic import ConvergentPair
from .bump import build_bump
from .errors import IntegrityError, ParameterError, ResolutionError

GRID_N = 8192          # starting FFT grid for coefficient tables
MAX_GRID = 65536
TAIL_TOL = 1e-12       # spectral tail must clear this before a table is used
KEEP_TOL = 1e-14       # coefficients below this are dropped from series
QUAD_EPS = 1e-10       # absolute tolerance for adaptive quadrature
V2_BOUND = 8           # default truncation of the circle-variable series


def _as_pair(pair):
    if not isinstance(pair, ConvergentPair):
        raise ParameterError(
            "expected a ConvergentPair (tuples carry no angle); got "
            f"{pair!r}")
    if not pair.is_standing():
        raise ParameterError(
            f"pair {pair.as_tuple()} has tau={pair.tau!r} outside the "
            "standing window")
    return pair


def _phase(fr):
    """e(fr) for an exact rational turn count."""
    fr = fr - int(fr)  # reduce mod 1 while still exact
    return complex(np.exp(2j * np.pi * (float(fr.numerator) / fr.denominator)))


def _even(n):
    return 1 if n % 2 == 0 else 0


# ---------------------------------------------------------------------------
# lattice geometry
# ---------------------------------------------------------------------------


class LatticeBasis:
    """Basis vectors of the two dual lattices in (R x Z_q x Z_q')^2.

    Vectors are stored as 6-tuples (t, r, s; x, u, v): position part in
    R x Z_q x Z_q', dual part likewise under the self-duality pairing
    <(t,r,s),(x,u,v)> = e(tx + ru/q + sv/q').
    """

    def __init__(self, pair):
        pair = _as_pair(pair)
        self.pair = pair
        p, q, pp, qp = pair.as_tuple()
        a = pair.alpha
        self.epsilon1 = (a / q, p, 0, 0.0, 0, 0)
        self.epsilon2 = (0.0, 0, 1, 1.0, 1, 0)
        self.delta1 = (1.0 / (q * qp), p, 0, 0.0, 0, pp)
        self.delta2 = (0.0, 0, 0, 1.0 / a, qp, 0)
        self.delta3 = (0.0, 0, 1, 0.0, 0, 0)

    def pairing(self, x, y):
        """Heisenberg cocycle: position of x paired with dual part of y."""
        q, qp = self.pair.q, self.pair.q_prime
        t, r, s = x[0], x[1], x[2]
        xd, ud, vd = y[3], y[4], y[5]
        return complex(np.exp(2j * np.pi * (t * xd + r * ud / q + s * vd / qp)))

    def biorthogonality_defect(self):
        """max |h(eps, delta) conj(h(delta, eps)) - 1| over the 6 pairs."""
        worst = 0.0
        for x in (self.epsilon1, self.epsilon2):
            for y in (self.delta1, self.delta2, self.delta3):
                val = self.pairing(x, y) * np.conj(self.pairing(y, x))
                worst = max(worst, abs(val - 1.0))
        return worst

    def covolume(self):
        """Volume of a fundamental domain of the coarse lattice: q' alpha."""
        vol = self.pair.q_prime * self.pair.alpha
        if abs(vol - self.pair.tau) > 1e-12:
            raise IntegrityError("covolume does not reproduce tau")
        return vol


class ModuleFunction:
    """The generating vector f(t,r,s) = c delta_q^r delta_q'^s sqrt(f0(t)).

    f0 rescales the bump at tau to the unit cell, and c normalizes the
    module inner product; the finite groups carry point mass 1/sqrt(q)
    and 1/sqrt(q').
    """

    def __init__(self, pair, grid_n=None):
        pair = _as_pair(pair)
        self.pair = pair
        kw = {} if grid_n is None else {"grid_n": grid_n}
        self.profile = build_bump(pair.tau, **kw)
        q, qp = pair.q, pair.q_prime
        self.c = (q * qp) ** 0.25 / pair.alpha ** 0.5
        self.haar_mass_q = 1.0 / q ** 0.5
        self.haar_mass_q_prime = 1.0 / qp ** 0.5

    def f0(self, t):
        return self.profile.f_eval(np.asarray(t) * self.pair.q_prime)

    def value(self, t, r, s):
        if r % self.pair.q or s % self.pair.q_prime:
            return 0.0
        return self.c * float(np.sqrt(self.f0(t)))


def theta_prime(pair):
    """Angle of the compressed corner: alpha' / (q' alpha) in (0, 1).

    Also checks the defining chain 1/(q q' alpha) + p q'/q = alpha'/(q' alpha)
    mod 1 and the exact identity q' alpha + q alpha' = 1.
    """
    pair = _as_pair(pair)
    p, q, _, qp = pair.as_tuple()
    a, ap = pair.alpha, pair.alpha_prime
    tp = ap / (qp * a)
    chain = (1.0 / (q * qp * a) + p * qp / q) % 1.0
    if abs(chain - tp) > 1e-12:
        raise IntegrityError(
            f"angle chain broken: {chain!r} vs {tp!r}")
    if abs(qp * a + q * ap - 1.0) > 1e-12:
        raise IntegrityError("q' alpha + q alpha' = 1 violated")
    if not 0.0 < tp < 1.0:
        raise IntegrityError(f"corner angle {tp!r} outside (0, 1)")
    return tp


# ---------------------------------------------------------------------------
# circle-algebra elements
# ---------------------------------------------------------------------------


class CircleElement:
    """Finite sum  sum c_{n,m} V3^n V1^m  with V3 V1 = e(p'/q') V1 V3.

    V3 has order q', so n is reduced mod q'.  Reordering phases are
    accumulated as exact rationals before a single conversion to
    complex, so products and adjoints do not drift.
    """

    __slots__ = ("p_prime", "q_prime", "theta_prime", "coeffs")

    def __init__(self, p_prime, q_prime, theta_prime=None, coeffs=None):
        if q_prime < 1:
            raise ParameterError("q' must be positive")
        self.p_prime = int(p_prime)
        self.q_prime = int(q_prime)
        self.theta_prime = theta_prime
        self.coeffs = {}
        for (n, m), c in (coeffs or {}).items():
            if c == 0.0:
                continue
            key = (int(n) % q_prime, int(m))
            self.coeffs[key] = self.coeffs.get(key, 0.0) + complex(c)

    @classmethod
    def for_pair(cls, pair, coeffs=None):
        pair = _as_pair(pair)
        return cls(pair.p_prime, pair.q_prime, theta_prime(pair), coeffs)

    @classmethod
    def one(cls, p_prime, q_prime):
        return cls(p_prime, q_prime, coeffs={(0, 0): 1.0})

    def _like(self, coeffs):
        return CircleElement(self.p_prime, self.q_prime, self.theta_prime,
                             coeffs)

    def _check(self, other):
        if (self.p_prime, self.q_prime) != (other.p_prime, other.q_prime):
            raise ParameterError("circle elements over different parameters")

    def get(self, n, m):
        return self.coeffs.get((n % self.q_prime, m), 0.0)

    def items(self):
        return self.coeffs.items()

    def support_size(self):
        return len(self.coeffs)

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0.0) + c
        return self._like(out)

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def scale(self, c):
        return self._like({k: c * v for k, v in self.coeffs.items()})

    def __mul__(self, other):
        """(V3^n V1^m)(V3^n' V1^m') = e(-p' m n'/q') V3^{n+n'} V1^{m+m'}."""
        self._check(other)
        pp, qp = self.p_prime, self.q_prime
        out = {}
        for (n1, m1), c1 in self.coeffs.items():
            for (n2, m2), c2 in other.coeffs.items():
                ph = _phase(Fraction(-pp * m1 * n2, qp))
                key = ((n1 + n2) % qp, m1 + m2)
                out[key] = out.get(key, 0.0) + c1 * c2 * ph
        return self._like(out)

    def adjoint(self):
        """(V3^n V1^m)* = e(-p' m n/q') V3^{-n} V1^{-m}, conjugate weight."""
        pp, qp = self.p_prime, self.q_prime
        out = {}
        for (n, m), c in self.coeffs.items():
            ph = _phase(Fraction(-pp * m * n, qp))
            key = ((-n) % qp, -m)
            out[key] = out.get(key, 0.0) + np.conj(c) * ph
        return self._like(out)

    def flip(self):
        """The order-two symmetry V1 -> V1^{-1}, V3 -> V3^{-1}."""
        out = {((-n) % self.q_prime, -m): c for (n, m), c in self.coeffs.items()}
        return self._like(out)

    def max_diff(self, other):
        self._check(other)
        keys = set(self.coeffs) | set(other.coeffs)
        return max((abs(self.coeffs.get(k, 0.0) - other.coeffs.get(k, 0.0))
                    for k in keys), default=0.0)

    def __repr__(self):
        return (f"CircleElement(p'={self.p_prime}, q'={self.q_prime}, "
                f"{self.support_size()} terms)")


def psi_traces(x):
    """The two flip-symmetric functionals on the circle algebra.

    psi1(V3^n V1^m) = e(p'mn/(2q')) [m even],
    psi2(V3^n V1^m) = e(p'mn/(2q')) (-1)^{p'n} [m = q' mod 2],
    extended linearly over the support of x.
    """
    if not isinstance(x, CircleElement):
        raise ParameterError("psi_traces expects a CircleElement")
    pp, qp = x.p_prime, x.q_prime
    s1 = 0j
    s2 = 0j
    for (n, m), c in x.items():
        ph = _phase(Fraction(pp * m * n, 2 * qp))
        if m % 2 == 0:
            s1 += c * ph
        if (m - qp) % 2 == 0:
            s2 += c * ph * (-1) ** (pp * n)
    return s1, s2


# ---------------------------------------------------------------------------
# coefficient tables
# ---------------------------------------------------------------------------


def _spectral_table(fun, grid_n=GRID_N, max_grid=MAX_GRID, tail_tol=TAIL_TOL):
    """All integer-frequency coefficients int fun(x) e(-l x) dx on [-1/2, 1/2].

    The grid doubles until the high-frequency edge of the table clears
    ``tail_tol``; smooth flat-ended integrands get there immediately.
    """
    G = grid_n
    while True:
        x = -0.5 + np.arange(G) / G
        vals = np.asarray(fun(x), dtype=np.complex128)
        tab = sfft.fft(vals) / G
        tab *= np.where(np.arange(G) % 2 == 0, 1.0, -1.0)
        edge = np.abs(tab[G // 4: 3 * G // 4]).max()
        if edge < tail_tol:
            return tab
        if G >= max_grid:
            raise ResolutionError(
                f"coefficient tail {edge:.3e} will not clear {tail_tol} "
                f"at grid {G}")
        G *= 2


def _band_coeffs(tab, keep_tol=KEEP_TOL):
    """Signed-frequency dict {l: c} of the table entries above keep_tol."""
    G = len(tab)
    idx = np.nonzero(np.abs(tab) > keep_tol)[0]
    out = {}
    for i in idx:
        l = int(i) if i < G // 2 else int(i) - G
        out[l] = complex(tab[i])
    return out


def _sqrt_product(f, shift):
    def fun(x):
        return np.sqrt(np.maximum(f(x) * f(x + shift), 0.0))
    return fun


def _map_jobs(jobs, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda j: j(), jobs))
    return [j() for j in jobs]


def _quad_coeff(f, freq, scale):
    """(1/scale) int f(x) e(freq * x) dx over the support [-1/2, 1/2]."""
    re = quad(lambda x: f(x) * np.cos(2 * np.pi * freq * x),
              -0.5, 0.5, epsabs=QUAD_EPS, limit=200)[0]
    im = quad(lambda x: f(x) * np.sin(2 * np.pi * freq * x),
              -0.5, 0.5, epsabs=QUAD_EPS, limit=200)[0]
    return (re + 1j * im) / scale


# ---------------------------------------------------------------------------
# the two inner products of f with itself
# ---------------------------------------------------------------------------


def dperp_inner_ff(pair, mmax=V2_BOUND, workers=None):
    """Fine-lattice inner product of f with itself: the circle series.

    Returns {m: coefficient of the m-th power of the full-spectrum
    circle variable}; the sum collapses to 1 because the tau-periodized
    bump is identically one.  Coefficients just beyond ``mmax`` are
    computed and must be negligible (< 1e-8), else the truncation is
    reported as a resolution failure.
    """
    pair = _as_pair(pair)
    tau = pair.tau
    prof = build_bump(tau)
    f = prof.f_eval
    ms = list(range(-mmax, mmax + 1))
    jobs = [lambda m=m: _quad_coeff(f, m / tau, tau) for m in ms]
    vals = _map_jobs(jobs, workers)
    out = dict(zip(ms, vals))
    for m in (mmax + 1, -(mmax + 1), mmax + 2, -(mmax + 2)):
        c = _quad_coeff(f, m / tau, tau)
        if abs(c) >= 1e-8:
            raise ResolutionError(
                f"discarded circle coefficient at m={m} is {abs(c):.3e}")
    return out


def d_inner_ff(pair, grid_n=GRID_N, keep_tol=KEEP_TOL):
    """Coarse-lattice inner product of f with itself, as a Fourier element.

    Three bands n = -q, 0, +q; the band-k coefficient at m = q'l is the
    l-th Fourier coefficient of sqrt(f_tau(x) f_tau(x + k tau)).  Bands
    |k| >= 2 vanish identically because the supports are disjoint.
    The result is the module-side construction of the approximately
    central projection, with constant coefficient equal to the covolume
    tau.
    """
    pair = _as_pair(pair)
    tau = pair.tau
    q, qp = pair.q, pair.q_prime
    prof = build_bump(tau)
    f = prof.f_eval
    coeffs = {}
    for k in (-1, 0, 1):
        tab = _spectral_table(_sqrt_product(f, k * tau), grid_n=grid_n)
        for l, c in _band_coeffs(tab, keep_tol).items():
            coeffs[(qp * l, q * k)] = c
    out = FourierElement.from_dict(pair.theta, coeffs, prune_tol=keep_tol)
    if abs(out.get(0, 0) - tau) > 1e-8:
        raise IntegrityError(
            f"constant coefficient {out.get(0, 0)!r} does not give the "
            f"covolume {tau!r}")
    if max_coeff_diff(out, adjoint(out)) > 1e-9:
        raise IntegrityError("inner product of f with itself is not hermitian")
    return out


# ---------------------------------------------------------------------------
# images of the circle generators under the inverse corner map
# ---------------------------------------------------------------------------


def eta_inverse_V1(pair, grid_n=GRID_N, keep_tol=KEEP_TOL):
    """Preimage of the full-spectrum circle generator in the corner.

    Series over monomials U^{q'l} V^{qk-1}, k in {-2,-1,0,1}, with
    band-k coefficients the Fourier coefficients of
    sqrt(f_tau(x) f_tau(x + k tau + alpha')).
    """
    pair = _as_pair(pair)
    tau, ap = pair.tau, pair.alpha_prime
    q, qp = pair.q, pair.q_prime
    prof = build_bump(tau)
    f = prof.f_eval
    coeffs = {}
    for k in (-2, -1, 0, 1):
        tab = _spectral_table(_sqrt_product(f, k * tau + ap), grid_n=grid_n)
        for l, c in _band_coeffs(tab, keep_tol).items():
            coeffs[(qp * l, q * k - 1)] = c
    return FourierElement.from_dict(pair.theta, coeffs, prune_tol=keep_tol)


def eta_inverse_V3(pair, grid_n=GRID_N, keep_tol=KEEP_TOL):
    """Preimage of the order-q' circle generator in the corner.

    Series over monomials U^{q'l-1} V^{qk}, k in {-1,0,1}, with band-k
    coefficients the Fourier coefficients of
    e(x/q') sqrt(f_tau(x) f_tau(x + k tau)).
    """
    pair = _as_pair(pair)
    tau = pair.tau
    q, qp = pair.q, pair.q_prime
    prof = build_bump(tau)
    f = prof.f_eval
    coeffs = {}
    for k in (-1, 0, 1):
        base = _sqrt_product(f, k * tau)

        def fun(x, base=base):
            return np.exp(2j * np.pi * x / qp) * base(x)

        tab = _spectral_table(fun, grid_n=grid_n)
        for l, c in _band_coeffs(tab, keep_tol).items():
            coeffs[(qp * l - 1, q * k)] = c
    return FourierElement.from_dict(pair.theta, coeffs, prune_tol=keep_tol)


def phi_eta_inverse_V1(pair, reduced=False):
    """Parity traces of the V1 preimage series, as exact half-integers.

    phi_ij = 1/2 [j odd]([i even] + [q'-i even](-1)^{p'})
           + 1/2 [q-j odd]([i even] + [q'-i even](-1)^{pq'+p'}).

    With ``reduced=True`` (q' odd only) the equivalent two-term form
    1/2 (-1)^{p'i}([j odd] + (-1)^{pi}[q-j odd]) is returned instead.
    """
    pair = _as_pair(pair)
    p, q, pp, qp = pair.as_tuple()
    out = {}
    for i, j in ((0, 0), (0, 1), (1, 0), (1, 1)):
        if reduced:
            if qp % 2 == 0:
                raise ParameterError("reduced V1 form needs q' odd")
            val = (Fraction((-1) ** (pp * i), 2)
                   * (_even(j - 1) + (-1) ** (p * i) * _even(q - j - 1)))
        else:
            val = (Fraction(_even(j - 1), 2)
                   * (_even(i) + _even(qp - i) * (-1) ** pp)
                   + Fraction(_even(q - j - 1), 2)
                   * (_even(i) + _even(qp - i) * (-1) ** (p * qp + pp)))
        out[(i, j)] = val
    return out


def phi_eta_inverse_V3(pair, reduced=False):
    """Parity traces of the V3 preimage series, as exact half-integers.

    phi_ij = 1/2 ([i odd] + [q'-1-i even]) ([j even] + (-1)^{pi}[q-j even]);
    with ``reduced=True`` (q' even only) this collapses to [i odd](-1)^{pj}.
    """
    pair = _as_pair(pair)
    p, q, _, qp = pair.as_tuple()
    out = {}
    for i, j in ((0, 0), (0, 1), (1, 0), (1, 1)):
        if reduced:
            if qp % 2 == 1:
                raise ParameterError("reduced V3 form needs q' even")
            val = Fraction(_even(i - 1) * (-1) ** (p * j), 1)
        else:
            val = (Fraction(_even(i - 1) + _even(qp - 1 - i), 2)
                   * (_even(j) + (-1) ** (p * i) * _even(q - j)))
        out[(i, j)] = val
    return out


# ---------------------------------------------------------------------------
# scalar limit functions of the compressed generators
# ---------------------------------------------------------------------------


class CutdownDiagnostics:
    """Scalar functions controlling how central the compression is.

    C(t) is the symbol of the compressed shift generator (after
    stripping one factor of the order-q' generator); it tends uniformly
    to 1 as the pairs grow.  h0/h1 are the two-term sums bounding the
    symbol of the compressed clock generator: the h0 sum tends to 1,
    the h1 sum (the wrong-winding remainder) tends to 0.
    """

    def __init__(self, pair):
        pair = _as_pair(pair)
        self.pair = pair
        self.tau = pair.tau
        self.alpha_prime = pair.alpha_prime
        self.profile = build_bump(pair.tau)

    def C(self, t):
        f, tau, qp = self.profile.f_eval, self.tau, self.pair.q_prime
        t = np.asarray(t, dtype=float)
        return (f(tau * t) * np.exp(-2j * np.pi * tau * t / qp)
                + f(tau - tau * t) * np.exp(2j * np.pi * (tau - tau * t) / qp))

    def _h(self, y, extra):
        f, tau, ap = self.profile.f_eval, self.tau, self.alpha_prime
        y = np.asarray(y, dtype=float)
        return np.sqrt(np.maximum(f(tau * y) * f(tau * y - ap + extra), 0.0))

    def h0_sum(self, t):
        t = np.asarray(t, dtype=float)
        return self._h(-t, 0.0) + self._h(1.0 - t, 0.0)

    def h1_sum(self, t):
        t = np.asarray(t, dtype=float)
        return self._h(-t, 1.0) + self._h(1.0 - t, 1.0)

    def sup_c_minus_1(self, npts=1024):
        ts = np.linspace(0.0, 1.0, npts)
        return float(np.max(np.abs(self.C(ts) - 1.0)))

    def sup_h1(self, npts=1024):
        ts = np.linspace(0.0, 1.0, npts)
        return float(np.max(np.abs(self.h1_sum(ts))))

    def v2_coefficients(self, mmax=V2_BOUND, workers=None):
        """Series coefficients of C: (1/tau) int f_tau(x) e(x/q' + mx/tau) dx."""
        f, tau, qp = self.profile.f_eval, self.tau, self.pair.q_prime
        ms = list(range(-mmax, mmax + 1))
        jobs = [lambda m=m: _quad_coeff(f, 1.0 / qp + m / tau, tau) for m in ms]
        vals = _map_jobs(jobs, workers)
        return dict(zip(ms, vals))

    def series_eval(self, t, coeffs):
        t = np.asarray(t, dtype=float)
        total = np.zeros_like(t, dtype=np.complex128)
        for m, c in coeffs.items():
            total += c * np.exp(2j * np.pi * m * t)
        return total

    def corner_trace_of_shift_square(self):
        """tau'(y* y) for y the compressed-shift symbol: int |C(t)|^2 dt."""
        val = quad(lambda t: abs(complex(self.C(t))) ** 2, 0.0, 1.0,
                   epsabs=QUAD_EPS, limit=200)[0]
        return float(val)

    def report(self, npts=1024):
        return {
            "pair": self.pair.as_tuple(),
            "tau": self.tau,
            "alpha_prime": self.alpha_prime,
            "sup_c_minus_1": self.sup_c_minus_1(npts),
            "sup_h1": self.sup_h1(npts),
        }

    def dump_csv(self, path, npts=512):
        ts = np.linspace(0.0, 1.0, npts)
        cs = self.C(ts)
        h0 = self.h0_sum(ts)
        h1 = self.h1_sum(ts)
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["t", "c_re", "c_im", "h0_sum", "h1_sum"])
            for i, t in enumerate(ts):
                wr.writerow([f"{t:.10g}", f"{cs[i].real:.12g}",
                             f"{cs[i].imag:.12g}", f"{h0[i]:.12g}",
                             f"{h1[i]:.12g}"])


def cutdown_limit_functions(pair):
    """Limit diagnostics for the compressed generators of one pair."""
    return CutdownDiagnostics(pair)


# ---------------------------------------------------------------------------
# the two functionals through the corner and transpose maps
# ---------------------------------------------------------------------------


def psi_pi_xi_identities(pair, degree=4):
    """Check psi_j(quotient(transpose(U'^m V'^n))) against parity traces.

    Over the rational rotation algebra at p'/q', transposing a monomial
    and projecting onto the circle algebra turns psi1 into the sum of
    the two j-even parity traces, and psi2 into the corresponding
    parity-shifted combination:

      psi1 . quotient . transpose = phi_00 + phi_10,
      psi2 . quotient . transpose = phi_{0,q'} + (-1)^{p'} phi_{1,q'}.

    Both sides are evaluated on the degree x degree monomial grid with
    exact rational phases; the report carries the largest deviations.
    """
    pair = _as_pair(pair)
    pp, qp = pair.p_prime, pair.q_prime
    err1 = 0.0
    err2 = 0.0
    for m in range(degree):
        for n in range(degree):
            # transpose sends U'^m V'^n to U'^n V'^m; the quotient maps
            # that onto V1^n V3^m, which normal-orders with one phase.
            x = CircleElement(pp, qp,
                              coeffs={(m, n): _phase(Fraction(-pp * m * n, qp))})
            lhs1, lhs2 = psi_traces(x)
            base = _phase(Fraction(-pp * m * n, 2 * qp))
            rhs1 = base * _even(n)
            rhs2 = base * (-1) ** (pp * m) * _even(n - qp)
            err1 = max(err1, abs(lhs1 - rhs1))
            err2 = max(err2, abs(lhs2 - rhs2))
    tol = 1e-12
    return {
        "pair": pair.as_tuple(),
        "degree": degree,
        "q_prime_parity": "even" if qp % 2 == 0 else "odd",
        "max_err_psi1": err1,
        "max_err_psi2": err2,
        "ok": err1 < tol and err2 < tol,
    }
