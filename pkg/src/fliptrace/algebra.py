"""Fourier polynomials over the rotation algebra and its flip orbifold.

The algebra A_theta is generated by unitaries U, V subject to

    V U = e(theta) U V,        e(t) := exp(2*pi*i*t).

An element is a finitely supported sum  a = sum c_{m,n} U^m V^n  (normal
form: U-powers first).  This module implements exact-phase arithmetic on
such polynomials:

* the twisted product and the adjoint,
* the canonical trace  tau(a) = c_{0,0},
* the four parity trace functionals

      phi_{jk}(U^m V^n) = e(-theta*m*n/2) [m = j (2)] [n = k (2)],

  which vanish on commutators twisted by the flip and take half-integer
  values on flip-invariant projections,
* the canonical automorphisms (flip, the order-4 and order-3 Weyl
  symmetries, the three sign automorphisms gamma_i, the angle-reversing
  isomorphism beta), the transpose anti-automorphism xi, and the two
  rescaling embeddings zeta (convergent-pair) and eta (angle doubling).

Angles carry extended precision (an exact ``Fraction`` head plus a float
tail, backed by a 60-digit value) so that phases e(theta*k) remain
accurate for |k| well beyond 1e5.
"""

import json
import math
import re
from fractions import Fraction

import mpmath
import numpy as np

from . import kernels
from .errors import IntegrityError, ParameterError

TWO_PI = 2.0 * math.pi

#: default modulus threshold below which coefficients are dropped
PRUNE_TOL = 1e-14

#: working precision (decimal digits) for stored angle values
THETA_DPS = 60

_NAMED_THETAS = {
    "golden": "(sqrt(5)-1)/2",
    "silver": "sqrt(2)-1",
}


def _mp(x):
    """Evaluate x to an mpmath float at the working precision."""
    with mpmath.workdps(THETA_DPS):
        return mpmath.mpf(x)


class ThetaValue:
    """An angle in (0, 1): exact rational p/q, or irrational with guard digits.

    For the irrational kind the value is split as ``hi + lo`` where ``hi``
    is the nearest double and ``lo`` a double-sized correction; together
    with the 60-digit master value this supports ``frac_times`` -- the
    fractional part of theta*k/den -- to ~1e-25 absolute accuracy.
    """

    __slots__ = ("kind", "p", "q", "hi", "lo", "_mpval", "cf_digits")

    def __init__(self, kind, p=None, q=None, mpval=None, cf_digits=None):
        self.kind = kind
        if kind == "rational":
            if q is None or q < 1 or p is None:
                raise ParameterError("rational angle needs p, q with q >= 1")
            g = math.gcd(p, q)
            self.p, self.q = p // g, q // g
            if not (0 < self.p / self.q < 1):
                raise ParameterError("angle must lie strictly between 0 and 1")
            self.hi = self.p / self.q
            self.lo = float(Fraction(self.p, self.q) - Fraction(self.hi))
            self._mpval = _mp(self.p) / self.q
            self.cf_digits = cf_digits
        elif kind == "irrational":
            v = _mp(mpval)
            if not (0 < v < 1):
                raise ParameterError("angle must lie strictly between 0 and 1")
            self.p = self.q = None
            self._mpval = v
            self.hi = float(v)
            with mpmath.workdps(THETA_DPS):
                self.lo = float(v - mpmath.mpf(self.hi))
            self.cf_digits = list(cf_digits) if cf_digits else self._compute_cf()
        else:
            raise ParameterError("kind must be 'rational' or 'irrational'")

    # -- constructors -------------------------------------------------

    @classmethod
    def from_rational(cls, p, q):
        return cls("rational", p=p, q=q)

    @classmethod
    def from_value(cls, value, cf_digits=None):
        return cls("irrational", mpval=value, cf_digits=cf_digits)

    @classmethod
    def from_cf(cls, digits):
        """Angle [0; a1, a2, ...] from positive partial quotients."""
        digits = [int(d) for d in digits]
        if not digits or any(d < 1 for d in digits):
            raise ParameterError("continued-fraction digits must be positive")
        with mpmath.workdps(THETA_DPS):
            x = mpmath.mpf(0)
            for d in reversed(digits):
                x = 1 / (d + x)
        return cls("irrational", mpval=x, cf_digits=digits)

    @classmethod
    def named(cls, name):
        try:
            expr = _NAMED_THETAS[name]
        except KeyError:
            raise ParameterError(f"unknown named angle {name!r}") from None
        with mpmath.workdps(THETA_DPS):
            if name == "golden":
                v = (mpmath.sqrt(5) - 1) / 2
            else:
                v = mpmath.sqrt(2) - 1
        return cls("irrational", mpval=v)

    @classmethod
    def parse(cls, text):
        """Parse 'golden' | 'silver' | a decimal | 'p/q' | '[0;a1,a2,...]'."""
        text = text.strip()
        if text in _NAMED_THETAS:
            return cls.named(text)
        if re.fullmatch(r"\d+\s*/\s*\d+", text):
            p, q = (int(t) for t in text.split("/"))
            return cls.from_rational(p, q)
        if text.startswith("["):
            body = text.strip("[]")
            head, _, tail = body.partition(";")
            if head.strip() not in ("0", ""):
                raise ParameterError("continued fraction must start with 0")
            digits = [int(t) for t in re.split(r"[,\s]+", tail.strip()) if t]
            return cls.from_cf(digits)
        try:
            return cls.from_value(text)
        except (ValueError, TypeError):
            raise ParameterError(f"cannot parse angle {text!r}") from None

    # -- derived angles -----------------------------------------------

    def one_minus(self):
        if self.kind == "rational":
            return ThetaValue.from_rational(self.q - self.p, self.q)
        with mpmath.workdps(THETA_DPS):
            return ThetaValue.from_value(1 - self._mpval)

    def doubled_mod1(self):
        if self.kind == "rational":
            return ThetaValue.from_rational((2 * self.p) % self.q, self.q)
        with mpmath.workdps(THETA_DPS):
            v = 2 * self._mpval
            return ThetaValue.from_value(v - mpmath.floor(v))

    def halved(self):
        if self.kind == "rational":
            return ThetaValue.from_rational(self.p, 2 * self.q)
        with mpmath.workdps(THETA_DPS):
            return ThetaValue.from_value(self._mpval / 2)

    # -- numerics ------------------------------------------------------

    @property
    def value(self):
        return self.hi + self.lo

    @property
    def mpval(self):
        return self._mpval

    def _compute_cf(self, depth=48):
        digits = []
        with mpmath.workdps(THETA_DPS):
            x = self._mpval
            for _ in range(depth):
                x = 1 / x
                d = int(mpmath.floor(x))
                if d < 1 or d > 10**12:
                    break
                digits.append(d)
                x -= d
                if x < mpmath.mpf(10) ** (-(THETA_DPS - 8)):
                    break
        return digits

    def frac_times(self, k, den=1):
        """Fractional part of theta*k/den in [0, 1), to ~1e-25 absolute."""
        if self.kind == "rational":
            num = (self.p * k) % (self.q * den)
            return num / (self.q * den)
        fr = Fraction(self.hi) * k
        fr = fr - (fr // den) * den  # now in [0, den)
        val = float(fr) / den + self.lo * (k / den)
        return val % 1.0

    def phase(self, k, den=1):
        """e(theta*k/den) as a complex double."""
        return complex(np.exp(2j * np.pi * self.frac_times(k, den)))

    # -- misc ----------------------------------------------------------

    def is_close(self, other, tol=1e-12):
        if self.kind == "rational" and other.kind == "rational":
            return (self.p, self.q) == (other.p, other.q)
        return abs(self.value - other.value) <= tol

    def to_json_obj(self):
        if self.kind == "rational":
            return {"kind": "rational", "p": self.p, "q": self.q}
        with mpmath.workdps(THETA_DPS):
            return {
                "kind": "irrational",
                "value": mpmath.nstr(self._mpval, 40),
                "cf_digits": list(self.cf_digits),
            }

    @classmethod
    def from_json_obj(cls, obj):
        if obj["kind"] == "rational":
            return cls.from_rational(obj["p"], obj["q"])
        return cls.from_value(obj["value"], cf_digits=obj.get("cf_digits"))

    def __repr__(self):
        if self.kind == "rational":
            return f"ThetaValue({self.p}/{self.q})"
        return f"ThetaValue({self.value!r})"


def check_same_theta(a, b, tol=1e-12):
    if not a.theta.is_close(b.theta, tol):
        raise ParameterError(
            f"operands live over different angles: {a.theta!r} vs {b.theta!r}"
        )


class FourierElement:
    """Finitely supported  sum c_{m,n} U^m V^n  over a fixed angle.

    Coefficients are stored row-wise by the V-degree n: ``rows[n]`` is a
    pair ``(m0, w)`` where ``w`` is a contiguous complex array and
    ``w[i]`` is the coefficient of U^{m0+i} V^n.
    """

    __slots__ = ("theta", "rows")

    def __init__(self, theta, rows=None):
        self.theta = theta
        self.rows = rows if rows is not None else {}

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls, theta):
        return cls(theta)

    @classmethod
    def one(cls, theta):
        return cls.monomial(theta, 0, 0, 1.0)

    @classmethod
    def monomial(cls, theta, m, n, coeff=1.0):
        w = np.array([coeff], dtype=np.complex128)
        return cls(theta, {n: (m, w)})

    @classmethod
    def from_dict(cls, theta, coeffs, prune_tol=PRUNE_TOL):
        """Build from a mapping (m, n) -> coefficient."""
        per_row = {}
        for (m, n), c in coeffs.items():
            per_row.setdefault(n, []).append((m, c))
        rows = {}
        for n, entries in per_row.items():
            ms = [m for m, _ in entries]
            m0, m1 = min(ms), max(ms)
            w = np.zeros(m1 - m0 + 1, dtype=np.complex128)
            for m, c in entries:
                w[m - m0] += c
            rows[n] = (m0, w)
        out = cls(theta, rows)
        out.prune(prune_tol)
        return out

    @classmethod
    def from_terms(cls, theta, terms, prune_tol=PRUNE_TOL):
        """Build from an iterable of (m, n, coefficient) triples."""
        d = {}
        for m, n, c in terms:
            d[(m, n)] = d.get((m, n), 0.0) + c
        return cls.from_dict(theta, d, prune_tol)

    def copy(self):
        return FourierElement(
            self.theta, {n: (m0, w.copy()) for n, (m0, w) in self.rows.items()}
        )

    # -- access --------------------------------------------------------

    def get(self, m, n):
        row = self.rows.get(n)
        if row is None:
            return 0j
        m0, w = row
        i = m - m0
        if 0 <= i < len(w):
            return complex(w[i])
        return 0j

    def items(self):
        """Yield (m, n, coefficient) for all stored nonzero entries."""
        for n in sorted(self.rows):
            m0, w = self.rows[n]
            for i in np.flatnonzero(w):
                yield (m0 + int(i), n, complex(w[i]))

    def support_size(self):
        return sum(int(np.count_nonzero(w)) for _, w in self.rows.values())

    def degree_bounds(self):
        """(max |m|, max |n|) over the support; (0, 0) when empty."""
        mdeg = ndeg = 0
        for n, (m0, w) in self.rows.items():
            nz = np.flatnonzero(w)
            if len(nz) == 0:
                continue
            ndeg = max(ndeg, abs(n))
            mdeg = max(mdeg, abs(m0 + int(nz[0])), abs(m0 + int(nz[-1])))
        return mdeg, ndeg

    def l1(self):
        return float(sum(np.abs(w).sum() for _, w in self.rows.values()))

    def sup_abs(self):
        vals = [np.abs(w).max() for _, w in self.rows.values() if len(w)]
        return float(max(vals)) if vals else 0.0

    def prune(self, tol=PRUNE_TOL):
        """Drop entries below tol in modulus; returns the dropped mass."""
        dropped = 0.0
        new_rows = {}
        for n, (m0, w) in self.rows.items():
            mask = np.abs(w) >= tol
            if not mask.any():
                dropped += float(np.abs(w).sum())
                continue
            nz = np.flatnonzero(mask)
            lead, trail = int(nz[0]), int(nz[-1])
            dropped += float(np.abs(w[~mask]).sum())
            w2 = w[lead : trail + 1].copy()
            w2[np.abs(w2) < tol] = 0.0
            new_rows[n] = (m0 + lead, w2)
        self.rows = new_rows
        return dropped

    # -- linear structure ---------------------------------------------

    def _binary_add(self, other, sign):
        check_same_theta(self, other)
        out = {}
        ns = set(self.rows) | set(other.rows)
        for n in ns:
            pieces = []
            if n in self.rows:
                pieces.append(self.rows[n])
            if n in other.rows:
                m0, w = other.rows[n]
                pieces.append((m0, sign * w))
            if len(pieces) == 1:
                m0, w = pieces[0]
                out[n] = (m0, w.copy())
                continue
            (a0, wa), (b0, wb) = pieces
            m0 = min(a0, b0)
            m1 = max(a0 + len(wa), b0 + len(wb))
            w = np.zeros(m1 - m0, dtype=np.complex128)
            w[a0 - m0 : a0 - m0 + len(wa)] += wa
            w[b0 - m0 : b0 - m0 + len(wb)] += wb
            out[n] = (m0, w)
        res = FourierElement(self.theta, out)
        res.prune(0.0)
        return res

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = FourierElement.monomial(self.theta, 0, 0, other)
        return self._binary_add(other, 1.0)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        if isinstance(other, (int, float, complex)):
            other = FourierElement.monomial(self.theta, 0, 0, other)
        return self._binary_add(other, -1.0)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __neg__(self):
        return FourierElement(
            self.theta, {n: (m0, -w) for n, (m0, w) in self.rows.items()}
        )

    def scale(self, c):
        return FourierElement(
            self.theta, {n: (m0, c * w) for n, (m0, w) in self.rows.items()}
        )

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        return twisted_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        return NotImplemented

    # -- serialization -------------------------------------------------

    def to_json_obj(self):
        coeffs = [
            {"m": m, "n": n, "re": c.real, "im": c.imag} for m, n, c in self.items()
        ]
        return {"theta": self.theta.to_json_obj(), "coeffs": coeffs}

    @classmethod
    def from_json_obj(cls, obj):
        theta = ThetaValue.from_json_obj(obj["theta"])
        d = {(e["m"], e["n"]): complex(e["re"], e["im"]) for e in obj["coeffs"]}
        return cls.from_dict(theta, d, prune_tol=0.0)

    def to_json(self, **kw):
        return json.dumps(self.to_json_obj(), **kw)

    @classmethod
    def from_json(cls, text):
        return cls.from_json_obj(json.loads(text))

    def __repr__(self):
        mdeg, ndeg = self.degree_bounds()
        return (
            f"<FourierElement {self.support_size()} terms, "
            f"deg(U)<={mdeg}, deg(V)<={ndeg}>"
        )


def max_coeff_diff(a, b):
    """Sup-norm of the coefficientwise difference of two elements."""
    return (a - b).sup_abs()


# ---------------------------------------------------------------------------
# product, adjoint, traces
# ---------------------------------------------------------------------------


def twisted_mul(a, b, prune_tol=PRUNE_TOL):
    """Product in the rotation algebra:  U^m V^n * U^m' V^n' =
    e(theta*n*m') U^{m+m'} V^{n+n'}  extended bilinearly."""
    check_same_theta(a, b)
    if not a.rows or not b.rows:
        return FourierElement.zero(a.theta)
    tmap = {n1: a.theta.frac_times(n1) for n1 in a.rows}
    rows = kernels.mul_rows(a.rows, b.rows, tmap)
    out = FourierElement(a.theta, rows)
    out.prune(prune_tol)
    return out


def adjoint(a):
    """Hermitian adjoint:  (U^m V^n)* = e(theta*m*n) U^{-m} V^{-n}."""
    out = {}
    th = a.theta
    for n, (m0, w) in a.rows.items():
        ms = m0 + np.arange(len(w))
        tn = th.frac_times(n)
        ph = np.exp(2j * np.pi * ((tn * ms) % 1.0))
        wc = np.conj(w) * ph
        out[-n] = (-(m0 + len(w) - 1), wc[::-1].copy())
    res = FourierElement(th, out)
    res.prune(0.0)
    return res


def is_hermitian(a, tol=1e-10):
    return max_coeff_diff(a, adjoint(a)) <= tol


def canonical_trace(a):
    """tau(a) = coefficient of U^0 V^0."""
    return a.get(0, 0)


def _jk_pair(jk):
    if isinstance(jk, str):
        if len(jk) != 2 or any(ch not in "01" for ch in jk):
            raise ParameterError(f"bad parity label {jk!r}")
        return int(jk[0]), int(jk[1])
    j, k = jk
    return int(j) % 2, int(k) % 2

def phi_trace(jk, a):
    """Parity trace  phi_jk(a) = sum over m=j(2), n=k(2) of
    c_{m,n} e(-theta*m*n/2)."""
    j, k = _jk_pair(jk)
    th = a.theta
    total = 0j
    for n, (m0, w) in a.rows.items():
        if (n - k) % 2:
            continue
        start = (j - m0) % 2
        sub = w[start::2]
        if not len(sub):
            continue
        ms = m0 + start + 2 * np.arange(len(sub))
        tn = th.frac_times(n, 2)
        total += np.sum(sub * np.exp(-2j * np.pi * ((tn * ms) % 1.0)))
    return complex(total)


def all_phi_traces(a):
    """The four parity traces in the order 00, 01, 10, 11."""
    return tuple(phi_trace(jk, a) for jk in ("00", "01", "10", "11"))


# ---------------------------------------------------------------------------
# automorphisms
# ---------------------------------------------------------------------------


def _map_coeffs(a, theta_out, fn):
    """Rebuild an element by mapping (m, n, c) -> (m', n', c')."""
    d = {}
    for m, n, c in a.items():
        m2, n2, c2 = fn(m, n, c)
        d[(m2, n2)] = d.get((m2, n2), 0.0) + c2
    return FourierElement.from_dict(theta_out, d, prune_tol=0.0)


def apply_flip(a):
    """Flip:  U -> U^{-1}, V -> V^{-1};  c'_{-m,-n} = c_{m,n}."""
    return _map_coeffs(a, a.theta, lambda m, n, c: (-m, -n, c))


def apply_fourier(a):
    """Order-4 symmetry:  U -> V^{-1}, V -> U.

    On coefficients:  (m, n) -> (n, -m) with phase e(-theta*m*n).
    """
    th = a.theta

    def fn(m, n, c):
        return (n, -m, c * np.exp(-2j * np.pi * th.frac_times(m * n)))

    return _map_coeffs(a, th, fn)


def apply_cubic(a):
    """Order-3 symmetry:  U -> e(-theta/2) U^{-1} V,  V -> U^{-1}.

    On coefficients:  (m, n) -> (-m-n, m) with phase
    e(-(theta/2) m (m + 2n)).
    """
    th = a.theta

    def fn(m, n, c):
        ph = np.exp(-2j * np.pi * th.frac_times(m * (m + 2 * n), 2))
        return (-m - n, m, c * ph)

    return _map_coeffs(a, th, fn)


def apply_gamma(i, a):
    """Sign automorphisms:  gamma_1: U -> -U;  gamma_2: V -> -V;
    gamma_3 = gamma_1 gamma_2."""
    if i not in (1, 2, 3):
        raise ParameterError("gamma index must be 1, 2 or 3")

    def fn(m, n, c):
        if i == 1:
            s = -1.0 if m % 2 else 1.0
        elif i == 2:
            s = -1.0 if n % 2 else 1.0
        else:
            s = -1.0 if (m + n) % 2 else 1.0
        return (m, n, c * s)

    return _map_coeffs(a, a.theta, fn)


def apply_beta(a):
    """Angle-reversing isomorphism A_{1-s} -> A_s:
    U -> U, V -> V^{-1} up to the twist sign (-1)^{m+n} on coefficients."""
    theta_out = a.theta.one_minus()

    def fn(m, n, c):
        s = -1.0 if (m + n) % 2 else 1.0
        return (m, -n, c * s)

    return _map_coeffs(a, theta_out, fn)


def apply_xi(a):
    """Transpose anti-automorphism:  U <-> V;  (m, n) -> (n, m), no phase.

    Satisfies xi(ab) = xi(b) xi(a) and commutes with the flip.
    """
    return _map_coeffs(a, a.theta, lambda m, n, c: (n, m, c))


def apply_zeta(pair, a, theta=None):
    """Rescaling embedding A_tau -> A_theta for a convergent pair:
    U_tau -> U^{q'}, V_tau -> V^{q};  (m, n) -> (q'm, qn), no phase.

    ``pair`` is (p, q, p', q').  The target angle satisfies
    tau = q'(q*theta - p); it is derived from ``a.theta`` unless supplied.
    """
    p, q, p2, q2 = pair
    with mpmath.workdps(THETA_DPS):
        derived = (a.theta.mpval / q2 + p) / q
        target = ThetaValue.from_value(derived)
    if theta is not None:
        if not theta.is_close(target, tol=1e-9):
            raise ParameterError(
                "supplied angle is inconsistent with the pair and the "
                "source angle tau"
            )
        target = theta
    return _map_coeffs(a, target, lambda m, n, c: (q2 * m, q * n, c))


def apply_eta_doubling(a, theta=None):
    """Doubling embedding A_{2 theta} -> A_theta:
    U_{2theta} -> -U^2, V_{2theta} -> V;  (m, n) -> (2m, n), sign (-1)^m."""
    target = a.theta.halved() if theta is None else theta
    if theta is not None and not theta.doubled_mod1().is_close(a.theta, tol=1e-9):
        raise ParameterError("supplied angle does not double to the source angle")

    def fn(m, n, c):
        s = -1.0 if m % 2 else 1.0
        return (2 * m, n, c * s)

    return _map_coeffs(a, target, fn)


# ---------------------------------------------------------------------------
# half-integer snapping, characters
# ---------------------------------------------------------------------------


def snap_half_integer(value, tol=1e-6):
    """Round a real to the nearest half-integer; error if the residual
    exceeds tol or the imaginary part is non-negligible."""
    if isinstance(value, complex):
        if abs(value.imag) > tol:
            raise IntegrityError(f"value {value} is not real within {tol}")
        value = value.real
    doubled = round(2.0 * value)
    resid = abs(value - doubled / 2.0)
    if resid > tol:
        raise IntegrityError(
            f"value {value} is {resid:.3e} away from a half-integer (tol {tol})"
        )
    return Fraction(int(doubled), 2)


class LinearForm:
    """Exact expression a + b*theta with rational a, b."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    def eval(self, theta):
        return float(self.a) + float(self.b) * theta.value

    def eval_mp(self, theta):
        with mpmath.workdps(THETA_DPS):
            return float(self.a) + float(self.b) * theta.mpval

    def __eq__(self, other):
        return (
            isinstance(other, LinearForm)
            and self.a == other.a
            and self.b == other.b
        )

    def __hash__(self):
        return hash((self.a, self.b))

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}*theta"
        return f"{self.a} + {self.b}*theta"

    def to_json_obj(self):
        return {"a": str(self.a), "b": str(self.b)}

    @classmethod
    def from_json_obj(cls, obj):
        return cls(Fraction(obj["a"]), Fraction(obj["b"]))


def recognize_linear_form(value, theta, bmax=100000, tol=1e-7):
    """Find the simplest exact a + b*theta (a, b integers, |b| <= bmax)
    matching a real value; smallest |b| wins among residuals below tol."""
    if isinstance(value, complex):
        value = value.real
    tv = theta.value
    best = None
    for b in sorted(range(-bmax, bmax + 1), key=abs):
        a = round(value - b * tv)
        resid = abs(value - a - b * tv)
        if resid <= tol:
            best = LinearForm(a, b)
            break
    if best is None:
        raise IntegrityError(
            f"no integer combination a + b*theta matches {value} within {tol}"
        )
    return best


class ChernCharacter:
    """The invariant (tau; phi_00, phi_01, phi_10, phi_11) of a projection
    class: an exact linear form in theta plus four half-integers."""

    __slots__ = ("tau", "phi")

    def __init__(self, tau, phi):
        if not isinstance(tau, LinearForm):
            tau = LinearForm(tau)
        phi = tuple(Fraction(x) for x in phi)
        if len(phi) != 4:
            raise ParameterError("need exactly four parity-trace values")
        for x in phi:
            if (2 * x).denominator != 1:
                raise ParameterError(f"parity trace {x} is not a half-integer")
        self.tau = tau
        self.phi = phi

    @classmethod
    def from_element(cls, a, tau_form=None, tol=1e-6, bmax=100000):
        """Snap the measured traces of an element to an exact character."""
        phis = [snap_half_integer(v, tol) for v in all_phi_traces(a)]
        t = canonical_trace(a)
        if abs(t.imag) > tol:
            raise IntegrityError("canonical trace is not real")
        if tau_form is None:
            tau_form = recognize_linear_form(t.real, a.theta, bmax=bmax)
        else:
            if abs(tau_form.eval_mp(a.theta) - t.real) > tol:
                raise IntegrityError("canonical trace does not match the given form")
        return cls(tau_form, phis)

    def as_floats(self, theta):
        return (self.tau.eval(theta),) + tuple(float(x) for x in self.phi)

    def __eq__(self, other):
        return (
            isinstance(other, ChernCharacter)
            and self.tau == other.tau
            and self.phi == other.phi
        )

    def __hash__(self):
        return hash((self.tau, self.phi))

    def __str__(self):
        phis = ", ".join(str(x) for x in self.phi)
        return f"({self.tau}; {phis})"

    def to_json_obj(self):
        return {
            "tau": self.tau.to_json_obj(),
            "phi": [str(x) for x in self.phi],
        }

    @classmethod
    def from_json_obj(cls, obj):
        return cls(
            LinearForm.from_json_obj(obj["tau"]),
            [Fraction(s) for s in obj["phi"]],
        )


# ---------------------------------------------------------------------------
# test/helper utilities
# ---------------------------------------------------------------------------


def random_element(theta, rng, nterms=20, mmax=6, nmax=6, hermitian=False):
    """Random polynomial with the given support box, for property checks."""
    d = {}
    for _ in range(nterms):
        m = int(rng.integers(-mmax, mmax + 1))
        n = int(rng.integers(-nmax, nmax + 1))
        c = complex(rng.standard_normal(), rng.standard_normal())
        d[(m, n)] = d.get((m, n), 0.0) + c
    a = FourierElement.from_dict(theta, d, prune_tol=0.0)
    if hermitian:
        a = 0.5 * (a + adjoint(a))
    return a
