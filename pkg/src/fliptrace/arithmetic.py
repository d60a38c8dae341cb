"""Continued-fraction convergents and consecutive-pair bookkeeping.

A pair of consecutive convergents p/q < theta < p'/q' with p'q - pq' = 1
carries the derived quantities

    alpha  = q*theta - p        (distance to the lower convergent, scaled)
    alpha' = p' - q'*theta      (distance to the upper convergent, scaled)
    tau    = q' * alpha         with the identity  q'*alpha + q*alpha' = 1.

Pairs with 1/2 < tau < 4/5 are the ones the projection-field machinery
consumes directly ("standing" pairs below); pairs with 1/5 < tau < 1/2 are
mapped to standing pairs for 1 - theta by ``complementary_reduce``.
"""

import warnings

import mpmath

from .algebra import THETA_DPS, ThetaValue
from .errors import IntegrityError, ParameterError

TAU_LO = 0.5
TAU_HI = 0.8
TAU_BOUNDARY_GUARD = 1e-9


class ConvergentPair:
    """Consecutive convergents (p, q, p', q') of theta with p'q - pq' = 1."""

    __slots__ = ("p", "q", "p_prime", "q_prime", "theta",
                 "alpha", "alpha_prime", "tau")

    def __init__(self, p, q, p_prime, q_prime, theta):
        if q < 1 or q_prime < 1 or p < 0 or p_prime < 1:
            raise ParameterError(
                f"bad pair ({p},{q},{p_prime},{q_prime}): entries out of range")
        if p_prime * q - p * q_prime != 1:
            raise IntegrityError(
                f"pair ({p},{q},{p_prime},{q_prime}) fails p'q - pq' = 1")
        with mpmath.workdps(THETA_DPS):
            mv = theta.mpval
            a = q * mv - p
            ap = p_prime - q_prime * mv
            if not (a > 0 and ap > 0):
                raise ParameterError(
                    f"pair ({p},{q},{p_prime},{q_prime}) does not bracket theta")
            # exact identity; residual is rounding amplified by ~q*q'
            resid = abs(q_prime * a + q * ap - 1)
            if resid > q * q_prime * mpmath.mpf(10) ** (-(THETA_DPS - 8)):
                raise IntegrityError(f"q'a + qa' = 1 violated by {resid}")
            self.alpha = float(a)
            self.alpha_prime = float(ap)
            self.tau = float(q_prime * a)
        self.p = p
        self.q = q
        self.p_prime = p_prime
        self.q_prime = q_prime
        self.theta = theta

    # -- parity bookkeeping -------------------------------------------

    @property
    def q_even(self):
        return self.q % 2 == 0

    @property
    def q_prime_even(self):
        return self.q_prime % 2 == 0

    @property
    def p_even(self):
        return self.p % 2 == 0

    @property
    def p_prime_even(self):
        return self.p_prime % 2 == 0

    def parity_case(self):
        """One of "q_prime_even", "q_even", "both_odd".

        q and q' are coprime (p'q - pq' = 1), so at most one is even.
        """
        if self.q_prime_even:
            return "q_prime_even"
        if self.q_even:
            return "q_even"
        return "both_odd"

    def is_standing(self):
        return TAU_LO < self.tau < TAU_HI

    def tau_mp(self):
        with mpmath.workdps(THETA_DPS):
            return self.q_prime * (self.q * self.theta.mpval - self.p)

    def as_tuple(self):
        return (self.p, self.q, self.p_prime, self.q_prime)

    def __iter__(self):
        return iter(self.as_tuple())

    def __repr__(self):
        return (f"ConvergentPair({self.p},{self.q},{self.p_prime},"
                f"{self.q_prime}; tau={self.tau:.6f})")

    def __eq__(self, other):
        return (isinstance(other, ConvergentPair)
                and self.as_tuple() == other.as_tuple()
                and self.theta.is_close(other.theta))

    def to_json_obj(self):
        return {
            "p": self.p, "q": self.q,
            "p_prime": self.p_prime, "q_prime": self.q_prime,
            "theta": self.theta.to_json_obj(),
            "alpha": self.alpha, "alpha_prime": self.alpha_prime,
            "tau": self.tau,
            "parity_case": self.parity_case(),
            "standing": self.is_standing(),
        }

    @classmethod
    def from_json_obj(cls, obj):
        return cls(obj["p"], obj["q"], obj["p_prime"], obj["q_prime"],
                   ThetaValue.from_json_obj(obj["theta"]))


def convergents(theta, depth):
    """Convergents p_k/q_k of theta in (0,1), values strictly inside (0,1).

    Standard recurrence on the stored partial quotients; the degenerate
    leading approximations 0/1 and 1/1 are dropped so every returned
    fraction lies strictly between 0 and 1.
    """
    if theta.kind == "rational":
        raise ParameterError("convergents need an irrational angle")
    digits = theta.cf_digits
    if depth < 1:
        raise ParameterError("depth must be >= 1")
    if depth > len(digits):
        raise ParameterError(
            f"depth {depth} exceeds the {len(digits)} stored cf digits")
    out = []
    h_prev, h = 1, 0   # numerators of the k-1 and k convergents, k = -1, 0
    k_prev, k = 0, 1
    for a in digits[:depth]:
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        if 0 < h < k:
            out.append((h, k))
    return out


def consecutive_pairs(theta, depth):
    """All bracketing pairs from consecutive convergents, standing or not.

    Each adjacent pair in the convergent list is oriented so that
    p/q < theta < p'/q'; the determinant p'q - pq' = 1 then holds
    automatically.
    """
    cs = convergents(theta, depth)
    mv = theta.value
    pairs = []
    for (pa, qa), (pb, qb) in zip(cs, cs[1:]):
        if pa / qa < mv:
            lo, hi = (pa, qa), (pb, qb)
        else:
            lo, hi = (pb, qb), (pa, qa)
        pairs.append(ConvergentPair(lo[0], lo[1], hi[0], hi[1], theta))
    return pairs


def standing_pairs(theta, depth):
    """Bracketing pairs whose tau = q'(q*theta - p) lies in (1/2, 4/5).

    Pairs with tau within 1e-9 of either endpoint are rejected with a
    warning, since the downstream branch selection is unstable there.
    An empty list simply means no pair qualified at this depth.
    """
    out = []
    for pair in consecutive_pairs(theta, depth):
        t = pair.tau
        if min(abs(t - TAU_LO), abs(t - TAU_HI)) < TAU_BOUNDARY_GUARD:
            warnings.warn(
                f"pair {pair.as_tuple()} has tau={t!r} within 1e-9 of a "
                "branch boundary; rejected", RuntimeWarning, stacklevel=2)
            continue
        if pair.is_standing():
            out.append(pair)
    return out


def complementary_reduce(pair, theta):
    """Map a pair with 1/5 < tau < 1/2 to a standing pair for 1 - theta.

    Uses 1 - q'(q*theta - p) = q(q'(1-theta) - (q' - p')): the new pair is
    (q'-p', q', q-p, q) for the angle 1-theta, and its tau equals 1 - tau.
    """
    t = pair.tau
    if not (0.2 < t < 0.5):
        raise ParameterError(
            f"complementary reduction needs tau in (1/5, 1/2); got {t!r}")
    theta_c = theta.one_minus()
    reduced = ConvergentPair(pair.q_prime - pair.p_prime, pair.q_prime,
                             pair.q - pair.p, pair.q, theta_c)
    if abs(reduced.tau - (1.0 - t)) > 1e-12:
        raise IntegrityError(
            f"complementary identity violated: {reduced.tau} vs {1.0 - t}")
    return reduced, theta_c
