"""Projection fields over the Flip orbifold.

Builders for the Rieffel field E(t) = G_t(U)V^{-1} + F_t(U) + V G_t(U),
its complement-conjugate F(s) = 1 - beta E(1-s), the six reference
projections P1..P6 whose characters pin down the K0 lattice, and the
rescaled approximately central projection e = zeta E(tau) attached to a
standing convergent pair.

All builders return FourierElement values; the trace characters of the
results are frozen in the tests against the twisted-polynomial trace code.
"""

from fractions import Fraction

import numpy as np

from .algebra import (ChernCharacter, FourierElement, LinearForm, ThetaValue,
                      apply_beta, apply_eta_doubling, apply_gamma, apply_zeta,
                      twisted_mul)
from .arithmetic import ConvergentPair
from .bump import DECAY_TOL, coefficients_adaptive
from .errors import ParameterError

BRANCH_TOL = 1e-9


def _as_theta(t):
    return t if isinstance(t, ThetaValue) else ThetaValue.from_value(t)


def _retag(a, theta):
    """Re-attach the caller's angle object (values must already agree)."""
    if not a.theta.is_close(theta, tol=1e-9):
        raise ParameterError("cannot retag: angles differ")
    return FourierElement(theta, a.rows)


def build_E(t, decay_tol=DECAY_TOL):
    """Rieffel projection at angle t, for 1/2 <= t < 1.

    Coefficient layout: row n=0 carries the periodized f-coefficients,
    rows n=-1 and n=+1 carry the g-coefficients, the latter twisted by
    e(t*m) so that the element is invariant under U,V -> U^-1,V^-1.
    """
    th = _as_theta(t)
    tf = float(th.value)
    if not (0.5 <= tf < 1.0):
        raise ParameterError(f"field parameter {tf!r} outside [1/2, 1)")
    _, fh, gh = coefficients_adaptive(tf, decay_tol=decay_tol)
    B = (len(fh) - 1) // 2
    ms = np.arange(-B, B + 1)
    ph = np.exp(2j * np.pi * np.array([th.frac_times(int(m)) for m in ms]))
    rows = {
        0: (-B, fh.astype(np.complex128)),
        -1: (-B, gh.astype(np.complex128)),
        1: (-B, gh.astype(np.complex128) * ph),
    }
    return FourierElement(th, rows)


def build_F(s, decay_tol=DECAY_TOL):
    """Complementary projection 1 - beta E(1-s) at angle s, 0 < s <= 1/2."""
    th = _as_theta(s)
    sf = float(th.value)
    if not (0.0 < sf <= 0.5):
        raise ParameterError(f"field parameter {sf!r} outside (0, 1/2]")
    E = build_E(th.one_minus(), decay_tol=decay_tol)
    out = FourierElement.one(th) - _retag(apply_beta(E), th)
    return out


def _p2(theta, decay_tol):
    v = float(theta.value)
    if abs(v - 0.25) < BRANCH_TOL or abs(v - 0.5) < BRANCH_TOL:
        raise ParameterError(f"angle {v!r} sits on a branch boundary")
    if v > 0.5:
        inner = _p2(theta.one_minus(), decay_tol)
        return _retag(apply_beta(inner), theta)
    doubled = theta.doubled_mod1()
    if v < 0.25:
        halfscale = build_F(doubled, decay_tol=decay_tol)
    else:
        halfscale = build_E(doubled, decay_tol=decay_tol)
    return _retag(apply_eta_doubling(halfscale, theta=theta), theta)


def _p3(theta, decay_tol):
    v = float(theta.value)
    if abs(v - 0.5) < BRANCH_TOL:
        raise ParameterError(f"angle {v!r} sits on a branch boundary")
    if v < 0.5:
        return build_F(theta, decay_tol=decay_tol)
    return build_E(theta, decay_tol=decay_tol)


def build_P(i, theta, decay_tol=DECAY_TOL):
    """Reference projections P1..P6 at the given angle.

    P1 = 1; P2 doubles the angle through the index-2 embedding; P3 is the
    Rieffel projection (or its complement-conjugate below 1/2); P4..P6 are
    the gamma twists of P3.  Angles within 1e-9 of a branch boundary
    (1/2 for all, additionally 1/4 and 3/4 for P2) are rejected.
    """
    theta = _as_theta(theta)
    v = float(theta.value)
    if not (0.0 < v < 1.0):
        raise ParameterError(f"angle {v!r} outside (0, 1)")
    if i == 1:
        return FourierElement.one(theta)
    if i == 2:
        return _p2(theta, decay_tol)
    if i == 3:
        return _p3(theta, decay_tol)
    if i in (4, 5, 6):
        return apply_gamma(i - 3, _p3(theta, decay_tol))
    raise ParameterError(f"projection index {i!r} outside 1..6")


def build_e(pair, theta, decay_tol=DECAY_TOL):
    """Approximately central projection e = zeta E(tau) for a standing pair."""
    if not isinstance(pair, ConvergentPair):
        pair = ConvergentPair(*pair, theta)
    if not pair.is_standing():
        raise ParameterError(
            f"pair {pair.as_tuple()} has tau={pair.tau!r} outside (1/2, 4/5)")
    th_tau = ThetaValue.from_value(pair.tau_mp())
    E = build_E(th_tau, decay_tol=decay_tol)
    return apply_zeta(pair, E, theta=theta)


def _even(n):
    return 1 if n % 2 == 0 else 0


def e_character(pair):
    """Exact Connes-Chern character of build_e for a standing pair.

    The canonical trace is q'(q*theta - p); the parity traces are

        phi_jk(e) = d2(q') d2(j) + d2(q) d2(j) d2(k)
                    + (1/2)(-1)^(p j k) d2(q'-1) d2(q-1)

    with d2 the mod-2 indicator, so one of the three terms survives per
    parity class of (q, q').  The tests pin phi_trace(build_e) to this.
    """
    if not isinstance(pair, ConvergentPair):
        raise ParameterError("e_character needs a ConvergentPair")
    tau = LinearForm(-pair.q_prime * pair.p, pair.q_prime * pair.q)
    p, q, qp = pair.p, pair.q, pair.q_prime
    phi = []
    for j, k in ((0, 0), (0, 1), (1, 0), (1, 1)):
        val = Fraction(_even(qp) * _even(j) + _even(q) * _even(j) * _even(k))
        val += Fraction((-1) ** (p * j * k), 2) * _even(qp - 1) * _even(q - 1)
        phi.append(val)
    return ChernCharacter(tau, phi)


def approx_centrality_report(e, pair=None, **norm_kwargs):
    """Norm estimates of the commutators of e with U+U* and V+V*.

    Estimates are spectral (truncated-representation power iteration); the
    coefficient l1 norms are included as rigorous upper bounds.  An
    approximately central projection drives all four numbers to zero as the
    pair deepens.
    """
    from .spectral import norm_estimate

    th = e.theta
    report = {}
    if pair is not None:
        report["pair"] = tuple(pair)
    for key, mono in (("u_comm", (1, 0)), ("v_comm", (0, 1))):
        s = FourierElement.monomial(th, *mono) + \
            FourierElement.monomial(th, -mono[0], -mono[1])
        comm = twisted_mul(e, s) - twisted_mul(s, e)
        report[key] = norm_estimate(comm, **norm_kwargs)
        report[key + "_l1"] = comm.l1()
    return report


class ProjectionField:
    """A labelled family t -> projection with an explicit validity range."""

    def __init__(self, label, builder, lo, hi, closed_lo=False,
                 closed_hi=False, excluded=()):
        self.label = label
        self.builder = builder
        self.lo = lo
        self.hi = hi
        self.closed_lo = closed_lo
        self.closed_hi = closed_hi
        self.excluded = tuple(excluded)

    def in_range(self, t):
        v = float(t.value) if isinstance(t, ThetaValue) else float(t)
        if not ((self.lo < v or (self.closed_lo and v == self.lo))
                and (v < self.hi or (self.closed_hi and v == self.hi))):
            return False
        return all(abs(v - x) >= BRANCH_TOL for x in self.excluded)

    def build(self, t):
        if not self.in_range(t):
            raise ParameterError(
                f"parameter {t!r} outside the validity range of {self.label}")
        return self.builder(t)

    def __repr__(self):
        lb = "[" if self.closed_lo else "("
        rb = "]" if self.closed_hi else ")"
        return f"ProjectionField({self.label}, {lb}{self.lo}, {self.hi}{rb})"


def field_E():
    return ProjectionField("E", build_E, 0.5, 1.0, closed_lo=True)


def field_F():
    return ProjectionField("F", build_F, 0.0, 0.5, closed_hi=True)


def field_P(i):
    excl = (0.25, 0.5, 0.75) if i == 2 else (0.5,)
    if i == 1:
        excl = ()
    return ProjectionField(f"P{i}", lambda t: build_P(i, t), 0.0, 1.0,
                           excluded=excl)


def field_e(p, q, p_prime, q_prime):
    """The AC projection as a field over the angles keeping the pair standing.

    tau = q'(q*theta - p) runs over (1/2, 4/5) exactly for theta in
    (p/q + 1/(2qq'), p/q + 4/(5qq')).
    """
    lo = p / q + 1.0 / (2 * q * q_prime)
    hi = p / q + 4.0 / (5 * q * q_prime)

    def builder(t):
        th = _as_theta(t)
        return build_e(ConvergentPair(p, q, p_prime, q_prime, th), th)

    return ProjectionField(f"e[{p},{q},{p_prime},{q_prime}]", builder, lo, hi)
