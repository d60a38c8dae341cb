"""Norm estimation and the spectral cutoff behind the cutdown pipeline.

Norms are estimated in the truncated lattice representation

    (U xi)(k) = xi(k-1),        (V xi)(k) = e(k*theta + phi0) xi(k),

|k| <= N, by power iteration on a*a, maximized over a spread of phase
offsets phi0 and validated by an N -> 2N stabilization check.  The
spectral cutoff chi (characteristic function of [1/2, oo)) is computed
abstractly on coefficients by the cubic iteration p <- 3p^2 - 2p^3,
which contracts spectrum within 0.2 of {0, 1} onto {0, 1}.
"""

import csv

import numpy as np

from .algebra import (FourierElement, adjoint, all_phi_traces, apply_flip,
                      canonical_trace, check_same_theta, twisted_mul)
from .errors import GapError, IntegrityError, ParameterError, ResolutionError
from .kernels import band_operator

_GOLD = 0.6180339887498949
DEFAULT_OFFSETS = tuple((0.05 + k * _GOLD) % 1.0 for k in range(8))

GAP_THRESHOLD = 0.2
CHI_TARGET = 1e-10
CHI_SUCCESS_FLOOR = 1e-9
CHI_MAX_ITER = 60
CHI_PRUNE_TOL = 1e-13
CHI_PRUNE_ENDGAME = 1e-15


class RepConfig:
    """Window and phase-offset choices for the truncated representation."""

    def __init__(self, N=None, phase_offsets=DEFAULT_OFFSETS, margin=64,
                 max_iter=200, rtol=1e-6, stab_rtol=1e-3, block=6):
        if len(phase_offsets) < 8:
            raise ParameterError("need at least 8 phase offsets")
        if margin < 0 or max_iter < 1 or block < 1:
            raise ParameterError("bad representation configuration")
        self.N = N
        self.phase_offsets = tuple(float(p) % 1.0 for p in phase_offsets)
        self.margin = int(margin)
        self.max_iter = int(max_iter)
        self.rtol = float(rtol)
        self.stab_rtol = float(stab_rtol)
        self.block = int(block)

    def window_for(self, a):
        if self.N is not None:
            return self.N
        mdeg, _ = a.degree_bounds()
        return 8 * mdeg + self.margin


def _band_items(a):
    """Rows of ``a`` in the form the band operator consumes."""
    th = a.theta
    items = []
    for n, (m0, w) in a.rows.items():
        tn = th.frac_times(n)
        ms = m0 + np.arange(len(w))
        tw = w * np.exp(-2j * np.pi * ((tn * ms) % 1.0))
        items.append((n, tn, m0, tw))
    return items


def _power_estimate(a, a_star, N, offsets, max_iter, rtol, block):
    """Blocked power iteration with Rayleigh-Ritz extraction of the top
    singular value, maximized over the given phase offsets."""
    items = _band_items(a)
    items_star = _band_items(a_star)
    npts = 2 * N + 1
    b = min(block, npts)
    best = 0.0
    for idx, phi0 in enumerate(offsets):
        A = band_operator(items, N, phi0=phi0)
        As = band_operator(items_star, N, phi0=phi0)
        rng = np.random.default_rng(20260823 + 7919 * idx)
        X = rng.standard_normal((npts, b)) + 1j * rng.standard_normal((npts, b))
        X, _ = np.linalg.qr(X)
        rho_prev = 0.0
        for it in range(max_iter):
            Z = As.apply_block(A.apply_block(X))  # (a*a) X
            G = X.conj().T @ Z
            G = (G + G.conj().T) / 2.0
            rho = float(np.linalg.eigvalsh(G)[-1])
            nz = np.linalg.norm(Z)
            if nz == 0.0:
                rho = 0.0
                break
            if it >= 2 and abs(rho - rho_prev) <= rtol * max(rho, 1e-300):
                rho_prev = rho
                break
            rho_prev = rho
            X, _ = np.linalg.qr(Z)
        best = max(best, np.sqrt(max(rho_prev, 0.0)))
    return best


def norm_estimate(a, cfg=None):
    """Operator-norm estimate of a Fourier polynomial.

    Power iteration on a*a in the truncated representation, maximized over
    the configured phase offsets; the window is doubled once and the two
    estimates must agree to stab_rtol (relative), else a resolution error
    is raised.  The estimate is a heuristic lower bound.
    """
    if cfg is None:
        cfg = RepConfig()
    if a.support_size() == 0:
        return 0.0
    a_star = adjoint(a)
    N = cfg.window_for(a)
    e1 = _power_estimate(a, a_star, N, cfg.phase_offsets, cfg.max_iter,
                         cfg.rtol, cfg.block)
    e2 = _power_estimate(a, a_star, 2 * N, cfg.phase_offsets, cfg.max_iter,
                         cfg.rtol, cfg.block)
    scale = max(e2, e1)
    if scale > 0 and abs(e2 - e1) > cfg.stab_rtol * scale:
        raise ResolutionError(
            f"norm estimate not stabilized: {e1!r} at N={N} vs {e2!r} at 2N")
    return max(e1, e2)


class CutdownResult:
    """Outcome of the spectral cutoff iteration."""

    def __init__(self, chi, iterations, gap_metric, residual, pruned_mass,
                 history):
        self.chi = chi
        self.iterations = iterations
        self.gap_metric = gap_metric
        self.residual = residual
        self.pruned_mass = pruned_mass
        self.history = list(history)

    def dump_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["iteration", "residual_l1"])
            for i, r in enumerate(self.history):
                wr.writerow([i, f"{r:.6e}"])

    def __repr__(self):
        return (f"CutdownResult(iterations={self.iterations}, "
                f"gap={self.gap_metric:.3g}, residual={self.residual:.3g})")


def _hermitize(x):
    return (x + adjoint(x)) * 0.5


def _gap_probe(d):
    """Cheap spectral-radius probe of a self-adjoint element.

    A short blocked power iteration at a reduced window: only the 0.2
    threshold decision needs this, so +-10% accuracy is enough and the
    full estimator (with its stabilization doubling) would dominate the
    cutdown runtime.
    """
    mdeg, _ = d.degree_bounds()
    N = 2 * mdeg + 64
    return _power_estimate(d, adjoint(d), N, (0.05, 0.55), 30, 1e-3, 4)


def chi_cutoff(x, prune_tol=CHI_PRUNE_TOL, max_iter=CHI_MAX_ITER,
               target=CHI_TARGET, gap_threshold=GAP_THRESHOLD,
               success_floor=CHI_SUCCESS_FLOOR):
    """Spectral projection of a self-adjoint x onto its spectrum above 1/2.

    Requires the spectrum of x to avoid the repelling zone around 1/2, as
    witnessed by ||x^2 - x|| < 0.2: the coefficient-l1 bound decides when
    it already certifies that, otherwise a short representation probe of
    the spectral radius is consulted.  The cubic iteration then converges
    quadratically; each step is re-hermitized and pruned (discarded mass
    tracked; the prune loosens accuracy until the endgame).

    The l1 residual of p^2 - p certifies the operator-norm residual.  It
    is driven below ``target`` when float64 allows; the rounding floor for
    large supports sits a little higher, so an iteration that stalls while
    certified below ``success_floor`` still succeeds, with the best
    iterate returned.  Growth of the residual signals spectrum in the
    repelling zone and raises a gap error.
    """
    herm_defect = (x - adjoint(x)).l1()
    if herm_defect > 1e-9 * max(1.0, x.l1()):
        raise ParameterError(
            f"spectral cutoff needs a self-adjoint input; defect {herm_defect}")

    p = _hermitize(x)
    d = twisted_mul(p, p) - p
    l1_gap = d.l1()
    if l1_gap < gap_threshold:
        gap_metric = l1_gap
    else:
        gap_metric = _gap_probe(d)
        if gap_metric >= gap_threshold:
            raise GapError(
                f"||x^2 - x|| estimate {gap_metric:.4f} >= {gap_threshold}; "
                "the cutdown is not close enough to a projection (use a "
                "deeper convergent pair)")

    residual = l1_gap
    history = [residual]
    pruned = 0.0
    if residual < target:
        return CutdownResult(p, 0, gap_metric, residual, pruned, history)

    best_p, best_r = p, residual
    iterations = 0
    for iterations in range(1, max_iter + 1):
        # 3p^2 - 2p^3 = p + d - 2 p d  with  d = p^2 - p
        pd = twisted_mul(p, d)
        p = _hermitize(p + d - pd * 2.0)
        tol = prune_tol if best_r > 1e-6 else CHI_PRUNE_ENDGAME
        pruned += p.prune(tol)
        d = twisted_mul(p, p) - p
        residual = d.l1()
        history.append(residual)
        improved = residual < best_r
        if improved:
            best_p, best_r = p, residual
        if residual < target:
            break
        if best_r < success_floor and not improved:
            break  # rounding floor reached; best iterate is certified
        if residual > 4.0 * best_r and best_r > success_floor:
            raise GapError(
                f"cubic iteration diverging (residual {residual:.3e} from "
                f"{best_r:.3e}); spectrum too close to 1/2 -- use a deeper "
                "convergent pair")
    if best_r >= success_floor:
        raise IntegrityError(
            f"cubic iteration stalled at residual {best_r:.3e} "
            f"after {iterations} steps")
    return CutdownResult(best_p, iterations, gap_metric, best_r, pruned,
                         history)


def cutdown_invariants(e, P, theta, pair=None, **chi_kwargs):
    """Trace data of chi(e P e): the numerical route to the K-matrix column.

    Returns the canonical trace and the four Flip-trace values of the
    cutdown projection, together with iteration diagnostics.
    """
    check_same_theta(e, P)
    x = twisted_mul(twisted_mul(e, P), e)
    res = chi_cutoff(x, **chi_kwargs)
    chi = res.chi
    tau = canonical_trace(chi)
    phis = all_phi_traces(chi)
    if max(abs(v.imag) for v in list(phis) + [tau]) > 1e-6:
        raise IntegrityError("cutdown traces have non-negligible imaginary part")
    return {
        "tau": float(tau.real),
        "phi": [float(v.real) for v in phis],
        "iterations": res.iterations,
        "residual": res.residual,
        "gap_metric": res.gap_metric,
    }
