"""Command-line front end.

Four subcommands cover the workflows the library supports:

* ``convergents`` -- list consecutive-convergent pairs of an angle with
  their tau values, parity cases and standing flags.
* ``kmatrix``     -- closed-form character table and trace vector of a
  standing-pair cutdown family, optionally cross-checked column by
  column against the spectral-cutoff measurement.
* ``orbit``       -- the six symmetry images of the table, exact.
* ``verify``      -- the self-check battery (fast or full).

Reports serialize to text, JSON or CSV.  Exit codes: 0 all good, 1 a
verification failed, 2 bad usage or parameters.
"""

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .algebra import ThetaValue, all_phi_traces
from .arithmetic import ConvergentPair, consecutive_pairs, standing_pairs
from .errors import FliptraceError, GapError, ParameterError
from .fields import build_e, e_character
from .ktheory import (PARITY_LABELS, KMatrix, kmatrix_closed,
                      kmatrix_measured, kmatrix_of_identity, s3_orbit_report,
                      trace_vector_of_identity)

DEFAULT_DEPTH = 12
MAX_DEPTH = 64
DEFAULT_SEED = 20260823

# accepted --tolerance keys with (default, low, high)
TOLERANCE_RANGES = {
    "tau": (1e-6, 1e-12, 1e-2),
    "snap": (1e-6, 1e-12, 0.2),
}


@dataclass
class RunConfig:
    """Resolved options shared by the subcommands."""

    theta: ThetaValue = None
    depth: int = DEFAULT_DEPTH
    pair: tuple = None
    element: str = "e"
    verify: bool = False
    level: str = "fast"
    fmt: str = "text"
    seed: int = DEFAULT_SEED
    tolerances: dict = field(default_factory=dict)
    out: str = None

    def tolerance(self, key):
        return self.tolerances.get(key, TOLERANCE_RANGES[key][0])


def _parse_theta(text):
    theta = ThetaValue.parse(text)
    if theta.kind == "rational":
        raise ParameterError(
            f"angle {text!r} is rational; the constructions need an "
            "irrational angle in (0, 1)")
    v = theta.value
    if not 0.0 < v < 1.0:
        raise ParameterError(f"angle {v!r} outside (0, 1)")
    if abs(v - 0.5) < 1e-9:
        raise ParameterError("angle 1/2 sits on the branch boundary")
    return theta


def _parse_pair_spec(text):
    parts = text.split(",")
    if len(parts) != 4:
        raise ParameterError(
            f"--pair wants p,q,p',q' (four integers), got {text!r}")
    try:
        return tuple(int(x) for x in parts)
    except ValueError as exc:
        raise ParameterError(f"--pair {text!r}: {exc}") from None


def _parse_tolerances(entries):
    out = {}
    for entry in entries or ():
        if "=" not in entry:
            raise ParameterError(
                f"--tolerance wants KEY=VALUE, got {entry!r}")
        key, _, val = entry.partition("=")
        key = key.strip()
        if key not in TOLERANCE_RANGES:
            raise ParameterError(
                f"unknown tolerance {key!r}; known: "
                f"{sorted(TOLERANCE_RANGES)}")
        try:
            num = float(val)
        except ValueError:
            raise ParameterError(
                f"tolerance {key} value {val!r} is not a number") from None
        _, lo, hi = TOLERANCE_RANGES[key]
        if not lo <= num <= hi:
            raise ParameterError(
                f"tolerance {key}={num} outside [{lo}, {hi}]")
        out[key] = num
    return out


def _resolve_pair(cfg):
    """The pair to work on: an explicit --pair at the given angle, else the
    shallowest standing pair within --depth."""
    if cfg.pair is not None:
        return ConvergentPair(*cfg.pair, cfg.theta)
    depth = min(cfg.depth, len(cfg.theta.cf_digits))
    found = standing_pairs(cfg.theta, depth)
    if not found:
        raise ParameterError(
            f"no standing pair within depth {depth} for this angle; "
            "try a larger --depth or give --pair explicitly")
    return found[0]


def _next_deeper_standing(pair):
    """The next standing pair beyond ``pair`` in the same tower, if the
    stored digits reach that far."""
    theta = pair.theta
    depth = min(MAX_DEPTH, len(theta.cf_digits))
    for cand in standing_pairs(theta, depth):
        if cand.q_prime > pair.q_prime:
            return cand
    return None


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def _render_csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(cfg, text):
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _fmt_half(fr):
    return str(fr) if fr.denominator == 1 else f"{fr.numerator}/2"


# ---------------------------------------------------------------------------
# convergents
# ---------------------------------------------------------------------------


def cmd_convergents(cfg):
    depth = min(cfg.depth, len(cfg.theta.cf_digits))
    pairs = consecutive_pairs(cfg.theta, depth)
    report = {
        "theta": float(cfg.theta.value),
        "depth": depth,
        "pairs": [p.to_json_obj() for p in pairs],
    }
    if cfg.fmt == "json":
        _emit(cfg, json.dumps(report, indent=2))
    elif cfg.fmt == "csv":
        header = ["p", "q", "p_prime", "q_prime", "alpha", "alpha_prime",
                  "tau", "parity_case", "standing"]
        rows = [[p.p, p.q, p.p_prime, p.q_prime, repr(p.alpha),
                 repr(p.alpha_prime), repr(p.tau), p.parity_case(),
                 p.is_standing()] for p in pairs]
        _emit(cfg, _render_csv(header, rows))
    else:
        lines = [f"theta = {cfg.theta.value:.15f}   depth = {depth}",
                 f"{'p':>6} {'q':>6} {'p_prime':>8} {'q_prime':>8} "
                 f"{'tau':>10}  {'parity':<13} standing"]
        for p in pairs:
            mark = "yes" if p.is_standing() else "-"
            lines.append(
                f"{p.p:>6} {p.q:>6} {p.p_prime:>8} {p.q_prime:>8} "
                f"{p.tau:>10.6f}  {p.parity_case():<13} {mark}")
        _emit(cfg, "\n".join(lines))
    return 0


# ---------------------------------------------------------------------------
# kmatrix
# ---------------------------------------------------------------------------


def _closed_report(cfg):
    """(report dict, pair, kmat, tvec); pair is None for the identity."""
    if cfg.element == "identity":
        kmat = kmatrix_of_identity()
        tvec = trace_vector_of_identity(cfg.theta)
        pair = None
        pair_obj = None
        parity = None
    else:
        pair = _resolve_pair(cfg)
        kmat, tvec = kmatrix_closed(pair)
        pair_obj = {"p": pair.p, "q": pair.q,
                    "p_prime": pair.p_prime, "q_prime": pair.q_prime}
        parity = pair.parity_case()
    report = {
        "theta": float(cfg.theta.value),
        "pair": pair_obj,
        "parity_case": parity,
        "K": kmat.to_json_obj(),
        "trace_vector": {
            "multipliers": (list(tvec.multipliers)
                            if tvec.multipliers is not None else None),
            "evaluated": [float(v) for v in tvec.eval(cfg.theta)],
        },
    }
    return report, pair, kmat, tvec


def _verify_columns(cfg, pair, kmat, tvec):
    """Per-column oracle block; measures each class separately so one gap
    failure does not hide the other columns."""
    element = (build_e(pair, cfg.theta) if pair is not None
               else None)
    if element is None:
        from .algebra import FourierElement
        element = FourierElement.one(cfg.theta)
    expected_tau = tvec.eval(cfg.theta)
    snap_tol = cfg.tolerance("snap")
    tau_tol = cfg.tolerance("tau")
    oracle = {}
    failed = []
    src_pair = pair if pair is not None else _resolve_pair(cfg)
    for i in range(1, 7):
        try:
            m = kmatrix_measured(src_pair, cfg.theta, element=element,
                                 indices=[i], snap_tol=snap_tol)
        except GapError as exc:
            oracle[str(i)] = {"error": str(exc)}
            failed.append(i)
            continue
        snapped = m["columns"][i]
        phi_resid = max(abs(r - float(s))
                        for r, s in zip(m["raw"][i], snapped))
        tau_resid = abs(m["tau"][i] - expected_tau[i - 1])
        match = snapped == kmat.column(i)
        ok = match and tau_resid < tau_tol
        oracle[str(i)] = {
            "phi_residual": phi_resid,
            "tau_residual": tau_resid,
            "match": match,
            "ok": ok,
            "iterations": m["diagnostics"][i]["iterations"],
            "gap_metric": m["diagnostics"][i]["gap_metric"],
        }
        if not ok:
            failed.append(i)
    return oracle, failed


def cmd_kmatrix(cfg):
    report, pair, kmat, tvec = _closed_report(cfg)
    failed = []
    if cfg.verify:
        oracle, failed = _verify_columns(cfg, pair, kmat, tvec)
        report["oracle"] = oracle
    if cfg.fmt == "json":
        _emit(cfg, json.dumps(report, indent=2))
    elif cfg.fmt == "csv":
        header = ["row"] + [f"d{i}" for i in range(1, 7)]
        rows = [[label] + drow
                for label, drow in zip(PARITY_LABELS, kmat.doubled_rows())]
        rows.append(["tau"] + [repr(v)
                               for v in report["trace_vector"]["evaluated"]])
        _emit(cfg, _render_csv(header, rows))
    else:
        lines = []
        if pair is not None:
            lines.append(f"pair {pair.as_tuple()}  theta = "
                         f"{cfg.theta.value:.12f}  tau = {pair.tau:.9f}  "
                         f"parity {pair.parity_case()}")
        else:
            lines.append(f"identity element  theta = {cfg.theta.value:.12f}")
        lines.append("K (rows 00/01/10/11, columns the six classes):")
        lines.append(str(kmat))
        mults = report["trace_vector"]["multipliers"]
        if mults is not None:
            lines.append(f"trace multipliers: {mults}")
        evals = ", ".join(f"{v:.9f}"
                          for v in report["trace_vector"]["evaluated"])
        lines.append(f"traces: [{evals}]")
        if cfg.verify:
            for i in range(1, 7):
                cell = report["oracle"][str(i)]
                if "error" in cell:
                    lines.append(f"column {i}: GAP  {cell['error']}")
                else:
                    verdict = "ok" if cell["ok"] else "MISMATCH"
                    lines.append(
                        f"column {i}: {verdict}  phi_resid="
                        f"{cell['phi_residual']:.2e} tau_resid="
                        f"{cell['tau_residual']:.2e} "
                        f"iters={cell['iterations']}")
        _emit(cfg, "\n".join(lines))
    if failed:
        msg = f"verification failed for columns {failed}"
        if pair is not None:
            deeper = _next_deeper_standing(pair)
            if deeper is not None:
                msg += (f"; try the deeper standing pair "
                        f"{deeper.as_tuple()}")
        print(msg, file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# orbit
# ---------------------------------------------------------------------------


def cmd_orbit(cfg):
    pair = _resolve_pair(cfg)
    report = s3_orbit_report(pair, cfg.theta)
    report = {"theta": float(cfg.theta.value), **report,
              "pair": list(report["pair"])}
    if cfg.fmt == "json":
        _emit(cfg, json.dumps(report, indent=2))
    elif cfg.fmt == "csv":
        header = ["element", "row"] + [f"d{i}" for i in range(1, 7)]
        rows = []
        for name, block in report["orbit"].items():
            for label, drow in zip(PARITY_LABELS, block["K"]):
                rows.append([name, label] + drow)
        _emit(cfg, _render_csv(header, rows))
    else:
        lines = [f"pair {tuple(report['pair'])}  theta = "
                 f"{cfg.theta.value:.12f}",
                 f"pairwise distinct: {report['pairwise_distinct']}   "
                 f"identity fixed: {report['identity_fixed']}"]
        for name, block in report["orbit"].items():
            lines.append(f"-- {name}:")
            lines.append(str(KMatrix.from_json_obj(block["K"])))
        _emit(cfg, "\n".join(lines))
    return 0 if report["pairwise_distinct"] and report["identity_fixed"] \
        else 1


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _check_bump_parity_traces(cfg):
    from .fields import build_E
    worst = 0.0
    for t in (0.5, 0.55, 0.65, 0.8, 0.95):
        phis = all_phi_traces(build_E(t))
        worst = max(worst, max(abs(v - 0.5) for v in phis))
    if worst >= 1e-8:
        raise FliptraceError(f"parity traces off by {worst:.2e}")
    return f"worst |phi - 1/2| = {worst:.2e}"


def _check_projection_residual(cfg):
    from .fields import build_E
    worst = 0.0
    for t in (0.5, 0.55, 0.65, 0.8, 0.95):
        E = build_E(t)
        worst = max(worst, (E * E - E).l1())
    if worst >= 1e-8:
        raise FliptraceError(f"projection residual {worst:.2e}")
    return f"worst l1(E^2 - E) = {worst:.2e}"


def _check_e_characters(cfg):
    from .algebra import snap_half_integer
    depth = min(cfg.depth, len(cfg.theta.cf_digits))
    pairs = standing_pairs(cfg.theta, depth)
    if not pairs:
        raise FliptraceError("no standing pairs to check")
    count = 0
    for pair in pairs[:4]:
        e = build_e(pair, cfg.theta)
        want = e_character(pair)
        got = tuple(snap_half_integer(v, tol=1e-6)
                    for v in all_phi_traces(e))
        if got != want.phi:
            raise FliptraceError(
                f"character mismatch at {pair.as_tuple()}: {got}")
        count += 1
    return f"{count} pairs matched closed characters"


def _check_closed_consistency(cfg):
    from .ktheory import coefficients_a, coefficients_a_from_module
    depth = min(cfg.depth, len(cfg.theta.cf_digits))
    pairs = standing_pairs(cfg.theta, depth)[:3]
    for pair in pairs:
        if coefficients_a(pair) != coefficients_a_from_module(pair):
            raise FliptraceError(
                f"coefficient routes disagree at {pair.as_tuple()}")
        kmat, tvec = kmatrix_closed(pair)
        if kmat.column(1) != e_character(pair).phi:
            raise FliptraceError(
                f"first column is not the character at {pair.as_tuple()}")
    return f"{len(pairs)} pairs: dual coefficient routes agree"


def _check_orbit_exact(cfg):
    th = ThetaValue.from_cf([1, 1, 2, 1] + [2] * 60)
    rep = s3_orbit_report(ConvergentPair(1, 2, 3, 5, th))
    if not (rep["pairwise_distinct"] and rep["identity_fixed"]):
        raise FliptraceError(f"orbit report: {rep}")
    return "six images distinct, identity fixed"


def _check_spectral_columns(cfg):
    from .ktheory import compare_measured_to_closed
    pair = ConvergentPair(3, 5, 5, 8, ThetaValue.named("golden"))
    out = compare_measured_to_closed(pair, indices=[1, 3],
                                     tau_tol=cfg.tolerance("tau"))
    if not out["ok"]:
        raise FliptraceError(
            f"columns {out['phi_mismatches']} mismatch, worst tau dev "
            f"{out['worst_tau_dev']:.2e}")
    return f"columns 1,3 match; worst tau dev {out['worst_tau_dev']:.2e}"


def _check_random_trace_identities(cfg):
    from .algebra import apply_flip, canonical_trace, phi_trace
    rng = np.random.default_rng(cfg.seed)
    th = ThetaValue.named("golden")
    worst = 0.0
    for _ in range(12):
        x = _random_element(rng, th)
        y = _random_element(rng, th)
        worst = max(worst, abs(canonical_trace(x * y)
                               - canonical_trace(y * x)))
        for j in (0, 1):
            for k in (0, 1):
                lhs = phi_trace((j, k), x * y)
                rhs = phi_trace((j, k), apply_flip(y) * x)
                worst = max(worst, abs(lhs - rhs))
    if worst >= 1e-9:
        raise FliptraceError(f"trace identity residual {worst:.2e}")
    return f"24 random products, worst residual {worst:.2e}"


def _random_element(rng, theta, deg=4):
    from .algebra import FourierElement
    terms = {}
    for _ in range(8):
        m = int(rng.integers(-deg, deg + 1))
        n = int(rng.integers(-deg, deg + 1))
        terms[(m, n)] = complex(rng.normal(), rng.normal())
    return FourierElement.from_dict(theta, terms)


def _check_bimodule_d(cfg):
    from .bimodule import d_inner_ff
    from .algebra import max_coeff_diff
    g = ThetaValue.named("golden")
    worst = 0.0
    for tup in ((1, 2, 2, 3), (3, 5, 5, 8)):
        pair = ConvergentPair(*tup, g)
        lhs = d_inner_ff(pair)
        rhs = build_e(pair, g)
        worst = max(worst, max_coeff_diff(lhs, rhs))
    if worst >= 1e-8:
        raise FliptraceError(f"module inner product off by {worst:.2e}")
    return f"two pairs, worst coefficient dev {worst:.2e}"


def _check_bimodule_dperp(cfg):
    from .bimodule import dperp_inner_ff
    g = ThetaValue.named("golden")
    worst = 0.0
    for tup in ((1, 2, 2, 3), (3, 5, 5, 8)):
        pair = ConvergentPair(*tup, g)
        coeffs = dperp_inner_ff(pair)
        for m, val in coeffs.items():
            target = 1.0 if m == 0 else 0.0
            worst = max(worst, abs(val - target))
    if worst >= 1e-8:
        raise FliptraceError(f"opposite inner product off by {worst:.2e}")
    return f"normalization holds, worst dev {worst:.2e}"


def _check_eta_phis(cfg):
    from .bimodule import (eta_inverse_V1, eta_inverse_V3,
                           phi_eta_inverse_V1, phi_eta_inverse_V3)
    from .algebra import snap_half_integer
    g = ThetaValue.named("golden")
    for tup in ((3, 5, 5, 8), (8, 13, 13, 21)):
        pair = ConvergentPair(*tup, g)
        for build, closed in ((eta_inverse_V1, phi_eta_inverse_V1),
                              (eta_inverse_V3, phi_eta_inverse_V3)):
            elem = build(pair)
            want = closed(pair)
            got = {jk: snap_half_integer(v, tol=1e-6)
                   for jk, v in zip(((0, 0), (0, 1), (1, 0), (1, 1)),
                                    all_phi_traces(elem))}
            if got != want:
                raise FliptraceError(
                    f"{build.__name__} traces mismatch at {tup}")
    return "V1/V3 image traces match closed forms at both parities"


def _check_poisson(cfg):
    from .bump import (BumpProfile, GaussianWindow, ProfileWindow,
                       poisson_check)
    worst = 0.0
    for x in (0.0, 0.2, 0.45, 0.7, 0.9):
        worst = max(worst, poisson_check(GaussianWindow(0.35), x))
    profile = BumpProfile(0.65)
    for x in (0.0, 0.2, 0.45, 0.7, 0.9):
        worst = max(worst, poisson_check(ProfileWindow(profile, 40), x))
    if worst >= 1e-10:
        raise FliptraceError(f"summation residual {worst:.2e}")
    return f"10 sample points, worst residual {worst:.2e}"


def _check_limit_curves(cfg):
    from .bimodule import CutdownDiagnostics
    g = ThetaValue.named("golden")
    sups_c, sups_h = [], []
    for tup in ((1, 2, 2, 3), (3, 5, 5, 8), (8, 13, 13, 21)):
        diag = CutdownDiagnostics(ConvergentPair(*tup, g))
        rep = diag.report()
        sups_c.append(rep["sup_c_minus_1"])
        sups_h.append(rep["sup_h1"])
    if not all(a > b for a, b in zip(sups_c, sups_c[1:])):
        raise FliptraceError(f"sup |C-1| not decreasing: {sups_c}")
    if not all(a > b for a, b in zip(sups_h, sups_h[1:])):
        raise FliptraceError(f"sup h1 not decreasing: {sups_h}")
    return (f"sup|C-1| {sups_c[0]:.3f} > {sups_c[1]:.3f} > {sups_c[2]:.3f}; "
            "h1 likewise")


FAST_CHECKS = [
    ("bump-parity-traces", _check_bump_parity_traces),
    ("bump-projection-residual", _check_projection_residual),
    ("e-characters", _check_e_characters),
    ("closed-table-consistency", _check_closed_consistency),
    ("orbit-exact", _check_orbit_exact),
    ("spectral-columns", _check_spectral_columns),
    ("random-trace-identities", _check_random_trace_identities),
]

FULL_CHECKS = FAST_CHECKS + [
    ("bimodule-diagonal", _check_bimodule_d),
    ("bimodule-offdiagonal", _check_bimodule_dperp),
    ("corner-image-traces", _check_eta_phis),
    ("poisson-windows", _check_poisson),
    ("limit-curves", _check_limit_curves),
]


def cmd_verify(cfg):
    checks = FULL_CHECKS if cfg.level == "full" else FAST_CHECKS

    def run(item):
        name, fn = item
        t0 = time.time()
        try:
            detail = fn(cfg)
            return {"name": name, "ok": True, "detail": detail,
                    "seconds": round(time.time() - t0, 3)}
        except Exception as exc:  # a failed check, not a crash of the CLI
            return {"name": name, "ok": False, "detail": str(exc),
                    "seconds": round(time.time() - t0, 3)}

    with ThreadPoolExecutor(max_workers=4) as pool:
        results = list(pool.map(run, checks))
    all_ok = all(r["ok"] for r in results)
    report = {"level": cfg.level, "seed": cfg.seed, "checks": results,
              "all_ok": all_ok}
    if cfg.fmt == "json":
        _emit(cfg, json.dumps(report, indent=2))
    elif cfg.fmt == "csv":
        header = ["name", "ok", "seconds", "detail"]
        rows = [[r["name"], r["ok"], repr(r["seconds"]), r["detail"]]
                for r in results]
        _emit(cfg, _render_csv(header, rows))
    else:
        lines = []
        for r in results:
            mark = "PASS" if r["ok"] else "FAIL"
            lines.append(f"{mark}  {r['name']:<26} ({r['seconds']:6.2f}s)  "
                         f"{r['detail']}")
        lines.append(f"{'all checks passed' if all_ok else 'FAILURES above'}"
                     f"  [level={cfg.level} seed={cfg.seed}]")
        _emit(cfg, "\n".join(lines))
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fliptrace",
        description="Rotation-algebra trace invariants: convergent pairs, "
                    "character tables, symmetry orbits, verification.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, theta_default=None):
        sp.add_argument("--theta", default=theta_default,
                        help="angle: 'golden', 'silver', a decimal, 'p/q', "
                             "or '[0;a1,a2,...]'")
        sp.add_argument("--depth", type=int, default=DEFAULT_DEPTH,
                        help=f"convergent depth (1..{MAX_DEPTH}, default "
                             f"{DEFAULT_DEPTH})")
        sp.add_argument("--format", dest="fmt", default="text",
                        choices=("text", "json", "csv"))
        sp.add_argument("--out", default=None, metavar="FILE",
                        help="write the report to FILE instead of stdout")

    sp = sub.add_parser("convergents",
                        help="list convergent pairs with tau and parity")
    common(sp)

    sp = sub.add_parser("kmatrix",
                        help="closed-form character table of a pair")
    common(sp, theta_default="golden")
    sp.add_argument("--pair", default=None, metavar="P,Q,P',Q'",
                    help="explicit convergent pair (default: shallowest "
                         "standing pair)")
    sp.add_argument("--element", default="e", choices=("e", "identity"),
                    help="target projection (default the pair's cutdown "
                         "projection)")
    sp.add_argument("--verify", action="store_true",
                    help="measure every column through the spectral "
                         "cutoff and report residuals")
    sp.add_argument("--tolerance", action="append", metavar="KEY=VAL",
                    help=f"override a tolerance; keys: "
                         f"{sorted(TOLERANCE_RANGES)}")

    sp = sub.add_parser("orbit",
                        help="six symmetry images of the table (exact)")
    common(sp)
    sp.add_argument("--pair", default=None, metavar="P,Q,P',Q'")

    sp = sub.add_parser("verify", help="run the self-check battery")
    common(sp, theta_default="golden")
    sp.add_argument("--level", default="fast", choices=("fast", "full"))
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--tolerance", action="append", metavar="KEY=VAL")
    return parser


def config_from_args(args):
    cfg = RunConfig()
    if getattr(args, "theta", None) is None:
        raise ParameterError("--theta is required for this command")
    cfg.theta = _parse_theta(args.theta)
    cfg.depth = args.depth
    if not 1 <= cfg.depth <= MAX_DEPTH:
        raise ParameterError(f"--depth must be in 1..{MAX_DEPTH}")
    cfg.fmt = args.fmt
    cfg.out = args.out
    if getattr(args, "pair", None) is not None:
        cfg.pair = _parse_pair_spec(args.pair)
    cfg.element = getattr(args, "element", "e")
    cfg.verify = getattr(args, "verify", False)
    cfg.level = getattr(args, "level", "fast")
    cfg.seed = getattr(args, "seed", DEFAULT_SEED)
    cfg.tolerances = _parse_tolerances(getattr(args, "tolerance", None))
    return cfg


COMMANDS = {
    "convergents": cmd_convergents,
    "kmatrix": cmd_kmatrix,
    "orbit": cmd_orbit,
    "verify": cmd_verify,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[args.command](cfg)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FliptraceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
