"""Exact character tables of the cutdown classes and their symmetry orbit.

The numerical pipeline (``spectral.cutdown_invariants``) measures, for the
approximately central projection e of a standing pair, the trace data of
chi(e P_i e) against the six reference classes P_1..P_6.  This module
produces the same 4 x 6 table in closed form: a parity-coefficient matrix A
(two columns per parity label, from the two bounded functionals on the
compressed circle algebra) times a 2 x 6 class table C, together with the
exact canonical-trace vector.  A, C and the trace vector are exact rational
data, so the whole orbit of the table under the order-6 symmetry group of
the orbifold can be walked without floating point.

The row and column actions of the symmetry group are never hard coded:
they are derived at runtime by applying the algebra automorphisms to
parity test words and to the reference projections themselves, then
snapping the resulting characters.  Any drift between sign conventions
therefore surfaces as an integrity error instead of a silently wrong
table.
"""

from fractions import Fraction
from functools import partial

import numpy as np

from .algebra import (ChernCharacter, FourierElement, LinearForm, ThetaValue,
                      all_phi_traces, apply_cubic, apply_flip, apply_fourier,
                      apply_gamma, canonical_trace, snap_half_integer)
from .arithmetic import ConvergentPair
from .errors import IntegrityError, ParameterError
from .fields import build_P, build_e, e_character
from .spectral import cutdown_invariants

PARITY_LABELS = ("00", "01", "10", "11")

# phi values of the six reference classes, ordered (00, 01, 10, 11); the
# canonical traces are assembled separately because the doubled class
# branches at 1/2
H = Fraction(1, 2)
BASIS_PHI = (
    (Fraction(1), Fraction(0), Fraction(0), Fraction(0)),
    (Fraction(0), Fraction(0), Fraction(0), Fraction(0)),
    (H, H, H, H),
    (H, H, -H, -H),
    (H, -H, H, -H),
    (H, -H, -H, H),
)


def _as_pair(pair):
    if not isinstance(pair, ConvergentPair):
        raise ParameterError("need a ConvergentPair (tuples carry no angle)")
    if not pair.is_standing():
        raise ParameterError(
            f"pair {pair.as_tuple()} has tau={pair.tau!r} outside the "
            "standing window")
    return pair


def basis_characters(theta):
    """The six reference characters at the given angle (exact)."""
    if not isinstance(theta, ThetaValue):
        theta = ThetaValue.from_value(theta)
    v = float(theta.value)
    if not 0.0 < v < 1.0 or abs(v - 0.5) < 1e-9:
        raise ParameterError(f"angle {v!r} outside the two branches")
    taus = [
        LinearForm(1),
        LinearForm(0, 2) if v < 0.5 else LinearForm(2, -2),
        LinearForm(0, 1),
        LinearForm(0, 1),
        LinearForm(0, 1),
        LinearForm(0, 1),
    ]
    return [ChernCharacter(t, phi) for t, phi in zip(taus, BASIS_PHI)]


# ---------------------------------------------------------------------------
# exact 4 x 6 tables
# ---------------------------------------------------------------------------


class KMatrix:
    """4 x 6 table of half-integers: rows are parity labels, columns the
    reference classes.  Entries are exact; serialization doubles them to
    integers."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = tuple(tuple(Fraction(x) for x in row) for row in rows)
        if len(rows) != 4 or any(len(r) != 6 for r in rows):
            raise ParameterError("table must be 4 x 6")
        for row in rows:
            for x in row:
                if (2 * x).denominator != 1:
                    raise ParameterError(f"entry {x} is not a half-integer")
        self.rows = rows

    def entry(self, label, i):
        """Entry for parity label ('00'..'11' or index 0..3) and class i in
        1..6."""
        if isinstance(label, str):
            label = PARITY_LABELS.index(label)
        if not 1 <= i <= 6:
            raise ParameterError(f"class index {i} outside 1..6")
        return self.rows[label][i - 1]

    def column(self, i):
        return tuple(row[i - 1] for row in self.rows)

    def doubled_rows(self):
        """All entries times two, as plain integers."""
        return [[int(2 * x) for x in row] for row in self.rows]

    def as_float_array(self):
        return np.array([[float(x) for x in row] for row in self.rows])

    def __eq__(self, other):
        return isinstance(other, KMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __str__(self):
        out = []
        for label, row in zip(PARITY_LABELS, self.rows):
            cells = "  ".join(f"{str(x):>4}" for x in row)
            out.append(f"{label}: {cells}")
        return "\n".join(out)

    def to_json_obj(self):
        return self.doubled_rows()

    @classmethod
    def from_json_obj(cls, obj):
        return cls([[Fraction(int(v), 2) for v in row] for row in obj])


class TraceVector:
    """Six exact canonical traces, one per cutdown class.

    ``multipliers`` records the integer weights when every entry is the
    same base form times an integer (as for the cutdown table).
    """

    __slots__ = ("forms", "multipliers")

    def __init__(self, forms, multipliers=None):
        forms = tuple(forms)
        if len(forms) != 6 or not all(isinstance(f, LinearForm)
                                      for f in forms):
            raise ParameterError("need six linear forms")
        self.forms = forms
        self.multipliers = None if multipliers is None else tuple(
            int(m) for m in multipliers)

    def eval(self, theta):
        return [f.eval_mp(theta) for f in self.forms]

    def __eq__(self, other):
        return isinstance(other, TraceVector) and self.forms == other.forms

    def __hash__(self):
        return hash(self.forms)

    def __str__(self):
        return "[" + ", ".join(str(f) for f in self.forms) + "]"

    def to_json_obj(self):
        obj = {"forms": [f.to_json_obj() for f in self.forms]}
        if self.multipliers is not None:
            obj["multipliers"] = list(self.multipliers)
        return obj

    @classmethod
    def from_json_obj(cls, obj):
        return cls([LinearForm.from_json_obj(o) for o in obj["forms"]],
                   multipliers=obj.get("multipliers"))


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def coefficients_a(pair):
    """Per-parity coefficients (a_minus, a_plus) of the two bounded
    functionals, in closed form by the parity class of (q, q')."""
    pair = _as_pair(pair)
    p, q = pair.p, pair.q
    out = {}
    for j, k in ((0, 0), (0, 1), (1, 0), (1, 1)):
        if q % 2 == 0:
            am = Fraction(1 if (j % 2 == 0 and k % 2 == 0) else 0)
            ap = Fraction(1 if (j % 2 == 0 and k % 2 == 1) else 0)
        else:
            am = Fraction((-1) ** (p * j * k), 2)
            ap = Fraction((-1) ** (j + p * j * k), 2)
        out[(j, k)] = (am, ap)
    return out


def coefficients_a_from_module(pair):
    """The same coefficients recovered from the module side.

    Evaluating the corner functionals on the images of 1, V3 and V1 under
    the inverse correspondence gives linear equations whose data are the
    character of e and the closed-form parity traces of the V1/V3 series;
    this is the route the closed form compresses.
    """
    from .bimodule import phi_eta_inverse_V1, phi_eta_inverse_V3

    pair = _as_pair(pair)
    phi_e = e_character(pair).phi
    out = {}
    if pair.q_prime % 2 == 0:
        v3 = phi_eta_inverse_V3(pair)
        for idx, (j, k) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
            am = (phi_e[idx] + v3[(j, k)]) / 2
            ap = (phi_e[idx] - v3[(j, k)]) / 2
            out[(j, k)] = (am, ap)
    else:
        v1 = phi_eta_inverse_V1(pair)
        for idx, (j, k) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
            out[(j, k)] = (phi_e[idx], v1[(j, k)])
    return out


def c_matrix(pair):
    """2 x 6 class table: the two bounded functionals evaluated on the
    reference classes, through the transpose map at the rational angle."""
    pair = _as_pair(pair)
    pp, qbar = pair.p_prime, pair.q_prime % 2
    sign = (-1) ** pp
    row0, row1 = [], []
    for phi in BASIS_PHI:
        # phi is ordered (00, 01, 10, 11); row j k picks index 2j + k
        row0.append(phi[0] + phi[2])
        row1.append(phi[qbar] + sign * phi[2 + qbar])
    return (tuple(row0), tuple(row1))


def trace_vector_closed(pair):
    """Exact canonical traces of the six cutdowns: (q theta - p) times
    integer weights depending on the pair."""
    pair = _as_pair(pair)
    p, q, pp, qp = pair.as_tuple()
    below = pair.theta.value < 0.5
    p2 = 2 * pp if below else 2 * (qp - pp)
    weights = [qp, p2, pp, pp, pp, pp]
    return TraceVector([LinearForm(-p * w, q * w) for w in weights],
                       multipliers=weights)


def kmatrix_closed(pair, theta=None):
    """Closed-form table K(e) = A C for a standing pair, with its trace
    vector."""
    pair = _as_pair(pair)
    if theta is not None and not pair.theta.is_close(
            theta if isinstance(theta, ThetaValue)
            else ThetaValue.from_value(theta), tol=1e-9):
        raise ParameterError("theta does not match the pair's angle")
    acoef = coefficients_a(pair)
    c0, c1 = c_matrix(pair)
    rows = []
    for j, k in ((0, 0), (0, 1), (1, 0), (1, 1)):
        am, ap = acoef[(j, k)]
        rows.append([am * c0[i] + ap * c1[i] for i in range(6)])
    return KMatrix(rows), trace_vector_closed(pair)


def kmatrix_of_identity():
    """Table of the identity projection: the reference characters
    themselves, column by column."""
    return KMatrix([[BASIS_PHI[i][a] for i in range(6)] for a in range(4)])


def trace_vector_of_identity(theta):
    return TraceVector([ch.tau for ch in basis_characters(theta)])


# ---------------------------------------------------------------------------
# symmetry actions, derived at runtime
# ---------------------------------------------------------------------------

_GENERATORS = {
    "sigma": apply_fourier,
    "kappa": apply_cubic,
    "flip": apply_flip,
    "gamma1": partial(apply_gamma, 1),
    "gamma2": partial(apply_gamma, 2),
    "gamma3": partial(apply_gamma, 3),
}


def _resolve(kind):
    if callable(kind):
        return kind
    if kind not in _GENERATORS:
        raise ParameterError(f"unknown symmetry {kind!r}")
    return _GENERATORS[kind]


def derive_row_action(kind, theta=None, tol=1e-9):
    """How the four parity traces compose with an automorphism.

    Evaluates phi_a(alpha(w_b)) on the flip-even parity words w_b and snaps
    the transition matrix to a signed permutation.  Returns (perm, signs)
    with phi_a o alpha = signs[a] * phi_perm[a].
    """
    fn = _resolve(kind)
    if theta is None:
        theta = ThetaValue.named("golden")
    words = []
    for j, k in ((0, 0), (0, 1), (1, 0), (1, 1)):
        if (j, k) == (0, 0):
            words.append(FourierElement.one(theta))
        else:
            w = FourierElement.monomial(theta, j, k, 0.5)
            words.append(w + apply_flip(w))
    ref = [all_phi_traces(w) for w in words]
    img = [all_phi_traces(fn(w)) for w in words]
    perm, signs = [], []
    for a in range(4):
        hits = []
        for b in range(4):
            ratio = img[b][a] / ref[b][b]
            if abs(ratio) > tol:
                if min(abs(ratio - 1.0), abs(ratio + 1.0)) > tol:
                    raise IntegrityError(
                        f"parity trace {PARITY_LABELS[a]} does not map to a "
                        f"signed trace (ratio {ratio})")
                hits.append((b, 1 if abs(ratio - 1.0) < tol else -1))
        if len(hits) != 1:
            raise IntegrityError(
                f"parity trace {PARITY_LABELS[a]} has {len(hits)} images")
        perm.append(hits[0][0])
        signs.append(hits[0][1])
    if sorted(perm) != [0, 1, 2, 3]:
        raise IntegrityError("row action is not a permutation")
    return tuple(perm), tuple(signs)


def derive_basis_permutation(kind, theta=None, tol=1e-6):
    """Where the automorphism sends the six reference classes.

    Applies the map to each built projection, snaps the image character,
    and matches it against the reference list (which determines classes
    uniquely).  Raises if any image fails to match exactly one class.
    """
    fn = _resolve(kind)
    if theta is None:
        theta = ThetaValue.named("golden")
    chars = basis_characters(theta)
    perm = []
    for i in range(1, 7):
        image = fn(build_P(i, theta))
        got = ChernCharacter.from_element(image, tau_form=chars[i - 1].tau,
                                          tol=tol)
        matches = [j + 1 for j, ch in enumerate(chars) if ch == got]
        if len(matches) != 1:
            raise IntegrityError(
                f"image of class {i} matches {len(matches)} references")
        perm.append(matches[0])
    if sorted(perm) != [1, 2, 3, 4, 5, 6]:
        raise IntegrityError("class action is not a permutation")
    return tuple(perm)


class AutomorphismDescriptor:
    """A symmetry's derived actions: signed row permutation on the parity
    traces and forward permutation on the six classes."""

    __slots__ = ("name", "row_perm", "row_signs", "basis_perm")

    def __init__(self, name, row_action, basis_perm):
        self.name = name
        self.row_perm, self.row_signs = row_action
        self.basis_perm = tuple(basis_perm)

    @classmethod
    def derive(cls, name, theta=None):
        """Build a descriptor for a generator name or a '*'-separated
        composition (leftmost applied first)."""
        parts = name.split("*") if isinstance(name, str) else [name]
        if not parts:
            raise ParameterError("empty symmetry name")
        first = parts[0]
        desc = cls(str(first), derive_row_action(first, theta),
                   derive_basis_permutation(first, theta))
        for part in parts[1:]:
            nxt = cls(str(part), derive_row_action(part, theta),
                      derive_basis_permutation(part, theta))
            desc = desc.then(nxt)
        return desc

    @classmethod
    def identity(cls, name="id"):
        return cls(name, ((0, 1, 2, 3), (1, 1, 1, 1)), (1, 2, 3, 4, 5, 6))

    def then(self, other):
        """Composite: self applied first, then other."""
        perm = tuple(self.row_perm[other.row_perm[a]] for a in range(4))
        signs = tuple(other.row_signs[a] * self.row_signs[other.row_perm[a]]
                      for a in range(4))
        basis = tuple(other.basis_perm[self.basis_perm[i] - 1]
                      for i in range(6))
        return AutomorphismDescriptor(f"{self.name}*{other.name}",
                                      (perm, signs), basis)

    def same_action(self, other):
        return (self.row_perm == other.row_perm
                and self.row_signs == other.row_signs
                and self.basis_perm == other.basis_perm)

    def transform_character(self, char):
        """Character of alpha(x) from the character of x."""
        phi = tuple(self.row_signs[a] * char.phi[self.row_perm[a]]
                    for a in range(4))
        return ChernCharacter(char.tau, phi)


def _invert(perm, base):
    inv = [0] * len(perm)
    for src, dst in enumerate(perm):
        inv[dst - base] = src + base
    return tuple(inv)


def act_on_kmatrix(kmat, tvec, alpha):
    """Table of alpha(e) from the table of e.

    New row a is the old row the trace phi_a pulls back to (with its
    sign), and new column i is the old column of the class alpha pulls i
    back to.
    """
    if not isinstance(alpha, AutomorphismDescriptor):
        raise ParameterError("need an AutomorphismDescriptor")
    cinv = _invert(alpha.basis_perm, 1)
    rows = []
    for a in range(4):
        src = kmat.rows[alpha.row_perm[a]]
        rows.append([alpha.row_signs[a] * src[cinv[i] - 1] for i in range(6)])
    forms = [tvec.forms[cinv[i] - 1] for i in range(6)]
    mult = None
    if tvec.multipliers is not None:
        mult = [tvec.multipliers[cinv[i] - 1] for i in range(6)]
    return KMatrix(rows), TraceVector(forms, multipliers=mult)


ORBIT_NAMES = ("id", "sigma", "kappa", "kappa2", "sigma_kappa",
               "sigma_kappa2")
_ORBIT_WORDS = {
    "id": "",
    "sigma": "s",
    "kappa": "k",
    "kappa2": "kk",
    "sigma_kappa": "ks",   # letters act left to right
    "sigma_kappa2": "kks",
}


def orbit_descriptors(theta=None):
    """Descriptors of the six symmetries in the orbit, by composition of
    the two derived generators."""
    gens = {"s": AutomorphismDescriptor.derive("sigma", theta),
            "k": AutomorphismDescriptor.derive("kappa", theta)}
    out = {}
    for name in ORBIT_NAMES:
        desc = AutomorphismDescriptor.identity(name)
        for letter in _ORBIT_WORDS[name]:
            desc = desc.then(gens[letter])
        desc.name = name
        out[name] = desc
    return out


def s3_orbit(pair, theta=None):
    """All six tables K(alpha(e)) with their trace vectors, exactly."""
    pair = _as_pair(pair)
    if theta is None:
        theta = pair.theta
    descs = orbit_descriptors(theta)
    for name in ("sigma", "kappa"):
        if any(s != 1 for s in descs[name].row_signs):
            raise IntegrityError(f"generator {name} acts with signs")
    k0, t0 = kmatrix_closed(pair)
    return {name: act_on_kmatrix(k0, t0, descs[name])
            for name in ORBIT_NAMES}


def s3_orbit_report(pair, theta=None):
    """Orbit tables, distinctness, and the shared Connes-Chern character.

    Restricted to pairs with q even and p' odd: that is the parity class
    for which the six images are pairwise centrally inequivalent, and the
    one the closed tables below are asserted for.
    """
    pair = _as_pair(pair)
    if pair.q % 2 != 0 or pair.p_prime % 2 != 1:
        raise ParameterError(
            f"orbit report needs q even and p' odd, got q={pair.q}, "
            f"p'={pair.p_prime}")
    if theta is None:
        theta = pair.theta
    orbit = s3_orbit(pair, theta)
    mats = [orbit[name][0] for name in ORBIT_NAMES]
    distinct = len(set(mats)) == len(mats)

    base_char = e_character(pair)
    descs = orbit_descriptors(theta)
    chars = {name: descs[name].transform_character(base_char)
             for name in ORBIT_NAMES}
    if len(set(chars.values())) != 1:
        raise IntegrityError("orbit does not share one character")

    ident = kmatrix_of_identity()
    tid = trace_vector_of_identity(theta)
    identity_fixed = all(
        act_on_kmatrix(ident, tid, descs[name]) == (ident, tid)
        for name in ORBIT_NAMES)
    return {
        "pair": pair.as_tuple(),
        "orbit": {name: {"K": mat.to_json_obj(), "tau": tv.to_json_obj()}
                  for name, (mat, tv) in orbit.items()},
        "pairwise_distinct": distinct,
        "common_character": base_char.to_json_obj(),
        "identity_fixed": identity_fixed,
    }


# ---------------------------------------------------------------------------
# numerical route
# ---------------------------------------------------------------------------


def kmatrix_measured(pair, theta=None, element=None, indices=None,
                     snap_tol=1e-6, **chi_kwargs):
    """Measure table columns through the spectral cutoff.

    Builds (or takes) a projection field, cuts each requested reference
    class down by it, and snaps the measured parity traces.  Returns the
    snapped columns, the raw float traces, and the per-column diagnostics.
    """
    pair = _as_pair(pair)
    if theta is None:
        theta = pair.theta
    if element is None:
        element = build_e(pair, theta)
    if indices is None:
        indices = range(1, 7)
    columns, raw, taus, info = {}, {}, {}, {}
    for i in indices:
        P = build_P(i, theta)
        res = cutdown_invariants(element, P, theta, **chi_kwargs)
        columns[i] = tuple(snap_half_integer(v, tol=snap_tol)
                           for v in res["phi"])
        raw[i] = tuple(res["phi"])
        taus[i] = res["tau"]
        info[i] = {"iterations": res["iterations"],
                   "residual": res["residual"],
                   "gap_metric": res["gap_metric"]}
    return {"columns": columns, "raw": raw, "tau": taus,
            "diagnostics": info}


def compare_measured_to_closed(pair, theta=None, element=None, kmat=None,
                               tvec=None, tau_tol=1e-6, **chi_kwargs):
    """Numerical columns against an exact table; defaults to K(e).

    Passing the table of some alpha(e) together with the transformed field
    checks the symmetry action empirically.
    """
    pair = _as_pair(pair)
    if theta is None:
        theta = pair.theta
    if kmat is None:
        kmat, tvec = kmatrix_closed(pair)
    elif tvec is None:
        raise ParameterError("a custom table needs its trace vector")
    measured = kmatrix_measured(pair, theta, element=element, **chi_kwargs)
    expected_tau = tvec.eval(theta)
    mismatches = []
    worst_tau = 0.0
    for i, col in measured["columns"].items():
        if col != kmat.column(i):
            mismatches.append(i)
        dev = abs(measured["tau"][i] - expected_tau[i - 1])
        worst_tau = max(worst_tau, dev)
    ok = not mismatches and worst_tau < tau_tol
    return {
        "pair": pair.as_tuple(),
        "ok": ok,
        "phi_mismatches": mismatches,
        "worst_tau_dev": worst_tau,
        "measured": measured,
    }
