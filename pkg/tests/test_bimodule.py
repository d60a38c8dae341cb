"""Module inner products, circle-algebra traces, and cutdown limit curves."""

import csv
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fliptrace.algebra import (FourierElement, ThetaValue, adjoint,
                               all_phi_traces, apply_flip, canonical_trace,
                               max_coeff_diff, snap_half_integer, twisted_mul)
from fliptrace.arithmetic import ConvergentPair
from fliptrace.bimodule import (CircleElement, CutdownDiagnostics,
                                LatticeBasis, ModuleFunction,
                                cutdown_limit_functions, d_inner_ff,
                                dperp_inner_ff, eta_inverse_V1,
                                eta_inverse_V3, phi_eta_inverse_V1,
                                phi_eta_inverse_V3, psi_pi_xi_identities,
                                psi_traces, theta_prime, _spectral_table)
from fliptrace.errors import ParameterError, ResolutionError
from fliptrace.fields import build_e

IJ = ((0, 0), (0, 1), (1, 0), (1, 1))


@pytest.fixture(scope="module")
def gpair(golden):
    return ConvergentPair(3, 5, 5, 8, golden)


@pytest.fixture(scope="module")
def small_pair(golden):
    return ConvergentPair(1, 2, 2, 3, golden)


@pytest.fixture(scope="module")
def odd_pair(golden):
    # q and q' both odd, over the reflected angle
    th = ThetaValue.from_value(1 - golden.value)
    return ConvergentPair(1, 3, 2, 5, th)


@pytest.fixture(scope="module")
def big_pair(golden):
    return ConvergentPair(8, 13, 13, 21, golden)


class TestLatticeBasis:
    def test_vectors(self, gpair):
        lat = LatticeBasis(gpair)
        a = gpair.alpha
        assert lat.epsilon1 == (a / 5, 3, 0, 0.0, 0, 0)
        assert lat.epsilon2 == (0.0, 0, 1, 1.0, 1, 0)
        assert lat.delta1 == (1.0 / 40, 3, 0, 0.0, 0, 5)
        assert lat.delta2 == (0.0, 0, 0, 1.0 / a, 8, 0)
        assert lat.delta3 == (0.0, 0, 1, 0.0, 0, 0)

    @pytest.mark.parametrize("tup", [(3, 5, 5, 8), (1, 2, 2, 3)])
    def test_biorthogonality(self, golden, tup):
        lat = LatticeBasis(ConvergentPair(*tup, golden))
        assert lat.biorthogonality_defect() < 1e-12

    def test_covolume_is_tau(self, gpair):
        assert LatticeBasis(gpair).covolume() == pytest.approx(gpair.tau,
                                                               abs=1e-15)

    def test_rejects_tuple(self):
        with pytest.raises(ParameterError):
            LatticeBasis((3, 5, 5, 8))


class TestModuleFunction:
    def test_normalization(self, gpair):
        mf = ModuleFunction(gpair)
        assert mf.c ** 2 == pytest.approx(np.sqrt(40) / gpair.alpha, rel=1e-14)
        assert mf.haar_mass_q == pytest.approx(1 / np.sqrt(5))
        assert mf.haar_mass_q_prime == pytest.approx(1 / np.sqrt(8))

    def test_values(self, gpair):
        mf = ModuleFunction(gpair)
        assert mf.value(0.0, 0, 0) == pytest.approx(mf.c)
        assert mf.value(0.0, 5, 8) == pytest.approx(mf.c)  # multiples of q, q'
        assert mf.value(0.0, 1, 0) == 0.0
        assert mf.value(0.0, 0, 3) == 0.0

    def test_f0_support(self, gpair):
        # f0(t) = f_tau(q' t) lives inside |t| <= 1/(2 q')
        mf = ModuleFunction(gpair)
        assert mf.f0(0.0) == 1.0
        assert mf.f0(1.0 / 16 + 1e-6) == 0.0
        assert mf.f0(-1.0 / 16 - 1e-6) == 0.0
        assert 0.0 < mf.f0(0.055) < 1.0


class TestThetaPrime:
    def test_golden_value(self, gpair):
        tp = theta_prime(gpair)
        assert tp == pytest.approx(
            gpair.alpha_prime / (8 * gpair.alpha), abs=1e-15)
        assert 0.0 < tp < 1.0

    def test_sum_rule(self, gpair, small_pair):
        for pair in (gpair, small_pair):
            assert (pair.q_prime * pair.alpha
                    + pair.q * pair.alpha_prime) == pytest.approx(1.0,
                                                                  abs=1e-14)
            theta_prime(pair)  # raises if the chain of identities breaks

    def test_rejects_tuple_and_nonstanding(self, golden):
        with pytest.raises(ParameterError):
            theta_prime((3, 5, 5, 8))
        lo = ConvergentPair(1, 3, 1, 2, ThetaValue.from_value(0.40))
        assert not lo.is_standing()
        with pytest.raises(ParameterError):
            theta_prime(lo)


# ---------------------------------------------------------------------------
# circle-algebra elements
# ---------------------------------------------------------------------------


def _gen(pp, qp, n, m):
    return CircleElement(pp, qp, coeffs={(n, m): 1.0})


def _random_circle(rng, pp, qp, nterms=6):
    coeffs = {}
    for _ in range(nterms):
        key = (int(rng.integers(0, qp)), int(rng.integers(-5, 6)))
        coeffs[key] = complex(rng.normal(), rng.normal())
    return CircleElement(pp, qp, coeffs=coeffs)


class TestCircleElement:
    def test_v3_has_order_q_prime(self):
        v3 = _gen(5, 8, 1, 0)
        acc = CircleElement.one(5, 8)
        for _ in range(8):
            acc = acc * v3
        assert acc.max_diff(CircleElement.one(5, 8)) < 1e-15

    def test_commutation_phase(self):
        v1, v3 = _gen(5, 8, 0, 1), _gen(5, 8, 1, 0)
        lhs = v3 * v1
        rhs = (v1 * v3).scale(np.exp(2j * np.pi * 5 / 8))
        assert lhs.max_diff(rhs) < 1e-15

    def test_adjoint_involution(self, rng):
        x = _random_circle(rng, 2, 3)
        assert x.adjoint().adjoint().max_diff(x) < 1e-12

    def test_adjoint_reverses_products(self, rng):
        x = _random_circle(rng, 5, 8)
        y = _random_circle(rng, 5, 8)
        assert (x * y).adjoint().max_diff(y.adjoint() * x.adjoint()) < 1e-12

    def test_flip_is_multiplicative(self, rng):
        x = _random_circle(rng, 5, 8)
        y = _random_circle(rng, 5, 8)
        assert (x * y).flip().max_diff(x.flip() * y.flip()) < 1e-12
        assert x.flip().flip().max_diff(x) < 1e-15

    def test_parameter_mismatch(self):
        with pytest.raises(ParameterError):
            _gen(5, 8, 0, 1) * _gen(2, 3, 0, 1)

    @given(st.integers(0, 7), st.integers(-4, 4), st.integers(0, 7),
           st.integers(-4, 4))
    def test_associativity(self, n1, m1, n2, m2):
        a, b = _gen(5, 8, n1, m1), _gen(5, 8, n2, m2)
        c = _gen(5, 8, 3, 2)
        assert ((a * b) * c).max_diff(a * (b * c)) < 1e-12


class TestPsiTraces:
    @pytest.mark.parametrize("pp,qp", [(5, 8), (2, 3)])
    def test_identity_values(self, pp, qp):
        s1, s2 = psi_traces(CircleElement.one(pp, qp))
        assert s1 == pytest.approx(1.0)
        assert s2 == pytest.approx(1.0 if qp % 2 == 0 else 0.0)

    @pytest.mark.parametrize("pp,qp", [(5, 8), (2, 3)])
    def test_generator_values(self, pp, qp):
        s1, s2 = psi_traces(_gen(pp, qp, 1, 0))  # V3
        assert s1 == pytest.approx(1.0)
        want = ((-1) ** pp if qp % 2 == 0 else 0.0)
        assert s2 == pytest.approx(want)
        s1, s2 = psi_traces(_gen(pp, qp, 0, 1))  # V1
        assert s1 == pytest.approx(0.0)
        assert s2 == pytest.approx(0.0 if qp % 2 == 0 else 1.0)

    @pytest.mark.parametrize("pp,qp", [(5, 8), (2, 3), (13, 21)])
    def test_trace_property(self, rng, pp, qp):
        # psi_i(x y) = psi_i(flip(y) x)
        for _ in range(12):
            x = _random_circle(rng, pp, qp)
            y = _random_circle(rng, pp, qp)
            a1, a2 = psi_traces(x * y)
            b1, b2 = psi_traces(y.flip() * x)
            assert abs(a1 - b1) < 1e-12
            assert abs(a2 - b2) < 1e-12

    def test_rejects_non_circle(self):
        with pytest.raises(ParameterError):
            psi_traces(1.0)


# ---------------------------------------------------------------------------
# inner products
# ---------------------------------------------------------------------------


class TestDperpInner:
    @pytest.mark.parametrize("tup", [(3, 5, 5, 8), (1, 2, 2, 3)])
    def test_is_identity(self, golden, tup):
        coeffs = dperp_inner_ff(ConvergentPair(*tup, golden))
        assert abs(coeffs[0] - 1.0) < 1e-8
        rest = max(abs(v) for m, v in coeffs.items() if m != 0)
        assert rest < 1e-8

    def test_off_lattice_sectors_vanish(self, gpair):
        # the shifted-support products are identically zero for k != 0
        prof = ModuleFunction(gpair).profile
        x = np.linspace(-0.5, 0.5, 4001)
        for k in (-2, -1, 1, 2):
            prod = prof.f_eval(x) * prof.f_eval(x + k)
            assert np.max(np.abs(prod)) == 0.0

    def test_parallel_matches_serial(self, gpair):
        serial = dperp_inner_ff(gpair, mmax=3)
        parallel = dperp_inner_ff(gpair, mmax=3, workers=3)
        assert serial.keys() == parallel.keys()
        assert all(serial[m] == parallel[m] for m in serial)


class TestDInner:
    @pytest.mark.parametrize("tup", [(3, 5, 5, 8), (1, 2, 2, 3)])
    def test_matches_field_construction(self, golden, tup):
        pair = ConvergentPair(*tup, golden)
        di = d_inner_ff(pair)
        e = build_e(pair, golden)
        assert max_coeff_diff(di, e) < 1e-8

    def test_constant_coefficient_is_covolume(self, gpair):
        di = d_inner_ff(gpair)
        assert abs(canonical_trace(di) - gpair.tau) < 1e-10

    def test_support_structure(self, gpair):
        di = d_inner_ff(gpair)
        q, qp = gpair.q, gpair.q_prime
        for m, n, c in di.items():
            assert n in (-q, 0, q)
            assert m % qp == 0

    def test_far_bands_vanish(self, gpair):
        # |k| >= 2 shifts move the support completely off itself
        prof = ModuleFunction(gpair).profile
        x = np.linspace(-0.5, 0.5, 4001)
        for k in (-2, 2):
            prod = prof.f_eval(x) * prof.f_eval(x + k * gpair.tau)
            assert np.max(np.abs(prod)) == 0.0

    def test_rejects_tuple(self):
        with pytest.raises(ParameterError):
            d_inner_ff((3, 5, 5, 8))


class TestEtaInverse:
    @pytest.mark.parametrize("which", ["V1", "V3"])
    @pytest.mark.parametrize("pairname", ["gpair", "small_pair", "odd_pair"])
    def test_phi_closed_forms(self, request, which, pairname):
        pair = request.getfixturevalue(pairname)
        if which == "V1":
            series = eta_inverse_V1(pair)
            closed = phi_eta_inverse_V1(pair)
        else:
            series = eta_inverse_V3(pair)
            closed = phi_eta_inverse_V3(pair)
        vals = all_phi_traces(series)
        for v, ij in zip(vals, IJ):
            assert abs(v.imag) < 1e-9
            assert snap_half_integer(v.real, tol=1e-6) == closed[ij]

    def test_v1_support(self, gpair):
        series = eta_inverse_V1(gpair)
        q, qp = gpair.q, gpair.q_prime
        ks = set()
        for m, n, c in series.items():
            assert m % qp == 0
            assert (n + 1) % q == 0
            ks.add((n + 1) // q)
        assert ks <= {-2, -1, 0, 1}

    def test_v3_support(self, gpair):
        series = eta_inverse_V3(gpair)
        q, qp = gpair.q, gpair.q_prime
        for m, n, c in series.items():
            assert (m + 1) % qp == 0
            assert n % q == 0
            assert n // q in (-1, 0, 1)

    @pytest.mark.parametrize("which", ["V1", "V3"])
    def test_flip_intertwines_inversion(self, gpair, small_pair, which):
        # flipping the preimage must land on the preimage of the inverse,
        # which is the adjoint series
        fn = eta_inverse_V1 if which == "V1" else eta_inverse_V3
        for pair in (gpair, small_pair):
            series = fn(pair)
            assert max_coeff_diff(apply_flip(series), adjoint(series)) < 1e-12

    def test_reduced_forms(self, gpair, small_pair):
        # q' even: V3 table collapses; q' odd: V1 table collapses
        assert phi_eta_inverse_V3(gpair, reduced=True) == \
            phi_eta_inverse_V3(gpair)
        assert phi_eta_inverse_V1(small_pair, reduced=True) == \
            phi_eta_inverse_V1(small_pair)
        with pytest.raises(ParameterError):
            phi_eta_inverse_V3(small_pair, reduced=True)
        with pytest.raises(ParameterError):
            phi_eta_inverse_V1(gpair, reduced=True)

    def test_closed_form_table_golden(self, gpair):
        # q' even, p odd: the V1 traces vanish and the V3 traces are +-1
        assert [phi_eta_inverse_V1(gpair)[ij] for ij in IJ] == [0, 0, 0, 0]
        assert [phi_eta_inverse_V3(gpair)[ij] for ij in IJ] == [0, 0, 1, -1]


# ---------------------------------------------------------------------------
# limit functions and the corner trace
# ---------------------------------------------------------------------------


class TestCutdownLimits:
    def test_endpoint_plug_in(self, gpair):
        diag = cutdown_limit_functions(gpair)
        f, tau, qp = diag.profile.f_eval, gpair.tau, gpair.q_prime
        want = f(0.0) + f(tau) * np.exp(2j * np.pi * tau / qp)
        assert diag.C(0.0) == pytest.approx(want, abs=1e-14)

    def test_sup_norms_decrease_along_pairs(self, golden):
        tups = [(1, 2, 2, 3), (3, 5, 5, 8), (8, 13, 13, 21)]
        cs, hs = [], []
        for tup in tups:
            diag = cutdown_limit_functions(ConvergentPair(*tup, golden))
            rep = diag.report()
            cs.append(rep["sup_c_minus_1"])
            hs.append(rep["sup_h1"])
        assert cs[0] > cs[1] > cs[2]
        assert hs[0] > hs[1] > hs[2]

    def test_h1_bound_from_shrinking_interval(self, gpair):
        # the h1 integrands live where f is still climbing from 0
        diag = cutdown_limit_functions(gpair)
        cap = np.sqrt(diag.profile.f_eval(-0.5 + gpair.alpha_prime))
        assert diag.sup_h1() <= cap + 1e-12

    def test_h0_sum_approaches_one(self, golden):
        # deviation is controlled by alpha', which shrinks along the tower
        ts = np.linspace(0.0, 1.0, 513)
        devs = []
        for tup in [(1, 2, 2, 3), (3, 5, 5, 8), (8, 13, 13, 21)]:
            diag = cutdown_limit_functions(ConvergentPair(*tup, golden))
            devs.append(np.max(np.abs(diag.h0_sum(ts) - 1.0)))
        assert devs[0] > devs[1] > devs[2]
        assert devs[2] < 0.03

    def test_series_matches_closed_form(self, gpair):
        diag = cutdown_limit_functions(gpair)
        coeffs = diag.v2_coefficients(mmax=32)
        ts = np.linspace(0.0, 1.0, 257)

        def dev(cs):
            return np.max(np.abs(diag.series_eval(ts, cs) - diag.C(ts)))

        full = dev(coeffs)
        assert full < 1e-4  # tail is ~50x the last kept coefficient
        short = dev({m: c for m, c in coeffs.items() if abs(m) <= 8})
        assert full < short

    def test_csv_dump(self, gpair, tmp_path):
        path = tmp_path / "curves.csv"
        cutdown_limit_functions(gpair).dump_csv(path, npts=64)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["t", "c_re", "c_im", "h0_sum", "h1_sum"]
        assert len(rows) == 65
        first = [float(v) for v in rows[1]]
        assert first[0] == 0.0
        assert first[1] == pytest.approx(1.0, abs=1e-9)


class TestMoritaTrace:
    @pytest.mark.parametrize("tup", [(3, 5, 5, 8), (1, 2, 2, 3)])
    def test_trace_scaling_on_shift_square(self, golden, tup):
        # canonical trace of (eUe)(eUe)* against the corner-side integral,
        # scaled by the covolume
        pair = ConvergentPair(*tup, golden)
        e = build_e(pair, golden)
        u = FourierElement.monomial(golden, 1, 0)
        a = twisted_mul(twisted_mul(e, u), e)
        lhs = canonical_trace(twisted_mul(a, adjoint(a))).real
        diag = cutdown_limit_functions(pair)
        assert abs(lhs - pair.tau * diag.corner_trace_of_shift_square()) < 1e-6
        # truncated coefficient route agrees at the same tolerance
        coeffs = diag.v2_coefficients(mmax=32)
        series = sum(abs(c) ** 2 for c in coeffs.values())
        assert abs(lhs - pair.tau * series) < 1e-6

    def test_trace_scaling_on_identity(self, gpair):
        # eta sends the projection itself to 1, so the relation collapses
        # to the constant coefficient of the fine-lattice inner product
        c0 = dperp_inner_ff(gpair, mmax=0)[0]
        assert abs(gpair.tau * c0 - gpair.tau) < 1e-8


# ---------------------------------------------------------------------------
# the two functionals through the corner and transpose maps
# ---------------------------------------------------------------------------


class TestPsiPiXi:
    @pytest.mark.parametrize("pairname",
                             ["gpair", "small_pair", "odd_pair", "big_pair"])
    def test_identities_hold(self, request, pairname):
        rep = psi_pi_xi_identities(request.getfixturevalue(pairname))
        assert rep["ok"]
        assert rep["max_err_psi1"] < 1e-12
        assert rep["max_err_psi2"] < 1e-12

    def test_parity_coverage(self, gpair, small_pair, big_pair):
        # p' odd with q' even, p' even with q' odd, and both odd
        combos = {(p.p_prime % 2, p.q_prime % 2)
                  for p in (gpair, small_pair, big_pair)}
        assert combos == {(1, 0), (0, 1), (1, 1)}

    def test_single_monomial_phase(self, gpair):
        pp, qp = gpair.p_prime, gpair.q_prime
        # one generator word with n = 1, m = 2: psi1 picks up e(p' m n / 2q'),
        # and with q' even psi2 carries the extra sign (-1)^(p' n)
        x = CircleElement(pp, qp, coeffs={(1, 2): 1.0})
        s1, s2 = psi_traces(x)
        assert s1 == pytest.approx(np.exp(2j * np.pi * pp / qp), abs=1e-14)
        assert s2 == pytest.approx(-np.exp(2j * np.pi * pp / qp), abs=1e-14)
        # odd powers of the first generator kill both functionals (q' even)
        s1, s2 = psi_traces(CircleElement(pp, qp, coeffs={(0, 1): 1.0}))
        assert s1 == 0.0 and s2 == 0.0


class TestSpectralTable:
    def test_unresolvable_integrand_raises(self):
        with pytest.raises(ResolutionError):
            _spectral_table(lambda x: np.exp(-np.pi * (x * 45000.0) ** 2),
                            grid_n=8192, max_grid=32768)

    def test_recovers_known_coefficients(self):
        # int cos(2 pi 3 x) e(-l x) dx = delta(|l|-3)/2 on the unit cell
        tab = _spectral_table(lambda x: np.cos(2 * np.pi * 3 * x),
                              grid_n=1024)
        assert tab[3] == pytest.approx(0.5, abs=1e-12)
        assert tab[-3 % 1024] == pytest.approx(0.5, abs=1e-12)
        assert abs(tab[2]) < 1e-12
