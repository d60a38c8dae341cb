"""Exact character tables, symmetry actions, and the measured cross-check."""

from fractions import Fraction

import numpy as np
import pytest

from fliptrace.algebra import (ChernCharacter, LinearForm, ThetaValue,
                               apply_cubic, apply_flip, apply_fourier,
                               apply_gamma)
from fliptrace.arithmetic import ConvergentPair
from fliptrace.errors import IntegrityError, ParameterError
from fliptrace.fields import build_e, e_character
from fliptrace.ktheory import (BASIS_PHI, ORBIT_NAMES, AutomorphismDescriptor,
                               KMatrix, TraceVector, act_on_kmatrix,
                               basis_characters, c_matrix, coefficients_a,
                               coefficients_a_from_module,
                               derive_basis_permutation, derive_row_action,
                               kmatrix_closed, kmatrix_measured,
                               kmatrix_of_identity, orbit_descriptors,
                               s3_orbit, s3_orbit_report,
                               trace_vector_closed, trace_vector_of_identity,
                               compare_measured_to_closed)

H = Fraction(1, 2)


@pytest.fixture(scope="module")
def gpair(golden):
    return ConvergentPair(3, 5, 5, 8, golden)


@pytest.fixture(scope="module")
def cf_pair():
    th = ThetaValue.from_cf([1, 1, 2, 1] + [2] * 60)
    return ConvergentPair(1, 2, 3, 5, th)


class TestKMatrix:
    def test_shape_enforced(self):
        with pytest.raises(ParameterError):
            KMatrix([[0] * 6] * 3)
        with pytest.raises(ParameterError):
            KMatrix([[0] * 5] * 4)

    def test_entries_must_be_half_integers(self):
        with pytest.raises(ParameterError):
            KMatrix([[Fraction(1, 3)] + [0] * 5] + [[0] * 6] * 3)

    def test_entry_lookup_by_label(self):
        k = kmatrix_of_identity()
        assert k.entry("00", 1) == 1
        assert k.entry("01", 4) == H
        assert k.entry(1, 4) == H
        with pytest.raises(ParameterError):
            k.entry("00", 0)

    def test_json_round_trip_uses_doubled_integers(self):
        k = kmatrix_of_identity()
        obj = k.to_json_obj()
        assert all(isinstance(v, int) for row in obj for v in row)
        assert obj[0][0] == 2 and obj[0][2] == 1
        assert KMatrix.from_json_obj(obj) == k

    def test_doubled_rows_match_entries(self):
        k = kmatrix_of_identity()
        d = k.doubled_rows()
        for a in range(4):
            for i in range(6):
                assert Fraction(d[a][i], 2) == k.rows[a][i]

    def test_float_array(self):
        arr = kmatrix_of_identity().as_float_array()
        assert arr.shape == (4, 6)
        assert arr[0, 0] == 1.0 and arr[1, 3] == 0.5

    def test_equality_and_hash(self):
        a = kmatrix_of_identity()
        b = KMatrix(a.rows)
        assert a == b and hash(a) == hash(b)
        assert a != KMatrix([[0] * 6] * 4)

    def test_str_mentions_labels(self):
        s = str(kmatrix_of_identity())
        for label in ("00:", "01:", "10:", "11:"):
            assert label in s


class TestTraceVector:
    def test_requires_six_forms(self):
        with pytest.raises(ParameterError):
            TraceVector([LinearForm(0, 1)] * 5)

    def test_eval_and_json(self, golden):
        tv = trace_vector_closed(ConvergentPair(3, 5, 5, 8, golden))
        vals = tv.eval(golden)
        assert len(vals) == 6
        obj = tv.to_json_obj()
        assert obj["multipliers"] == [8, 6, 5, 5, 5, 5]
        back = TraceVector.from_json_obj(obj)
        assert back == tv and back.multipliers == tv.multipliers


class TestBasisCharacters:
    def test_above_half_doubled_trace(self, golden):
        chars = basis_characters(golden)
        assert chars[0].tau == LinearForm(1)
        assert chars[1].tau == LinearForm(2, -2)
        assert chars[2].tau == LinearForm(0, 1)

    def test_below_half_doubled_trace(self):
        chars = basis_characters(ThetaValue.from_value(0.38))
        assert chars[1].tau == LinearForm(0, 2)

    def test_rejects_half(self):
        with pytest.raises(ParameterError):
            basis_characters(0.5)

    def test_phi_table_pinned(self):
        assert BASIS_PHI[0] == (1, 0, 0, 0)
        assert BASIS_PHI[3] == (H, H, -H, -H)


PARITY_PAIRS = [(3, 5, 5, 8), (1, 2, 2, 3), (8, 13, 13, 21)]


class TestCoefficients:
    @pytest.mark.parametrize("tup", PARITY_PAIRS)
    def test_closed_matches_module_route(self, golden, tup):
        pair = ConvergentPair(*tup, golden)
        closed = coefficients_a(pair)
        module = coefficients_a_from_module(pair)
        assert set(closed) == set(module)
        for key in closed:
            assert closed[key] == module[key], key

    @pytest.mark.parametrize("tup", PARITY_PAIRS)
    def test_sum_rule_recovers_e_character(self, golden, tup):
        # a_minus + a_plus * delta2(q') must reproduce phi(e)
        pair = ConvergentPair(*tup, golden)
        acoef = coefficients_a(pair)
        d2 = 1 if pair.q_prime % 2 == 0 else 0
        phi_e = e_character(pair).phi
        for idx, jk in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
            am, ap = acoef[jk]
            assert am + ap * d2 == phi_e[idx]

    def test_rejects_bare_tuple(self):
        with pytest.raises(ParameterError):
            coefficients_a((3, 5, 5, 8))


class TestClosedTables:
    def test_golden_table(self, gpair):
        kmat, tvec = kmatrix_closed(gpair)
        assert kmat == KMatrix([
            [1, 0, H, H, H, H],
            [1, 0, H, H, H, H],
            [0, 0, H, -H, H, -H],
            [0, 0, -H, H, -H, H],
        ])
        assert tvec.forms[0] == LinearForm(-24, 40)
        assert tvec.forms[1] == LinearForm(-18, 30)
        assert tvec.forms[2:] == (LinearForm(-15, 25),) * 4

    def test_golden_trace_values(self, gpair, golden):
        vals = trace_vector_closed(gpair).eval(golden)
        assert abs(vals[2] - (25 * golden.value - 15)) < 1e-12
        assert 0 < min(vals) and max(vals) < 1

    def test_below_half_p2_branch(self, golden):
        th = ThetaValue.from_value(1 - golden.value)
        pair = ConvergentPair(1, 3, 2, 5, th)
        tv = trace_vector_closed(pair)
        assert tv.multipliers == (5, 4, 2, 2, 2, 2)
        assert tv.forms[1] == LinearForm(-4, 12)

    def test_first_column_is_e_character(self, gpair):
        kmat, tvec = kmatrix_closed(gpair)
        ch = e_character(gpair)
        assert kmat.column(1) == ch.phi
        assert tvec.forms[0] == ch.tau

    def test_frozen_oracle_column_three(self, gpair, golden):
        # cutdown of the half class, measured once through the spectral
        # route and pinned: tau = 25 theta - 15, phi = (1/2, 1/2, 1/2, -1/2)
        kmat, tvec = kmatrix_closed(gpair)
        assert kmat.column(3) == (H, H, H, -H)
        assert abs(tvec.eval(golden)[2] - 0.4508497187473712) < 1e-12

    def test_cf_pair_table(self, cf_pair):
        kmat, tvec = kmatrix_closed(cf_pair)
        assert kmat == KMatrix([
            [1, 0, 1, 0, 1, 0],
            [0, 0, 0, 1, 0, -1],
            [0] * 6,
            [0] * 6,
        ])
        assert tvec.multipliers == (5, 4, 3, 3, 3, 3)

    def test_identity_table(self, golden):
        k = kmatrix_of_identity()
        assert k.column(1) == (1, 0, 0, 0)
        tv = trace_vector_of_identity(golden)
        vals = tv.eval(golden)
        assert abs(vals[0] - 1) < 1e-12
        assert abs(vals[1] - (2 - 2 * golden.value)) < 1e-12

    def test_theta_cross_check(self, gpair, golden):
        kmatrix_closed(gpair, golden)
        with pytest.raises(ParameterError):
            kmatrix_closed(gpair, 0.3)

    def test_rejects_nonstanding(self, golden):
        with pytest.raises(ParameterError):
            kmatrix_closed(ConvergentPair(1, 3, 1, 2, golden))


class TestRowActions:
    def test_flip_is_identity(self):
        perm, signs = derive_row_action("flip")
        assert perm == (0, 1, 2, 3)
        assert signs == (1, 1, 1, 1)

    def test_sigma_swaps_mixed_labels(self):
        perm, signs = derive_row_action("sigma")
        assert perm == (0, 2, 1, 3)
        assert signs == (1, 1, 1, 1)

    def test_kappa_three_cycle(self):
        perm, signs = derive_row_action("kappa")
        assert perm == (0, 3, 1, 2)
        assert signs == (1, 1, 1, 1)

    def test_gamma1_signs(self):
        perm, signs = derive_row_action("gamma1")
        assert perm == (0, 1, 2, 3)
        assert signs == (1, 1, -1, -1)

    def test_callable_generator(self):
        perm, signs = derive_row_action(lambda a: apply_gamma(2, a))
        assert perm == (0, 1, 2, 3)
        assert signs == (1, -1, 1, -1)

    def test_unknown_kind(self):
        with pytest.raises(ParameterError):
            derive_row_action("transpose")


class TestBasisPermutations:
    def test_sigma_swaps_four_five(self):
        assert derive_basis_permutation("sigma") == (1, 2, 3, 5, 4, 6)

    def test_kappa_cycles_twists(self):
        assert derive_basis_permutation("kappa") == (1, 2, 3, 5, 6, 4)

    def test_flip_fixes_all(self):
        assert derive_basis_permutation("flip") == (1, 2, 3, 4, 5, 6)


class TestDescriptors:
    def test_derive_composition(self):
        kk = AutomorphismDescriptor.derive("kappa*kappa")
        k = AutomorphismDescriptor.derive("kappa")
        assert k.then(k).same_action(kk)

    def test_group_relations(self):
        d = orbit_descriptors()
        s, k = d["sigma"], d["kappa"]
        ident = AutomorphismDescriptor.identity()
        assert s.then(s).same_action(ident)
        assert k.then(k).then(k).same_action(ident)
        # sigma kappa sigma = kappa^2 in this order-6 group
        assert s.then(k).then(s).same_action(d["kappa2"])

    def test_orbit_composition_table(self):
        d = orbit_descriptors()
        assert d["kappa"].then(d["kappa"]).same_action(d["kappa2"])
        assert d["kappa"].then(d["sigma"]).same_action(d["sigma_kappa"])

    def test_transform_character_signs(self, gpair):
        g1 = AutomorphismDescriptor.derive("gamma1")
        ch = ChernCharacter(LinearForm(0, 1), (H, H, H, H))
        out = g1.transform_character(ch)
        assert out.phi == (H, H, -H, -H)

    def test_act_requires_descriptor(self, gpair):
        kmat, tvec = kmatrix_closed(gpair)
        with pytest.raises(ParameterError):
            act_on_kmatrix(kmat, tvec, ((0, 1, 2, 3), (1, 1, 1, 1)))


class TestOrbit:
    def test_six_distinct_tables_golden(self, gpair):
        orbit = s3_orbit(gpair)
        assert set(orbit) == set(ORBIT_NAMES)
        mats = [orbit[n][0] for n in ORBIT_NAMES]
        assert len(set(mats)) == 6

    def test_trace_vectors_invariant_up_to_class_relabeling(self, gpair):
        orbit = s3_orbit(gpair)
        base = orbit["id"][1]
        for name in ORBIT_NAMES:
            tv = orbit[name][1]
            assert sorted(tv.forms, key=str) == sorted(base.forms, key=str)
            assert tv.forms[0] == base.forms[0]  # class 1 is fixed

    def test_kappa_table_golden(self, gpair):
        kmat = s3_orbit(gpair)["kappa"][0]
        assert kmat == KMatrix([
            [1, 0, H, H, H, H],
            [0, 0, -H, H, H, -H],
            [1, 0, H, H, H, H],
            [0, 0, H, -H, -H, H],
        ])

    def test_sigma_table_golden(self, gpair):
        kmat = s3_orbit(gpair)["sigma"][0]
        assert kmat == KMatrix([
            [1, 0, H, H, H, H],
            [0, 0, H, H, -H, -H],
            [1, 0, H, H, H, H],
            [0, 0, -H, -H, H, H],
        ])

    def test_cf_kappa_table(self, cf_pair):
        kmat = s3_orbit(cf_pair)["kappa"][0]
        assert kmat == KMatrix([
            [1, 0, 1, 0, 0, 1],
            [0] * 6,
            [0, 0, 0, -1, 1, 0],
            [0] * 6,
        ])

    def test_cf_sigma_mixed_row(self, cf_pair):
        kmat = s3_orbit(cf_pair)["sigma"][0]
        assert kmat.rows[2] == (0, 0, 0, 0, 1, -1)

    def test_identity_element_fixed(self, golden):
        ident = kmatrix_of_identity()
        tid = trace_vector_of_identity(golden)
        for name, desc in orbit_descriptors(golden).items():
            out = act_on_kmatrix(ident, tid, desc)
            assert out == (ident, tid), name


class TestOrbitReport:
    def test_report_at_cf_pair(self, cf_pair):
        rep = s3_orbit_report(cf_pair)
        assert rep["pair"] == (1, 2, 3, 5)
        assert rep["pairwise_distinct"] is True
        assert rep["identity_fixed"] is True
        assert set(rep["orbit"]) == set(ORBIT_NAMES)
        ch = ChernCharacter.from_json_obj(rep["common_character"])
        assert ch.phi == (1, 0, 0, 0)
        assert ch.tau == LinearForm(-5, 10)

    def test_orbit_json_is_doubled_ints(self, cf_pair):
        rep = s3_orbit_report(cf_pair)
        block = rep["orbit"]["kappa"]["K"]
        assert block == [[2, 0, 2, 0, 0, 2], [0] * 6,
                         [0, 0, 0, -2, 2, 0], [0] * 6]

    def test_parity_guard_refuses_golden(self, gpair):
        # q = 5 is odd: the distinctness statement is outside this parity
        with pytest.raises(ParameterError):
            s3_orbit_report(gpair)

    def test_parity_guard_refuses_even_p_prime(self, golden):
        th = ThetaValue.from_value(1 - golden.value)
        pair = ConvergentPair(1, 3, 2, 5, th)  # q' even branch: p' = 2
        with pytest.raises(ParameterError):
            s3_orbit_report(pair)


class TestMeasured:
    def test_single_column_against_closed(self, gpair):
        out = compare_measured_to_closed(gpair, indices=[1])
        assert out["ok"] is True
        assert out["phi_mismatches"] == []
        assert out["worst_tau_dev"] < 1e-8

    def test_rejects_nonstanding(self, golden):
        with pytest.raises(ParameterError):
            kmatrix_measured(ConvergentPair(1, 3, 1, 2, golden))

    def test_custom_table_needs_traces(self, gpair):
        kmat, _ = kmatrix_closed(gpair)
        with pytest.raises(ParameterError):
            compare_measured_to_closed(gpair, kmat=kmat)
