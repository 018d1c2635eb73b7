import random
from fractions import Fraction

import pytest

from syzkit.calculus import (
    BasisChangeError,
    ComplexBasis,
    MissingPairing,
    SymplecticData,
    d_lambda,
    dolbeault,
    dual_lefschetz,
    exterior_d,
    lefschetz,
    polarization_switch,
    polarization_unswitch,
)
from syzkit.coeffring import GaussianRational, I, Poly
from syzkit.exterior import Form, GenClass, frame_collect, frame_expand
from syzkit.randgen import random_complex_side_form, random_form, random_poly
from syzkit import nilmanifold as nil

from conftest import iwasawa_omega_check


class TestExteriorD:
    def test_single_term(self, pair3):
        a = Form.monomial(pair3.frame_x, ["dth2"], Poly.variable("r1"))
        assert exterior_d(a) == Form.monomial(
            pair3.frame_x, ["dth2", "dr1"], GaussianRational(-1)
        )

    def test_structure_equation_e13(self):
        nd = nil.build(3)
        got = exterior_d(Form.gen(nd.x_frame, "e13"))
        want = -Form.gen(nd.x_frame, "e12").wedge(Form.gen(nd.x_frame, "e23"))
        assert got == want

    def test_iwasawa_omega_not_closed_but_square_closed(self, pair3):
        w = iwasawa_omega_check(pair3)
        assert not exterior_d(w).is_zero()
        assert exterior_d(w.wedge(w)).is_zero()

    @pytest.mark.parametrize("seed", range(25))
    def test_d_squared_zero_coordinates(self, pair3, seed):
        rng = random.Random(seed)
        a = random_form(rng, pair3.frame_x)
        assert exterior_d(exterior_d(a)).is_zero()

    @pytest.mark.parametrize("seed", range(15))
    def test_d_squared_zero_frame(self, seed):
        nd = nil.build(3)
        rng = random.Random(40 + seed)
        a = random_form(rng, nd.x_frame, max_terms=3)
        assert exterior_d(exterior_d(a)).is_zero()

    @pytest.mark.parametrize("seed", range(20))
    def test_leibniz(self, pair3, seed):
        rng = random.Random(80 + seed)
        ka = rng.randint(0, 2)
        a = random_form(rng, pair3.frame_x, degrees=[ka], max_terms=2)
        b = random_form(rng, pair3.frame_x, max_terms=2)
        lhs = exterior_d(a.wedge(b))
        rhs = exterior_d(a).wedge(b) + a.wedge(exterior_d(b)) * ((-1) ** ka)
        assert lhs == rhs

    @pytest.mark.parametrize("seed", range(10))
    def test_frame_d_matches_coordinate_d(self, seed):
        # structure-equation route vs expand-first route
        nd = nil.build(4)
        rng = random.Random(120 + seed)
        a = random_form(rng, nd.x_frame, max_terms=2, complex_ok=False)
        lhs = frame_expand(exterior_d(a), nd.x_coord)
        rhs = exterior_d(frame_expand(a, nd.x_coord))
        assert lhs == rhs


class TestLefschetz:
    def test_lambda_of_omega_is_n(self, pair3):
        s = pair3.darboux_x
        assert dual_lefschetz(s.omega, s) == Form.scalar(pair3.frame_x, 3)

    @pytest.mark.parametrize("seed", range(15))
    def test_lambda_contraction_oracle(self, pair3, seed):
        # independent route: Lambda(phi) = sum_i i_{r_i} i_{th_i} phi, built from
        # single contractions instead of the pairing-matrix sum
        rng = random.Random(900 + seed)
        s = pair3.darboux_x
        a = random_form(rng, pair3.frame_x)
        oracle = Form.zero(pair3.frame_x)
        for k in (1, 2, 3):
            oracle = oracle + a.contract(f"dth{k}").contract(f"dr{k}")
        assert dual_lefschetz(a, s) == oracle

    def test_lambda_no_paired_legs(self, pair3):
        s = pair3.darboux_x
        assert dual_lefschetz(Form.monomial(pair3.frame_x, ["dth1", "dth2"]), s).is_zero()

    def test_lambda_low_degree(self, pair3):
        s = pair3.darboux_x
        rng = random.Random(0)
        f0 = Form.scalar(pair3.frame_x, 1) * random_poly(rng, pair3.base_vars)
        f1 = random_form(rng, pair3.frame_x, degrees=[1])
        assert dual_lefschetz(f0, s).is_zero()
        assert dual_lefschetz(f1, s).is_zero()

    def test_lefschetz_wedges_omega(self, pair3):
        s = pair3.darboux_x
        a = Form.gen(pair3.frame_x, "dth1")
        assert lefschetz(a, s) == s.omega.wedge(a)

    def test_from_constant_omega_matches_darboux(self, pair2):
        s1 = pair2.darboux_x
        s2 = SymplecticData.from_constant_omega(pair2.frame_x, s1.omega)
        rng = random.Random(3)
        for _ in range(10):
            a = random_form(rng, pair2.frame_x)
            assert dual_lefschetz(a, s1) == dual_lefschetz(a, s2)

    def test_degenerate_omega_rejected(self, pair2):
        w = Form.monomial(pair2.frame_x, ["dth1", "dr1"])
        with pytest.raises(MissingPairing):
            SymplecticData.from_constant_omega(pair2.frame_x, w)

    def test_missing_pairing(self, pair3):
        s = SymplecticData(pair3.frame_x, pair3.darboux_x.omega, None)
        with pytest.raises(MissingPairing):
            dual_lefschetz(Form.scalar(pair3.frame_x, 1), s)


class TestDLambda:
    def test_kills_functions(self, pair3):
        s = pair3.darboux_x
        g = Form.scalar(pair3.frame_x, 1) * Poly.variable("r1")
        assert d_lambda(g, s).is_zero()

    def test_kills_omega(self, pair3):
        s = pair3.darboux_x
        assert d_lambda(s.omega, s).is_zero()

    @pytest.mark.parametrize("seed", range(25))
    def test_squared_zero_and_anticommute(self, pair3, seed):
        rng = random.Random(200 + seed)
        s = pair3.darboux_x
        a = random_form(rng, pair3.frame_x)
        assert d_lambda(d_lambda(a, s), s).is_zero()
        assert exterior_d(d_lambda(a, s)) == -d_lambda(exterior_d(a), s)


class TestDolbeault:
    def test_dbar_of_function(self, pair3):
        b = pair3.basis_xc
        g = random_poly(random.Random(1), pair3.base_vars, complex_ok=False)
        f = Form.scalar(b.holo_frame, 1) * g
        dl, db = dolbeault(f, b)
        half_i = I * Fraction(1, 2)
        want_db = Form.zero(b.holo_frame)
        want_dl = Form.zero(b.holo_frame)
        for k, v in enumerate(pair3.base_vars, 1):
            want_db = want_db + Form.monomial(b.holo_frame, [f"dz{k}b"], g.diff(v) * half_i)
            want_dl = want_dl + Form.monomial(b.holo_frame, [f"dz{k}"], g.diff(v) * (-half_i))
        assert db == want_db
        assert dl == want_dl

    def test_dbar_of_flat_holomorphic_generator(self, pair3):
        b = pair3.basis_xc
        dl, db = dolbeault(Form.gen(b.holo_frame, "dz1"), b)
        assert db.is_zero() and dl.is_zero()

    @pytest.mark.parametrize("seed", range(25))
    def test_del_plus_dbar_is_d(self, pair3, seed):
        rng = random.Random(300 + seed)
        b = pair3.basis_xc
        a = random_complex_side_form(rng, pair3)
        dl, db = dolbeault(a, b)
        assert b.from_complex(dl + db) == exterior_d(b.from_complex(a))

    @pytest.mark.parametrize("seed", range(20))
    def test_del_dbar_squares_and_anticommute(self, pair3, seed):
        rng = random.Random(400 + seed)
        b = pair3.basis_xc
        a = random_complex_side_form(rng, pair3)
        dl, db = dolbeault(a, b)
        dll, dlb = dolbeault(dl, b)
        dbl, dbb = dolbeault(db, b)
        assert dll.is_zero() and dbb.is_zero()
        assert dlb == -dbl

    def test_round_trip_guard(self, pair2):
        # a non-invertible candidate basis must be rejected at construction
        f = pair2.frame_xc
        dz1 = Form.gen(f, "dtc1") + Form.gen(f, "dr1") * I
        with pytest.raises(BasisChangeError):
            ComplexBasis(f, [("dz1", dz1), ("dz2", dz1)])

    def test_polynomial_transition_basis(self, pair3):
        # eta = dth + i*mu with det(mu) = 1: inverse stays polynomial
        from syzkit.sustruct import mirror_transform

        su = mirror_transform(pair3, iwasawa_omega_check(pair3))
        assert su.complex_basis is not None
        b = su.complex_basis
        rng = random.Random(5)
        for _ in range(5):
            a = random_form(rng, pair3.frame_x, max_terms=3)
            assert b.from_complex(b.to_complex(a)) == a


class TestPolarizationSwitch:
    def test_monomial_image(self, pair3):
        b = pair3.basis_xc
        a = Form.monomial(b.holo_frame, ["dz1", "dz2b"])
        s = polarization_switch(a, pair3.frame_xc, GenClass.FIBER_MIRROR)
        assert s == Form.monomial(pair3.frame_xc, ["dtc1", "dr2"])

    def test_scalar(self, pair3):
        b = pair3.basis_xc
        one = Form.scalar(b.holo_frame, 1)
        assert polarization_switch(one, pair3.frame_xc, GenClass.FIBER_MIRROR) == Form.scalar(
            pair3.frame_xc, 1
        )

    @pytest.mark.parametrize("seed", range(20))
    def test_bijection(self, pair3, seed):
        rng = random.Random(500 + seed)
        a = random_complex_side_form(rng, pair3)
        s = polarization_switch(a, pair3.frame_xc, GenClass.FIBER_MIRROR)
        back = polarization_unswitch(s, pair3.holo_frame, GenClass.FIBER_MIRROR)
        assert back == a
        assert s.degrees() == a.degrees()
