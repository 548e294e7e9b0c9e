"""Automorphism machinery: group structure, restriction, isomorphism
testing, standardization."""

import random

import pytest

from pearlforge import series as series_mod
from pearlforge.autos import (
    automorphism_group,
    identity_automorphism,
    inner_automorphism,
    isomorphism_test,
    restriction,
    standardize,
    verify_autoS_structure,
)
from pearlforge.catalog import make_standard
from pearlforge.errors import InvarianceError
from pearlforge.subgroups import Subgroup


@pytest.fixture(scope="module")
def aut_e3(e3):
    return automorphism_group(e3)


@pytest.fixture(scope="module")
def aut_sp43(sp43):
    return automorphism_group(sp43)


def test_inner_count_is_central_quotient(e3, sp43, aut_e3, aut_sp43):
    assert aut_e3.inn_order == 27 // 3
    z43 = Subgroup.whole(sp43).center_of().order
    assert aut_sp43.inn_order == 81 // z43


def test_extraspecial_aut_order(aut_e3):
    # Aut(p^{1+2}_+) = (C_p x C_p) : GL_2(p); for p = 3 that is 9 * 48
    assert aut_e3.order == 9 * 48
    assert aut_e3.out_order == aut_e3.order // aut_e3.inn_order


def test_order_factors_into_p_and_pprime_parts(aut_e3, aut_sp43):
    for autg in (aut_e3, aut_sp43):
        assert autg.out_order == autg.pprime_order * (
            autg.out_order // autg.pprime_order
        )
        assert autg.order % autg.inn_order == 0


def test_automorphisms_are_homomorphisms(sp43, aut_sp43):
    rng = random.Random(3)
    for phi in aut_sp43.reps[:6]:
        for _ in range(30):
            u = tuple(rng.randrange(3) for _ in range(4))
            v = tuple(rng.randrange(3) for _ in range(4))
            assert phi.apply(sp43.mult(u, v)) == sp43.mult(
                phi.apply(u), phi.apply(v)
            )


def test_compose_inverse_identity(sp43, aut_sp43):
    ident = identity_automorphism(sp43)
    rng = random.Random(5)
    for phi in aut_sp43.reps[:6]:
        back = phi.inverse()
        comp = phi.compose(back)
        for _ in range(20):
            u = tuple(rng.randrange(3) for _ in range(4))
            assert comp.apply(u) == u
            assert ident.apply(u) == u


def test_inner_automorphism_is_conjugation(sp43):
    g = sp43.gen(0)
    phi = inner_automorphism(sp43, g)
    for i in range(sp43.n):
        x = sp43.gen(i)
        assert phi.apply(x) == sp43.conj(x, g)


def test_pprime_elements_have_prime_to_p_order(aut_sp43):
    for w, meta in aut_sp43.pprime_elements():
        assert w.order() % 3 != 0


def test_restriction_to_characteristic_subgroup(sp43, aut_sp43):
    sd = series_mod.central_series(sp43)
    g1 = sd.gamma1
    phi = aut_sp43.reps[1]
    rho = restriction(phi, g1)
    assert rho.src.order == g1.order


def test_restriction_to_noninvariant_subgroup_raises(sp43, aut_sp43):
    # a non-normal line is moved by some automorphism
    line = Subgroup.span(sp43, [sp43.gen(1)])
    raised = False
    for phi in aut_sp43.reps:
        try:
            restriction(phi, line)
        except InvarianceError:
            raised = True
            break
    assert raised


def test_sp4_sylow_p3_is_wreath(sp43, w3):
    # the paper's cross-check: the Sp_4(3)-Sylow is C_3 wr C_3
    res = isomorphism_test(sp43, w3)
    assert res.isomorphic
    iso = res.map
    rng = random.Random(11)
    for _ in range(50):
        u = tuple(rng.randrange(3) for _ in range(4))
        v = tuple(rng.randrange(3) for _ in range(4))
        assert iso.apply(sp43.mult(u, v)) == w3.mult(
            iso.apply(u), iso.apply(v)
        )


def test_non_isomorphic_pairs_detected(e3):
    # exponent-9 extraspecial group 3^{1+2}_- vs the exponent-3 one
    minus = make_standard(3, 3, {}, {0: {2: 1}})
    minus.check()
    res = isomorphism_test(e3, minus)
    assert not res.isomorphic
    assert res.distinguishers


def test_standardize_round_trip(host75):
    std, iso = standardize(host75)
    std.check()
    assert std.order == host75.order
    rng = random.Random(17)
    for _ in range(40):
        u = tuple(rng.randrange(7) for _ in range(5))
        v = tuple(rng.randrange(7) for _ in range(5))
        assert iso.apply(std.mult(u, v)) == host75.mult(
            iso.apply(u), iso.apply(v)
        )


def test_autS_structure_report(host75, autg75):
    report = verify_autoS_structure(host75, autg75)
    assert report["applicable"]
    assert not report["failures"]


def test_torus_order_of_exotic_host(autg75):
    # p'-part of Out is the diagonal torus C_6 = C_{p-1} for the 7^5 host
    assert autg75.pprime_order == 6
    cyclic, gen, orders = autg75.pprime_cyclic_data()
    assert cyclic
