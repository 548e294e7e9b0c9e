"""Central series and maximal-class structure against the oracle."""

import pytest

from pearlforge import series as series_mod
from pearlforge.oracle import TableGroup
from pearlforge.subgroups import Subgroup


@pytest.mark.parametrize("fixture", ["e3", "sp43", "w3"])
def test_series_match_oracle(fixture, request):
    pres = request.getfixturevalue(fixture)
    table = TableGroup.from_presentation(pres)
    sd = series_mod.central_series(pres)
    assert [g.order for g in sd.lcs] == [
        len(level) for level in table.lower_central_series()
    ]
    assert [z.order for z in sd.zeta] == [
        len(level) for level in table.upper_central_series()
    ]
    # membership, not just orders
    for ours, oracle in zip(sd.lcs, table.lower_central_series()):
        assert sorted(table.index[x] for x in ours.elements()) == oracle


def test_maximal_class_profiles(e3, sp43, host75):
    for pres, cls in ((e3, 2), (sp43, 3), (host75, 4)):
        sd = series_mod.central_series(pres)
        assert sd.nilpotency_class == cls
        assert sd.is_maximal_class
        # |gamma_i / gamma_{i+1}| = p along the whole series except the top
        orders = [g.order for g in sd.lcs]
        for a, b in zip(orders[1:], orders[2:]):
            assert a == b * pres.p


def test_upper_equals_reindexed_lower(host75):
    # maximal class: Z_i(S) = gamma_{n-i}(S) for 1 <= i <= n-2
    sd = series_mod.central_series(host75)
    n = host75.n
    for i in range(1, n - 1):
        assert sd.zeta_(i) == sd.gamma(n - i)


def test_two_step_centralizer_is_characteristic_maximal(sp43, host75):
    for pres in (sp43, host75):
        sd = series_mod.central_series(pres)
        g1 = sd.gamma1
        assert g1.order == pres.order // pres.p
        assert g1.is_normal()
        assert sd.gamma(2) <= g1


def test_gamma1_shapes(sp43, host75):
    sd = series_mod.central_series(sp43)
    assert sd.gamma1.is_abelian()
    assert sd.gamma1.exponent() == 3
    sd75 = series_mod.central_series(host75)
    assert not sd75.gamma1.is_abelian()
    assert sd75.gamma1 == sd75.cs_z2


def test_degree_of_commutativity(sp43, host75):
    sd = series_mod.central_series(sp43)
    l43 = sd.degree_of_commutativity
    sd75 = series_mod.central_series(host75)
    l75 = sd75.degree_of_commutativity
    assert l43 >= 0 and l75 >= 0
    # definition: l is the largest integer with
    # [gamma_i, gamma_j] <= gamma_{i+j+l} for all i, j >= 1
    for pres, sd_, l in ((sp43, sd, l43), (host75, sd75, l75)):
        n = pres.n
        whole = Subgroup.whole(pres)

        def holds(shift):
            for i in range(1, n):
                for j in range(1, n):
                    lhs = sd_.gamma(i).commutator_with(
                        sd_.gamma(j), normal_in=whole
                    )
                    if not sd_.gamma(i + j + shift).contains_subgroup(
                        lhs
                    ):
                        return False
            return True

        assert holds(l)
        if sd_.gamma1.is_abelian():
            # convention: l = n - 3 when gamma_1 is abelian (every
            # bracket of chain terms is then trivial)
            assert l == n - 3
        else:
            assert not holds(l + 1)


def test_exponent_of(sp43, sp45, w3):
    # the p = 3 Sylow is C_3 wr C_3 (exponent 9); for p >= 5 the class
    # is below p and the group has exponent p
    assert series_mod.exponent_of(sp43, Subgroup.whole(sp43)) == 9
    assert series_mod.exponent_of(sp45, Subgroup.whole(sp45)) == 5
    assert series_mod.exponent_of(w3, Subgroup.whole(w3)) == 9


def test_wreath_group_is_not_exponent_p(w3):
    sd = series_mod.central_series(w3)
    assert sd.is_maximal_class
    assert sd.nilpotency_class == 3
