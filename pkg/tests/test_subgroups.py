"""Subgroup machinery against the multiplication-table oracle."""

import pytest

from pearlforge.catalog import build_named, make_standard
from pearlforge.errors import BudgetExceededError
from pearlforge.oracle import TableGroup
from pearlforge.presentation import element_order
from pearlforge.subgroups import (
    Subgroup,
    SubgroupProfile,
    centralizer,
    enumerate_subgroups,
    intersect,
    maximal_subgroups,
    normalizer,
    sectional_rank,
)


@pytest.fixture(scope="module")
def table43(sp43):
    return TableGroup.from_presentation(sp43)


def test_span_and_membership(sp43):
    g0 = sp43.gen(0)
    H = Subgroup.span(sp43, [g0])
    assert H.order == 3
    assert H.contains(sp43.pow(g0, 2))
    assert not H.contains(sp43.gen(1))
    assert Subgroup.whole(sp43).order == 81
    assert Subgroup.trivial(sp43).order == 1


def test_centralizers_match_oracle(sp43, table43):
    for i in range(sp43.n):
        g = sp43.gen(i)
        C = centralizer(sp43, g)
        oracle = table43.centralizer(table43.index[g])
        assert C.order == len(oracle)
        assert sorted(table43.index[x] for x in C.elements()) == oracle


def test_center_matches_oracle(sp43, table43):
    Z = Subgroup.whole(sp43).center_of()
    assert sorted(table43.index[x] for x in Z.elements()) == (
        table43.center()
    )


def test_normalizer_of_nonnormal_subgroup(sp43, table43):
    # <g_1> (second generator) is not normal in the Sp4-Sylow group
    H = Subgroup.span(sp43, [sp43.gen(1)])
    N = normalizer(sp43, H)
    assert H.order <= N.order < sp43.order
    members = {table43.index[x] for x in H.elements()}
    oracle_n = [
        g for g in range(table43.N)
        if {table43.mul(table43.mul(table43.inv(g), h), g)
            for h in members} == members
    ]
    assert N.order == len(oracle_n)


def test_intersection(sp43):
    A = Subgroup.span(sp43, [sp43.gen(1), sp43.gen(2)])
    B = Subgroup.span(sp43, [sp43.gen(2), sp43.gen(3)])
    AB = intersect(sp43, A, B)
    for x in AB.elements():
        assert A.contains(x) and B.contains(x)
    assert AB.order == 3  # <g_2> is the common line


def test_maximal_subgroups_are_all_index_p_subgroups(sp43, w3, e5):
    for pres in (sp43, w3, e5):
        p = pres.p
        ms = maximal_subgroups(pres)
        expected = len(
            enumerate_subgroups(pres, pres.order // p)
        )
        assert len(ms) == expected
        assert len(set(M.key() for M in ms)) == len(ms)
        for M in ms:
            assert M.order == pres.order // p
            assert M.is_normal()


def test_maximal_subgroup_count_is_projective_line(sp43, host75):
    # 2-generated: (p^2 - 1)/(p - 1) = p + 1 maximal subgroups
    assert len(maximal_subgroups(sp43)) == 4
    assert len(maximal_subgroups(host75)) == 8


def test_subgroup_profile_flags(e5, sp43):
    whole5 = Subgroup.whole(e5)
    prof = SubgroupProfile(whole5)
    assert prof.extraspecial and not prof.abelian
    assert prof.exponent == 5
    ea = Subgroup.span(sp43, [sp43.gen(1), sp43.gen(2), sp43.gen(3)])
    prof2 = SubgroupProfile(ea)
    assert prof2.elementary_abelian and prof2.d == 3


def test_exponent_fast_path_matches_scan(w3, sp43):
    # wreath_3 has exponent 9; the regular fast path must see it on the
    # basis, and the exhaustive scan must agree
    for pres in (w3, sp43):
        for m in range(pres.n + 1):
            for H in enumerate_subgroups(pres, pres.p ** m):
                brute = max(
                    (element_order(pres, x) for x in H.elements()),
                    default=1,
                )
                assert H.exponent() == brute


def test_sectional_rank_matches_brute_force(e3, sp43, w3):
    for pres in (e3, sp43, w3):
        best = 0
        for m in range(pres.n + 1):
            for H in enumerate_subgroups(pres, pres.p ** m):
                best = max(best, H.d())
        report = sectional_rank(pres)
        assert report.exact
        assert report.rank == best


def test_sectional_rank_known_values(host75):
    assert sectional_rank(host75).rank == 3


def test_budget_exhaustion_raises(sp43, host75):
    with pytest.raises(BudgetExceededError):
        enumerate_subgroups(sp43, 27, budget=2)
    with pytest.raises(BudgetExceededError):
        sectional_rank(host75, budget=1)


def test_conjugate_and_normality(sp43):
    H = Subgroup.span(sp43, [sp43.gen(1)])
    g = sp43.gen(0)
    Hg = H.conjugate(g)
    assert Hg.order == H.order
    assert not H.is_normal()
    tail = Subgroup.span(sp43, [sp43.gen(3)])
    assert tail.is_normal()


def test_induced_presentation_round_trip(sp43):
    from pearlforge.subgroups import induced_presentation

    H = Subgroup.span(sp43, [sp43.gen(1), sp43.gen(2), sp43.gen(3)])
    q = induced_presentation(sp43, H)
    assert q.order == H.order
    q.check()
