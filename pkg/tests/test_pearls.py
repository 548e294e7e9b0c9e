"""Pearl candidates, normalizer towers, essential-subgroup filters."""

import pytest

from pearlforge import series as series_mod
from pearlforge.fusion import conjugacy_class_reps
from pearlforge.pearls import (
    essential_candidate_scan,
    find_pearl_candidates,
    normalizer_tower,
    passes_essential_filters,
)
from pearlforge.subgroups import Subgroup, SubgroupProfile


@pytest.fixture(scope="module")
def sp43_data(sp43):
    sd = series_mod.central_series(sp43)
    cands = find_pearl_candidates(sp43, sd)
    return sd, cands


def test_candidate_shapes(sp43, sp43_data):
    sd, cands = sp43_data
    assert cands
    for c in cands:
        E = c.subgroup
        if c.kind == "abelian":
            assert E.order == 9
            assert E.is_abelian() and E.exponent() == 3
        else:
            assert c.kind == "extraspecial"
            assert E.order == 27
            assert SubgroupProfile(E).extraspecial
            assert E.exponent() == 3


def test_both_kinds_on_sp4_sylow(sp43, sp43_data):
    sd, cands = sp43_data
    reps = conjugacy_class_reps(sp43, cands)
    assert sorted(c.kind for c in reps) == ["abelian", "extraspecial"]


def test_candidates_avoid_the_two_step_centralizer(sp43, sp43_data):
    sd, cands = sp43_data
    for c in cands:
        outside = [b for b in c.subgroup.basis
                   if not sd.gamma1.contains(b)]
        assert outside


def test_tower_checks_all_pass(sp43, sp43_data):
    sd, cands = sp43_data
    reps = conjugacy_class_reps(sp43, cands)
    for c in reps:
        tr = normalizer_tower(sp43, c, peers=reps)
        assert all(tr.checks.values()), tr.checks
        # maximality: each tower step has index p and the top is S
        orders = [H.order for H in tr.tower]
        assert orders[-1] == sp43.order
        for a, b in zip(orders, orders[1:]):
            assert b == a * sp43.p


def test_tower_member_class_grows_by_one(sp45):
    from pearlforge.subgroups import induced_presentation

    sd = series_mod.central_series(sp45)
    cands = find_pearl_candidates(sp45, sd)
    reps = conjugacy_class_reps(sp45, cands)
    assert reps
    for c in reps:
        tr = normalizer_tower(sp45, c, peers=reps)
        assert all(tr.checks.values()), tr.checks
        classes = []
        for N in tr.tower:
            q = induced_presentation(sp45, N)
            sq = series_mod.central_series(q)
            classes.append(sq.nilpotency_class)
        # each normalizer step raises the nilpotency class by exactly 1
        assert classes == list(
            range(classes[0], classes[0] + len(classes))
        )


def test_same_kind_reps_not_s_conjugate(sp43, sp43_data):
    sd, cands = sp43_data
    reps = conjugacy_class_reps(sp43, cands)
    keys = [c.subgroup.key() for c in reps]
    assert len(set(keys)) == len(keys)
    # every candidate is S-conjugate to exactly one representative
    from pearlforge.fusion import _conjugate_orbit

    orbit_keys = [
        {H.key() for H, _g in _conjugate_orbit(sp43, c.subgroup)}
        for c in reps
    ]
    for c in cands:
        hits = sum(c.subgroup.key() in ks for ks in orbit_keys)
        assert hits == 1


def test_essential_scan_labels(sp43, sp43_data):
    sd, _ = sp43_data
    scan = essential_candidate_scan(sp43, sd)
    labels = {}
    for _H, labs in scan:
        for lab in labs:
            labels[lab] = labels.get(lab, 0) + 1
    assert labels.get("pearl", 0) == 4
    assert labels.get("gamma1", 0) == 1


def test_filter_rejects_whole_and_center(sp43, sp43_data):
    sd, _ = sp43_data
    ok, why = passes_essential_filters(sp43, sd, Subgroup.whole(sp43))
    assert not ok
    ok, why = passes_essential_filters(
        sp43, sd, Subgroup.span(sp43, [sp43.gen(3)])
    )
    assert not ok


def test_nonpearl_candidates_fail_pearl_shape(sp43, sp43_data):
    sd, cands = sp43_data
    # gamma_1 passes the essential filters but is not a pearl shape
    ok, label = passes_essential_filters(sp43, sd, sd.gamma1)
    assert ok and label == "gamma1"
