"""Delta automorphisms, lambda-action verification, fusion
certificates and their restrictions."""

import pytest

from pearlforge import series as series_mod
from pearlforge.autos import automorphism_group, isomorphism_test
from pearlforge.errors import (
    FalsificationError,
    UnsupportedGroupError,
)
from pearlforge.fusion import (
    build_fusion_certificate,
    conjugacy_class_reps,
    construct_delta,
    kind_purity_scan,
    multiplicative_order,
    restrict_certificate,
    smallest_primitive_root,
    verify_lambda_action,
)
from pearlforge.pearls import find_pearl_candidates
from pearlforge.subgroups import Subgroup


@pytest.fixture(scope="module")
def sp43_setup(sp43):
    sd = series_mod.central_series(sp43)
    autg = automorphism_group(sp43)
    reps = conjugacy_class_reps(
        sp43, find_pearl_candidates(sp43, sd)
    )
    return sd, autg, reps


def test_primitive_root_helpers():
    assert multiplicative_order(2, 7) == 3
    assert multiplicative_order(3, 7) == 6
    assert smallest_primitive_root(7) == 3
    assert smallest_primitive_root(3) == 2


def test_delta_exists_for_both_kinds_on_sp4_sylow(sp43, sp43_setup):
    sd, autg, reps = sp43_setup
    for c in reps:
        d = construct_delta(sp43, c, autg=autg, series=sd)
        assert d.exists
        assert d.lam == 2  # the unique generator of F_3^*
        assert d.matrix == ((2, 0), (0, 2))
        assert d.epsilon == (0 if c.kind == "abelian" else 1)
        # diagonal action on E/Phi(E): x -> x^{1/lambda}, z -> z^lambda
        E = c.subgroup
        phiE = E.frattini()
        zimg = d.phi.apply(d.z)
        assert E.contains(zimg)


def test_lambda_action_report(sp43, sp43_setup):
    sd, autg, reps = sp43_setup
    for c in reps:
        d = construct_delta(sp43, c, autg=autg, series=sd)
        report = verify_lambda_action(sp43, sd, d)
        assert report["ok"]
        assert not report["failures"]
        assert report["frattini_centralized"]
        n, p, eps = sp43.n, sp43.p, d.epsilon
        for layer in report["layers"]:
            i = layer["i"]
            assert layer["a_i"] == pow(d.lam, n - i - eps, p)
            assert layer["scalar_ok"]
            assert layer["eigen_count"] >= 1


def test_invalid_lambda_rejected(sp43, sp43_setup):
    sd, autg, reps = sp43_setup
    with pytest.raises(UnsupportedGroupError):
        construct_delta(sp43, reps[0], lam=1, autg=autg, series=sd)


def test_host75_admits_abelian_deltas_only(host75, pearls75,
                                           deltas75):
    by_kind = {}
    for c, d in zip(pearls75, deltas75):
        by_kind.setdefault(c.kind, []).append(d)
    assert by_kind["abelian"] and by_kind["extraspecial"]
    for d in by_kind["abelian"]:
        assert d.exists
        # lambda = 5 acts as diag(3, 5) = diag(lambda^{-1}, lambda)
        if d.lam == 5:
            assert d.matrix == ((3, 0), (0, 5))
    for d in by_kind["extraspecial"]:
        assert not d.exists
        assert d.pprime_scanned > 0 and d.conjugates_scanned > 0


def test_host75_lambda_action_layers(host75, series75, pearls75,
                                     deltas75):
    for c, d in zip(pearls75, deltas75):
        if not d.exists:
            continue
        report = verify_lambda_action(host75, series75, d)
        assert report["ok"]
        # eigen-representatives exist in every layer, p - 1 = 6 of them
        for layer in report["layers"]:
            assert layer["eigen_count"] >= 1


def test_kind_purity_on_host75(host75, series75, autg75):
    scan = kind_purity_scan(host75, autg=autg75, series=series75)
    assert scan["pure"]
    assert scan["admitting_epsilons"] == [0]


def test_certificate_sp43_case1(sp43, sp43_setup):
    sd, autg, reps = sp43_setup
    cert = build_fusion_certificate(
        sp43, reps, adoptions=(sd.gamma1,), autg=autg, series=sd
    )
    assert cert.case_label == 1
    assert cert.op_lower.order == 1 and cert.op_upper.order == 1
    assert all(cert.checks.values())
    d = cert.as_dict()
    assert d["case"] == 1 and d["op_exact"]
    assert {p["kind"] for p in d["pearls"]} == {
        "abelian", "extraspecial"
    }


def test_certificate_host75_case3(cert75):
    assert cert75.case_label == 3
    assert cert75.op_lower.order == 1
    assert cert75.op_upper.order == 1
    assert all(cert75.checks.values()), cert75.checks


def test_certificate_restriction(host75, cert75):
    sub = restrict_certificate(cert75, 2)
    assert sub.pres.order == 7 ** 4
    assert sub.case_label is None
    assert all(sub.checks.values())
    assert any("ambient" in note for note in sub.notes)
    # restricting at the top returns the certificate itself
    m = len(cert75.pearls[0]["tower"])
    top = restrict_certificate(cert75, m)
    assert top is cert75


def test_certificate_restriction_out_of_range(cert75):
    with pytest.raises(UnsupportedGroupError):
        restrict_certificate(cert75, 99)


def test_bad_adoption_is_falsified(sp43, sp43_setup):
    sd, autg, reps = sp43_setup
    center = Subgroup.span(sp43, [sp43.gen(3)])
    with pytest.raises(FalsificationError):
        build_fusion_certificate(
            sp43, reps, adoptions=(center,), autg=autg, series=sd
        )


def test_selecting_only_absent_kind_is_falsified(host75, series75,
                                                 autg75, pearls75):
    extras = [c for c in pearls75 if c.kind == "extraspecial"]
    with pytest.raises(FalsificationError):
        build_fusion_certificate(
            host75, extras[:1], autg=autg75, series=series75
        )
