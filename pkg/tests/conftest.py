import pytest

from pearlforge.catalog import build_named, make_standard


@pytest.fixture(scope="session")
def e3():
    return build_named("extraspecial_plus", 3).pres


@pytest.fixture(scope="session")
def e5():
    return build_named("extraspecial_plus", 5).pres


@pytest.fixture(scope="session")
def sp43():
    return build_named("sp4_sylow", 3).pres


@pytest.fixture(scope="session")
def sp45():
    return build_named("sp4_sylow", 5).pres


@pytest.fixture(scope="session")
def w3():
    return build_named("wreath_3", 3).pres


@pytest.fixture(scope="session")
def host75():
    """The order-7^5 maximal-class group with nonabelian two-step
    centralizer, nilpotency class 4 and exponent 7 (unique up to
    isomorphism; re-derived in test_catalog)."""
    pres = make_standard(7, 5, {(2, 1): {4: 1}}, {})
    pres.check()
    return pres


@pytest.fixture(scope="session")
def series75(host75):
    from pearlforge import series as series_mod

    return series_mod.central_series(host75)


@pytest.fixture(scope="session")
def autg75(host75):
    from pearlforge.autos import automorphism_group

    return automorphism_group(host75)


@pytest.fixture(scope="session")
def pearls75(host75, series75):
    from pearlforge.fusion import conjugacy_class_reps
    from pearlforge.pearls import find_pearl_candidates

    cands = find_pearl_candidates(host75, series75)
    return conjugacy_class_reps(host75, cands)


@pytest.fixture(scope="session")
def deltas75(host75, series75, autg75, pearls75):
    """construct_delta outcome for every pearl-candidate class."""
    from pearlforge.fusion import construct_delta

    return [
        construct_delta(host75, c, autg=autg75, series=series75)
        for c in pearls75
    ]


@pytest.fixture(scope="session")
def cert75(host75, series75, autg75, pearls75, deltas75):
    from pearlforge.fusion import build_fusion_certificate

    # the delta-bearing S-classes are all fused under Aut_F(S): the
    # system has a single essential class, represented once
    bearing = [c for c, d in zip(pearls75, deltas75) if d.exists]
    return build_fusion_certificate(
        host75, bearing[:1], autg=autg75, series=series75
    )


@pytest.fixture(scope="session")
def catalog_entries():
    from pearlforge.catalog import load_catalog

    return load_catalog(verify=True)
