"""Presentation layer: parsing, round-trips, consistency, arithmetic
against the multiplication-table oracle."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pearlforge.catalog import build_named, make_standard
from pearlforge.errors import (
    InconsistentPresentationError,
    MalformedPresentationError,
    UncheckedPresentationError,
)
from pearlforge.oracle import TableGroup
from pearlforge.presentation import (
    PcPresentation,
    collect,
    element_order,
)


# -- file format --------------------------------------------------------


def test_save_load_round_trip_is_bit_exact(sp43, e5, w3):
    for pres in (sp43, e5, w3):
        text = pres.save_text()
        again = PcPresentation.load_text(text)
        again.check()
        assert again.save_text() == text
        assert again.content_hash() == pres.content_hash()


def test_format_is_one_based_with_weights(sp43):
    text = sp43.save_text()
    lines = text.strip().splitlines()
    assert lines[0] == "p 3"
    assert lines[1] == "n 4"
    assert lines[2].startswith("weights ")
    assert any(line.startswith("power 1 :") for line in lines)
    assert any(line.startswith("comm 2 1 :") for line in lines)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "p 4\nn 2\nweights 1 1\n",  # p not prime
        "p 3\nn 2\nweights 1\n",  # weight count mismatch
        "p 3\nn 2\nweights 1 1\npower 1 : 0 3\npower 2 : 0 0\n"
        "comm 2 1 : 0 0\n",  # exponent out of range
        "garbage\n",
    ],
)
def test_malformed_inputs_rejected(text):
    with pytest.raises(MalformedPresentationError):
        PcPresentation.load_text(text)


def test_unchecked_presentations_refuse_arithmetic():
    pres = make_standard(3, 3, {}, {})
    with pytest.raises(UncheckedPresentationError):
        pres.mult(pres.gen(0), pres.gen(1))


def test_omitted_relations_default_to_trivial():
    q = PcPresentation.load_text(
        "p 3\nn 2\nweights 1 1\npower 1 : 0 0\n"
    )
    q.check()
    assert q.order == 9 and q.comms == {}


def test_corrupted_structure_constants_fail_consistency(host75):
    text = host75.save_text().replace("comm 3 2 : 0 0 0 0 1",
                                      "comm 3 2 : 0 0 0 1 1")
    assert text != host75.save_text()
    corrupt = PcPresentation.load_text(text)
    with pytest.raises(InconsistentPresentationError):
        corrupt.check()
    violations = corrupt.consistency_violations()
    assert violations


# -- arithmetic vs the table oracle ------------------------------------


@pytest.mark.parametrize("name,p", [("extraspecial_plus", 3),
                                    ("sp4_sylow", 3),
                                    ("wreath_3", 3)])
def test_element_orders_match_oracle(name, p):
    pres = build_named(name, p).pres
    table = TableGroup.from_presentation(pres)
    for idx, vec in enumerate(table.elements):
        assert element_order(pres, vec) == table.element_order(idx)


def test_products_match_oracle(sp43):
    table = TableGroup.from_presentation(sp43)
    rng = random.Random(99)
    for _ in range(500):
        i = rng.randrange(table.N)
        j = rng.randrange(table.N)
        prod = sp43.mult(table.elements[i], table.elements[j])
        assert table.index[prod] == table.mul(i, j)


# -- property tests -----------------------------------------------------


def _vectors(pres):
    return st.tuples(*(st.integers(0, pres.p - 1)
                       for _ in range(pres.n)))


@settings(max_examples=150, deadline=None)
@given(data=st.data())
def test_group_axioms_hold(data):
    pres = build_named("sp4_sylow", 5).pres
    u = data.draw(_vectors(pres))
    v = data.draw(_vectors(pres))
    w = data.draw(_vectors(pres))
    assert pres.mult(pres.mult(u, v), w) == pres.mult(u, pres.mult(v, w))
    assert pres.mult(u, pres.identity()) == u
    assert pres.mult(pres.inv(u), u) == pres.identity()


@settings(max_examples=150, deadline=None)
@given(data=st.data())
def test_commutator_identity(data):
    pres = build_named("wreath_3", 3).pres
    a = data.draw(_vectors(pres))
    b = data.draw(_vectors(pres))
    # [a,b] = a^-1 b^-1 a b by definition
    lhs = pres.comm(a, b)
    rhs = pres.mult(pres.mult(pres.inv(a), pres.inv(b)),
                    pres.mult(a, b))
    assert lhs == rhs


@settings(max_examples=100, deadline=None)
@given(data=st.data())
def test_collect_matches_mult_chain(data):
    pres = build_named("sp4_sylow", 3).pres
    word = data.draw(st.lists(
        st.tuples(st.integers(0, pres.n - 1), st.integers(-4, 4)),
        max_size=8,
    ))
    via_collect = collect(pres, word)
    acc = pres.identity()
    for gen, e in word:
        acc = pres.mult(acc, pres.pow(pres.gen(gen), e))
    assert via_collect == acc


def test_truncate_gives_consistent_quotient(host75):
    q = host75.truncate(4)
    assert q.order == 7 ** 4
    assert q.check() is q or q.consistency_violations() == []
    small = host75.truncate(2)
    assert small.order == 49


def test_content_hash_tracks_relations(sp43, sp45):
    assert sp43.content_hash() != sp45.content_hash()
    assert sp43.content_hash() == PcPresentation.load_text(
        sp43.save_text()
    ).content_hash()
