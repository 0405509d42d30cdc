import pytest
from hypothesis import given, strategies as st

from stabkit.acceptance import derangement
from stabkit.complexes import is_homologically_connected, reduced_betti
from stabkit.errors import BudgetExceeded
from stabkit.injective_words import (
    ChargedSet,
    build_inj_c,
    charge_multisets,
    injective_words_top_homology,
    injective_words_top_rank,
    link_isomorphism_check,
    verify_wcm,
)


def unit(n):
    return ChargedSet((1,) * n)


@pytest.mark.parametrize("n", range(1, 8))
def test_c1_is_full_simplex(n):
    k = build_inj_c(unit(n), 1)
    assert len(k.faces) == 2 ** n - 1
    assert k.maximal_faces() == [tuple((i,) for i in range(n))]


def test_two_points_charge_two():
    s = ChargedSet((1, 1), ("a", "b"))
    k = build_inj_c(s, 2)
    assert sorted(k.maximal_faces()) == [(("a",), ("b",)), (("a", "b"),)]


def test_four_points_c2_connected():
    assert is_homologically_connected(build_inj_c(unit(4), 2), 0)


def test_charges_above_c_never_appear():
    k = build_inj_c(ChargedSet((1, 3, 2)), 2)
    assert all(1 not in v for f in k.faces for v in f)


def test_bad_charged_sets():
    with pytest.raises(ValueError):
        ChargedSet((0, 1))
    with pytest.raises(ValueError):
        ChargedSet((1, 1), ("a", "a"))
    with pytest.raises(ValueError):
        build_inj_c(unit(2), 0)


@pytest.mark.parametrize("charges,c,target", [
    ((1, 1, 1), 1, 2),
    ((1,) * 6, 2, 2),
    ((1, 1, 1, 2, 2), 2, 1),
])
def test_wcm_examples(charges, c, target):
    rep = verify_wcm(ChargedSet(charges), c)
    assert rep.passed
    assert rep.target_dim == target


def test_wcm_budget_marks_incomplete():
    rep = verify_wcm(unit(6), 2, cell_budget=5)
    assert not rep.complete and not rep.passed
    assert rep.as_dict()["complete"] is False


def test_link_isomorphism_examples():
    s = ChargedSet((1, 1, 1, 1), ("a", "b", "c", "d"))
    assert link_isomorphism_check(s, 1, [("a",)])
    assert link_isomorphism_check(s, 2, [("a", "b")])
    assert link_isomorphism_check(s, 2, [])


def test_link_isomorphism_rejects_non_simplex():
    with pytest.raises(ValueError):
        link_isomorphism_check(unit(3), 1, [(0, 1)])


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_top_rank_is_derangement_number(n):
    assert injective_words_top_rank(n) == derangement(n)
    betti, torsion = injective_words_top_homology(n)
    assert betti == derangement(n) and torsion == []


def test_top_rank_budget():
    with pytest.raises(BudgetExceeded):
        injective_words_top_rank(7)
    with pytest.raises(ValueError):
        injective_words_top_rank(0)


def test_charge_multisets_counts():
    assert len(list(charge_multisets(3, 2))) == 4


charged = st.lists(st.integers(1, 3), min_size=1, max_size=5).map(tuple)


@given(charged, st.integers(1, 3))
def test_vertex_charge_bound(charges, c):
    s = ChargedSet(charges)
    for f in build_inj_c(s, c).faces:
        for v in f:
            assert s.charge_of(v) <= c
        used = [e for v in f for e in v]
        assert len(used) == len(set(used))


@given(charged, st.integers(1, 2))
def test_monotone_in_c(charges, c):
    s = ChargedSet(charges)
    assert build_inj_c(s, c).is_subcomplex_of(build_inj_c(s, c + 1))


@given(charged, st.integers(1, 3))
def test_every_link_is_smaller_complex(charges, c):
    s = ChargedSet(charges)
    k = build_inj_c(s, c)
    for sigma in sorted(k.faces)[:10]:
        assert link_isomorphism_check(s, c, sigma, k)


@given(st.lists(st.integers(1, 2), min_size=1, max_size=5).map(tuple), st.integers(1, 3))
def test_wcm_property(charges, c):
    charges = tuple(min(q, c) for q in charges)
    assert verify_wcm(ChargedSet(charges), c).passed


@given(charged)
def test_whole_set_vertex_is_isolated(charges):
    # S meets every other vertex, so once it is allowed it is a separate component
    s = ChargedSet(charges)
    if len(s) < 2:
        return
    k = build_inj_c(s, sum(charges))
    whole = (tuple(range(len(s))),)
    assert whole in k.faces
    assert k.cofaces(whole) == [whole]
    assert reduced_betti(k, 0)[0] == 1
