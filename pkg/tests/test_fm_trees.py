
import pytest
from hypothesis import given, strategies as st

from stabkit.errors import BudgetExceeded
from stabkit.fm_trees import (
    StratumTree,
    build_poset,
    codimension,
    contract,
    contracts_to,
    corolla,
    count_strata,
    enumerate_strata,
    format_tree,
    overcharged_vertices,
    parse_tree,
    poset_to_dot,
    retract_to_bounded,
    tree_to_dot,
)

NINE_LEAF_TREE = "(r 1 (v1 (v3 3 7) 4 6) (v2 2 8 9) 5)"


def unit_charges(t):
    return t.with_charges({x: 1 for x in range(1, t.k + 1)})


def test_small_counts():
    assert len(enumerate_strata(1)) == 1
    two = enumerate_strata(2)
    assert sorted(codimension(t) for t in two) == [0, 1]


@pytest.mark.parametrize("k", range(1, 7))
def test_enumerator_agrees_with_recurrence(k):
    assert len(enumerate_strata(k)) == count_strata(k)


def test_known_counts():
    # rooted trees with labelled leaves and internal vertices of out-degree >= 2, plus
    # the stratum where every point collides
    assert [count_strata(k) for k in range(1, 6)] == [1, 2, 8, 52, 472]


def test_enumeration_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_strata(8)


def test_codimension_examples():
    assert codimension(corolla(4)) == 0
    assert codimension(parse_tree("(r (v 1 2))")) == 1
    assert codimension(parse_tree(NINE_LEAF_TREE)) == 3


def test_contracts_to_examples():
    t = parse_tree("(r (v 1 2))")
    assert contracts_to(t, t)
    assert contracts_to(t, corolla(2))
    assert not contracts_to(corolla(2), t)
    with pytest.raises(ValueError):
        contracts_to(t, corolla(3))


def test_contract_lowers_codimension():
    t = parse_tree(NINE_LEAF_TREE)
    assert codimension(contract(t, [frozenset({3, 7})])) == 2


def test_poset_small():
    p = build_poset(2)
    assert len(p.trees) == 2 and len(p.covers()) == 1
    p3 = build_poset(3)
    assert p3.is_graded()
    assert all(codimension(p3.trees[i]) == codimension(p3.trees[j]) + 1 for i, j in p3.covers())


@pytest.mark.parametrize("k", range(1, 6))
def test_unique_top_stratum(k):
    p = build_poset(k)
    assert [codimension(p.trees[i]) for i in p.maxima()] == [0]


def test_overcharged_examples():
    assert overcharged_vertices(unit_charges(corolla(3)), 3) == set()
    t = unit_charges(parse_tree("(r (v 1 2))"))
    assert overcharged_vertices(t, 1) == {frozenset({1, 2})}
    fig = unit_charges(parse_tree(NINE_LEAF_TREE))
    assert overcharged_vertices(fig, 2) == {frozenset({3, 4, 6, 7}), frozenset({2, 8, 9})}


def test_overcharged_needs_charges():
    with pytest.raises(ValueError):
        overcharged_vertices(corolla(2), 1)
    with pytest.raises(ValueError):
        retract_to_bounded(corolla(2), 1)


def test_retract_examples():
    t = unit_charges(corolla(3))
    assert retract_to_bounded(t, 1) == t
    assert retract_to_bounded(unit_charges(parse_tree("(r (v 1 2))")), 1) == unit_charges(corolla(2))
    fig = unit_charges(parse_tree(NINE_LEAF_TREE))
    assert format_tree(retract_to_bounded(fig, 2)) == "(r 1:1 2:1 (v1 3:1 7:1) 4:1 5:1 6:1 8:1 9:1)"


@pytest.mark.parametrize("c", [1, 2, 3])
def test_nested_chain_retracts_to_corolla(c):
    t = parse_tree(f"(r (v1 (v2 1:{c} 2:1) 3:1))")
    assert retract_to_bounded(t, c) == corolla(3).with_charges({1: c, 2: 1, 3: 1})


def test_parse_errors():
    for bad in ["", "(r 1 2", "(r 1 x)", "(r 1:2 2)", "(r 1 2) 3", "( )"]:
        with pytest.raises(ValueError):
            parse_tree(bad)


def test_round_trip_text():
    t = parse_tree("(r 3:2 (v 1:1 2:3))")
    assert parse_tree(format_tree(t)) == t


def test_dot_output():
    assert tree_to_dot(parse_tree(NINE_LEAF_TREE)).startswith("digraph")
    dot = poset_to_dot(build_poset(2))
    assert "->" in dot


def test_from_clusters_round_trip():
    for t in enumerate_strata(4):
        assert StratumTree.from_clusters(4, t.clusters()) == t


trees_k = st.integers(1, 5).flatmap(lambda k: st.tuples(
    st.sampled_from(enumerate_strata(k)),
    st.lists(st.integers(1, 3), min_size=k, max_size=k),
    st.integers(1, 3)))


@given(trees_k)
def test_retract_properties(data):
    t, charges, c = data
    c = max(c, max(charges))
    tq = t.with_charges(dict(zip(range(1, t.k + 1), charges)))
    r = retract_to_bounded(tq, c)
    assert not overcharged_vertices(r, c)
    assert retract_to_bounded(r, c) == r
    assert contracts_to(tq, r)


@given(st.integers(2, 5).flatmap(lambda k: st.sampled_from(enumerate_strata(k))), st.data())
def test_contraction_drops_codimension_exactly(t, data):
    cl = sorted(t.clusters(), key=sorted)
    if not cl:
        return
    chosen = data.draw(st.lists(st.sampled_from(cl), min_size=1, unique=True))
    u = contract(t, chosen)
    assert codimension(u) == codimension(t) - len(chosen)
    assert contracts_to(t, u)
