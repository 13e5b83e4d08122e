from collections import Counter

import pytest
from hypothesis import given

from fequiv.config import limits
from fequiv.trees import (
    LEAF,
    Tree,
    butcher_product,
    canonicalize,
    enumerate_trees,
    parse_tree,
    recolor_root,
    symmetry,
    to_bracket,
    tree_factorial,
    trees_upto,
    unbuttoned_pairs,
)
from helpers import trees
from oracles import automorphism_count, bracket_to_ahu, brute_force_shapes, tree_to_parent

T = parse_tree


@pytest.mark.parametrize("n,count", [(1, 1), (2, 1), (3, 2), (4, 4), (5, 9), (6, 20), (7, 48)])
def test_counts_match_brute_force(n, count):
    got = enumerate_trees(7)[n - 1]
    assert len(got) == count
    assert len(brute_force_shapes(n)) == count
    assert {bracket_to_ahu(to_bracket(t)) for t in got} == brute_force_shapes(n)


@pytest.mark.parametrize("colors,expected", [(2, [2, 4, 14, 52]), (3, [3, 9, 45])])
def test_colored_counts(colors, expected):
    got = [len(level) for level in enumerate_trees(len(expected), colors)]
    assert got == expected


def test_sigma_matches_automorphisms():
    for t in trees_upto(6):
        assert symmetry(t) == automorphism_count(tree_to_parent(t)), to_bracket(t)


@pytest.mark.parametrize(
    "text,sigma,gamma",
    [("[]", 1, 1), ("[[]]", 1, 2), ("[[][]]", 2, 3), ("[[][][]]", 6, 4), ("[[[]][[]]]", 2, 20), ("[[[[]]]]", 1, 24)],
)
def test_known_sigma_gamma(text, sigma, gamma):
    t = T(text)
    assert symmetry(t) == sigma
    assert tree_factorial(t) == gamma


def test_butcher_product_identities():
    assert butcher_product(T("[]"), T("[[]]")) == T("[[[]]]")
    assert butcher_product(T("[[]]"), T("[]")) == T("[[][]]")
    assert butcher_product(LEAF, LEAF) == T("[[]]")


def test_canonical_form_ignores_child_order():
    assert T("[[[]][]]") == T("[[][[]]]")
    assert canonicalize([[[]], []]) == canonicalize([[], [[]]])
    assert hash(T("[[[]][]]")) == hash(T("[[][[]]]"))


def test_bracket_round_trip_colored():
    for t in trees_upto(4, 2):
        assert parse_tree(to_bracket(t, True)) == t
        assert parse_tree(to_bracket(t)) == t


@pytest.mark.parametrize("bad", ["", "[", "[]]", "[^]", "[x]", "[][]"])
def test_parse_rejects_malformed(bad):
    with pytest.raises(ValueError):
        parse_tree(bad)


def test_order_cap():
    with limits(max_order=4):
        with pytest.raises(ValueError):
            enumerate_trees(5)


def test_unbuttoned_pairs_small():
    assert unbuttoned_pairs(T("[[][]]")) == Counter({(T("[[]]"), T("[]")): 2})
    with pytest.raises(ValueError):
        unbuttoned_pairs(LEAF)


def test_recolor_root():
    t = T("[^1[^2]]")
    assert recolor_root(t, 2) == T("[^2[^2]]")
    with pytest.raises(ValueError):
        recolor_root(t, 3, colors=2)


@given(trees(5), trees(5))
def test_butcher_product_order_and_root(u, v):
    w = butcher_product(u, v)
    assert w.order == u.order + v.order
    assert w.color == u.color
    assert v in w.children


@given(trees(6))
def test_sigma_recursion(t):
    expected = 1
    for c, mult in Counter(t.children).items():
        f = 1
        for k in range(2, mult + 1):
            f *= k
        expected *= symmetry(c) ** mult * f
    assert symmetry(t) == expected


@given(trees(6))
def test_unbuttoned_pairs_recombine(t):
    if t.order == 1:
        return
    pairs = unbuttoned_pairs(t)
    for (u, v), mult in pairs.items():
        assert butcher_product(u, v) == t
        assert mult * symmetry(u) * symmetry(v) == symmetry(t)


@given(trees(5, 2))
def test_colored_tree_invariants(t):
    assert isinstance(t, Tree)
    assert 1 <= t.max_color <= 2
    assert t.order == len(tree_to_parent(t))
