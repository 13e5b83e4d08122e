"""Rooted trees and N-colored rooted trees.

A :class:`Tree` is an immutable canonical value: children are kept sorted
under a fixed total order (vertex count first, then root color, then the
sorted child sequences compared lexicographically). Plain trees are trees
whose vertices all carry color 1.

Text form uses nested brackets: ``"[]"`` is a single vertex, ``"[[][]]"`` the
cherry. Colored vertices are written ``"[^2 ...]"``; an unannotated vertex
has color 1.
"""
from __future__ import annotations

import math
from collections import Counter
from functools import lru_cache, total_ordering
from typing import Iterable, Sequence

from .config import check_order


@total_ordering
class Tree:
    __slots__ = ("children", "color", "order", "_key", "_hash")

    def __init__(self, children: Iterable[Tree] = (), color: int = 1):
        if color < 1:
            raise ValueError(f"colors start at 1, got {color}")
        kids = tuple(sorted(children, key=_sort_key))
        self.children = kids
        self.color = color
        self.order = 1 + sum(c.order for c in kids)
        self._key = (self.order, color, tuple(c._key for c in kids))
        self._hash = hash(self._key)

    def __eq__(self, other):
        if not isinstance(other, Tree):
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __lt__(self, other):
        if not isinstance(other, Tree):
            return NotImplemented
        return self._key < other._key

    def __hash__(self):
        return self._hash

    def __setattr__(self, name, value):
        if hasattr(self, "_hash"):
            raise AttributeError("Tree is immutable")
        object.__setattr__(self, name, value)

    def __reduce__(self):
        return (Tree, (self.children, self.color))

    def __repr__(self):
        return f"Tree({to_bracket(self)!r})"

    def __str__(self):
        return to_bracket(self)

    @property
    def max_color(self) -> int:
        return max([self.color] + [c.max_color for c in self.children])

    def vertex_colors(self) -> list[int]:
        out = [self.color]
        for c in self.children:
            out.extend(c.vertex_colors())
        return out


def _sort_key(t: Tree):
    return t._key


LEAF = Tree()


def leaf(color: int = 1) -> Tree:
    return Tree((), color)


def canonicalize(raw) -> Tree:
    """Canonical tree from a nested-sequence description or an existing Tree.

    ``raw`` may be a :class:`Tree`, a list of children (each again raw), or a
    ``(color, children)`` pair with an int first entry.
    """
    if isinstance(raw, Tree):
        return Tree(raw.children, raw.color)
    if isinstance(raw, tuple) and len(raw) == 2 and isinstance(raw[0], int):
        color, kids = raw
        return Tree((canonicalize(k) for k in kids), color)
    return Tree(canonicalize(k) for k in raw)


def order(tree: Tree) -> int:
    return tree.order


@lru_cache(maxsize=None)
def symmetry(tree: Tree) -> int:
    """Symmetry coefficient: product of child symmetries times mu_j! per repeated child."""
    out = 1
    for child, mult in Counter(tree.children).items():
        out *= symmetry(child) ** mult * math.factorial(mult)
    return out


@lru_cache(maxsize=None)
def tree_factorial(tree: Tree) -> int:
    """gamma(tree) = |tree| * prod gamma(child); the exact flow has a(tree) = 1/gamma(tree)."""
    out = tree.order
    for child in tree.children:
        out *= tree_factorial(child)
    return out


def butcher_product(u: Tree, v: Tree) -> Tree:
    """Graft ``v`` onto the root of ``u``."""
    return Tree(u.children + (v,), u.color)


def unbuttoned_pairs(tree: Tree) -> Counter:
    """All ``(u, v)`` with ``u o v == tree``, with multiplicities.

    Removing one copy of a root child ``v`` leaves ``u``; the multiplicity is
    the number of identical copies of ``v`` among the root's children.
    """
    if not tree.children:
        raise ValueError("a single vertex has no Butcher-product decomposition")
    out: Counter = Counter()
    counts = Counter(tree.children)
    for v, mult in counts.items():
        rest = list(tree.children)
        rest.remove(v)
        out[(Tree(rest, tree.color), v)] = mult
    return out


def recolor_root(tree: Tree, color: int, colors: int | None = None) -> Tree:
    if color < 1 or (colors is not None and color > colors):
        raise ValueError(f"color {color} outside [1, {colors}]")
    return Tree(tree.children, color)


def _forests(total: int, start: int, pool: Sequence[Tree], cache: dict) -> list[tuple]:
    """Non-decreasing tuples drawn from ``pool[start:]`` whose orders sum to ``total``."""
    if total == 0:
        return [()]
    key = (total, start)
    if key in cache:
        return cache[key]
    out = []
    for i in range(start, len(pool)):
        t = pool[i]
        if t.order > total:
            break
        for rest in _forests(total - t.order, i, pool, cache):
            out.append((t,) + rest)
    cache[key] = out
    return out


@lru_cache(maxsize=None)
def _trees_up_to(max_order: int, colors: int) -> tuple[tuple[Tree, ...], ...]:
    levels: list[tuple[Tree, ...]] = [tuple(leaf(c) for c in range(1, colors + 1))]
    for n in range(2, max_order + 1):
        pool = sorted((t for lvl in levels for t in lvl), key=_sort_key)
        forests = _forests(n - 1, 0, pool, {})
        level = sorted((Tree(f, c) for c in range(1, colors + 1) for f in forests), key=_sort_key)
        levels.append(tuple(level))
    return tuple(levels)


def enumerate_trees(max_order: int, colors: int = 1) -> list[list[Tree]]:
    """All canonical trees of order ``1..max_order``, grouped by order and sorted."""
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    if colors < 1:
        raise ValueError("colors must be >= 1")
    check_order(max_order)
    return [list(lvl) for lvl in _trees_up_to(max_order, colors)]


def trees_upto(max_order: int, colors: int = 1) -> list[Tree]:
    return [t for lvl in enumerate_trees(max_order, colors) for t in lvl]


# ---------------------------------------------------------------- text form


def to_bracket(tree: Tree, colored: bool | None = None) -> str:
    """Bracket notation; colors are written when ``colored`` or when any vertex is not color 1."""
    if colored is None:
        colored = tree.max_color > 1
    return _emit(tree, colored)


def _emit(tree: Tree, colored: bool) -> str:
    head = f"[^{tree.color}" if colored else "["
    return head + "".join(_emit(c, colored) for c in tree.children) + "]"


def parse_tree(text: str) -> Tree:
    s = "".join(text.split())
    tree, pos = _parse(s, 0)
    if pos != len(s):
        raise ValueError(f"trailing characters in tree {text!r}")
    return tree


def _parse(s: str, pos: int) -> tuple[Tree, int]:
    if pos >= len(s) or s[pos] != "[":
        raise ValueError(f"expected '[' at position {pos} in {s!r}")
    pos += 1
    color = 1
    if pos < len(s) and s[pos] == "^":
        pos += 1
        start = pos
        while pos < len(s) and s[pos].isdigit():
            pos += 1
        if start == pos:
            raise ValueError(f"missing color after '^' in {s!r}")
        color = int(s[start:pos])
    kids = []
    while pos < len(s) and s[pos] == "[":
        kid, pos = _parse(s, pos)
        kids.append(kid)
    if pos >= len(s) or s[pos] != "]":
        raise ValueError(f"unbalanced brackets in {s!r}")
    return Tree(kids, color), pos + 1
