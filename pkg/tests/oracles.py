"""Independent reference computations used by the tests.

Nothing here imports the tree or series machinery under test: trees are
handled as parent arrays and polynomials are converted to sympy.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

import sympy as sp

from fequiv.poly import Poly, PolyMap, PolyVectorField


# ------------------------------------------------------------ tree oracles


def ahu(parent: tuple, v: int = 0) -> str:
    kids = sorted(ahu(parent, c) for c in range(len(parent)) if parent[c] == v and c != v)
    return "(" + "".join(kids) + ")"


def labelled_recursive_trees(n: int):
    """Parent arrays with ``parent[0] = 0`` (root) and ``parent[i] < i``: every shape appears."""
    for tail in itertools.product(*[range(i) for i in range(1, n)]):
        yield (0,) + tail


@lru_cache(maxsize=None)
def brute_force_shapes(n: int) -> frozenset:
    return frozenset(ahu(p) for p in labelled_recursive_trees(n))


def automorphism_count(parent: tuple) -> int:
    """Root-fixing permutations preserving the parent relation (brute force)."""
    n = len(parent)
    edges = {(i, parent[i]) for i in range(1, n)}
    count = 0
    for perm in itertools.permutations(range(1, n)):
        m = (0,) + perm
        if all((m[i], m[p]) in edges for i, p in edges):
            count += 1
    return count


def tree_to_parent(tree) -> tuple:
    """Parent array of a library tree, root first (only reads ``.children``)."""
    parent = [0]

    def visit(t, me):
        for c in t.children:
            parent.append(me)
            visit(c, len(parent) - 1)

    visit(tree, 0)
    return tuple(parent)


def bracket_to_ahu(text: str) -> str:
    """Canonical AHU string of an uncolored bracket word, by its own parse."""
    stack: list[list[str]] = [[]]
    for ch in text:
        if ch == "[":
            stack.append([])
        elif ch == "]":
            kids = stack.pop()
            stack[-1].append("(" + "".join(sorted(kids)) + ")")
    (root,) = stack[0]
    return root


# ------------------------------------------------------------ sympy oracles


def symbols(d: int, name: str = "y"):
    return sp.symbols(f"{name}0:{d}")


def to_sympy(p: Poly, ys) -> sp.Expr:
    out = sp.Integer(0)
    for e, c in p.terms.items():
        term = sp.Rational(c.numerator, c.denominator)
        for y, k in zip(ys, e):
            term *= y**k
        out += term
    return sp.expand(out)


def map_to_sympy(F: PolyMap, ys) -> sp.Matrix:
    return sp.Matrix([to_sympy(p, ys) for p in F.components])


def from_sympy(exprs, ys) -> PolyMap:
    from fractions import Fraction

    d = len(ys)
    comps = []
    for e in exprs:
        terms = {}
        for monom, c in sp.Poly(sp.expand(e), *ys).terms():
            terms[tuple(monom)] = Fraction(int(c.p), int(c.q))
        comps.append(Poly(d, terms))
    return PolyMap(d, comps)


def sym_elementary_differential(tree, f, ys) -> sp.Matrix:
    """``tree(f) = f^(m)(tree_1(f), ..., tree_m(f))`` by explicit sympy derivatives.

    ``f`` is a matrix, or a list of matrices indexed by vertex color.
    """
    parts = f if isinstance(f, list) else [f]
    kids = [sym_elementary_differential(c, parts, ys) for c in tree.children]
    f = parts[tree.color - 1]
    d = len(ys)
    out = []
    for i in range(d):
        acc = sp.Integer(0)
        for idx in itertools.product(range(d), repeat=len(kids)):
            coeff = sp.diff(f[i], *[ys[j] for j in idx]) if idx else f[i]
            if coeff == 0:
                continue
            term = coeff
            for k, j in enumerate(idx):
                term *= kids[k][j]
            acc += term
        out.append(sp.expand(acc))
    return sp.Matrix(out)


def sym_bracket(f: sp.Matrix, g: sp.Matrix, ys) -> sp.Matrix:
    """``[f, g] = g' f - f' g``."""
    X = sp.Matrix(ys)
    return (g.jacobian(X) * f - f.jacobian(X) * g).applyfunc(sp.expand)


def sym_taylor_flow(f: sp.Matrix, ys, h, N: int, scale=1) -> sp.Matrix:
    """``sum_k (scale h)^k / k! * (f . grad)^k (y)`` truncated at ``h^N``."""
    X = sp.Matrix(ys)
    cur = X
    out = X
    for k in range(1, N + 1):
        cur = cur.jacobian(X) * f
        out = out + (scale * h) ** k / sp.factorial(k) * cur
    return out.applyfunc(sp.expand)


def truncate_h(e, h, N: int):
    e = sp.expand(e)
    return sum((e.coeff(h, k) * h**k for k in range(N + 1)), sp.Integer(0))


def sym_compose(outer: sp.Matrix, inner: sp.Matrix, ys, h, N: int) -> sp.Matrix:
    sub = dict(zip(ys, inner))
    res = outer.subs(sub, simultaneous=True)
    return res.applyfunc(lambda e: truncate_h(e, h, N))


def h_coefficient(expr_vec: sp.Matrix, h, k: int) -> sp.Matrix:
    return expr_vec.applyfunc(lambda e: sp.expand(e).coeff(h, k))


def field_from_sympy(exprs, ys) -> PolyVectorField:
    F = from_sympy(exprs, ys)
    return PolyVectorField(F.dim_in, F.components)
