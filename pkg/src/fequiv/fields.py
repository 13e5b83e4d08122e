"""Elementary differentials, lifts, brackets and witness fields on polynomial fields.

Conventions:

* ``[f, g] = g' f - f' g``.
* Witness fields label vertices in depth-first postorder (children before
  parents), so the root carries the last label.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .poly import Poly, PolyMap, PolyVectorField, to_field, variables
from .trees import Tree, symmetry

# ---------------------------------------------------------------- derivatives


class _Derivatives:
    """Memoized partial derivatives of one polynomial, keyed by sorted index tuples."""

    __slots__ = ("cache",)

    def __init__(self, p: Poly):
        self.cache = {(): p}

    def get(self, idx: tuple) -> Poly:
        p = self.cache.get(idx)
        if p is None:
            p = self.get(idx[:-1]).diff(idx[-1])
            self.cache[idx] = p
        return p


def _multilinear(derivs: _Derivatives, dirs: Sequence[Sequence], finish, idx: tuple = ()):
    """sum_{j1..jm} d^m p / dy_j1..dy_jm * dirs[0][j1] * ... * dirs[m-1][jm]."""
    k = len(idx)
    if k == len(dirs):
        return finish(derivs.get(tuple(sorted(idx))))
    total = 0
    for j, w in enumerate(dirs[k]):
        if not w:
            continue
        key = tuple(sorted(idx + (j,)))
        if not derivs.get(key):
            continue
        total = total + w * _multilinear(derivs, dirs, finish, idx + (j,))
    return total


class Derivative:
    """k-th derivative of a polynomial map as an evaluator ``(y, v1, ..., vk) -> vector``."""

    def __init__(self, F: PolyMap, k: int):
        if k < 0:
            raise ValueError("derivative order must be non-negative")
        self.F = F
        self.k = k
        self._derivs = [_Derivatives(p) for p in F.components]

    def __call__(self, y: Sequence, *dirs: Sequence) -> list:
        d = self.F.dim_in
        if len(y) != d or len(dirs) != self.k or any(len(v) != d for v in dirs):
            raise ValueError(f"expected a point and {self.k} directions of length {d}")
        finish = lambda p: p.evaluate(y)  # noqa: E731
        return [Fraction(0) + _multilinear(dv, dirs, finish) for dv in self._derivs]


def differentiate(F: PolyMap, k: int) -> Derivative:
    return Derivative(F, k)


def directional(F: PolyMap, f: PolyMap) -> PolyMap:
    """The polynomial map ``y -> F'(y) f(y)``."""
    if F.dim_in != f.dim_out or F.dim_in != f.dim_in:
        raise ValueError("F' f needs F defined on the space f acts on")
    d = F.dim_in
    comps = []
    for p in F.components:
        acc = Poly.zero(d)
        for j in range(d):
            dp = p.diff(j)
            if dp:
                acc = acc + dp * f.components[j]
        comps.append(acc)
    return PolyMap(d, comps)


def jacobian_apply(f: PolyMap, v: Sequence[Poly]) -> list[Poly]:
    """``f'(y) v`` where ``v`` is a vector of polynomials in the same variables."""
    d = f.dim_in
    out = []
    for p in f.components:
        acc = Poly.zero(d)
        for j in range(d):
            if v[j]:
                dp = p.diff(j)
                if dp:
                    acc = acc + dp * v[j]
        out.append(acc)
    return out


# ------------------------------------------------------ elementary differentials


def _parts(f) -> list[PolyVectorField]:
    if isinstance(f, PolyMap):
        return [to_field(f)]
    parts = [to_field(p) for p in f]
    if not parts:
        raise ValueError("need at least one vector field")
    d = parts[0].dim
    if any(p.dim != d for p in parts):
        raise ValueError("all parts must share one dimension")
    return parts


class _EDCache:
    """Symbolic elementary differentials of a fixed tuple of parts."""

    def __init__(self, parts: Sequence[PolyVectorField]):
        self.parts = list(parts)
        self.d = self.parts[0].dim
        self.derivs = [[_Derivatives(p) for p in part.components] for part in self.parts]
        self.memo: dict[Tree, list[Poly]] = {}

    def __call__(self, tree: Tree) -> list[Poly]:
        out = self.memo.get(tree)
        if out is not None:
            return out
        if tree.max_color > len(self.parts):
            raise ValueError(f"tree {tree} uses color {tree.max_color} but only {len(self.parts)} parts given")
        dirs = [self(c) for c in tree.children]
        zero = Poly.zero(self.d)
        ident = lambda p: p  # noqa: E731
        out = [zero + _multilinear(dv, dirs, ident) for dv in self.derivs[tree.color - 1]]
        self.memo[tree] = out
        return out


def elementary_differential_field(tree: Tree, f) -> PolyVectorField:
    """``tree(f)`` as a polynomial vector field (``f`` may be a list of colored parts)."""
    cache = _EDCache(_parts(f))
    return PolyVectorField(cache.d, cache(tree))


def elementary_differential(tree: Tree, f, y: Sequence) -> list[Fraction]:
    """Exact value of ``tree(f)(y) = f^(m)(y)(tree_1(f)(y), ..., tree_m(f)(y))``."""
    parts = _parts(f)
    if tree.max_color > len(parts):
        raise ValueError(f"tree {tree} uses color {tree.max_color} but only {len(parts)} parts given")
    if len(y) != parts[0].dim:
        raise ValueError("point dimension mismatch")
    derivs = [[_Derivatives(p) for p in part.components] for part in parts]
    finish = lambda p: p.evaluate(y)  # noqa: E731
    memo: dict = {}

    def ev(t: Tree):
        if t in memo:
            return memo[t]
        dirs = [ev(c) for c in t.children]
        val = [Fraction(0) + _multilinear(dv, dirs, finish) for dv in derivs[t.color - 1]]
        memo[t] = val
        return val

    return ev(tree)


def colored_elementary_differential(tree: Tree, parts: Sequence[PolyVectorField], y: Sequence) -> list[Fraction]:
    return elementary_differential(tree, list(parts), y)


def _series_items(phi):
    return [(t, b) for t, b in phi.coefficients.items() if b]


def apply_series(phi, f, y: Sequence) -> list:
    """``sum b(tree)/sigma(tree) * tree(f)(y)`` over the stored trees."""
    parts = _parts(f)
    if phi.colors != len(parts):
        raise ValueError(f"series has {phi.colors} colors but {len(parts)} parts were given")
    out = [Fraction(0)] * parts[0].dim
    for t, b in _series_items(phi):
        val = elementary_differential(t, parts, y)
        w = b / symmetry(t)
        out = [o + w * v for o, v in zip(out, val)]
    return out


def series_as_field(phi, f) -> PolyVectorField:
    """The integrator map ``phi`` applied to ``f``, as an exact polynomial field."""
    parts = _parts(f)
    if phi.colors != len(parts):
        raise ValueError(f"series has {phi.colors} colors but {len(parts)} parts were given")
    cache = _EDCache(parts)
    d = cache.d
    out = [Poly.zero(d)] * d
    for t, b in _series_items(phi):
        w = b / symmetry(t)
        out = [o + v * w for o, v in zip(out, cache(t))]
    return PolyVectorField(d, out)


# ------------------------------------------------------------ constructions


def augment(f: PolyVectorField, F: PolyMap) -> PolyVectorField:
    """``g(y, z) = (f(y), F'(y) f(y))`` on ``Y x Z``."""
    if F.dim_in != f.dim:
        raise ValueError(f"observable acts on dimension {F.dim_in}, field on {f.dim}")
    d, m = f.dim, F.dim_out
    n = d + m
    top = [p.embed(n) for p in f.components]
    bottom = [p.embed(n) for p in directional(F, f).components]
    return PolyVectorField(n, top + bottom)


def tangent_lift(f: PolyVectorField) -> PolyVectorField:
    """``delta f(y, eta) = (f(y), f'(y) eta)``."""
    return multi_variation_lift(f, 1)


def multi_variation_lift(f: PolyVectorField, k: int) -> PolyVectorField:
    """``(f(y), f'(y) xi_1, ..., f'(y) xi_k)`` on ``Y^(k+1)``."""
    if k < 1:
        raise ValueError("need at least one variation")
    d = f.dim
    n = d * (k + 1)
    jac = [[p.diff(j).embed(n) for j in range(d)] for p in f.components]
    xs = variables(n)
    comps = [p.embed(n) for p in f.components]
    for block in range(1, k + 1):
        for i in range(d):
            acc = Poly.zero(n)
            for j in range(d):
                if jac[i][j]:
                    acc = acc + jac[i][j] * xs[block * d + j]
            comps.append(acc)
    return PolyVectorField(n, comps)


def is_bilinear(omega: PolyMap, d: int) -> bool:
    """Every monomial has degree one in the first ``d`` and one in the last ``d`` variables."""
    if omega.dim_in != 2 * d:
        return False
    for p in omega.components:
        for e in p.terms:
            if sum(e[:d]) != 1 or sum(e[d:]) != 1:
                return False
    return True


def lie_derivative_form(f: PolyVectorField, omega: PolyMap) -> PolyMap:
    """``(L_f omega)_y(xi, eta) = omega(f' xi, eta) + omega(xi, f' eta)`` for constant bilinear omega.

    Returned as a polynomial map in the ``3d`` variables ``(y, xi, eta)``.
    """
    d = f.dim
    if not is_bilinear(omega, d):
        raise ValueError("omega must be a constant bilinear map on Y x Y")
    lifted = multi_variation_lift(f, 2)
    n = 3 * d
    xs = variables(n)
    xi, eta = xs[d : 2 * d], xs[2 * d :]
    fxi = list(lifted.components[d : 2 * d])
    feta = list(lifted.components[2 * d :])
    zero = Poly.zero(n)
    comps = [w.evaluate(fxi + eta, zero) + w.evaluate(xi + feta, zero) for w in omega.components]
    return PolyMap(n, comps)


def bilinear_observable_augment(f: PolyVectorField, omega: PolyMap) -> PolyVectorField:
    """Augment the two-variation system by ``z' = (L_f omega)_y(xi, eta)``."""
    d = f.dim
    if not is_bilinear(omega, d):
        raise ValueError("omega must be a constant bilinear map on Y x Y")
    F = omega.embed(3 * d, offset=d)
    return augment(multi_variation_lift(f, 2), F)


def lie_bracket(f: PolyVectorField, g: PolyVectorField) -> PolyVectorField:
    """``[f, g] = g' f - f' g``."""
    if f.dim != g.dim:
        raise ValueError("bracket of fields on different spaces")
    gf = jacobian_apply(g, f.components)
    fg = jacobian_apply(f, g.components)
    return PolyVectorField(f.dim, [a - b for a, b in zip(gf, fg)])


def is_chi_related(f: PolyVectorField, g: PolyVectorField, chi: PolyMap) -> bool:
    """``chi'(y) f(y) == g(chi(y))`` as a polynomial identity."""
    if chi.dim_in != f.dim or chi.dim_out != g.dim:
        raise ValueError("chi must map the space of f to the space of g")
    return directional(chi, f) == g.compose(list(chi.components))


# --------------------------------------------------------------- witnesses


def _postorder_labels(tree: Tree, offset: int = 0) -> list[tuple[Tree, list[int]]]:
    """``(vertex, child labels)`` in postorder; entry k has label ``offset + k``."""
    out: list[tuple[Tree, list[int]]] = []

    def visit(t: Tree) -> int:
        kids = [visit(c) for c in t.children]
        out.append((t, kids))
        return offset + len(out) - 1

    visit(tree)
    return out


def _witness_components(tree: Tree, n: int, offset: int) -> list[Poly]:
    comps = []
    for _, kids in _postorder_labels(tree, offset):
        e = [0] * n
        for j in kids:
            e[j] += 1
        comps.append(Poly.monomial(e, 1))
    return comps


def witness_field(tree: Tree) -> PolyVectorField:
    """Field on R^|tree| with ``theta(f)_{|tree|}(0) = sigma(tree) * [theta == tree]``.

    Component i (vertex i) is the product of the variables of its children;
    a leaf gives the constant 1.
    """
    n = tree.order
    return PolyVectorField(n, _witness_components(tree, n, 0))


def witness_pair(u: Tree, v: Tree) -> tuple[PolyVectorField, PolyMap]:
    """Field and quadratic functional whose Hessian only sees the pair ``(u, v)`` at 0."""
    n = u.order + v.order
    comps = _witness_components(u, n, 0) + _witness_components(v, n, u.order)
    e = [0] * n
    e[u.order - 1] += 1
    e[n - 1] += 1
    F = PolyMap(n, [Poly.monomial(e, 1)])
    return PolyVectorField(n, comps), F
