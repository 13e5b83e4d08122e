"""Tree-indexed coefficient maps (B-, NB- and P-series) and their algebraic checks.

A :class:`SeriesMap` stores ``b(tree)`` for every tree up to its truncation
order, and stands for ``sum_tree b(tree)/sigma(tree) * tree``. With
``flavor="integrator"`` the same numbers are the coefficients ``a(tree)`` of a
one-step map ``id + sum_tree h^|tree| a(tree)/sigma(tree) * tree``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Any, Iterable, Mapping

from .config import check_order
from .numbers import format_scalar, parse_scalar, scalar_str
from .trees import (
    Tree,
    butcher_product,
    parse_tree,
    recolor_root,
    symmetry,
    to_bracket,
    tree_factorial,
    trees_upto,
)

FLAVORS = ("map", "integrator")
SERIES_SCHEMA = "fequiv.series/1"
TABLEAU_SCHEMA = "fequiv.tableau/1"


class SeriesMap:
    __slots__ = ("colors", "order", "flavor", "coefficients")

    def __init__(
        self,
        coefficients: Mapping[Tree, Any] | None = None,
        order: int = 5,
        colors: int = 1,
        flavor: str = "map",
    ):
        if flavor not in FLAVORS:
            raise ValueError(f"flavor must be one of {FLAVORS}, got {flavor!r}")
        if order < 1 or colors < 1:
            raise ValueError("order and colors must be positive")
        check_order(order)
        given = dict(coefficients or {})
        full = {}
        for t in trees_upto(order, colors):
            c = given.pop(t, 0)
            full[t] = c if not isinstance(c, int) else Fraction(c)
        if given:
            bad = ", ".join(to_bracket(t) for t in given)
            raise ValueError(f"trees outside order {order} / {colors} colors: {bad}")
        self.colors = colors
        self.order = order
        self.flavor = flavor
        self.coefficients = full

    @classmethod
    def from_differentials(cls, weights: Mapping[Tree, Any], **kw) -> SeriesMap:
        """Series from coefficients of the elementary differentials, i.e. ``b = sigma * w``."""
        return cls({t: w * symmetry(t) for t, w in weights.items()}, **kw)

    def differential_coefficients(self) -> dict[Tree, Any]:
        """``b(tree)/sigma(tree)``: the weight multiplying ``tree(f)``."""
        return {t: b / symmetry(t) for t, b in self.coefficients.items()}

    def __getitem__(self, tree: Tree):
        return self.coefficients[tree]

    def get(self, tree: Tree, default=Fraction(0)):
        return self.coefficients.get(tree, default)

    def items(self):
        return self.coefficients.items()

    def __eq__(self, other):
        if not isinstance(other, SeriesMap):
            return NotImplemented
        return (
            self.colors == other.colors
            and self.order == other.order
            and self.flavor == other.flavor
            and self.coefficients == other.coefficients
        )

    __hash__ = None

    def _check_shape(self, other: SeriesMap):
        if (self.colors, self.order, self.flavor) != (other.colors, other.order, other.flavor):
            raise ValueError(
                "series shapes differ: "
                f"{(self.colors, self.order, self.flavor)} vs {(other.colors, other.order, other.flavor)}"
            )

    def __add__(self, other: SeriesMap) -> SeriesMap:
        return series_add(self, other)

    def __sub__(self, other: SeriesMap) -> SeriesMap:
        return series_add(self, series_scale(other, -1))

    def __neg__(self):
        return series_scale(self, -1)

    def __mul__(self, q):
        return series_scale(self, q)

    __rmul__ = __mul__

    def truncate(self, order: int) -> SeriesMap:
        return SeriesMap(
            {t: b for t, b in self.coefficients.items() if t.order <= order},
            order=order,
            colors=self.colors,
            flavor=self.flavor,
        )

    def nonzero(self) -> dict[Tree, Any]:
        return {t: b for t, b in self.coefficients.items() if b}

    def __repr__(self):
        inner = ", ".join(f"{to_bracket(t)}: {scalar_str(b)}" for t, b in self.nonzero().items())
        return f"SeriesMap({{{inner}}}, order={self.order}, colors={self.colors}, flavor={self.flavor!r})"


def series_add(phi: SeriesMap, psi: SeriesMap) -> SeriesMap:
    phi._check_shape(psi)
    return SeriesMap(
        {t: b + psi.coefficients[t] for t, b in phi.coefficients.items()},
        order=phi.order,
        colors=phi.colors,
        flavor=phi.flavor,
    )


def series_scale(phi: SeriesMap, q) -> SeriesMap:
    q = Fraction(q) if isinstance(q, int) else q
    return SeriesMap(
        {t: b * q for t, b in phi.coefficients.items()},
        order=phi.order,
        colors=phi.colors,
        flavor=phi.flavor,
    )


def basis_series(tree: Tree, order: int = 5, colors: int = 1) -> SeriesMap:
    """The integrator map ``f -> tree(f)`` (so ``b(tree) = sigma(tree)``)."""
    return SeriesMap({tree: symmetry(tree)}, order=order, colors=colors)


def identity_series(order: int = 5) -> SeriesMap:
    return SeriesMap({Tree(): 1}, order=order)


def exact_flow_series(order: int = 5) -> SeriesMap:
    """Integrator coefficients ``a(tree) = 1/gamma(tree)`` of the exact flow."""
    return SeriesMap(
        {t: Fraction(1, tree_factorial(t)) for t in trees_upto(order)},
        order=order,
        flavor="integrator",
    )


def per_order_terms(b: SeriesMap) -> list[SeriesMap]:
    """Split a series into its homogeneous pieces; entry ``j-1`` holds the order-``j`` trees."""
    return [
        SeriesMap(
            {t: c for t, c in b.coefficients.items() if t.order == j},
            order=b.order,
            colors=b.colors,
            flavor=b.flavor,
        )
        for j in range(1, b.order + 1)
    ]


# ------------------------------------------------------------ condition checks


@dataclass
class ConditionReport:
    condition: str
    violations: list = field(default_factory=list)
    colored: bool = False

    @property
    def holds(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "condition": self.condition,
            "holds": self.holds,
            "violations": [
                {"u": to_bracket(u, self.colored), "v": to_bracket(v, self.colored), "value": format_scalar(s)}
                for u, v, s in self.violations
            ],
        }

    def __str__(self):
        head = f"{self.condition}: {'holds' if self.holds else 'FAILS'}"
        lines = [head]
        for u, v, s in self.violations:
            lines.append(f"  ({to_bracket(u, self.colored)}, {to_bracket(v, self.colored)}) -> {scalar_str(s)}")
        return "\n".join(lines)


def _pair_sums(phi: SeriesMap, keep) -> list:
    trees = trees_upto(phi.order - 1, phi.colors) if phi.order > 1 else []
    out = []
    for u, v in combinations_with_replacement(trees, 2):
        if u.order + v.order > phi.order or not keep(u, v):
            continue
        s = phi.coefficients[butcher_product(u, v)] + phi.coefficients[butcher_product(v, u)]
        if s:
            out.append((u, v, s))
    return out


def check_quadratic_fe(phi: SeriesMap) -> ConditionReport:
    """``b(u o v) + b(v o u) == 0`` for all u, v with ``|u| + |v| <= order``.

    Each unordered pair is reported once, with ``u <= v`` in the tree order.
    """
    if phi.colors != 1:
        raise ValueError("check_quadratic_fe expects a 1-color series; use check_partitioned_qfe")
    return ConditionReport("quadratic functional equivariance", _pair_sums(phi, lambda u, v: True))


def check_partitioned_qfe(phi: SeriesMap, bilinear_only: bool = False) -> ConditionReport:
    """The pair condition over colored trees.

    With ``bilinear_only`` only pairs whose roots have different colors are
    constrained (observables without same-block quadratic terms).
    """
    if bilinear_only:
        keep = lambda u, v: u.color != v.color  # noqa: E731
        name = "partitioned QFE (bilinear observables)"
    else:
        keep = lambda u, v: True  # noqa: E731
        name = "partitioned QFE (all quadratic observables)"
    return ConditionReport(name, _pair_sums(phi, keep), phi.colors > 1)


def check_affine_root_condition(phi: SeriesMap) -> ConditionReport:
    """Trees differing only in root color must share a coefficient."""
    out = []
    seen = set()
    for t, b in phi.coefficients.items():
        for nu in range(1, phi.colors + 1):
            if nu == t.color:
                continue
            r = recolor_root(t, nu, phi.colors)
            key = (min(t, r), max(t, r))
            if key in seen:
                continue
            seen.add(key)
            diff = phi.coefficients[key[0]] - phi.coefficients[key[1]]
            if diff:
                out.append((key[0], key[1], diff))
    return ConditionReport("affine invariant preservation (root-color independence)", out, phi.colors > 1)


# --------------------------------------------------------------- tableaux


def _scalar(x):
    return Fraction(x) if isinstance(x, (int, str)) else x


@dataclass(frozen=True)
class ButcherTableau:
    A: tuple
    b: tuple
    c: tuple = None
    name: str = ""

    def __post_init__(self):
        A = tuple(tuple(_scalar(x) for x in row) for row in self.A)
        b = tuple(_scalar(x) for x in self.b)
        s = len(b)
        if len(A) != s or any(len(row) != s for row in A):
            raise ValueError(f"A must be {s}x{s}")
        rows = tuple(sum(row, Fraction(0)) for row in A)
        if self.c is None:
            c = rows
        else:
            c = tuple(_scalar(x) for x in self.c)
            if len(c) != s or any(ci != ri for ci, ri in zip(c, rows)):
                raise ValueError("abscissae must equal the row sums of A")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def stages(self) -> int:
        return len(self.b)

    def is_explicit(self) -> bool:
        return all(not self.A[i][j] for i in range(self.stages) for j in range(i, self.stages))

    def to_json(self) -> dict:
        return {
            "schema": TABLEAU_SCHEMA,
            "name": self.name,
            "A": [[format_scalar(x) for x in row] for row in self.A],
            "b": [format_scalar(x) for x in self.b],
            "c": [format_scalar(x) for x in self.c],
        }

    @classmethod
    def from_json(cls, obj: dict) -> ButcherTableau:
        if obj.get("schema", TABLEAU_SCHEMA) != TABLEAU_SCHEMA:
            raise ValueError(f"expected schema {TABLEAU_SCHEMA!r}")
        return cls(
            A=[[parse_scalar(x) for x in row] for row in obj["A"]],
            b=[parse_scalar(x) for x in obj["b"]],
            c=[parse_scalar(x) for x in obj["c"]] if "c" in obj else None,
            name=obj.get("name", ""),
        )


@dataclass(frozen=True)
class PartitionSpec:
    """Contiguous blocks ``[start, stop)`` covering ``range(dim)``."""

    blocks: tuple

    def __post_init__(self):
        blocks = tuple((int(a), int(b)) for a, b in self.blocks)
        pos = 0
        for a, b in blocks:
            if a != pos or b <= a:
                raise ValueError(f"blocks must be contiguous, non-empty and start at 0: {blocks}")
            pos = b
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_sizes(cls, sizes: Iterable[int]) -> PartitionSpec:
        out, pos = [], 0
        for s in sizes:
            out.append((pos, pos + s))
            pos += s
        return cls(tuple(out))

    @property
    def dim(self) -> int:
        return self.blocks[-1][1]

    @property
    def parts(self) -> int:
        return len(self.blocks)

    def block_of(self, i: int) -> int:
        for k, (a, b) in enumerate(self.blocks):
            if a <= i < b:
                return k
        raise IndexError(i)


def elementary_weight(tab: ButcherTableau, tree: Tree):
    """``sum_i b_i Phi_i(tree)`` with ``Phi_i([t1..tm]) = prod_k sum_j a_ij Phi_j(t_k)``."""
    s = tab.stages
    memo: dict = {}

    def stage_weights(t: Tree) -> list:
        # internal weights Phi_j(t) for every stage j
        if t in memo:
            return memo[t]
        w = [Fraction(1)] * s
        for child in t.children:
            inner = stage_weights(child)
            w = [wi * sum((tab.A[i][j] * inner[j] for j in range(s)), Fraction(0)) for i, wi in enumerate(w)]
        memo[t] = w
        return w

    phi = stage_weights(tree)
    return sum((tab.b[i] * phi[i] for i in range(s)), Fraction(0))


def tableau_series(tab: ButcherTableau, order: int = 5) -> SeriesMap:
    return SeriesMap(
        {t: elementary_weight(tab, t) for t in trees_upto(order)}, order=order, flavor="integrator"
    )


# --------------------------------------------------------- modified field


def modified_field_series(a: SeriesMap) -> SeriesMap:
    """Coefficients ``b`` of the modified vector field of the integrator series ``a``.

    For every tree the order-``|tree|`` term of the modified field is computed
    exactly on the witness field of that tree and read off at the origin in
    the root component; the witness property makes that value ``b(tree)``.
    """
    from .fields import series_as_field, witness_field
    from .hseries import modified_field_terms
    from .poly import PolyVectorField

    if a.flavor != "integrator":
        raise ValueError("modified_field_series needs an integrator series (flavor='integrator')")
    if a.colors != 1:
        raise ValueError("modified_field_series handles 1-color series")
    if a.coefficients[Tree()] != 1:
        raise ValueError("inconsistent integrator: a([]) must be 1")
    terms = per_order_terms(SeriesMap(a.coefficients, order=a.order))
    b = {}
    for t in trees_upto(a.order):
        f = witness_field(t)
        n = t.order
        if n == 1:
            b[t] = f.components[0].evaluate([0])
            continue
        steps = [PolyVectorField.zero(n)] + [series_as_field(terms[j - 1], f) for j in range(1, n + 1)]
        fn = modified_field_terms(steps, n)[-1]
        b[t] = fn.components[n - 1].evaluate([0] * n)
    return SeriesMap(b, order=a.order)


# ------------------------------------------------------------------ JSON


def series_to_json(phi: SeriesMap) -> dict:
    colored = phi.colors > 1
    return {
        "schema": SERIES_SCHEMA,
        "colors": phi.colors,
        "order": phi.order,
        "flavor": phi.flavor,
        "coefficients": {to_bracket(t, colored): format_scalar(b) for t, b in phi.coefficients.items()},
    }


def series_from_json(obj: dict) -> SeriesMap:
    if obj.get("schema") != SERIES_SCHEMA:
        raise ValueError(f"expected schema {SERIES_SCHEMA!r}, got {obj.get('schema')!r}")
    coeffs = {}
    for key, val in obj.get("coefficients", {}).items():
        t = parse_tree(key)
        if t in coeffs:
            raise ValueError(f"duplicate tree {key!r}")
        coeffs[t] = parse_scalar(val)
    weights = obj.get("differentials", {})
    for key, val in weights.items():
        t = parse_tree(key)
        coeffs[t] = coeffs.get(t, 0) + parse_scalar(val) * symmetry(t)
    return SeriesMap(
        coeffs,
        order=int(obj.get("order", 5)),
        colors=int(obj.get("colors", 1)),
        flavor=obj.get("flavor", "map"),
    )


def colored_copy(phi: SeriesMap, colors: int) -> SeriesMap:
    """Copy 1-color coefficients onto every coloring of each tree."""
    if phi.colors != 1:
        raise ValueError("expected a 1-color series")
    out = {}
    for t in trees_upto(phi.order, colors):
        out[t] = phi.coefficients[decolor(t)]
    return SeriesMap(out, order=phi.order, colors=colors, flavor=phi.flavor)


def decolor(t: Tree) -> Tree:
    return Tree((decolor(c) for c in t.children), 1)
