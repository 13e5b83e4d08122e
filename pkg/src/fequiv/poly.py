"""Sparse multivariate polynomials with exact coefficients.

A :class:`Poly` maps exponent tuples to nonzero coefficients (``Fraction`` or
``QuadraticSurd``). :class:`PolyMap` is a tuple of polynomials sharing the
same variables; :class:`PolyVectorField` is a square ``PolyMap``.
"""
from __future__ import annotations

import random
from fractions import Fraction
from itertools import product as iproduct
from typing import Any, Iterable, Mapping, Sequence

from .config import BudgetExceeded, get_limits
from .numbers import format_scalar, parse_scalar, scalar_str


def _add_exps(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


class Poly:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple, Any] | None = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for exps, c in terms.items():
                if len(exps) != nvars:
                    raise ValueError(f"exponent {exps} does not have length {nvars}")
                if c:
                    clean[tuple(exps)] = c
        self.terms = clean

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> Poly:
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        return p

    @classmethod
    def zero(cls, nvars: int) -> Poly:
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, nvars: int, c) -> Poly:
        return cls(nvars, {(0,) * nvars: Fraction(c) if isinstance(c, int) else c})

    @classmethod
    def var(cls, nvars: int, i: int) -> Poly:
        e = [0] * nvars
        e[i] = 1
        return cls._raw(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> Poly:
        return cls(len(exps), {tuple(exps): Fraction(c) if isinstance(c, int) else c})

    # ------------------------------------------------------------ queries

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if not self.terms:
            return other == 0
        if len(self.terms) == 1:
            (e, c), = self.terms.items()
            return not any(e) and c == other
        return False

    __hash__ = None

    # --------------------------------------------------------- arithmetic

    def _lift(self, other) -> Poly | None:
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch {self.nvars} vs {other.nvars}")
            return other
        if hasattr(other, "coeffs"):  # an HSeries; let it handle the operation
            return None
        try:
            if other == 0:
                return Poly.zero(self.nvars)
        except TypeError:
            return None
        return Poly.const(self.nvars, other)

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for e, c in o.terms.items():
            s = terms.get(e, 0) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return Poly._raw(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch {self.nvars} vs {other.nvars}")
            if not self.terms or not other.terms:
                return Poly.zero(self.nvars)
            terms: dict = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = _add_exps(e1, e2)
                    terms[e] = terms.get(e, 0) + c1 * c2
            terms = {e: c for e, c in terms.items() if c}
            if len(terms) > get_limits().monomial_budget:
                raise BudgetExceeded(
                    f"product has {len(terms)} monomials, budget {get_limits().monomial_budget}"
                )
            return Poly._raw(self.nvars, terms)
        if hasattr(other, "coeffs"):
            return NotImplemented
        try:
            if not other:
                return Poly.zero(self.nvars)
        except TypeError:
            return NotImplemented
        return Poly._raw(self.nvars, {e: c * other for e, c in self.terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Poly):
            return NotImplemented
        return Poly._raw(self.nvars, {e: c / other for e, c in self.terms.items()})

    def __pow__(self, n: int):
        out = Poly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    # ---------------------------------------------------------- calculus

    def diff(self, i: int) -> Poly:
        terms = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = e[:i] + (k - 1,) + e[i + 1 :]
                terms[e2] = c * k
        return Poly._raw(self.nvars, terms)

    def gradient(self) -> list[Poly]:
        return [self.diff(i) for i in range(self.nvars)]

    def evaluate(self, point: Sequence, zero=None):
        """Evaluate at ``point``; entries may be scalars or any ring elements (Poly, HSeries)."""
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} entries, expected {self.nvars}")
        total = Fraction(0) if zero is None else zero
        powers: dict = {}
        for e, c in self.terms.items():
            mono = None
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    pw = powers.get(key)
                    if pw is None:
                        pw = _power(point[i], k, powers, i)
                    mono = pw if mono is None else mono * pw
            total = total + (c if mono is None else c * mono)
        return total

    __call__ = evaluate

    def embed(self, nvars: int, offset: int = 0) -> Poly:
        """Same polynomial in a larger variable space, shifted by ``offset``."""
        if offset + self.nvars > nvars:
            raise ValueError("embedding does not fit")
        pad_l = (0,) * offset
        pad_r = (0,) * (nvars - offset - self.nvars)
        return Poly._raw(nvars, {pad_l + e + pad_r: c for e, c in self.terms.items()})

    def __repr__(self):
        return f"Poly({self.nvars}, {self.terms!r})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=lambda e: (sum(e), tuple(-x for x in e))):
            c = self.terms[e]
            mono = "*".join(
                f"y{i + 1}" if k == 1 else f"y{i + 1}^{k}" for i, k in enumerate(e) if k
            )
            cs = scalar_str(c)
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _power(x, k: int, cache: dict, i: int):
    # build x^k from the largest cached lower power
    best = 1
    for j in range(k - 1, 1, -1):
        if (i, j) in cache:
            best = j
            break
    pw = x if best == 1 else cache[(i, best)]
    for j in range(best + 1, k + 1):
        pw = pw * x
        cache[(i, j)] = pw
    cache[(i, 1)] = x
    return cache[(i, k)]


def variables(n: int) -> list[Poly]:
    return [Poly.var(n, i) for i in range(n)]


class PolyMap:
    """Polynomial map R^dim_in -> R^dim_out."""

    __slots__ = ("dim_in", "components")

    def __init__(self, dim_in: int, components: Iterable[Poly]):
        comps = tuple(components)
        for p in comps:
            if p.nvars != dim_in:
                raise ValueError(f"component in {p.nvars} variables, expected {dim_in}")
        self.dim_in = dim_in
        self.components = comps
        self._validate()

    def _validate(self):
        pass

    @property
    def dim_out(self) -> int:
        return len(self.components)

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def degree(self) -> int:
        return max((p.degree() for p in self.components), default=-1)

    def is_affine(self) -> bool:
        return self.degree() <= 1

    def is_quadratic(self) -> bool:
        return self.degree() <= 2

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.components)

    def __eq__(self, other):
        if not isinstance(other, PolyMap):
            return NotImplemented
        return self.dim_in == other.dim_in and self.components == other.components

    __hash__ = None

    def _same_shape(self, other: PolyMap):
        if self.dim_in != other.dim_in or self.dim_out != other.dim_out:
            raise ValueError(
                f"shape mismatch ({self.dim_in}->{self.dim_out}) vs ({other.dim_in}->{other.dim_out})"
            )

    def _new(self, comps) -> PolyMap:
        return type(self)(self.dim_in, comps)

    def __add__(self, other: PolyMap):
        self._same_shape(other)
        return self._new(a + b for a, b in zip(self.components, other.components))

    def __sub__(self, other: PolyMap):
        self._same_shape(other)
        return self._new(a - b for a, b in zip(self.components, other.components))

    def __neg__(self):
        return self._new(-a for a in self.components)

    def __mul__(self, scalar):
        return self._new(a * scalar for a in self.components)

    __rmul__ = __mul__

    def evaluate(self, point: Sequence, zero=None) -> list:
        return [p.evaluate(point, zero) for p in self.components]

    __call__ = evaluate

    def jacobian(self) -> list[list[Poly]]:
        return [[p.diff(j) for j in range(self.dim_in)] for p in self.components]

    def compose(self, inner: Sequence[Poly]) -> PolyMap:
        """``self o inner`` where ``inner`` is a sequence of polynomials (one per input variable)."""
        if len(inner) != self.dim_in:
            raise ValueError("composition arity mismatch")
        nv = inner[0].nvars if inner else 0
        zero = Poly.zero(nv)
        return PolyMap(nv, [p.evaluate(inner, zero) for p in self.components])

    def embed(self, nvars: int, offset: int = 0) -> PolyMap:
        return PolyMap(nvars, [p.embed(nvars, offset) for p in self.components])

    def as_map(self) -> PolyMap:
        return PolyMap(self.dim_in, self.components)

    def __repr__(self):
        return f"{type(self).__name__}({self.dim_in}, {list(self.components)!r})"

    def __str__(self):
        return "(" + ", ".join(str(p) for p in self.components) + ")"


class PolyVectorField(PolyMap):
    """Polynomial vector field on R^d."""

    __slots__ = ()

    def _validate(self):
        if len(self.components) != self.dim_in:
            raise ValueError(
                f"vector field needs {self.dim_in} components, got {len(self.components)}"
            )

    @property
    def dim(self) -> int:
        return self.dim_in

    @classmethod
    def zero(cls, d: int) -> PolyVectorField:
        return cls(d, [Poly.zero(d)] * d)

    @classmethod
    def from_map(cls, F: PolyMap) -> PolyVectorField:
        return cls(F.dim_in, F.components)


def to_field(obj) -> PolyVectorField:
    if isinstance(obj, PolyVectorField):
        return obj
    if isinstance(obj, PolyMap):
        return PolyVectorField.from_map(obj)
    raise TypeError(f"expected a polynomial vector field, got {type(obj).__name__}")


# ------------------------------------------------------------------ JSON

POLY_SCHEMA = "fequiv.poly/1"


def poly_to_json(F: PolyMap) -> dict:
    comps = []
    for p in F.components:
        comps.append(
            [{"exponents": list(e), "coeff": format_scalar(c)} for e, c in sorted(p.terms.items())]
        )
    out = {
        "schema": POLY_SCHEMA,
        "kind": "field" if isinstance(F, PolyVectorField) else "map",
        "dimension": F.dim_in,
        "components": comps,
    }
    if not isinstance(F, PolyVectorField):
        out["dim_out"] = F.dim_out
    return out


def poly_from_json(obj: dict) -> PolyMap:
    if obj.get("schema") != POLY_SCHEMA:
        raise ValueError(f"expected schema {POLY_SCHEMA!r}, got {obj.get('schema')!r}")
    d = int(obj["dimension"])
    comps = []
    for comp in obj["components"]:
        terms: dict = {}
        for mono in comp:
            e = tuple(int(k) for k in mono["exponents"])
            if len(e) != d or any(k < 0 for k in e):
                raise ValueError(f"bad exponent vector {mono['exponents']}")
            terms[e] = terms.get(e, 0) + parse_scalar(mono["coeff"])
        comps.append(Poly(d, terms))
    kind = obj.get("kind", "field")
    if kind == "field":
        return PolyVectorField(d, comps)
    if kind == "map":
        if "dim_out" in obj and int(obj["dim_out"]) != len(comps):
            raise ValueError("dim_out does not match component count")
        return PolyMap(d, comps)
    raise ValueError(f"unknown kind {kind!r}")


# ------------------------------------------------------- random instances


def _random_coeff(rng: random.Random) -> Fraction:
    num = rng.choice([n for n in range(-3, 4) if n])
    return Fraction(num, rng.choice([1, 1, 2, 3]))


def random_poly(rng: random.Random, nvars: int, degree: int, nterms: int) -> Poly:
    exps = [e for e in iproduct(range(degree + 1), repeat=nvars) if sum(e) <= degree]
    chosen = rng.sample(exps, min(nterms, len(exps)))
    return Poly(nvars, {e: _random_coeff(rng) for e in chosen})


def random_field(rng: random.Random, dim: int, degree: int, nterms: int = 3) -> PolyVectorField:
    return PolyVectorField(dim, [random_poly(rng, dim, degree, nterms) for _ in range(dim)])


def random_map(rng: random.Random, dim_in: int, dim_out: int, degree: int, nterms: int = 3) -> PolyMap:
    return PolyMap(dim_in, [random_poly(rng, dim_in, degree, nterms) for _ in range(dim_out)])


def random_point(rng: random.Random, dim: int) -> list[Fraction]:
    return [Fraction(rng.randint(-4, 4), rng.choice([1, 2, 3])) for _ in range(dim)]
