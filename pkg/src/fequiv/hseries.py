"""Truncated power series in the step size h.

Coefficients may be exact scalars or polynomials in the state variables; the
latter is how formal steps are carried symbolically in ``y0``.

The flow of an h-dependent field ``h*G1 + h^2*G2 + ...`` is expanded as a Lie
series ``sum_m L_G^m(id) / m!``; it is exact through the truncation order
because ``L_G`` raises the h-order by at least one.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Any, Callable, Sequence

from .poly import Poly, PolyVectorField, variables


class HSeries:
    """``c0 + c1 h + ... + cN h^N``; products discard orders above N."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        if not coeffs:
            raise ValueError("an HSeries needs at least the h^0 coefficient")
        self.coeffs = list(coeffs)

    @classmethod
    def constant(cls, c, N: int, zero=Fraction(0)) -> HSeries:
        return cls([c] + [zero] * N)

    @classmethod
    def zero(cls, N: int, zero=Fraction(0)) -> HSeries:
        return cls([zero] * (N + 1))

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int):
        return self.coeffs[k]

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def first_nonzero(self) -> int | None:
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return None

    def truncate(self, N: int) -> HSeries:
        return HSeries(self.coeffs[: N + 1])

    def map(self, fn: Callable[[Any], Any]) -> HSeries:
        return HSeries([fn(c) for c in self.coeffs])

    def shift(self, k: int) -> HSeries:
        """Multiply by h^k (keeping the truncation)."""
        if k == 0:
            return self
        z = self.coeffs[0] * 0
        return HSeries([z] * k + self.coeffs[: len(self.coeffs) - k])

    def diff(self, i: int) -> HSeries:
        """Coefficient-wise partial derivative (polynomial coefficients only)."""
        return HSeries([c.diff(i) if isinstance(c, Poly) else c * 0 for c in self.coeffs])

    def evaluate(self, h):
        """Sum the truncated series at a concrete step size."""
        out = 0
        for c in reversed(self.coeffs):
            out = out * h + c
        return out

    def __eq__(self, other):
        if isinstance(other, HSeries):
            n = max(len(self.coeffs), len(other.coeffs))
            a = self.coeffs + [0] * (n - len(self.coeffs))
            b = other.coeffs + [0] * (n - len(other.coeffs))
            return all(x == y for x, y in zip(a, b))
        return NotImplemented

    __hash__ = None

    def __add__(self, other):
        if isinstance(other, HSeries):
            n = min(self.N, other.N)
            return HSeries([a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs)])
        out = list(self.coeffs)
        out[0] = out[0] + other
        return HSeries(out)

    __radd__ = __add__

    def __neg__(self):
        return HSeries([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, HSeries):
            n = min(self.N, other.N)
            out: list = [None] * (n + 1)
            b = other.coeffs
            for i in range(n + 1):
                ai = self.coeffs[i]
                if not ai:
                    continue
                for j in range(n + 1 - i):
                    bj = b[j]
                    if not bj:
                        continue
                    t = ai * bj
                    out[i + j] = t if out[i + j] is None else out[i + j] + t
            z = _zero_like(self.coeffs[0], other.coeffs[0])
            return HSeries([z if c is None else c for c in out])
        return HSeries([c * other for c in self.coeffs])

    def __rmul__(self, other):
        return HSeries([other * c for c in self.coeffs])

    def __truediv__(self, scalar):
        return HSeries([c / scalar for c in self.coeffs])

    def __repr__(self):
        return f"HSeries({self.coeffs!r})"

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(f"({c})" + ("" if k == 0 else f"*h^{k}"))
        return " + ".join(terms) + f" + O(h^{self.N + 1})" if terms else f"O(h^{self.N + 1})"


def _zero_like(a, b):
    if isinstance(a, Poly):
        return Poly.zero(a.nvars)
    if isinstance(b, Poly):
        return Poly.zero(b.nvars)
    return Fraction(0)


def lift_point(point: Sequence, N: int) -> list[HSeries]:
    zero = _zero_like(point[0], point[0]) if point else Fraction(0)
    return [HSeries([p] + [zero] * N) for p in point]


def coefficient_field(state: Sequence[HSeries], k: int) -> PolyVectorField:
    """The h^k coefficient of a symbolic formal state, as a vector field."""
    comps = [s.coeffs[k] if k < len(s.coeffs) else 0 for s in state]
    d = len(comps)
    return PolyVectorField(d, [c if isinstance(c, Poly) else Poly.const(d, c) for c in comps])


def evaluate_state(state: Sequence[HSeries], point: Sequence) -> list[HSeries]:
    """Substitute a rational point into the polynomial coefficients of a symbolic state."""
    return [s.map(lambda p: p.evaluate(point) if isinstance(p, Poly) else p) for s in state]


def compose_state(state: Sequence[HSeries], inner: Sequence[HSeries]) -> list[HSeries]:
    """``state(inner)``: substitute a formal state into a symbolic one (truncation of ``inner``)."""
    N = min(s.N for s in inner)
    zero = HSeries.zero(N, _zero_like(inner[0].coeffs[0], inner[0].coeffs[0]))
    out = []
    for s in state:
        acc = zero
        for k, p in enumerate(s.coeffs[: N + 1]):
            if not p:
                continue
            val = p.evaluate(inner, zero) if isinstance(p, Poly) else zero + p
            acc = acc + val.shift(k)
        out.append(acc)
    return out


# ------------------------------------------------------------------- flows


def lie_powers(f: PolyVectorField, N: int) -> list[list[Poly]]:
    """``L_f^m(id)`` for m = 0..N as polynomial vectors."""
    d = f.dim
    cur = variables(d)
    out = [cur]
    for _ in range(N):
        nxt = []
        for p in cur:
            acc = Poly.zero(d)
            for j in range(d):
                dp = p.diff(j)
                if dp:
                    acc = acc + dp * f.components[j]
            nxt.append(acc)
        cur = nxt
        out.append(cur)
    return out


def exact_flow_symbolic(f: PolyVectorField, N: int, scale=Fraction(1)) -> list[HSeries]:
    """``exp(scale*h*f)(y)`` through h^N, coefficients polynomial in y."""
    powers = lie_powers(f, N)
    out = []
    fact = Fraction(1)
    coeffs: list[list] = [[] for _ in range(f.dim)]
    for m in range(N + 1):
        if m:
            fact *= m
        c = scale**m / fact
        for i in range(f.dim):
            coeffs[i].append(powers[m][i] * c)
    for i in range(f.dim):
        out.append(HSeries(coeffs[i]))
    return out


def flow_symbolic(terms: Sequence[PolyVectorField], N: int) -> list[HSeries]:
    """``exp(h*(f1 + h f2 + h^2 f3 + ...))(y)`` through h^N, with ``terms = [f1, f2, ...]``."""
    if not terms:
        raise ValueError("need at least one field")
    nonzero = [k for k, g in enumerate(terms) if not g.is_zero()]
    if nonzero == [0] or not nonzero:
        return exact_flow_symbolic(terms[0], N)
    d = terms[0].dim
    zero = Poly.zero(d)
    G = []
    for i in range(d):
        cs = [zero]
        for k in range(1, N + 1):
            cs.append(terms[k - 1].components[i] if k - 1 < len(terms) else zero)
        G.append(HSeries(cs))
    term = [HSeries([y] + [zero] * N) for y in variables(d)]
    total = list(term)
    for m in range(1, N + 1):
        nxt = []
        for s in term:
            acc = HSeries.zero(N, zero)
            for j in range(d):
                ds = s.diff(j)
                if ds:
                    acc = acc + ds * G[j]
            nxt.append(acc / m)
        term = nxt
        total = [a + b for a, b in zip(total, term)]
    return total


def flow_formal(terms, y0: Sequence, N: int) -> list[HSeries]:
    """Exact h-expansion of the flow of ``f`` (or of ``f + h f2 + ...``) started at ``y0``.

    ``terms`` is a single field or a sequence ``[f, f2, ..., fk]``. ``y0`` is a
    point of scalars or of polynomials (symbolic start).
    """
    if isinstance(terms, PolyVectorField):
        terms = [terms]
    sym = flow_symbolic(list(terms), N)
    if y0 is None:
        return sym
    if any(isinstance(v, (Poly, HSeries)) for v in y0):
        inner = [v if isinstance(v, HSeries) else HSeries([v] + [v * 0] * N) for v in y0]
        return compose_state(sym, inner)
    return evaluate_state(sym, y0)


def modified_field_terms(step_coeffs: Sequence[PolyVectorField], N: int) -> list[PolyVectorField]:
    """Solve ``exp(h f~) = id + h d1 + h^2 d2 + ...`` order by order.

    ``step_coeffs[k]`` is ``d_k`` for k = 1..N (index 0 ignored). Returns
    ``[f2, ..., fN]`` with ``f~ = d1 + h f2 + h^2 f3 + ...``.
    """
    f = step_coeffs[1]
    fs = [f]
    for j in range(2, N + 1):
        flow = flow_symbolic(fs, j)
        fj = step_coeffs[j] - coefficient_field(flow, j)
        fs.append(fj)
    return fs[1:]
