"""Exact scalars: rationals (``fractions.Fraction``) and elements of Q(sqrt d).

Gauss-Legendre tableaux need sqrt(3), so coefficients may be ``QuadraticSurd``
values. Every arithmetic result with a vanishing surd part collapses back to a
plain ``Fraction``.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational
from typing import Any, Union

Scalar = Union[Fraction, "QuadraticSurd"]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def _squarefree(d: int) -> bool:
    if d < 2:
        return False
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


class QuadraticSurd:
    """``a + b*sqrt(d)`` with rational ``a``, ``b`` and square-free ``d >= 2``."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        if not _squarefree(d):
            raise ValueError(f"radicand must be square-free and >= 2, got {d}")
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = d

    @classmethod
    def sqrt(cls, d: int) -> QuadraticSurd:
        return cls(0, 1, d)

    def _coerce(self, other):
        if isinstance(other, QuadraticSurd):
            if other.d != self.d:
                raise ValueError(f"cannot mix sqrt({self.d}) and sqrt({other.d})")
            return other.a, other.b
        if isinstance(other, (int, Rational)):
            return Fraction(other), Fraction(0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _surd(self.a + o[0], self.b + o[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _surd(self.a - o[0], self.b - o[1], self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _surd(o[0] - self.a, o[1] - self.b, self.d)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = o
        return _surd(self.a * a + self.d * self.b * b, self.a * b + self.b * a, self.d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = o
        norm = a * a - self.d * b * b
        if norm == 0:
            raise ZeroDivisionError("division by zero surd")
        # multiply by the conjugate
        return _surd(
            (self.a * a - self.d * self.b * b) / norm, (self.b * a - self.a * b) / norm, self.d
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadraticSurd(o[0], o[1], self.d) / self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out: Any = Fraction(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o[0] and self.b == o[1]

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __repr__(self):
        return f"QuadraticSurd({self.a}, {self.b}, {self.d})"

    def __str__(self):
        sign = "+" if self.b >= 0 else "-"
        return f"{self.a}{sign}{abs(self.b)}*sqrt({self.d})"


def _surd(a: Fraction, b: Fraction, d: int) -> Scalar:
    if b == 0:
        return a
    return QuadraticSurd(a, b, d)


def parse_scalar(obj: Any) -> Scalar:
    """Read a scalar from its JSON form.

    Accepted: ints, ``"p/q"`` strings, ``{"num": p, "den": q}`` and
    ``{"a": <rational>, "b": <rational>, "sqrt": d}`` for ``a + b*sqrt(d)``.
    Floats are rejected; exactness is the point.
    """
    if isinstance(obj, bool):
        raise ValueError("booleans are not scalars")
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, Fraction):
        return obj
    if isinstance(obj, str):
        m = _RATIONAL_RE.match(obj)
        if not m:
            raise ValueError(f"malformed rational {obj!r}")
        return Fraction(int(m.group(1)), int(m.group(2) or 1))
    if isinstance(obj, dict):
        if set(obj) == {"num", "den"}:
            return Fraction(int(obj["num"]), int(obj["den"]))
        if set(obj) == {"a", "b", "sqrt"}:
            return _surd(parse_scalar(obj["a"]), parse_scalar(obj["b"]), int(obj["sqrt"]))
    raise ValueError(f"cannot read scalar from {obj!r}")


def format_scalar(x: Any) -> Any:
    """JSON form of an exact scalar (inverse of :func:`parse_scalar`)."""
    if isinstance(x, QuadraticSurd):
        return {"a": format_scalar(x.a), "b": format_scalar(x.b), "sqrt": x.d}
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def scalar_str(x: Any) -> str:
    if isinstance(x, QuadraticSurd):
        return str(x)
    return str(Fraction(x))
