import math
import random
from fractions import Fraction as Fr

import sympy as sp
from hypothesis import given, settings

from fequiv.hseries import (
    HSeries,
    coefficient_field,
    compose_state,
    exact_flow_symbolic,
    flow_formal,
    flow_symbolic,
    modified_field_terms,
)
from fequiv.poly import Poly, PolyVectorField, random_field, variables
from helpers import seeds
from oracles import map_to_sympy, sym_taylor_flow, symbols, truncate_h


def test_product_truncates_at_shorter_series():
    a = HSeries([Fr(1), Fr(1), Fr(1)])
    b = HSeries([Fr(1), Fr(2)])
    assert (a * b).coeffs == [1, 3]


def test_shift_multiplies_by_h():
    a = HSeries([Fr(1), Fr(2), Fr(3)])
    assert a.shift(1).coeffs == [0, 1, 2]


def test_first_nonzero_and_evaluate():
    a = HSeries([Fr(0), Fr(0), Fr(5)])
    assert a.first_nonzero() == 2
    assert a.evaluate(Fr(1, 2)) == Fr(5, 4)
    assert HSeries.zero(3).first_nonzero() is None


def test_exponential_flow():
    (y,) = variables(1)
    f = PolyVectorField(1, [y])
    (out,) = flow_formal(f, [Fr(1)], 6)
    assert out.coeffs == [Fr(1, math.factorial(j)) for j in range(7)]


def test_constant_field_flow():
    f = PolyVectorField(2, [Poly.const(2, 3), Poly.const(2, -1)])
    out = flow_formal(f, [Fr(1), Fr(2)], 4)
    assert [s.coeffs for s in out] == [[1, 3, 0, 0, 0], [2, -1, 0, 0, 0]]


def test_scaled_flow_is_flow_of_scaled_field():
    f = random_field(random.Random(2), 2, 2)
    assert exact_flow_symbolic(f, 4, Fr(1, 3)) == exact_flow_symbolic(f * Fr(1, 3), 4)


@settings(max_examples=10)
@given(seeds)
def test_h_dependent_flow_matches_sympy(seed):
    rng = random.Random(seed)
    f1, f2 = random_field(rng, 2, 2), random_field(rng, 2, 2)
    N = 3
    ys = symbols(2)
    h = sp.Symbol("h")
    F = map_to_sympy(f1, ys) + h * map_to_sympy(f2, ys)
    want = sym_taylor_flow(F, ys, h, N).applyfunc(lambda e: truncate_h(e, h, N))
    got = flow_symbolic([f1, f2], N)
    for k in range(N + 1):
        gk = map_to_sympy(coefficient_field(got, k), ys)
        wk = want.applyfunc(lambda e: e.coeff(h, k))
        assert (gk - wk).applyfunc(sp.expand) == sp.zeros(2, 1)


@settings(max_examples=10)
@given(seeds)
def test_flow_group_property(seed):
    # exp(h f) o exp(h f) = exp(2 h f)
    f = random_field(random.Random(seed), 2, 2)
    one = exact_flow_symbolic(f, 4)
    two = compose_state(one, one)
    assert two == exact_flow_symbolic(f, 4, Fr(2))


@given(seeds)
def test_modified_terms_round_trip(seed):
    rng = random.Random(seed)
    N = 4
    d = [PolyVectorField.zero(2)] + [random_field(rng, 2, 2) for _ in range(N)]
    fs = modified_field_terms(d, N)
    flow = flow_symbolic([d[1]] + fs, N)
    for k in range(1, N + 1):
        assert coefficient_field(flow, k) == d[k]


def test_symbolic_and_pointwise_flow_agree():
    rng = random.Random(7)
    f = random_field(rng, 2, 2)
    pt = [Fr(1, 2), Fr(-1, 3)]
    sym = flow_formal(f, None, 4)
    num = flow_formal(f, pt, 4)
    for s, n in zip(sym, num):
        assert [c.evaluate(pt) for c in s.coeffs] == n.coeffs
