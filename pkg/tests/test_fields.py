import random

import pytest
import sympy as sp
from hypothesis import given

from fequiv.fields import (
    augment,
    differentiate,
    directional,
    elementary_differential,
    elementary_differential_field,
    is_bilinear,
    is_chi_related,
    lie_bracket,
    lie_derivative_form,
    multi_variation_lift,
    series_as_field,
    tangent_lift,
    witness_field,
    witness_pair,
)
from fequiv.poly import Poly, PolyMap, PolyVectorField, random_field, random_map, random_point, variables
from fequiv.series import SeriesMap, basis_series
from fequiv.trees import parse_tree, symmetry, trees_upto
from helpers import seeds, trees
from oracles import map_to_sympy, sym_bracket, sym_elementary_differential, symbols

T = parse_tree


@given(trees(4), seeds)
def test_elementary_differential_matches_sympy(tree, seed):
    f = random_field(random.Random(seed), 2, 2)
    ys = symbols(2)
    want = sym_elementary_differential(tree, map_to_sympy(f, ys), ys)
    got = map_to_sympy(elementary_differential_field(tree, f), ys)
    assert (got - want).applyfunc(sp.expand) == sp.zeros(2, 1)


@given(trees(4, 2), seeds)
def test_colored_elementary_differential_matches_sympy(tree, seed):
    rng = random.Random(seed)
    parts = [random_field(rng, 2, 2), random_field(rng, 2, 2)]
    ys = symbols(2)
    want = sym_elementary_differential(tree, [map_to_sympy(p, ys) for p in parts], ys)
    got = map_to_sympy(elementary_differential_field(tree, parts), ys)
    assert (got - want).applyfunc(sp.expand) == sp.zeros(2, 1)


def test_pointwise_and_symbolic_agree():
    rng = random.Random(5)
    f = random_field(rng, 3, 2)
    y = random_point(rng, 3)
    for t in trees_upto(4):
        assert elementary_differential(t, f, y) == elementary_differential_field(t, f).evaluate(y)


def test_fprime_f_by_hand():
    x, y = variables(2)
    f = PolyVectorField(2, [y, -x * x])
    # f' f = (f1_y * f2, f2_x * f1) = (-x^2, -2 x y)
    assert elementary_differential_field(T("[[]]"), f) == PolyVectorField(2, [-x * x, -2 * x * y])


def test_series_as_field_identity():
    f = random_field(random.Random(0), 2, 2)
    assert series_as_field(basis_series(T("[]"), order=3), f) == f


def test_witness_field_small():
    f = witness_field(T("[[][]]"))
    assert elementary_differential(T("[[][]]"), f, [0, 0, 0])[2] == 2
    assert elementary_differential(T("[[[]]]"), f, [0, 0, 0])[2] == 0


@given(trees(4), trees(4))
def test_witness_property(tau, theta):
    f = witness_field(tau)
    n = tau.order
    val = elementary_differential(theta, f, [0] * n)[n - 1]
    assert val == (symmetry(tau) if theta == tau else 0)


def test_witness_pair_shape():
    f, F = witness_pair(T("[]"), T("[[]]"))
    assert f.dim == 3
    assert F.is_quadratic() and F.dim_out == 1


@given(seeds)
def test_bracket_matches_sympy_and_is_antisymmetric(seed):
    rng = random.Random(seed)
    f, g = random_field(rng, 2, 2), random_field(rng, 2, 2)
    ys = symbols(2)
    want = sym_bracket(map_to_sympy(f, ys), map_to_sympy(g, ys), ys)
    assert (map_to_sympy(lie_bracket(f, g), ys) - want).applyfunc(sp.expand) == sp.zeros(2, 1)
    assert lie_bracket(f, g) == -lie_bracket(g, f)


@given(seeds)
def test_jacobi_identity(seed):
    rng = random.Random(seed)
    f, g, k = (random_field(rng, 2, 2) for _ in range(3))
    total = lie_bracket(f, lie_bracket(g, k)) + lie_bracket(g, lie_bracket(k, f)) + lie_bracket(k, lie_bracket(f, g))
    assert total.is_zero()


@given(seeds)
def test_tangent_lift_matches_sympy(seed):
    f = random_field(random.Random(seed), 2, 3)
    ys, etas = symbols(2), symbols(2, "e")
    fy = map_to_sympy(f, ys)
    want = list(fy) + list(fy.jacobian(sp.Matrix(ys)) * sp.Matrix(etas))
    got = map_to_sympy(tangent_lift(f), list(ys) + list(etas))
    assert all(sp.expand(a - b) == 0 for a, b in zip(got, want))


def test_two_variation_lift_blocks():
    f = random_field(random.Random(3), 2, 2)
    lifted = multi_variation_lift(f, 2)
    assert lifted.dim == 6
    one = tangent_lift(f)
    assert list(lifted.components[2:4]) == [p.embed(6) for p in one.components[2:4]]


@given(seeds)
def test_augment_matches_sympy(seed):
    rng = random.Random(seed)
    f, F = random_field(rng, 2, 2), random_map(rng, 2, 1, 3)
    g = augment(f, F)
    ys = symbols(2)
    fy, Fy = map_to_sympy(f, ys), map_to_sympy(F, ys)
    want = Fy.jacobian(sp.Matrix(ys)) * fy
    got = map_to_sympy(g, list(ys) + [sp.Symbol("z")])
    assert sp.expand(got[2] - want[0]) == 0
    assert g.components[2] == directional(F, f).components[0].embed(3)


def test_lie_derivative_of_canonical_form_by_hand():
    # in dimension 2 a linear field is symplectic iff its matrix is trace free
    q, p = variables(2)
    xs = variables(4)
    omega = PolyMap(4, [xs[0] * xs[3] - xs[1] * xs[2]])
    assert is_bilinear(omega, 2)
    assert lie_derivative_form(PolyVectorField(2, [q, -p]), omega).is_zero()
    assert not lie_derivative_form(PolyVectorField(2, [q, p]), omega).is_zero()


def test_lie_derivative_rejects_non_bilinear():
    xs = variables(4)
    with pytest.raises(ValueError):
        lie_derivative_form(PolyVectorField(2, variables(2)), PolyMap(4, [xs[0] * xs[1]]))


def test_chi_related_linear_projection():
    x, y = variables(2)
    (u,) = variables(1)
    f = PolyVectorField(2, [x, y * x])
    g = PolyVectorField(1, [u])
    chi = PolyMap(2, [x])
    assert is_chi_related(f, g, chi)
    assert not is_chi_related(f, PolyVectorField(1, [u * u]), chi)


def test_second_derivative_evaluator():
    x, y = variables(2)
    F = PolyMap(2, [x * y])
    H = differentiate(F, 2)
    assert H([0, 0], [1, 0], [0, 1]) == [1]
    assert H([0, 0], [1, 0], [1, 0]) == [0]


def test_series_as_field_respects_sigma():
    x, y = variables(2)
    f = PolyVectorField(2, [y * y, Poly.const(2, 1)])
    phi = SeriesMap({T("[[][]]"): 2}, order=3)  # b = sigma -> weight 1 on f''(f, f)
    assert series_as_field(phi, f) == elementary_differential_field(T("[[][]]"), f)
