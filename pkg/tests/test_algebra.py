from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdgkit.cdg.algebra import CDGAlgebra, bimodule_algebra, opposite, tensor_algebra
from cdgkit.cdg.examples import exterior, ground, polynomial, truncated_polynomial
from cdgkit.cdg.generators import change_basis, mutate, path_algebra, random_algebra, square_zero_pair
from cdgkit.core.errors import DegreeMismatch
from cdgkit.linalg.field import Field

QQ = Field.rationals()
F5 = Field.prime(5)


@pytest.mark.parametrize(
    "algebra",
    [
        ground(QQ),
        polynomial(QQ, 8, degree=1, d_coeff=-1),
        polynomial(QQ, 8, degree=2),
        truncated_polynomial(QQ, 2, 3),
        exterior(F5),
        square_zero_pair(QQ, 1, 1),
        square_zero_pair(F5, 2, 3),
        path_algebra(QQ),
    ],
    ids=lambda a: a.name,
)
def test_named_algebras_satisfy_axioms(algebra: CDGAlgebra) -> None:
    report = algebra.check()
    assert report.passed, report.failures()


def test_curved_examples_are_curved() -> None:
    assert path_algebra(QQ).is_curved
    assert square_zero_pair(QQ, 1, 1).is_curved
    assert not square_zero_pair(QQ, 1, 0).is_curved


def test_differential_that_does_not_square_to_curvature() -> None:
    a = CDGAlgebra.build(
        QQ,
        [("1", 0), ("x", 1), ("y", 2), ("z", 3)],
        "1",
        {},
        {"x": {"y": 1}, "y": {"z": 1}},
        name="bad",
    )
    report = a.check()
    assert not report.passed
    assert [f.name for f in report.failures()] == ["d squared"]
    assert not a.check_operators()


def test_product_of_wrong_degree_is_rejected() -> None:
    with pytest.raises(DegreeMismatch):
        CDGAlgebra.build(QQ, [("1", 0), ("x", 1), ("y", 1)], "1", {("x", "x"): {"y": 1}})


def test_unit_must_have_degree_zero() -> None:
    with pytest.raises(ValueError):
        CDGAlgebra.build(QQ, [("1", 1)], "1", {})


def test_tensor_and_opposite_stay_valid() -> None:
    a = exterior(QQ, var="a")
    b = square_zero_pair(QQ, 1, 2)
    for alg in (tensor_algebra(a, b), opposite(b), bimodule_algebra(a, b)):
        assert alg.check().passed, alg.name
    t = tensor_algebra(a, b)
    assert t.dim == a.dim * b.dim
    assert t.is_curved


def test_polynomial_regenerates_at_other_windows() -> None:
    a = polynomial(QQ, 4, degree=1, d_coeff=-1)
    assert a.window.hi == 4
    bigger = a.at(9)
    assert bigger.window.hi == 9
    assert bigger.dim == 10


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.booleans())
def test_random_algebras_are_valid(seed: int, curved: bool) -> None:
    rng = random.Random(seed)
    alg = random_algebra(QQ, rng, curved=curved)
    assert alg.check().passed
    assert alg.is_curved == curved


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_operator_oracle_agrees_with_check(seed: int) -> None:
    rng = random.Random(seed)
    alg = mutate(random_algebra(QQ, rng, basis_change=False), rng)
    assert alg.check_operators() == alg.check().passed


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_basis_change_preserves_axioms_over_finite_field(seed: int) -> None:
    rng = random.Random(seed)
    alg = change_basis(truncated_polynomial(F5, 1, 3), rng)
    assert alg.check().passed
    assert alg.carrier.dims() == {0: 1, 1: 1, 2: 1}
