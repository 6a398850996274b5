from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdgkit.cdg.constructions import cone, cylinder, direct_sum, regular_module, shift_module, trivial_module
from cdgkit.cdg.examples import exterior, kx_twisted, polynomial, rank_one, truncated_polynomial
from cdgkit.cdg.generators import (
    koszul_module,
    path_algebra,
    random_algebra,
    random_closed_map,
    random_cone,
    random_module,
)
from cdgkit.cdg.hom import hom_complex
from cdgkit.cdg.module import ModMap
from cdgkit.core.errors import DegreeMismatch, InvalidConnection, NotClosed, OutOfWindow
from cdgkit.linalg.field import Field

QQ = Field.rationals()


@pytest.fixture
def kx():
    return polynomial(QQ, 8, degree=1, d_coeff=-1)


def test_twisted_module_over_kx(kx) -> None:
    ax = kx_twisted(kx)
    assert ax.check().passed
    assert ax.rank == 1
    assert ax.diff({("1", "v"): 1}) == {("x", "v"): QQ.convert(-1)}


def test_wrong_connection_is_rejected(kx) -> None:
    with pytest.raises(InvalidConnection):
        rank_one(kx, {"x": 1})


def test_connection_entry_of_wrong_degree(kx) -> None:
    with pytest.raises(DegreeMismatch):
        rank_one(kx, {"x^2": 1})


def test_trivial_and_shifted_modules(kx) -> None:
    assert trivial_module(kx).check().passed
    a = regular_module(kx)
    s = shift_module(a, 1)
    assert s.check().passed
    assert s.carrier.min_degree == -1


def test_curved_algebra_has_no_regular_module_but_koszul_works() -> None:
    a = path_algebra(QQ)
    with pytest.raises(InvalidConnection):
        regular_module(a)
    assert koszul_module(a).check().passed


def test_cone_needs_closed_map(kx) -> None:
    a = regular_module(kx)
    ax = kx_twisted(kx)
    f = ModMap.from_generators(a, ax, 0, {("1", "1"): {("1", "v"): 1}}, name="u")
    assert not f.is_closed
    with pytest.raises(NotClosed):
        cone(f)


def test_cone_of_identity_is_contractible_module() -> None:
    a = truncated_polynomial(QQ, 2, 2)
    m = regular_module(a)
    c = cone(ModMap.identity(m))
    assert c.check().passed
    hom = hom_complex(c, c, [-1, 0, 1])
    assert hom.null_homotopy(ModMap.identity(c)) is not None


def test_cylinder_factors_fold_map() -> None:
    a = exterior(QQ)
    x = regular_module(a)
    j, cyl, p = cylinder(x)
    assert cyl.check().passed
    for f in (j, p):
        assert f.check().passed
    xx = direct_sum([("0", x), ("1", x)])
    fold = ModMap.from_columns(xx, x, 0, {(t, y): {y: 1} for t in ("0", "1") for y in x.labels})
    assert p.compose(j).map.columns == fold.map.columns


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_hom_differential_squares_to_zero(seed: int) -> None:
    rng = random.Random(seed)
    a = random_algebra(QQ, rng)
    m = random_module(a, rng, name="M")
    n = random_module(a, rng, name="N")
    assert m.check().passed and n.check().passed
    hom = hom_complex(m, n)
    assert hom.differential.compose(hom.differential).is_zero


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_random_closed_maps_have_valid_cones(seed: int) -> None:
    rng = random.Random(seed)
    a = random_algebra(QQ, rng)
    m = random_module(a, rng, name="M")
    n = random_module(a, rng, name="N")
    f = random_closed_map(m, n, rng)
    assert f.check().passed
    assert cone(f).check().passed
    assert random_cone(a, rng, name="C").check().passed


def test_hom_degrees_outside_the_natural_range_are_zero() -> None:
    m = regular_module(truncated_polynomial(QQ, 1, 2), name="A")
    hom = hom_complex(m, m)
    assert hom.computed(-1)
    assert hom.closed_maps(-1) == []
    assert hom.closed_maps(5) == []
    assert hom.null_homotopy(ModMap.identity(m)) is None


def test_random_closed_map_between_far_apart_modules_is_zero() -> None:
    e = exterior(QQ)
    f = random_closed_map(trivial_module(e, 5), regular_module(e), random.Random(0))
    assert f.map.is_zero
    assert f.check().passed


def test_hom_with_requested_degrees_keeps_gaps_out_of_window() -> None:
    m = regular_module(truncated_polynomial(QQ, 1, 3), name="A")
    hom = hom_complex(m, m, [0, 2])
    assert hom.computed(0)
    assert not hom.computed(1)
    with pytest.raises(OutOfWindow):
        hom.closed_maps(1)
