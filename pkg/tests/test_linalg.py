from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdgkit.core.errors import NotClosed, OutOfWindow
from cdgkit.linalg.complexes import cohomology, is_quasi_isomorphism
from cdgkit.linalg.elimination import invert, rank, subquotients
from cdgkit.linalg.field import Field
from cdgkit.linalg.graded import GradedMap, GradedSpace, Window, shift, shift_map, tensor_map, tensor_space


def test_field_parse_variants() -> None:
    assert Field.parse("QQ") == Field(0)
    assert Field.parse("GF(5)") == Field(5)
    assert Field.parse("F_7") == Field(7)
    assert Field.parse("3") == Field(3)
    with pytest.raises(ValueError):
        Field.parse("GF(4)")
    with pytest.raises(ValueError):
        Field(4)


def test_fractions_reduce_in_finite_fields() -> None:
    f5 = Field.prime(5)
    assert f5.to_text(f5.convert("1/2")) == "3"
    assert f5.to_text(f5.convert(-1)) == "4"
    qq = Field.rationals()
    assert qq.to_text(qq.convert("-3/6")) == "-1/2"
    assert len(f5.elements()) == 5
    with pytest.raises(ZeroDivisionError):
        f5.convert("1/5")


def _two_term(fld: Field) -> GradedMap:
    # a (deg 0) -> b (deg 1), plus a lone c in degree 1
    space = GradedSpace.from_pairs([("a", 0), ("b", 1), ("c", 1)])
    return GradedMap.from_columns(space, space, 1, {"a": {"b": 1}}, fld)


def test_cohomology_of_small_complex() -> None:
    d = _two_term(Field.rationals())
    h = cohomology(d)
    assert h.dims() == {1: 1}
    g = h.group(1)
    assert g.is_coboundary({"b": 1})
    assert not g.is_coboundary({"c": 1})


def test_cohomology_rejects_nonzero_square() -> None:
    fld = Field.rationals()
    space = GradedSpace.from_pairs([("a", 0), ("b", 1), ("c", 2)])
    d = GradedMap.from_columns(space, space, 1, {"a": {"b": 1}, "b": {"c": 1}}, fld)
    with pytest.raises(NotClosed):
        cohomology(d)


def test_cohomology_outside_window_raises() -> None:
    fld = Field.rationals()
    space = GradedSpace.from_pairs([("a", 0), ("b", 1)], Window(None, 1))
    d = GradedMap.from_columns(space, space, 1, {"a": {"b": 1}}, fld)
    assert cohomology(d, [0]).dims() == {}
    with pytest.raises(OutOfWindow):
        cohomology(d, [1])


def test_invert_and_quasi_isomorphism() -> None:
    fld = Field.rationals()
    space = GradedSpace.from_pairs([("a", 0), ("b", 0)])
    f = GradedMap.from_columns(space, space, 0, {"a": {"a": 1, "b": 1}, "b": {"b": 2}}, fld)
    inv = invert(f)
    assert inv is not None
    assert inv.compose(f).equals(GradedMap.identity(space, fld))
    singular = GradedMap.from_columns(space, space, 0, {"a": {"a": 1}, "b": {"a": 1}}, fld)
    assert invert(singular) is None

    d = _two_term(fld)
    h = cohomology(d)
    assert is_quasi_isomorphism(GradedMap.identity(d.source, fld), h, h, [0, 1])


def test_tensor_space_dims() -> None:
    k = GradedSpace.from_pairs([("1", 0)])
    v = GradedSpace.from_pairs([("a", 0), ("b", 1)])
    w = GradedSpace.from_pairs([("x", -1), ("y", 2), ("z", 2)])
    assert tensor_space(k, w).dims() == w.dims()
    assert tensor_space(v, v).dims() == {0: 1, 1: 2, 2: 1}
    assert tensor_space(v, w).dims() == {-1: 1, 0: 1, 2: 2, 3: 2}
    # the augmentation ideal of k[e]/(e^2), |e| = 2, shifted by one
    abar = shift(GradedSpace.from_pairs([("e", 2)]), 1)
    assert tensor_space(abar, abar).dims() == {2: 1}
    assert tensor_space(v, GradedSpace.zero()).dim == 0


def test_tensor_space_refuses_degrees_outside_its_window() -> None:
    # degrees 0 and 1 of a space known only up to degree 1
    v = GradedSpace.from_pairs([("a", 0), ("b", 1)], Window(None, 1))
    w = GradedSpace.from_pairs([("x", 0), ("y", 1)])
    vw = tensor_space(v, w, [0, 1])
    assert vw.window == Window(None, 1)
    with pytest.raises(OutOfWindow):
        tensor_space(v, w, [2])
    # unknown in opposite directions on the two factors: nothing is determined
    u = GradedSpace.from_pairs([("c", 0)], Window(0, None))
    with pytest.raises(OutOfWindow):
        tensor_space(v, u, [0])


def _space() -> GradedSpace:
    return GradedSpace.from_pairs([("a", 0), ("b", 1), ("c", 1), ("e", 2)])


def _random_map(rng: random.Random, space: GradedSpace, degree: int, fld: Field) -> GradedMap:
    cols = {
        s: {t: rng.randint(-2, 2) for t, dt in zip(space.labels, space.degrees, strict=True) if dt == ds + degree}
        for s, ds in zip(space.labels, space.degrees, strict=True)
    }
    return GradedMap.from_columns(space, space, degree, cols, fld)


def test_tensor_map_signs_on_odd_maps() -> None:
    fld = Field.rationals()
    line = GradedSpace.from_pairs([("u", 1)])
    plane = GradedSpace.from_pairs([("u", 1), ("v", 2)])
    f = GradedMap.from_columns(plane, plane, 1, {"u": {"v": 1}}, fld)
    g = GradedMap.from_columns(plane, plane, 1, {"u": {"v": 1}}, fld)
    fg = tensor_map(f, g)
    # (f⊗g)(u⊗u) = (-1)^{|g||u|} f(u)⊗g(u) = -v⊗v
    assert fg.column(("u", "u")) == {("v", "v"): -1}
    ident = GradedMap.identity(line, fld)
    assert tensor_map(ident, ident).equals(GradedMap.identity(tensor_space(line, line), fld))
    even = GradedMap.from_columns(plane, plane, 0, {"u": {"u": 3}, "v": {"v": 1}}, fld)
    assert tensor_map(f, even).column(("u", "v")) == {("v", "v"): 1}


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.lists(st.integers(0, 1), min_size=4, max_size=4))
def test_tensor_map_interchange_law(seed: int, degrees: list[int]) -> None:
    fld = Field.rationals()
    rng = random.Random(seed)
    v = _space()
    f, f2, g, g2 = (_random_map(rng, v, d, fld) for d in degrees)
    lhs = tensor_map(f, g).compose(tensor_map(f2, g2))
    rhs = tensor_map(f.compose(f2), g.compose(g2))
    if (g.degree * f2.degree) % 2:
        rhs = -rhs
    assert lhs.equals(rhs)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(-3, 3), st.integers(0, 1))
def test_shift_map_round_trip(seed: int, n: int, degree: int) -> None:
    fld = Field.prime(101)
    f = _random_map(random.Random(seed), _space(), degree, fld)
    there = shift_map(f, n)
    assert there.source.degree_of["a"] == -n
    back = shift_map(there, -n)
    assert back.source.same_basis(f.source)
    assert back.equals(f)


def test_shifted_differential_changes_sign_on_odd_shifts() -> None:
    d = _two_term(Field.rationals())
    assert shift_map(d, 1).column("a") == {"b": -1}
    assert shift_map(d, 2).column("a") == {"b": 1}
    assert shift(shift(d.source, 1), -1).same_basis(d.source)
    assert shift(GradedSpace.from_pairs([("1", 0)]), 1).degrees == (-1,)


def test_subquotients_small_cases() -> None:
    fld = Field.rationals()
    src = GradedSpace.from_pairs([("p", 0), ("q", 0)])
    tgt = GradedSpace.from_pairs([("r", 0)])
    f = GradedMap.from_columns(src, tgt, 0, {"p": {"r": 1}, "q": {"r": 1}}, fld)
    sq = subquotients(f)
    assert (sq.kernel.source.dim, sq.image.source.dim, sq.cokernel.target.dim) == (1, 1, 0)
    zero = GradedMap.zero(src, tgt, 0, fld)
    sq0 = subquotients(zero)
    assert sq0.kernel.source.dim == 2
    assert sq0.cokernel.target.dim == 1
    assert sq0.project({"r": 1}) == {("coker", "r"): 1}


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_subquotients_agree_with_a_second_pivot_order(seed: int) -> None:
    fld = Field.prime(101)
    rng = random.Random(seed)
    src = GradedSpace.from_pairs([(f"s{i}", 0) for i in range(7)])
    tgt = GradedSpace.from_pairs([(f"t{i}", 0) for i in range(5)])
    # rank at most 3, so the kernel is never the trivial 7 - 5
    basis = [{t: rng.randrange(101) for t in tgt.labels} for _ in range(3)]
    cols = {}
    for s in src.labels:
        coeffs = [rng.randrange(101) for _ in basis]
        cols[s] = {t: sum(c * b[t] for c, b in zip(coeffs, basis, strict=True)) for t in tgt.labels}
    f = GradedMap.from_columns(src, tgt, 0, cols, fld)
    sq = subquotients(f)
    r = sq.image.source.dim
    assert r + sq.kernel.source.dim == 7
    assert r + sq.cokernel.target.dim == 5

    # eliminate again on the transpose with the columns reversed
    block = f.block(0).transpose()
    order = list(reversed(range(block.shape[1])))
    assert rank(block.extract(list(range(block.shape[0])), order)) == r
    assert rank(f.block(0), method="GJ") == r

    assert f.compose(sq.kernel).is_zero
    assert sq.cokernel.compose(f).is_zero
    assert sq.cokernel.compose(sq.image).is_zero


def _chain(top: int, window: Window | None = None) -> GradedMap:
    # x_0 -> x_1, x_2 -> x_3, ... with a spare y_i in every odd degree
    fld = Field.rationals()
    pairs = [(("x", i), i) for i in range(top + 1)] + [(("y", i), i) for i in range(1, top + 1, 2)]
    space = GradedSpace.from_pairs(pairs, window)
    cols = {("x", i): {("x", i + 1): 1} for i in range(0, top, 2)}
    return GradedMap.from_columns(space, space, 1, cols, fld)


def test_window_answers_match_a_larger_window() -> None:
    small = _chain(3, Window(None, 3))
    large = _chain(7, Window(None, 7))
    for n in range(3):
        assert cohomology(small, [n]).dims().get(n, 0) == cohomology(large, [n]).dims().get(n, 0)
    with pytest.raises(OutOfWindow):
        cohomology(small, [3])
    with pytest.raises(OutOfWindow):
        subquotients(small, [4])
