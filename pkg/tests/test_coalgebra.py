from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdgkit.bar.bar import bar
from cdgkit.cdg.constructions import trivial_module
from cdgkit.cdg.examples import exterior, ground, truncated_polynomial
from cdgkit.cdg.generators import path_algebra, random_algebra, square_zero_pair
from cdgkit.coalg.coalgebra import dual_algebra, dual_coalgebra
from cdgkit.coalg.comodule import cofree_comodule, comodule_sum, shift_comodule, totalize_ses
from cdgkit.coalg.contramodule import free_contramodule, from_dual_module, hom_carrier, to_dual_module
from cdgkit.coalg.functors import phi, psi, verify_phi_psi
from cdgkit.coalg.morphism import StructMap
from cdgkit.core.errors import NotExact, NotFiniteDimensional
from cdgkit.linalg.complexes import cohomology
from cdgkit.linalg.elimination import subquotients
from cdgkit.linalg.field import Field
from cdgkit.linalg.graded import GradedMap, GradedSpace, tensor_space

QQ = Field.rationals()


@pytest.mark.parametrize(
    "algebra",
    [ground(QQ), exterior(QQ), truncated_polynomial(QQ, 2, 3), square_zero_pair(QQ, 1, 1), path_algebra(QQ)],
    ids=lambda a: a.name,
)
def test_dual_coalgebra_is_valid_and_dualizes_back(algebra) -> None:
    c = dual_coalgebra(algebra)
    assert c.check().passed
    assert c.is_curved == algebra.is_curved
    assert c.carrier.dims() == {-n: d for n, d in algebra.carrier.dims().items()}
    back = dual_algebra(c)
    assert back.check().passed
    assert back.carrier.dims() == algebra.carrier.dims()


def test_free_and_cofree_objects_satisfy_the_adjunction() -> None:
    c = dual_coalgebra(truncated_polynomial(QQ, 2, 2))
    v = GradedSpace.from_pairs([("v", 0), ("w", 1)])
    report = verify_phi_psi([free_contramodule(c, v)], [cofree_comodule(c, v)], subject=c.name)
    assert report.passed, report.failures()


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_unit_and_counit_on_random_duals(seed: int) -> None:
    rng = random.Random(seed)
    a = random_algebra(QQ, rng, curved=False)
    c = dual_coalgebra(a)
    v = GradedSpace.from_pairs([("v", 0)])
    assert free_contramodule(c, v).check().passed
    assert cofree_comodule(c, v).check().passed
    assert verify_phi_psi([free_contramodule(c, v)], [cofree_comodule(c, v)]).passed


def _split_sequence():
    c = dual_coalgebra(truncated_polynomial(QQ, 2, 2))
    x = cofree_comodule(c, GradedSpace.from_pairs([("v", 0)]), name="X")
    z = cofree_comodule(c, GradedSpace.from_pairs([("w", 1)]), name="Z")
    y = comodule_sum([("X", x), ("Z", z)], name="Y")
    f = StructMap(x, y, GradedMap.from_columns(x.carrier, y.carrier, 0, {n: {("X", n): 1} for n in x.labels},
                                               QQ), "i")
    g = StructMap(y, z, GradedMap.from_columns(y.carrier, z.carrier, 0, {("Z", n): {n: 1} for n in z.labels},
                                               QQ), "p")
    return x, y, z, f, g


def test_sum_of_comodules_is_a_comodule() -> None:
    x, y, z, f, g = _split_sequence()
    assert y.check().passed
    assert y.carrier.dim == x.carrier.dim + z.carrier.dim
    assert f.check().passed
    assert g.check().passed


def test_totalization_of_split_sequence_is_acyclic() -> None:
    x, y, z, f, g = _split_sequence()
    total = totalize_ses(f, g)
    assert total.check().passed
    assert total.carrier.dim == x.carrier.dim + y.carrier.dim + z.carrier.dim
    assert cohomology(total.d).is_acyclic


def test_totalization_needs_an_exact_sequence() -> None:
    x, y, z, _, g = _split_sequence()
    with pytest.raises(NotExact):
        totalize_ses(StructMap.zero(x, y), g)


def test_shifted_comodule() -> None:
    c = dual_coalgebra(exterior(QQ))
    n = cofree_comodule(c, GradedSpace.from_pairs([("v", 0)]))
    s = shift_comodule(n, 1)
    assert s.check().passed
    assert s.carrier.dims() == {d - 1: k for d, k in n.carrier.dims().items()}


def test_contramodules_translate_to_dual_modules_and_back() -> None:
    c = dual_coalgebra(truncated_polynomial(QQ, 2, 3))
    p = free_contramodule(c, GradedSpace.from_pairs([("v", 0), ("w", 1)]))
    m = to_dual_module(p)
    assert m.check().passed
    back = from_dual_module(c, m)
    assert back.check().passed
    assert all(back.contract_basis(x, q) == p.contract_basis(x, q) for x in c.labels for q in p.labels)


def test_dual_module_translation_needs_a_finite_coalgebra() -> None:
    b = bar(square_zero_pair(QQ, 1, 2), 3)
    with pytest.raises(NotFiniteDimensional):
        from_dual_module(b.coalgebra, trivial_module(exterior(QQ)))


def test_contratensor_with_a_free_contramodule_matches_a_brute_coequalizer() -> None:
    c = dual_coalgebra(truncated_polynomial(QQ, 2, 3))
    v = GradedSpace.from_pairs([("v", 0), ("w", 1)])
    p = free_contramodule(c, v)
    # C⊗Hom_k(C, P) ⇉ C⊗P: contraaction on one side, coaction then evaluation on the other
    src = GradedSpace.from_pairs([
        ((x, (e, q)), c.degree(x) + p.degree(q) - c.degree(e))
        for x in c.labels for e in c.labels for q in p.labels
    ])
    tgt = tensor_space(c.carrier, p.carrier)
    act: dict = {}
    ev: dict = {}
    for x, (e, q) in src.labels:
        act[(x, (e, q))] = {(x, r): val for r, val in p.contract_basis(e, q).items()}
        sign = -1 if (c.degree(e) * (p.degree(q) - c.degree(e))) % 2 else 1
        ev[(x, (e, q))] = {(x0, q): sign * val for (x0, x1), val in c.comult_basis(x).items() if x1 == e}
    pair = GradedMap.from_columns(src, tgt, 0, act, QQ) - GradedMap.from_columns(src, tgt, 0, ev, QQ)
    brute = subquotients(pair).cokernel.target
    image = phi(p)
    assert image.comodule.carrier.dims() == brute.dims()
    assert brute.dims() == tensor_space(c.carrier, v).dims()
    assert image.comodule.check().passed


def test_psi_of_a_cofree_comodule_is_hom_into_the_cogenerators() -> None:
    c = dual_coalgebra(truncated_polynomial(QQ, 2, 3))
    v = GradedSpace.from_pairs([("v", 0), ("w", 1)])
    image = psi(cofree_comodule(c, v))
    assert image.contramodule.carrier.dims() == hom_carrier(c, v).dims()
    assert image.contramodule.check().passed
    assert image.contramodule.carrier.dims() == free_contramodule(c, v).carrier.dims()


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_dual_module_translation_round_trips_on_random_duals(seed: int) -> None:
    rng = random.Random(seed)
    c = dual_coalgebra(random_algebra(QQ, rng, curved=False))
    v = GradedSpace.from_pairs([("v", rng.randint(-1, 1)), ("w", rng.randint(-1, 1))])
    p = free_contramodule(c, v)
    m = to_dual_module(p)
    assert m.check().passed
    back = from_dual_module(c, m)
    assert back.check().passed
    assert back.d.equals(p.d)
    assert all(back.contract_basis(x, q) == p.contract_basis(x, q) for x in c.labels for q in p.labels)
