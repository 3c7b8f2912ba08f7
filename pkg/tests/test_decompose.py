import pytest
from hypothesis import given

from siegelgk.corpus import diagonal_forms, plane_unit_forms
from siegelgk.decompose import (
    H, PAIR, UNIT, Y, Block, decompose, diagonalize_odd, jordan_2adic, weak_canonical,
    weak_canonical_violation,
)
from siegelgk._linalg import congruence
from siegelgk.forms import HalfIntMatrix, is_unimodular
from siegelgk.oracle import equivalence_witness
from siegelgk.padic_invariants import eta, ord_p, xi

from conftest import forms

D = HalfIntMatrix.diagonal


def test_diagonalize_odd_examples():
    assert diagonalize_odd(D(3, [1, 3, 9])).blocks == [Block(0, UNIT, (1,)), Block(1, UNIT, (1,)), Block(2, UNIT, (1,))]
    assert diagonalize_odd(HalfIntMatrix(5, [[4]])).blocks == [Block(0, UNIT, (2,))]


def test_diagonalize_odd_hyperbolic():
    dec = diagonalize_odd(HalfIntMatrix(3, [[0, 2], [2, 0]]))
    assert [b.k for b in dec.blocks] == [0, 0]
    assert all(b.core == UNIT for b in dec.blocks)
    u1, u2 = (b.units[0] for b in dec.blocks)
    # u2 = -u1 times a square: -u1 u2 is a square mod 3
    assert (-u1 * u2) % 3 == 1
    assert dec.verify()


def test_jordan_examples():
    assert jordan_2adic(HalfIntMatrix(2, [[0, 1], [1, 0]])).blocks == [Block(0, H)]
    assert jordan_2adic(D(2, [1, 2, 4])).blocks == [Block(0, UNIT, (1,)), Block(1, UNIT, (1,)), Block(2, UNIT, (1,))]
    assert jordan_2adic(HalfIntMatrix(2, [[4, 2], [2, 4]])).blocks == [Block(1, Y)]


def test_weak_canonical_examples():
    assert weak_canonical(D(2, [1, 3])).blocks == [Block(0, PAIR, (1, 3))]
    for entries in ([1, 1, 1], [1, 1, 1, 1]):
        B = D(2, entries)
        dec = weak_canonical(B)
        assert weak_canonical_violation(dec.blocks) is None
        C = dec.assembled()
        assert is_witness(B, C, equivalence_witness(B, C, 4), 4)


def is_witness(B, C, W, a):
    if not isinstance(W, list) or not is_unimodular(W, B.p):
        return False
    mod = B.p ** a
    lhs = congruence(B.twiceB, W)
    return all((x - y) % mod == 0 for r1, r2 in zip(lhs, C.twiceB) for x, y in zip(r1, r2))


def _check_output(B, dec):
    C = dec.assembled()
    assert dec.verify(B)
    assert xi(C) == xi(B) and eta(C) == eta(B)
    assert ord_p(C.det(), B.p) == ord_p(B.det(), B.p)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_diagonal_corpus_round_trip(p):
    for B in diagonal_forms(p):
        _check_output(B, decompose(B))


def test_weak_canonical_predicate_on_plane_unit_corpus():
    for B in plane_unit_forms() + diagonal_forms(2):
        dec = weak_canonical(B)
        assert weak_canonical_violation(dec.blocks) is None, B
        _check_output(B, dec)


def test_witness_search_confirms_small_outputs():
    for B in plane_unit_forms() + diagonal_forms(2):
        if B.n > 3:
            continue
        C = weak_canonical(B).assembled()
        assert is_witness(B, C, equivalence_witness(B, C, 4), 4), B


@given(forms())
def test_decompose_random(B):
    dec = decompose(B)
    _check_output(B, dec)
    if B.p == 2:
        assert weak_canonical_violation(dec.blocks) is None
