import itertools

import pytest
from hypothesis import given, strategies as st

from siegelgk._linalg import matmul
from siegelgk.forms import HalfIntMatrix, direct_sum, in_S, lex_max_S, principal_submatrix, transform
from siegelgk.gk import gk_invariant
from siegelgk.padic_invariants import delta

from conftest import form_and_unimodular, forms, unimodular

D = HalfIntMatrix.diagonal


def test_transform_examples():
    assert transform(D(3, [1, 3]), [[1, 0], [0, 1]]) == D(3, [1, 3])
    assert transform(D(3, [1, 3]), [[0, 1], [1, 0]]) == D(3, [3, 1])
    assert transform(D(2, [1, 1]), [[1, 1], [0, 1]]).twiceB == ((2, 2), (2, 4))


def test_transform_rejects_non_unimodular():
    with pytest.raises(ValueError):
        transform(D(2, [1, 1]), [[2, 0], [0, 1]])


def test_direct_sum_examples():
    assert direct_sum(HalfIntMatrix(3, [[2]]), HalfIntMatrix(3, [[6]])) == D(3, [1, 3])
    B = D(2, [1, 3])
    assert direct_sum(HalfIntMatrix.empty(2), B) == B
    S = direct_sum(HalfIntMatrix(2, [[2]]), HalfIntMatrix(2, [[0, 1], [1, 0]]))
    assert S.n == 3 and S.twiceB == ((2, 0, 0), (0, 0, 1), (0, 1, 0))


def test_principal_submatrix():
    B = D(2, [1, 2, 4])
    assert principal_submatrix(B, 2) == D(2, [1, 2])
    assert principal_submatrix(B, 3) == B
    assert principal_submatrix(B, 0).n == 0


def test_half_integral_validation():
    with pytest.raises(ValueError):
        HalfIntMatrix(2, [[1]])
    with pytest.raises(ValueError):
        HalfIntMatrix(2, [[2, 1], [0, 2]])
    with pytest.raises(ValueError):
        HalfIntMatrix(4, [[2]])


def test_lex_max_examples():
    assert lex_max_S(D(3, [1, 3])) == (0, 1)
    assert lex_max_S(HalfIntMatrix(2, [[0, 1], [1, 0]])) == (0, 0)
    assert lex_max_S(D(3, [9, 3])) == (1, 1)


def _lex_max_by_enumeration(B, bound=8):
    best = None
    for a in itertools.product(range(bound), repeat=B.n):
        if in_S(B, a) and (best is None or a > best):
            best = a
    return best


@given(forms(max_n=3, max_ord=2))
def test_lex_max_matches_enumeration(B):
    a = lex_max_S(B)
    assert in_S(B, a)
    assert a == _lex_max_by_enumeration(B)


@given(form_and_unimodular(max_n=3))
def test_lex_max_bounded_by_gk(data):
    B, U = data
    a = lex_max_S(transform(B, U))
    assert a <= gk_invariant(B)
    assert sum(a) <= delta(B)


@given(forms(max_n=3), st.data())
def test_transform_composes(B, data):
    U = data.draw(unimodular(B.n, B.p))
    V = data.draw(unimodular(B.n, B.p))
    assert transform(transform(B, U), V) == transform(B, matmul(U, V))
