from fractions import Fraction

import pytest
from hypothesis import given, settings

from siegelgk.corpus import exhaustive_forms
from siegelgk.forms import HalfIntMatrix, transform
from siegelgk.gk import gk_invariant
from siegelgk.oracle import (
    NOT_FOUND, density_at, density_bruteforce, equivalence_witness, gk_bruteforce, gk_search,
    gamma_factor, level_order, local_density, siegel_vs_density,
)
from siegelgk.padic_invariants import delta, ord_p

from conftest import forms

D = HalfIntMatrix.diagonal
HYP = HalfIntMatrix(2, [[0, 1], [1, 0]])


def test_bruteforce_examples():
    assert gk_bruteforce(D(2, [1, 1]), "exhaustive", 4) == (0, 1)
    assert gk_bruteforce(HYP, "exhaustive", 4) == (0, 0)
    assert gk_bruteforce(D(3, [1, 3, 9]), "randomized") == (0, 1, 2)


def test_certification_flag():
    r = gk_search(D(2, [1, 8]), "exhaustive", 3)
    assert not r.certified
    r = gk_search(D(2, [1, 8]))
    assert r.certified and r.gk == gk_invariant(D(2, [1, 8]))


@pytest.mark.parametrize("p", [2, 3])
def test_exhaustive_n2_grid(p):
    for u in ([1, 3, 5, 7] if p == 2 else [1, 2]):
        for e1 in range(3):
            for e2 in range(e1, 3):
                for off in (0, 1, p, p * p):
                    B = HalfIntMatrix(p, [[2 * p ** e1, off], [off, 2 * u * p ** e2]])
                    if not B.nondegenerate:
                        continue
                    r = gk_search(B)
                    assert r.certified
                    assert r.gk == gk_invariant(B)
                    assert sum(r.gk) == delta(B)


def test_exhaustive_corpus_p3():
    for B in exhaustive_forms(3):
        if B.n != 2:
            continue
        r = gk_search(B)
        assert r.certified and r.gk == gk_invariant(B) and sum(r.gk) == delta(B), B


@settings(max_examples=15)
@given(forms(primes=(3, 5), max_n=3, max_ord=2))
def test_randomized_never_exceeds_formula(B):
    r = gk_search(B, "randomized", restarts=8)
    assert r.gk <= gk_invariant(B)


@pytest.mark.parametrize("B, a, want", [
    (HalfIntMatrix(3, [[2]]), 3, Fraction(2, 3)),
    (HalfIntMatrix(3, [[6]]), 3, Fraction(4, 3)),
    (HalfIntMatrix(2, [[2]]), 4, Fraction(1, 2)),
])
def test_density_hand_counts(B, a, want):
    rep = local_density(B, 1, a)
    assert rep.alpha == want and rep.stabilized


@pytest.mark.parametrize("B, k, a", [
    (HalfIntMatrix(2, [[2]]), 1, 3),
    (HalfIntMatrix(2, [[4]]), 2, 2),
    (HalfIntMatrix(3, [[6]]), 1, 2),
    (D(2, [1, 3]), 1, 2),
    (HYP, 1, 2),
    (D(3, [1, 1]), 1, 1),
])
def test_character_sum_matches_enumeration(B, k, a):
    assert density_at(B, k, a) == density_bruteforce(B, k, a)


def test_density_predictions():
    assert siegel_vs_density(HalfIntMatrix(3, [[2]]), 1).predicted == Fraction(2, 3)
    assert siegel_vs_density(HalfIntMatrix(3, [[6]]), 1).predicted == Fraction(4, 3)
    rep = siegel_vs_density(D(3, [1, 3]), 2)
    t = Fraction(1, 9)
    assert rep.predicted == (1 - t) * (1 - 9 * t * t)
    assert rep.match


def test_vanishing_gamma():
    B = D(2, [1, 3])
    assert gamma_factor(B, Fraction(1, 2)) == 0
    rep = siegel_vs_density(B, 1)
    assert rep.alpha == 0 and rep.match


@pytest.mark.parametrize("B", [HalfIntMatrix(3, [[2]]), D(3, [1, 3]), HYP, D(2, [1, 2])])
def test_density_stabilizes_past_det_order(B):
    a = ord_p(Fraction(B.det()) * 2 ** B.n, B.p) + 2
    assert local_density(B, 1, a).stabilized


@settings(max_examples=25)
@given(forms(primes=(2, 3), max_n=3, max_ord=3))
def test_level_order_bounds(B):
    e = level_order(B)
    two_det = ord_p(Fraction(B.det()) * 2 ** B.n, B.p)
    assert 0 <= e <= two_det + (B.p == 2)
    # p^e (2B)^-1 is integral
    assert level_order(HalfIntMatrix(B.p, [[x * B.p for x in r] for r in B.twiceB])) == e + 1


@pytest.mark.parametrize("twice", [[[2, 6], [6, 2]], [[2, 14], [14, 2]], [[2, 6], [6, 10]]])
def test_density_no_early_plateau(twice):
    # these plateau for two steps below the level before moving
    B = HalfIntMatrix(2, twice)
    rep = local_density(B, 1)
    assert rep.a > level_order(B)
    assert density_at(B, 1, rep.a + 2) == rep.alpha
    assert siegel_vs_density(B, 1).match


@pytest.mark.parametrize("B", [
    D(3, [1, 1, 1]), D(3, [1, 1, 2]), HalfIntMatrix(3, [[2, 1, 0], [1, 2, 1], [0, 1, 4]]),
])
def test_rank_three_spot_checks(B):
    assert siegel_vs_density(B, 1).alpha == 0
    rep = siegel_vs_density(B, 2)
    assert rep.stabilized and rep.match and rep.alpha == Fraction(64, 81)


def test_equivalence_examples():
    B = D(2, [1, 3])
    assert equivalence_witness(B, B, 3) == [[1, 0], [0, 1]]
    W = equivalence_witness(D(2, [1, 7]), D(2, [7, 1]), 4)
    assert W == [[0, 1], [1, 0]]
    W = equivalence_witness(D(2, [1, 1]), D(2, [5, 5]), 4)
    assert isinstance(W, list)
    assert equivalence_witness(D(2, [1, 1]), D(2, [1, 3]), 4) == NOT_FOUND


def test_equivalence_finds_conjugates():
    B = D(3, [1, 2, 6])
    U = [[1, 1, 0], [0, 1, 1], [1, 0, 1]]
    C = transform(B, U)
    assert isinstance(equivalence_witness(B, C, 3), list)
