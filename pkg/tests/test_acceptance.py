"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
Run directly with ``python3 tests/test_acceptance.py``.
"""
import json
import random
import sys
import time
from fractions import Fraction

import pytest

from siegelgk.corpus import (
    density_forms, diagonal_forms, exhaustive_forms, random_unimodular, reduced_form_fixtures, unit_classes,
)
from siegelgk.decompose import H, UNIT, Block, assemble
from siegelgk.forms import HalfIntMatrix, direct_sum, transform
from siegelgk.gk import (
    egk_datum, gk_invariant, has_sign_freedom, is_reduced_form, naive_completions, naive_egk, upsilon,
    validate_egk, validate_naive_egk,
)
from siegelgk.oracle import gk_search, siegel_vs_density
from siegelgk.padic_invariants import delta
from siegelgk.preoptimal import preoptimal_form
from siegelgk.siegel import AlgebraicLaurent, f_block_recursion, f_naive, siegel_series

from conftest import ACCEPTANCE, corpus


class Criterion:
    def __init__(self, num, title, limit=None):
        self.num, self.title, self.limit = num, title, limit
        self.failures = []

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def fail(self, what):
        self.failures.append(what)

    def __exit__(self, exc_type, exc, tb):
        self.elapsed = time.perf_counter() - self.start
        if exc_type is not None:
            self.failures.append(f"{exc_type.__name__}: {exc}")
        if self.limit is not None and self.elapsed >= self.limit:
            self.failures.append(f"runtime {self.elapsed:.1f}s over {self.limit}s")
        status = "FAIL" if self.failures else "PASS"
        line = f"{status} criterion {self.num:>2} {self.title} ({self.elapsed:.1f}s)"
        if self.failures:
            line += f": {len(self.failures)} failure(s), first {self.failures[0]}"
        ACCEPTANCE[self.num] = line
        print(line)
        if exc_type is None:
            assert not self.failures, line
        return False


def test_rank_one_series():
    with Criterion(1, "rank-one Siegel series", limit=1.0) as c:
        for p in (2, 3, 5):
            for u in unit_classes(p):
                for a in range(7):
                    got = siegel_series(HalfIntMatrix(p, [[2 * u * p ** a]]))
                    want = AlgebraicLaurent.from_ints(p, {e: 1 for e in range(-a, a + 1, 2)})
                    if got != want:
                        c.fail((p, u, a))


def test_gk_sums_to_delta():
    forms = corpus()
    assert len(forms) >= 2000
    assert {B.p for B in forms} == {2, 3, 5} and max(B.n for B in forms) == 4
    with Criterion(2, "|GK| = Delta over the corpus", limit=30.0) as c:
        for B in forms:
            if sum(gk_invariant(B)) != delta(B):
                c.fail(B)


def test_gk_matches_search():
    exhaustive = [B for B in exhaustive_forms(2) if B.n == 2]
    randomized = [B for B in diagonal_forms(3) if B.n == 3]
    assert len(randomized) >= 100
    with Criterion(3, "GK equals brute-force search", limit=600.0) as c:
        for B in exhaustive:
            if gk_search(B, "exhaustive", 4).gk != gk_invariant(B):
                c.fail(B)
        for B in randomized:
            if gk_search(B, "randomized").gk != gk_invariant(B):
                c.fail(B)


def test_class_invariance():
    forms = corpus()
    picks = forms[:: len(forms) // 50][:50]
    rng = random.Random(7)
    with Criterion(4, "class invariance of gk/egk/siegel", limit=300.0) as c:
        for B in picks:
            ref = (gk_invariant(B), egk_datum(B), siegel_series(B))
            for _ in range(200):
                C = transform(B, random_unimodular(B.n, B.p, rng))
                if (gk_invariant(C), egk_datum(C), siegel_series(C)) != ref:
                    c.fail(B)
                    break


def test_egk_consistency():
    with Criterion(5, "EGK and naive EGK consistency") as c:
        for B in corpus():
            G, Hn = egk_datum(B), naive_egk(B)
            if validate_egk(G) or validate_naive_egk(Hn) or upsilon(Hn) != G:
                c.fail(B)


def test_example_fixtures():
    HYP = HalfIntMatrix(2, [[0, 1], [1, 0]])
    with Criterion(6, "worked example fixtures") as c:
        B = direct_sum(HYP, HalfIntMatrix(2, [[0, 2], [2, 0]]))
        got = json.dumps(naive_egk(B).to_json(), sort_keys=True)
        want = json.dumps({"a": [0, 0, 1, 1], "eps": [1, 1, 1, 1]}, sort_keys=True)
        if got != want:
            c.fail(("naive", got))
        shape = [Block(0, UNIT, (1,)), Block(2, UNIT, (3,)), Block(3, H)]
        P = preoptimal_form(assemble(shape, 2))
        got = json.dumps([b.to_json() for b in P.blocks])
        want = json.dumps([b.to_json() for b in (shape[0], shape[2], shape[1])])
        if got != want:
            c.fail(("reorder", got))


def test_sign_and_datum_independence():
    forms = corpus()
    with Criterion(7, "free signs and naive completions") as c:
        free = [B for B in forms if has_sign_freedom(B)]
        if not free:
            c.fail("no form with a free sign")
        for B in free:
            if f_naive(naive_egk(B, 1), B.p) != f_naive(naive_egk(B, -1), B.p):
                c.fail(("sign", B))
        seen = {}
        for B in forms:
            seen.setdefault((B.p, egk_datum(B)), B)
        data = list(seen)[:: max(1, len(seen) // 50)][:50]
        assert len(data) == 50
        for p, G in data:
            if len({f_naive(Hn, p) for Hn in naive_completions(G)}) != 1:
                c.fail(("completion", p, G))


def test_block_recursion():
    forms = [B for B in corpus() if B.p == 2 and B.n <= 4]
    with Criterion(8, "block recursion equals Siegel series") as c:
        for B in forms:
            if f_block_recursion(B) != siegel_series(B):
                c.fail(B)


def test_density_identity():
    anchors = [
        (HalfIntMatrix(3, [[2]]), Fraction(2, 3)),
        (HalfIntMatrix(3, [[6]]), Fraction(4, 3)),
        (HalfIntMatrix(2, [[2]]), Fraction(1, 2)),
        (HalfIntMatrix.diagonal(3, [1, 3]), Fraction(0)),
    ]
    with Criterion(9, "local density identity", limit=600.0) as c:
        for B, want in anchors:
            rep = siegel_vs_density(B, 1)
            if not (rep.match and rep.stabilized and rep.alpha == want):
                c.fail(("anchor", B, rep.alpha))
        for p in (2, 3):
            for B in density_forms(p, 2):
                for k in (1, 2):
                    rep = siegel_vs_density(B, k)
                    if not (rep.match and rep.stabilized):
                        c.fail((B, k))


def test_reduced_forms():
    fixtures = reduced_form_fixtures()
    assert len(fixtures) >= 20
    with Criterion(10, "reduced forms read off GK") as c:
        for B, a, sigma in fixtures:
            if is_reduced_form(B, a, sigma) is not None or gk_invariant(B) != a:
                c.fail((B, a, sigma))


def test_exact_division(monkeypatch):
    remainders = []
    calls = [0]
    original = AlgebraicLaurent.divmod_exact

    def recording(self, den):
        q, r = original(self, den)
        calls[0] += 1
        if not r.is_zero():
            remainders.append(r)
        return q, r

    monkeypatch.setattr(AlgebraicLaurent, "divmod_exact", recording)
    with Criterion(11, "exact division in both recursions") as c:
        for B in corpus():
            f_naive(naive_egk(B), B.p)
            if B.p == 2:
                f_block_recursion(B)
        if not calls[0]:
            c.fail("no divisions observed")
        for r in remainders:
            c.fail(r)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
