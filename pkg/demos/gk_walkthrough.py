"""Gross-Keating invariants of a few small forms, computed two ways."""
from siegelgk import HalfIntMatrix, decompose, direct_sum, egk_datum, gk_invariant, naive_egk, preoptimal_form
from siegelgk.oracle import gk_search
from siegelgk.padic_invariants import delta

hyp = HalfIntMatrix(2, [[0, 1], [1, 0]])
forms = {
    "diag(1,3,9) at 3": HalfIntMatrix.diagonal(3, [1, 3, 9]),
    "H + 2H at 2": direct_sum(hyp, HalfIntMatrix(2, [[0, 2], [2, 0]])),
    "[[1,1/2],[1/2,4]] at 2": HalfIntMatrix(2, [[2, 1], [1, 8]]),
    "diag(1,8) at 2": HalfIntMatrix.diagonal(2, [1, 8]),
}

for name, B in forms.items():
    print(name)
    print("  blocks:      ", [b.to_json() for b in decompose(B).blocks])
    print("  pre-optimal: ", [b.to_json() for b in preoptimal_form(B).blocks])
    a = gk_invariant(B)
    print("  GK:          ", a, "sum", sum(a), "Delta", delta(B))
    print("  EGK:         ", egk_datum(B))
    print("  naive EGK:   ", naive_egk(B))
    if B.n <= 2:
        r = gk_search(B)
        print("  search:      ", r.gk, "certified" if r.certified else "lower bound", "M =", r.M)
