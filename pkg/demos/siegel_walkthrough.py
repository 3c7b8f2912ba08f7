"""Siegel series from the naive EGK recursion and from the block recursion."""
from siegelgk import HalfIntMatrix, direct_sum, f_block_recursion, naive_egk, siegel_series
from siegelgk.oracle import siegel_vs_density


def show(F):
    # coefficients live in Q[q]/(q^4 - p); print the nonzero q-powers
    out = []
    for t in F.to_json()["terms"]:
        c = " + ".join(f"{v}*{k}" if k != "q0" else v for k, v in t["coeff"].items() if v != "0")
        out.append(f"({c}) x^{t['x_exp']}")
    return " + ".join(out)


for a in range(4):
    B = HalfIntMatrix(3, [[2 * 3 ** a]])
    print(f"(3^{a}) at 3:", show(siegel_series(B)))

hyp = HalfIntMatrix(2, [[0, 1], [1, 0]])
B = direct_sum(hyp, HalfIntMatrix(2, [[0, 2], [2, 0]]))
print("naive EGK of H + 2H:", naive_egk(B))
F = siegel_series(B)
print("series:", show(F))
print("block recursion agrees:", f_block_recursion(B) == F)

# evaluation against counted representations by k hyperbolic planes
for B, k in [(HalfIntMatrix(3, [[2]]), 1), (HalfIntMatrix(3, [[6]]), 1),
             (HalfIntMatrix.diagonal(3, [1, 3]), 1), (HalfIntMatrix(2, [[2, 1], [1, 2]]), 2)]:
    rep = siegel_vs_density(B, k)
    print(B.twiceB, "k =", k, "alpha", rep.alpha, "predicted", rep.predicted, "at a =", rep.a, "match", rep.match)
