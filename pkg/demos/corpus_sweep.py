"""Sweep the deterministic corpus and tabulate how the checks come out."""
import time
from collections import Counter

from siegelgk import egk_datum, gk_invariant, naive_egk, siegel_series, upsilon
from siegelgk.corpus import generate_corpus
from siegelgk.gk import has_sign_freedom
from siegelgk.padic_invariants import delta

forms = generate_corpus()
t = time.perf_counter()
by_prime = Counter()
bad = []
free = 0
for B in forms:
    by_prime[B.p, B.n] += 1
    if sum(gk_invariant(B)) != delta(B) or upsilon(naive_egk(B)) != egk_datum(B):
        bad.append(B)
    free += has_sign_freedom(B)
    siegel_series(B)
print(len(forms), "forms in", f"{time.perf_counter() - t:.1f}s")
for (p, n), c in sorted(by_prime.items()):
    print(f"  p={p} n={n}: {c}")
print("forms with a free sign:", free)
print("failures:", len(bad))
