"""Deterministic corpora of forms for sweeps and acceptance runs."""
import itertools
import random

from ._linalg import det
from .forms import HalfIntMatrix, direct_sum, transform

DEFAULT_SEED = 20240519

H_TWICE = ((0, 1), (1, 0))
Y_TWICE = ((2, 1), (1, 2))


def unit_classes(p):
    """Representatives of unit square classes: 1,3,5,7 at p = 2, else 1 and a nonresidue."""
    return [1, 3, 5, 7] if p == 2 else [1, _least_nonresidue(p)]


def _least_nonresidue(p):
    return next(x for x in range(2, p) if pow(x, (p - 1) // 2, p) == p - 1)


def diagonal_forms(p, max_n=3, max_ord=3):
    """All diag(u_i p^{e_i}) up to reordering, orders <= max_ord."""
    atoms = [u * p ** e for e in range(max_ord + 1) for u in unit_classes(p)]
    out = []
    for n in range(1, max_n + 1):
        for combo in itertools.combinations_with_replacement(atoms, n):
            out.append(HalfIntMatrix.diagonal(p, list(combo)))
    return out


def plane(k, kind):
    tw = H_TWICE if kind == "H" else Y_TWICE
    return HalfIntMatrix(2, [[x * 2 ** k for x in row] for row in tw])


def plane_unit_forms(max_scale=3, max_n=4):
    """2-adic direct sums containing at least one even plane, scales <= max_scale."""
    planes = [(k, t) for k in range(max_scale + 1) for t in ("H", "Y")]
    units = [(k, u) for k in range(max_scale + 1) for u in (1, 3, 5, 7)]
    out = []
    for np_ in (1, 2):
        for ps in itertools.combinations_with_replacement(planes, np_):
            room = max_n - 2 * np_
            for nu in range(room + 1):
                for us in itertools.combinations_with_replacement(units, nu):
                    parts = [plane(k, t) for k, t in ps] + [HalfIntMatrix(2, [[2 * u * 2 ** k]]) for k, u in us]
                    out.append(direct_sum(*parts))
    return out


def random_unimodular(n, p, rng, spread=2):
    while True:
        U = [[rng.randint(-spread, spread) for _ in range(n)] for _ in range(n)]
        if det(U) % p:
            return U


def random_dense_forms(p, count, rng, max_n=4, max_ord=3):
    out = []
    while len(out) < count:
        n = rng.randint(2, max_n)
        tw = [[0] * n for _ in range(n)]
        for i in range(n):
            tw[i][i] = 2 * rng.choice(unit_classes(p)) * p ** rng.randint(0, max_ord)
            for j in range(i + 1, n):
                tw[i][j] = tw[j][i] = rng.choice([0, 1, -1, 3]) * p ** rng.randint(0, max_ord)
        B = HalfIntMatrix(p, tw)
        if B.nondegenerate:
            out.append(transform(B, random_unimodular(n, p, rng)))
    return out


def generate_corpus(seed=DEFAULT_SEED, random_per_prime=120):
    """The deterministic sweep corpus: diagonal, plane/unit and random dense forms."""
    rng = random.Random(seed)
    out = []
    for p in (2, 3, 5):
        out += diagonal_forms(p)
    out += plane_unit_forms()
    for p in (2, 3, 5):
        out += random_dense_forms(p, random_per_prime, rng)
    return out


def exhaustive_forms(p, max_n=2, max_ord=3):
    """All forms whose 2B entries have order <= max_ord (off-diagonal entries may vanish).

    Units run over the classes of ``unit_classes`` for diagonal entries and
    over all units below p^3 for off-diagonal entries, giving a finite grid.
    """
    units = unit_classes(p)
    diag = [2 * u * p ** e for e in range(max_ord + 1) for u in units if ord_two_ok(p, e, max_ord)]
    off_units = [u for u in range(1, 8 if p == 2 else p) if u % p]
    off = [0] + [u * p ** e for e in range(max_ord + 1) for u in off_units]
    out = []
    for n in range(1, max_n + 1):
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        for ds in itertools.product(diag, repeat=n):
            for os_ in itertools.product(off, repeat=len(pairs)):
                tw = [[0] * n for _ in range(n)]
                for i in range(n):
                    tw[i][i] = ds[i]
                for (i, j), v in zip(pairs, os_):
                    tw[i][j] = tw[j][i] = v
                B = HalfIntMatrix(p, tw)
                if B.nondegenerate:
                    out.append(B)
    return out


def ord_two_ok(p, e, max_ord):
    """Diagonal entries of 2B: at p = 2 the factor 2 already contributes one order."""
    return e + (1 if p == 2 else 0) <= max_ord


def density_forms(p, max_ord=2):
    """n <= 2 forms with 2B entries of order <= max_ord, one per reordering."""
    out = []
    seen = set()
    for B in exhaustive_forms(p, 2, max_ord):
        key = B.twiceB if B.n == 1 else tuple(sorted([B.twiceB[0][0], B.twiceB[1][1]]) + [abs(B.twiceB[0][1])])
        if key in seen:
            continue
        seen.add(key)
        out.append(B)
    return out


def _reduced_candidate(p, a, sigma, u):
    n = len(a)
    tw = [[0] * n for _ in range(n)]
    for i in range(n):
        j = sigma[i] - 1
        if j == i:
            tw[i][i] = 2 * u * p ** a[i]
            continue
        if (a[i] + a[j]) % 2:
            return None
        tw[i][j] = p ** ((a[i] + a[j]) // 2)
        if a[i] < a[j]:
            tw[i][i] = 2 * p ** a[i]
        elif a[i] > a[j]:
            tw[i][i] = 2 * p ** (a[i] + 1)
    return HalfIntMatrix(p, tw)


def reduced_form_fixtures(primes=(2, 3), max_n=4, max_a=3):
    """(B, a, sigma) triples passing is_reduced_form.

    For each non-decreasing a and admissible sigma: fixed points carry
    u p^{a_i} on the diagonal, paired indices carry p^{(a_i+a_j)/2} off the
    diagonal, and the smaller member of an unequal pair has diagonal order a_i.
    """
    from .gk import admissible_involutions, is_reduced_form

    out = []
    for p in primes:
        for n in range(1, max_n + 1):
            for a in itertools.combinations_with_replacement(range(max_a + 1), n):
                for sigma in admissible_involutions(a):
                    for u in unit_classes(p)[:2]:
                        B = _reduced_candidate(p, a, sigma, u)
                        if B is None or not B.nondegenerate:
                            continue
                        if is_reduced_form(B, a, sigma) is None:
                            out.append((B, a, sigma))
    return out
