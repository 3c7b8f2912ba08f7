"""Brute-force certification.

* ``gk_bruteforce``: the greatest element of S({B}) searched over GL_n(Z/p^M).
* ``local_density``: representation counts of B by k hyperbolic planes.
* ``siegel_vs_density``: the counted density against the series prediction.
* ``equivalence_witness``: search for U with B[U] = B' mod p^a.
* ``hilbert_by_search``: the Hilbert symbol from primitive solutions.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import itertools
import random

import numpy as np

from .forms import HalfIntMatrix
from .padic_invariants import INFINITY, ord_p, unit_part, xi

BUDGET = 2 ** 26


class BudgetExceeded(RuntimeError):
    pass


def _ord_cap(x, p, cap):
    """Elementwise p-adic order of an integer array, capped at ``cap``."""
    x = np.asarray(x, dtype=np.int64)
    v = np.zeros(x.shape, dtype=np.int64)
    m = 1
    for _ in range(cap):
        m *= p
        v += (x % m == 0)
    return v


def _ord_exact(x, p, zero):
    """Elementwise exact p-adic order of an integer array; zero entries get ``zero``."""
    x = np.asarray(x, dtype=np.int64)
    v = np.zeros(x.shape, dtype=np.int64)
    z = x == 0
    y = np.where(z, 1, x)
    while True:
        m = y % p == 0
        if not m.any():
            break
        v += m
        y = np.where(m, y // p, y)
    return np.where(z, zero, v)


def _order_ceiling(B):
    """An order no GK entry of B reaches: every entry is at most Delta <= ord det 2B + 1."""
    from ._linalg import det

    return ord_p(det(B.twiceB), B.p) + 2


def _all_vectors(p, M, n):
    r = np.arange(p ** M, dtype=np.int64)
    grids = np.meshgrid(*([r] * n), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _lex_max_arrays(d, o, n):
    """Vectorized greedy maximum of S for arrays of capped orders."""
    a = []
    for k in range(n):
        cap = None
        for j in range(k, n):
            terms = [d[j]] + [o[j][i] for i in range(j + 1, n)] + [2 * o[i][j] - a[i] for i in range(k)]
            for t in terms:
                cap = t if cap is None else np.minimum(cap, t)
        a.append(cap)
    return a


def _lex_key(a, base):
    key = np.zeros_like(a[0])
    for x in a:
        key = key * base + x
    return key


def _projective_reps(p, M, n):
    """One primitive vector mod p^M per line: leading unit coordinate scaled to 1."""
    out = []
    mod = p ** M
    for lead in range(n):
        before = itertools.product(range(0, mod, p), repeat=lead)
        for head in before:
            for tail in itertools.product(range(mod), repeat=n - lead - 1):
                out.append(list(head) + [1] + list(tail))
    return np.array(out, dtype=np.int64)


def _exhaustive_steps(p, M, n):
    lines = sum(p ** (M * (n - 1 - lead)) * p ** ((M - 1) * lead) for lead in range(n))
    return lines ** n


def _exhaustive(B, M):
    """Every column of U runs over primitive vectors up to unit scaling.

    Scaling a column by a unit leaves every order in S(B[U]) unchanged, so
    this covers GL_n(Z/p^M).  Orders are taken exactly on the integer lifts,
    which lie in GL_n(Z_p), so the result is always a lower bound for GK(B).
    """
    p, n = B.p, B.n
    Z = _order_ceiling(B)
    steps = _exhaustive_steps(p, M, n)
    if steps > BUDGET:
        feasible = [m for m in range(1, M) if _exhaustive_steps(p, m, n) <= BUDGET]
        raise BudgetExceeded(
            f"exhaustive search needs {steps} steps > 2^26; feasible M <= {max(feasible) if feasible else 0}")
    S = np.array(B.twiceB, dtype=np.int64)
    R = _projective_reps(p, M, n)
    # q(v) = v^T (2B) v / 2 is taken before reduction so the halving is exact
    dv = _ord_exact(np.einsum("ij,jk,ik->i", R, S, R) // 2, p, Z)
    if n == 1:
        return (int(dv[0]),)
    SR = R @ S
    Rp = R % p
    L = len(R)
    base = Z + 1
    best = None
    for head in itertools.product(range(L), repeat=n - 1):
        cols = [Rp[c] for c in head]
        mats = np.stack([np.broadcast_to(c, (L, n)) for c in cols] + [Rp], axis=2)
        det = np.rint(np.linalg.det(mats.astype(float))).astype(np.int64) % p
        ok = det != 0
        m = int(ok.sum())
        if not m:
            continue
        rows = [_ord_exact(SR @ R[c], p, Z) for c in head]
        d = [np.full(m, dv[c]) for c in head] + [dv[ok]]
        o = [[None] * n for _ in range(n)]
        for x in range(n - 1):
            for y in range(x + 1, n - 1):
                o[x][y] = np.full(m, rows[x][head[y]])
            o[x][n - 1] = rows[x][ok]
        a = [np.minimum(v, Z) for v in _lex_max_arrays(d, o, n)]
        j = int(np.argmax(_lex_key(a, base)))
        cand = tuple(int(v[j]) for v in a)
        if best is None or cand > best:
            best = cand
    return best


def _int_det(U):
    n = len(U)
    if n == 1:
        return U[0][0]
    if n == 2:
        return U[0][0] * U[1][1] - U[0][1] * U[1][0]
    return sum((-1) ** c * U[0][c] * _int_det([row[:c] + row[c + 1:] for row in U[1:]]) for c in range(n) if U[0][c])


def _ord_capped(x, p, cap):
    if x == 0:
        return cap
    v = 0
    while x % p == 0 and v < cap:
        x //= p
        v += 1
    return v


class _ColumnCache:
    """Exact orders attached to integer columns of U, memoized per column."""

    def __init__(self, twiceB, p, cap):
        self.S, self.p, self.cap = twiceB, p, cap
        self.n = len(twiceB)
        self.sv = {}
        self.d = {}

    def image(self, v):
        r = self.sv.get(v)
        if r is None:
            r = tuple(sum(self.S[i][j] * v[j] for j in range(self.n)) for i in range(self.n))
            self.sv[v] = r
            q = sum(a * b for a, b in zip(v, r)) // 2
            self.d[v] = _ord_capped(q, self.p, self.cap)
        return r

    def value(self, cols):
        n, cap, p = self.n, self.cap, self.p
        imgs = [self.image(v) for v in cols]
        d = [self.d[v] for v in cols]
        o = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                o[i][j] = o[j][i] = _ord_capped(sum(a * b for a, b in zip(cols[i], imgs[j])), p, cap)
        a = []
        for k in range(n):
            top = cap
            for j in range(k, n):
                top = min(top, d[j], *[o[j][i] for i in range(j + 1, n)], *[2 * o[i][j] - a[i] for i in range(k)])
            a.append(top)
        return tuple(a)


def _randomized(B, M, restarts, seed):
    """Hill climbing on lex_max_S(B[U]) over integer U with entries below p^M.

    Moves: change one entry of U, swap two columns, or add a multiple of one
    column to another.  The first improving move is taken.
    """
    p, n = B.p, B.n
    mod = p ** M
    rng = random.Random(seed)
    cache = _ColumnCache(B.twiceB, p, _order_ceiling(B))

    def unimodular(cols):
        return _int_det([list(c) for c in cols]) % p != 0

    def moves(cols):
        for c in range(n):
            for r in range(n):
                for v in range(mod):
                    if v != cols[c][r]:
                        new = list(cols)
                        col = list(cols[c])
                        col[r] = v
                        new[c] = tuple(col)
                        yield new
            for c2 in range(n):
                if c2 == c:
                    continue
                new = list(cols)
                new[c], new[c2] = cols[c2], cols[c]
                yield new
                for t in range(1, p):
                    new = list(cols)
                    new[c] = tuple((x + t * y) % mod for x, y in zip(cols[c], cols[c2]))
                    yield new

    best = None
    for _ in range(restarts):
        while True:
            cols = [tuple(rng.randrange(mod) for _ in range(n)) for _ in range(n)]
            if unimodular(cols):
                break
        val = cache.value(cols)
        improved = True
        while improved:
            improved = False
            for new in moves(cols):
                w = cache.value(new)
                if w > val and unimodular(new):
                    cols, val, improved = new, w, True
                    break
        if best is None or val > best:
            best = val
    return best


@dataclass
class GKSearchResult:
    gk: tuple
    M: int
    mode: str
    certified: bool


def gk_search(B, mode="exhaustive", M=None, restarts=64, seed=None):
    """Search the greatest element of S({B}) over U with entries below p^M.

    Every result is a lower bound for GK(B).  An exhaustive result with all
    entries < M is certified exact: the same search with orders capped at M
    would already exceed any smaller value.  Without M the precision starts
    at 4 and grows until the result is certified.
    """
    B.require_nondegenerate()
    if mode not in ("exhaustive", "randomized"):
        raise ValueError(f"unknown mode {mode!r}")
    adaptive = M is None
    M = 4 if adaptive else M
    if seed is None:
        seed = hash((B.p, B.twiceB)) & 0xFFFFFFFF
    while True:
        if mode == "exhaustive":
            res = _exhaustive(B, M)
        else:
            res = _randomized(B, M, restarts, seed)
        cert = max(res) < M
        if cert or not adaptive:
            return GKSearchResult(res, M, mode, cert and mode == "exhaustive")
        M += 1


def gk_bruteforce(B, mode="exhaustive", M=None, restarts=64, seed=None):
    return gk_search(B, mode, M, restarts, seed).gk


# -- local densities -----------------------------------------------------------

def _sym_entries(n):
    return [(i, j) for i in range(n) for j in range(i, n)]


def _kernel_log(S_entries, n, p, a):
    """log_p of #ker(S) on (Z/p^a)^n for arrays of symmetric entries."""
    # a nonzero j x j minor of entries below p^a has order < j*a + log_p(j!),
    # so reaching ``cap`` means the minor vanishes
    cap = 2 * n * a + 2
    M = [[None] * n for _ in range(n)]
    for (i, j), arr in zip(_sym_entries(n), S_entries):
        M[i][j] = M[j][i] = arr
    d_prev = np.zeros_like(S_entries[0])
    total = 0
    for size in range(1, n + 1):
        dj = None
        for rows in itertools.combinations(range(n), size):
            for cols in itertools.combinations(range(n), size):
                sub = [[M[r][c] for c in cols] for r in rows]
                mnr = _det_arrays(sub)
                v = _ord_cap(mnr, p, cap)
                dj = v if dj is None else np.minimum(dj, v)
        e = np.where(d_prev >= cap, a, np.minimum(dj - d_prev, a))
        total = total + e
        d_prev = dj
    return total


def _det_arrays(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    out = 0
    for c in range(n):
        minor = [row[:c] + row[c + 1:] for row in m[1:]]
        out = out + (-1) ** c * m[0][c] * _det_arrays(minor)
    return out


CHUNK = 2 ** 20


def _trace_solutions(B, a):
    """Symmetric S mod p^a (as entry arrays) with tr(SB) = 0 mod p^(a-1).

    tr(SB) is linear in the entries of S.  The entry whose coefficient has
    the least order v is solved for, so only the solutions are enumerated:
    about p^(a(m-1) + v + 1) matrices instead of p^(am).  Large enumerations
    are yielded in chunks, one per value of a leading free entry.
    """
    p, n = B.p, B.n
    mod = p ** a
    ent = _sym_entries(n)
    m = len(ent)
    # tr(SB) = sum_i s_ii b_ii + sum_{i<j} s_ij (2 b_ij)
    coefs = [(B.twiceB[i][j] // 2 if i == j else B.twiceB[i][j]) % mod for i, j in ent]
    orders = [ord_p(c, p) if c else a for c in coefs]
    star = min(range(m), key=lambda e: orders[e])
    v = orders[star]
    solve = v < a - 1
    size = p ** (a * (m - 1) + v + 1) if solve else p ** (a * m)
    if size > BUDGET:
        raise BudgetExceeded(f"density enumeration at a={a} needs {size} matrices > 2^26")
    axis = np.arange(mod, dtype=np.int64)
    free_ent = [e for e in range(m) if e != star] if solve else list(range(m))
    if size > CHUNK and len(free_ent) > 1:
        lead, rest = free_ent[0], free_ent[1:]
        heads = [np.array([x], dtype=np.int64) for x in range(mod)]
    else:
        lead, rest = None, free_ent
        heads = [None]
    for head in heads:
        grids = np.meshgrid(*([axis] * len(rest)), indexing="ij") if rest else []
        free = [g.ravel() for g in grids]
        if head is not None:
            free = [np.broadcast_to(head, free[0].shape)] + free
        names = ([lead] if head is not None else []) + rest
        if not solve:
            S = [None] * m
            for e, x in zip(names, free):
                S[e] = x
        else:
            r = np.zeros(len(free[0]) if free else 1, dtype=np.int64)
            for e, x in zip(names, free):
                r = (r + x * coefs[e]) % mod
            ok = r % p ** v == 0
            free = [x[ok] for x in free]
            r = r[ok]
            step = p ** (a - 1 - v)
            u_inv = pow(coefs[star] // p ** v, -1, step) if step > 1 else 0
            t0 = (-(r // p ** v) * u_inv) % step
            lifts = np.arange(p ** (v + 1), dtype=np.int64) * step
            t = (t0[:, None] + lifts[None, :]).ravel()
            reps = len(lifts)
            S = [None] * m
            S[star] = t % mod
            for e, x in zip(names, free):
                S[e] = np.repeat(x, reps)
        tr = np.zeros_like(S[0])
        for c, x in zip(coefs, S):
            tr = (tr + x * c) % mod
        yield S, tr


def density_at(B, k, a):
    """alpha_a = N_a / p^(a(2kn - n(n+1)/2)) computed exactly by character sums.

    N_a = p^(-am) sum_S e(-tr(SB)/p^a) (p^(an) #ker S)^k over symmetric S mod
    p^a (m = n(n+1)/2).  Since S -> uS preserves #ker S, the character sum
    collapses: residues r = tr(SB) of order < a-1 cancel, r = 0 counts with
    weight 1 and order exactly a-1 with weight -1/(p-1).
    """
    p, n = B.p, B.n
    mod = p ** a
    counts = {}
    for S, tr in _trace_solutions(B, a):
        keep = tr % (mod // p) == 0
        kl = _kernel_log([s[keep] for s in S], n, p, a)
        zero = tr[keep] == 0
        for val in np.unique(kl):
            sel = kl == val
            c = counts.setdefault(int(val), [0, 0])
            c[0] += int(np.count_nonzero(sel & zero))
            c[1] += int(np.count_nonzero(sel & ~zero))
    z0 = sum(c0 * Fraction(p) ** (k * val) for val, (c0, _) in counts.items())
    z1 = sum(c1 * Fraction(p) ** (k * val) for val, (_, c1) in counts.items())
    total = z0 - Fraction(z1) / (p - 1)
    return total / Fraction(p) ** (a * k * n)


def density_bruteforce(B, k, a):
    """alpha_a by literal enumeration of X in M_{2k,n}(Z/p^a); tiny cases only."""
    p, n = B.p, B.n
    mod = p ** a
    if mod ** (2 * k * n) > 2 ** 22:
        raise BudgetExceeded("literal enumeration too large")
    rng = range(mod)
    N = 0
    target = [[B.twiceB[i][j] % mod for j in range(n)] for i in range(n)]
    for cols in itertools.product(itertools.product(rng, repeat=2 * k), repeat=n):
        ok = True
        for i in range(n):
            for j in range(i, n):
                s = sum(cols[i][2 * l] * cols[j][2 * l + 1] + cols[j][2 * l] * cols[i][2 * l + 1] for l in range(k))
                if i == j:
                    if (s // 2) % mod != (B.twiceB[i][i] // 2) % mod:
                        ok = False
                        break
                elif s % mod != target[i][j]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            N += 1
    m = n * (n + 1) // 2
    return Fraction(N, p ** (a * (2 * k * n - m)))


@dataclass
class DensityReport:
    B: HalfIntMatrix
    k: int
    a: int
    alpha: Fraction
    stabilized: bool
    predicted: Fraction = None
    match: bool = None
    history: list = field(default_factory=list)

    def to_json(self):
        return {
            "form": self.B.to_json(),
            "k": self.k,
            "a": self.a,
            "alpha": str(self.alpha),
            "stabilized": self.stabilized,
            "predicted": None if self.predicted is None else str(self.predicted),
            "match": self.match,
        }


def level_order(B):
    """ord of the level of 2B: least e with p^e (2B)^-1 integral, even on the diagonal at p = 2."""
    from ._linalg import det

    p, n = B.p, B.n
    S = B.twiceB
    d = det(S)
    e = 0
    for i in range(n):
        for j in range(n):
            minor = [[S[r][c] for c in range(n) if c != i] for r in range(n) if r != j]
            cof = (-1) ** (i + j) * det(minor)
            if cof:
                e = max(e, ord_p(d, p) - ord_p(cof, p) + (1 if p == 2 and i == j else 0))
    return e


def _start_precision(B):
    """Precision from which alpha_a is expected to be constant: level order + 1."""
    orders = [ord_p(x, B.p) for row in B.twiceB for x in row if x]
    return max(1, max(orders) + 1, level_order(B) + 1)


def local_density(B, k, a=None):
    """Count representations by k hyperbolic planes.

    With ``a`` given, alpha is computed at a and a+1.  Without, a grows from
    the level order of 2B plus one until two consecutive values agree.
    """
    B.require_nondegenerate()
    if k < 1:
        raise ValueError("k must be at least 1")
    if B.n > 3:
        raise ValueError("local_density supports n <= 3")
    if a is not None:
        x, y = density_at(B, k, a), density_at(B, k, a + 1)
        return DensityReport(B, k, a, x, x == y, history=[(a, x), (a + 1, y)])
    a = _start_precision(B)
    hist = [(a, density_at(B, k, a))]
    while True:
        try:
            nxt = density_at(B, k, a + 1)
        except BudgetExceeded:
            return DensityReport(B, k, a, hist[-1][1], False, history=hist)
        hist.append((a + 1, nxt))
        if nxt == hist[-2][1]:
            return DensityReport(B, k, a, nxt, True, history=hist)
        a += 1


def gamma_factor(B, t):
    """gamma_p(B; t), with the (1 - xi p^(n/2) t) division done on polynomials."""
    p, n = B.p, B.n
    g = [Fraction(1), Fraction(-1)]
    for i in range(1, n // 2 + 1):
        c = Fraction(p) ** (2 * i)
        g = [x - (c * g[j - 2] if j >= 2 else 0) for j, x in enumerate(g + [0, 0])]
    if n % 2 == 0 and xi(B):
        r = xi(B) * Fraction(p) ** (n // 2)
        # divide by (1 - r t): q_j = g_j + r q_{j-1}
        q = []
        for j, x in enumerate(g[:-1]):
            q.append(x + (r * q[-1] if q else 0))
        if g[-1] + r * q[-1] != 0:
            raise ArithmeticError("gamma factor is not a polynomial")
        g = q
    return sum(c * Fraction(t) ** j for j, c in enumerate(g))


def predicted_density(B, k):
    """gamma_p(B; p^-k) F(B; p^-k) from the Siegel series pipeline."""
    from .gk import gk_invariant
    from .siegel import e_frak, r_mul, q_power, siegel_series

    p, n = B.p, B.n
    F = siegel_series(B)
    eB = e_frak(gk_invariant(B), n)
    m = n + 1 - 2 * k
    val = r_mul(F.evaluate_q_power(m), q_power(m * eB, p), p)
    if any(val[1:]):
        raise ArithmeticError(f"density prediction is irrational: {val}")
    return gamma_factor(B, Fraction(1, p ** k)) * val[0]


def siegel_vs_density(B, k, a=None):
    rep = local_density(B, k, a)
    rep.predicted = predicted_density(B, k)
    rep.match = rep.stabilized and rep.predicted == rep.alpha
    return rep


# -- equivalence witnesses -------------------------------------------------------

NOT_FOUND = "not-found"
INCONCLUSIVE = "inconclusive"


def equivalence_witness(B, B2, a, budget=2 * 10 ** 6):
    """A unimodular U with 2B[U] = 2B' entrywise mod p^a, NOT_FOUND or INCONCLUSIVE.

    Columns are chosen one at a time among vectors matching the target
    diagonal entry and the pairings with earlier columns, and independent
    mod p from them.
    """
    if B.p != B2.p or B.n != B2.n:
        raise ValueError("forms must share p and n")
    p, n = B.p, B.n
    mod = p ** a
    if p ** (a * n) > BUDGET:
        return INCONCLUSIVE
    # a common power of p does not change the class, but mod p^a it hides everything
    content = min(ord_p(x, p) for f in (B, B2) for row in f.twiceB for x in row if x)
    c = p ** content
    S = np.array([[x // c for x in row] for row in B.twiceB], dtype=np.int64)
    T = [[(x // c) % mod for x in row] for row in B2.twiceB]
    V = _all_vectors(p, a, n)
    SV = V @ S % mod
    q = np.einsum("ij,ij->i", SV, V) % mod
    steps = [0]

    def independent(cols):
        from ._linalg import det

        mat = [[int(V[c][r]) % p for c in cols] for r in range(n)]
        if len(cols) == n:
            return det(mat) % p != 0
        # rank check mod p by elimination
        rows = [list(x) for x in zip(*mat)]
        rank = 0
        for col in range(n):
            piv = next((r for r in range(rank, len(rows)) if rows[r][col] % p), None)
            if piv is None:
                continue
            rows[rank], rows[piv] = rows[piv], rows[rank]
            inv = pow(rows[rank][col], -1, p)
            for r in range(len(rows)):
                if r != rank and rows[r][col] % p:
                    f = rows[r][col] * inv
                    rows[r] = [(x - f * y) % p for x, y in zip(rows[r], rows[rank])]
            rank += 1
        return rank == len(cols)

    def dfs(cols):
        if len(cols) == n:
            return cols
        i = len(cols)
        ok = q == T[i][i]
        for j, c in enumerate(cols):
            ok &= (SV @ V[c]) % mod == T[j][i]
        for c in np.nonzero(ok)[0]:
            steps[0] += 1
            if steps[0] > budget:
                raise BudgetExceeded
            c = int(c)
            if not independent(cols + [c]):
                continue
            res = dfs(cols + [c])
            if res:
                return res
        return None

    try:
        res = dfs([])
    except BudgetExceeded:
        return INCONCLUSIVE
    if res is None:
        return NOT_FOUND
    return [[int(V[c][r]) for c in res] for r in range(n)]


# -- Hilbert symbol by solvability -------------------------------------------------

def hilbert_by_search(a, b, p):
    """(a, b)_p from primitive solutions of z^2 = a x^2 + b y^2 modulo a high power of p."""
    va, ua = unit_part(a, p)
    vb, ub = unit_part(b, p)
    a = ua * p ** (va % 2)
    b = ub * p ** (vb % 2)
    m = 5 if p == 2 else 3
    mod = p ** m
    r = np.arange(mod, dtype=np.int64)
    x, y = np.meshgrid(r, r, indexing="ij")
    rhs = (a * x * x + b * y * y) % mod
    squares = {}
    for z in range(mod):
        squares.setdefault(z * z % mod, []).append(z)
    for xv, yv, v in zip(x.ravel(), y.ravel(), rhs.ravel()):
        for z in squares.get(int(v), ()):
            if xv % p or yv % p or z % p:
                return 1
    return -1
