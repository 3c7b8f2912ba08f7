"""Gross-Keating invariants, extended GK data and naive EGK data.

The explicit formulas read everything off a pre-optimal form (p = 2) or a
sorted diagonal form (p odd).  The validators for naive EGK data, EGK data,
admissible involutions and reduced forms report the first violated clause.
"""
from dataclasses import dataclass
import itertools

from .decompose import PAIR, UNIT
from .forms import HalfIntMatrix, principal_submatrix
from .padic_invariants import INFINITY, eta, ord_p, xi
from .preoptimal import PreOptimalForm, is_preoptimal, preoptimal_form


@dataclass(frozen=True)
class EGKDatum:
    ns: tuple
    ms: tuple
    zetas: tuple

    def to_json(self):
        return {"n": list(self.ns), "m": list(self.ms), "zeta": list(self.zetas)}

    def __str__(self):
        return "({}; {}; {})".format(*(",".join(map(str, t)) for t in (self.ns, self.ms, self.zetas)))


@dataclass(frozen=True)
class NaiveEGKDatum:
    a: tuple
    eps: tuple

    @property
    def n(self):
        return len(self.a)

    def to_json(self):
        return {"a": list(self.a), "eps": list(self.eps)}

    def __str__(self):
        return "({}; {})".format(*(",".join(map(str, t)) for t in (self.a, self.eps)))


def _as_preoptimal(P):
    if isinstance(P, HalfIntMatrix):
        return preoptimal_form(P)
    return P


def _check(P):
    bad = is_preoptimal(P.blocks, P.p)
    if bad:
        raise ValueError(f"not a pre-optimal form: {bad}")


def gk_invariant(P):
    """GK(B) of a pre-optimal form (or of a form, decomposed first)."""
    P = _as_preoptimal(P)
    _check(P)
    if P.p != 2:
        return tuple(sorted(b.k for b in P.blocks))
    pre = P.prefix
    a = []
    for s, C in enumerate(P.blocks, start=1):
        k = C.k
        if C.is_plane:
            a += [k, k]
        elif C.core == PAIR:
            a += [k + 1, k + 1]
        elif pre[s].deg % 2:
            prev = pre[s - 1]
            if prev.ord_det % 2:
                a.append(k + 2)
            elif prev.xi == 0:
                a.append(k + 1)
            else:
                a.append(k)
        else:
            cur = pre[s]
            if cur.ord_det % 2:
                a.append(k)
            elif cur.xi == 0:
                a.append(k + 1)
            else:
                a.append(k + 2)
    return tuple(a)


def group_sequence(a):
    """(ns, ms) with a = (m_1 repeated n_1 times, ...)."""
    ns, ms = [], []
    for x in a:
        if ms and ms[-1] == x:
            ns[-1] += 1
        else:
            ns.append(1)
            ms.append(x)
    return tuple(ns), tuple(ms)


def egk_datum(P):
    """EGK(B) from a pre-optimal form: signs of prefixes ending at GK blocks."""
    P = _as_preoptimal(P)
    a = gk_invariant(P)
    ns, ms = group_sequence(a)
    bounds = P.boundaries()
    zetas, t = [], 0
    for nj in ns:
        t += nj
        if t not in bounds:
            raise AssertionError(f"GK block end {t} is not a component boundary")
        l = bounds.index(t) + 1
        d = P.prefix[l]
        zetas.append(d.eta if t % 2 else d.xi)
    return EGKDatum(ns, ms, tuple(zetas))


class SignTableError(RuntimeError):
    pass


PLUS_MINUS = "pm"


def naive_egk_rows(P, a):
    """For each i, the list of (row, value) entries of the p = 2 sign table that apply."""
    n = len(a)
    S = [0]
    for x in a:
        S.append(S[-1] + x)
    comps = [b.rank for b in P.blocks]
    bounds = P.boundaries()
    form = P.assembled()

    def sub(m):
        return principal_submatrix(form, m)

    rows = []
    for i in range(1, n + 1):
        hits = []
        if i == 1:
            hits.append(("first", 1))
        if i in bounds and i % 2 == 0:
            hits.append(("even end", xi(sub(i))))
        if i in bounds and i % 2 == 1 and i >= 3:
            hits.append(("odd end", eta(sub(i))))
        if i + 1 in bounds and comps[bounds.index(i + 1)] == 2:
            if i % 2 == 1 and i >= 3 and S[i + 1] % 2 == 0:
                f = sub(i + 1)
                hits.append(("odd inner", eta(f) * xi(f) ** a[i - 1]))
            if i % 2 == 0 and S[i] % 2 == 1:
                hits.append(("even inner", 0))
            if i >= 2 and (i + 1 + S[2 * ((i + 1) // 2)]) % 2 == 1:
                hits.append(("free", PLUS_MINUS))
        rows.append(hits)
    return rows


def has_sign_freedom(P):
    P = _as_preoptimal(P)
    if P.p != 2:
        return False
    rows = naive_egk_rows(P, gk_invariant(P))
    return any(v == PLUS_MINUS for hits in rows for _, v in hits)


def naive_egk(P, free_sign=1):
    """A naive EGK datum of the form; ``free_sign`` fills the entries left free."""
    P = _as_preoptimal(P)
    a = gk_invariant(P)
    if P.p != 2:
        form = P.assembled()
        eps = []
        for i in range(1, len(a) + 1):
            f = principal_submatrix(form, i)
            eps.append(xi(f) if i % 2 == 0 else eta(f))
        return NaiveEGKDatum(a, tuple(eps))
    eps = []
    for i, hits in enumerate(naive_egk_rows(P, a), start=1):
        if not hits:
            raise SignTableError(f"no row of the sign table covers index {i}")
        fixed = {v for _, v in hits if v != PLUS_MINUS}
        if len(fixed) > 1 or (fixed and 0 in fixed and any(v == PLUS_MINUS for _, v in hits)):
            raise SignTableError(f"contradictory rows at index {i}: {hits}")
        eps.append(fixed.pop() if fixed else free_sign)
    return NaiveEGKDatum(a, tuple(eps))


def upsilon(H):
    """Group a naive EGK datum into an EGK datum."""
    bad = validate_naive_egk(H)
    if bad:
        raise ValueError(f"invalid naive EGK datum: {bad}")
    ns, ms = group_sequence(H.a)
    zetas, t = [], 0
    for nj in ns:
        t += nj
        zetas.append(H.eps[t - 1])
    return EGKDatum(ns, ms, tuple(zetas))


def validate_naive_egk(H):
    """None if H is a naive EGK datum, else the first violated clause."""
    a, e = H.a, H.eps
    n = len(a)
    if len(e) != n:
        return "length"
    if any(x < 0 for x in a) or any(x not in (-1, 0, 1) for x in e):
        return "range"
    if any(a[i] > a[i + 1] for i in range(n - 1)):
        return "N1"
    S = [0]
    for x in a:
        S.append(S[-1] + x)
    for i in range(2, n + 1, 2):
        if (e[i - 1] != 0) != (S[i] % 2 == 0):
            return "N2"
    for i in range(1, n + 1, 2):
        if e[i - 1] == 0:
            return "N3"
    if n and e[0] != 1:
        return "N4"
    for i in range(3, n + 1, 2):
        if S[i - 1] % 2 == 0 and e[i - 1] != e[i - 3] * e[i - 2] ** (a[i - 1] + a[i - 2]):
            return "N5"
    return None


def validate_egk(G):
    """None if G is an EGK datum, else the first violated clause."""
    ns, ms, z = G.ns, G.ms, G.zetas
    r = len(ns)
    if len(ms) != r or len(z) != r or any(x <= 0 for x in ns) or any(x < 0 for x in ms):
        return "shape"
    if any(x not in (-1, 0, 1) for x in z):
        return "range"
    if any(ms[i] >= ms[i + 1] for i in range(r - 1)):
        return "E1"
    nstar, w = [], []
    t = tw = 0
    for nj, mj in zip(ns, ms):
        t += nj
        tw += nj * mj
        nstar.append(t)
        w.append(tw)
    for s in range(r):
        if nstar[s] % 2 == 0 and (z[s] != 0) != (w[s] % 2 == 0):
            return "E2"
    for s in range(r):
        if nstar[s] % 2 == 0:
            continue
        if z[s] == 0:
            return "E3"
        odd_before = [i for i in range(s) if nstar[i] % 2]
        if not odd_before:
            v = 1
            for j in range(s):
                v *= z[j] ** (ms[j] + ms[j + 1])
            if z[s] != v:
                return "E3(a)"
        else:
            prev = w[s - 1] if s else 0
            if (prev + ms[s] * (ns[s] - 1)) % 2 == 0:
                t = odd_before[-1]
                v = z[t]
                for j in range(t + 1, s):
                    v *= z[j] ** (ms[j] + ms[j + 1])
                if z[s] != v:
                    return "E3(b)"
    return None


# -- admissible involutions and reduced forms -------------------------------

def _blocks_of(a):
    """The index blocks I_s (1-based) of equal entries of a."""
    out, start = [], 1
    ns, _ = group_sequence(a)
    for nj in ns:
        out.append(list(range(start, start + nj)))
        start += nj
    return out


def is_admissible_involution(a, sigma):
    """None if sigma (1-based images) is a-admissible, else the violated clause."""
    n = len(a)
    s = {i: sigma[i - 1] for i in range(1, n + 1)}
    if sorted(s.values()) != list(range(1, n + 1)) or any(s[s[i]] != i for i in s):
        return "involution"
    A = {i: a[i - 1] for i in s}
    P0 = [i for i in s if s[i] == i]
    Pp = [i for i in s if A[i] > A[s[i]]]
    Pm = [i for i in s if A[i] < A[s[i]]]
    blocks = _blocks_of(a)
    where = {i: blk for blk in blocks for i in blk}
    if len(P0) > 2:
        return "(i)"
    if len(P0) == 2 and A[P0[0]] % 2 == A[P0[1]] % 2:
        return "(i)"
    for i in P0:
        if i != max(where[i]):
            return "(i)"
        if i != max(j for j in P0 + Pp if A[j] % 2 == A[i] % 2):
            return "(i)"
    for blk in blocks:
        m = [i for i in blk if i in Pm]
        if len(m) > 1:
            return "(ii)"
        for i in m:
            cand = [j for j in Pp if j > i and A[j] % 2 == A[i] % 2]
            if i != max(blk) or not cand or s[i] != min(cand):
                return "(ii)"
        pl = [i for i in blk if i in Pp]
        if len(pl) > 1:
            return "(iii)"
        for i in pl:
            cand = [j for j in Pm if j < i and A[j] % 2 == A[i] % 2]
            if i != min(blk) or not cand or s[i] != max(cand):
                return "(iii)"
    for i in s:
        if A[i] == A[s[i]] and abs(i - s[i]) > 1:
            return "(iv)"
    return None


def in_M(B, a):
    n = B.n
    for i in range(n):
        if B.diag_order(i) < a[i]:
            return False
        for j in range(i + 1, n):
            if 2 * B.off_order(i, j) < a[i] + a[j]:
                return False
    return True


def is_reduced_form(B, a, sigma):
    """None if B is a reduced form of GK type (a, sigma), else the violated clause."""
    bad = is_admissible_involution(a, sigma)
    if bad:
        return "sigma " + bad
    if B.n != len(a):
        return "shape"
    if not in_M(B, a):
        return "M(a)"
    n = B.n
    s = [x - 1 for x in sigma]
    for i in range(n):
        if s[i] != i:
            if 2 * B.off_order(i, s[i]) != a[i] + a[s[i]]:
                return "(1)"
            if a[i] < a[s[i]] and B.diag_order(i) != a[i]:
                return "(1)"
        elif B.diag_order(i) != a[i]:
            return "(2)"
    for i in range(n):
        for j in range(n):
            if j != i and j != s[i] and not 2 * B.off_order(i, j) > a[i] + a[j]:
                return "(3)"
    return None


def invariants_json(B):
    P = preoptimal_form(B)
    return {
        "gk": list(gk_invariant(P)),
        "egk": egk_datum(P).to_json(),
        "naive_egk": naive_egk(P).to_json(),
    }


def involutions(n):
    """All involutions of 1..n, as tuples of 1-based images."""
    def rec(rest):
        if not rest:
            yield {}
            return
        i = rest[0]
        for s in rec(rest[1:]):
            yield {**s, i: i}
        for j in rest[1:]:
            for s in rec([x for x in rest[1:] if x != j]):
                yield {**s, i: j, j: i}

    for s in rec(list(range(1, n + 1))):
        yield tuple(s[i] for i in range(1, n + 1))


def admissible_involutions(a):
    return [s for s in involutions(len(a)) if is_admissible_involution(a, s) is None]


def naive_completions(G):
    """Every naive EGK datum H with upsilon(H) = G."""
    bad = validate_egk(G)
    if bad:
        raise ValueError(f"invalid EGK datum: {bad}")
    a = tuple(m for nj, m in zip(G.ns, G.ms) for _ in range(nj))
    ends, t = {}, 0
    for nj, z in zip(G.ns, G.zetas):
        t += nj
        ends[t - 1] = z
    free = [i for i in range(len(a)) if i not in ends]
    out = []
    for choice in itertools.product((-1, 0, 1), repeat=len(free)):
        eps = [ends.get(i) for i in range(len(a))]
        for i, e in zip(free, choice):
            eps[i] = e
        H = NaiveEGKDatum(a, tuple(eps))
        if validate_naive_egk(H) is None:
            out.append(H)
    return out
