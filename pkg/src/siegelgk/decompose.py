"""Orthogonal splittings of forms over Z_p.

For odd p a form diagonalizes.  For p = 2 we compute a Jordan splitting into
unit diagonal entries and even planes, then rewrite it into a weak canonical
form.  Every step acts on an explicit integer witness matrix U modulo a
working precision, so the output is always checked by recomputing B[U].
"""
from dataclasses import dataclass, field

from ._linalg import congruence, identity
from .forms import HalfIntMatrix, direct_sum
from .padic_invariants import INFINITY, ord_p, xi as xi_of

UNIT = "unit"
PAIR = "unit_pair"
H = "H"
Y = "Y"
PLANES = (H, Y)


@dataclass(frozen=True)
class Block:
    """A scaled unimodular block 2^k C (p^k C for odd p)."""

    k: int
    core: str
    units: tuple = ()

    @property
    def rank(self):
        return 1 if self.core == UNIT else 2

    @property
    def is_plane(self):
        return self.core in PLANES

    @property
    def is_diagonal(self):
        return self.core in (UNIT, PAIR)

    def form(self, p):
        s = p ** self.k
        if self.core == UNIT:
            return HalfIntMatrix(p, [[2 * s * self.units[0]]])
        if self.core == PAIR:
            u1, u2 = self.units
            return HalfIntMatrix(p, [[2 * s * u1, 0], [0, 2 * s * u2]])
        if self.core == H:
            return HalfIntMatrix(p, [[0, s], [s, 0]])
        return HalfIntMatrix(p, [[2 * s, s], [s, 2 * s]])

    def split(self):
        """The rank-one pieces of a diagonal block."""
        return [Block(self.k, UNIT, (u,)) for u in self.units]

    def to_json(self):
        return {"k": self.k, "core": self.core, "units": list(self.units)}

    @classmethod
    def from_json(cls, obj):
        return cls(int(obj["k"]), obj["core"], tuple(int(u) for u in obj.get("units", ())))


def assemble(blocks, p):
    if not blocks:
        return HalfIntMatrix.empty(p)
    return direct_sum(*[b.form(p) for b in blocks])


@dataclass
class BlockDecomposition:
    p: int
    blocks: list
    witness: list
    precision: int
    source: HalfIntMatrix = field(default=None, repr=False)

    @property
    def n(self):
        return sum(b.rank for b in self.blocks)

    def assembled(self):
        return assemble(self.blocks, self.p)

    def verify(self, B=None):
        """Check B[U] against the assembled blocks modulo p^precision."""
        B = B if B is not None else self.source
        mod = self.p ** self.precision
        lhs = congruence(B.twiceB, self.witness)
        rhs = self.assembled().twiceB
        return all((x - y) % mod == 0 for r1, r2 in zip(lhs, rhs) for x, y in zip(r1, r2))

    def to_json(self):
        return {
            "blocks": [b.to_json() for b in self.blocks],
            "witness": [list(r) for r in self.witness],
            "precision": self.precision,
        }


# -- modular helpers ---------------------------------------------------------

def _inv(x, mod):
    return pow(x % mod, -1, mod)


def _split(x, p):
    """x = p^v * w with w prime to p (x nonzero integer)."""
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v, x


def _sqrt_unit(a, p, N):
    """A square root of the unit a modulo p^N (a must be a square)."""
    mod = p ** N
    a %= mod
    if p == 2:
        if a % 8 != 1:
            raise ValueError("not a 2-adic square")
        r = 1
        for j in range(3, N):
            if (r * r - a) % 2 ** (j + 1):
                r += 2 ** (j - 1)
        r %= mod
    else:
        r = next(x for x in range(1, p) if (x * x - a) % p == 0)
        m = p
        while m < mod:
            m = min(m * m, mod)
            r = (r - (r * r - a) * _inv(2 * r, m)) % m
    assert (r * r - a) % mod == 0
    return r


def _hensel_root(c2, c1, c0, t0, mod):
    """Root of c2 t^2 + c1 t + c0 near t0, assuming the derivative is a unit."""
    t = t0
    for _ in range(mod.bit_length() + 2):
        g = (c2 * t * t + c1 * t + c0) % mod
        if g == 0:
            break
        t = (t - g * _inv(2 * c2 * t + c1, mod)) % mod
    assert (c2 * t * t + c1 * t + c0) % mod == 0
    return t


def _nonresidue(p):
    return next(x for x in range(2, p) if pow(x, (p - 1) // 2, p) == p - 1)


def unit_rep(u, p):
    """Small representative of the square class of the unit u."""
    if p == 2:
        return u % 8
    return 1 if pow(u % p, (p - 1) // 2, p) == 1 else _nonresidue(p)


class _Work:
    """The working matrix A = (2B)[U] mod p^N, together with U."""

    def __init__(self, B, N):
        self.p = B.p
        self.n = B.n
        self.N = N
        self.mod = B.p ** N
        self.A0 = [list(r) for r in B.twiceB]
        self.U = identity(self.n)
        self.A = [[x % self.mod for x in r] for r in self.A0]

    def ordA(self, i, j):
        x = self.A[i][j] % self.mod
        return INFINITY if x == 0 else _split(x, self.p)[0]

    def apply(self, T):
        mod = self.mod
        n = self.n
        self.U = [[sum(self.U[i][k] * T[k][j] for k in range(n)) % mod for j in range(n)] for i in range(n)]
        self.A = [[x % mod for x in r] for r in congruence(self.A, T)]

    def div(self, x, y):
        """x / y in Z_p modulo p^N, given ord(x) >= ord(y)."""
        x %= self.mod
        if x == 0:
            return 0
        vx, wx = _split(x, self.p)
        vy, wy = _split(y % self.mod, self.p)
        assert vx >= vy
        return self.p ** (vx - vy) * wx * _inv(wy, self.mod) % self.mod

    def eliminate_from(self, piv, rest):
        """Clear the rows of ``rest`` against a 1x1 or 2x2 pivot block."""
        T = identity(self.n)
        if len(piv) == 1:
            (i,) = piv
            for l in rest:
                T[i][l] = -self.div(self.A[i][l], self.A[i][i])
        else:
            i, j = piv
            m = self.ordA(i, j)
            s = self.p ** m
            a, b, d = self.A[i][i] // s, self.A[i][j] // s, self.A[j][j] // s
            det0 = (a * d - b * b) % self.mod
            dinv = _inv(det0, self.mod)
            for l in rest:
                x = self.div(self.A[i][l], s)
                y = self.div(self.A[j][l], s)
                ci = (d * x - b * y) * dinv % self.mod
                cj = (a * y - b * x) * dinv % self.mod
                T[i][l] = -ci
                T[j][l] = -cj
        self.apply(T)

    def scale_col(self, i, c):
        T = identity(self.n)
        T[i][i] = c % self.mod
        self.apply(T)

    def add_col(self, dst, src, c):
        """column dst += c * column src."""
        T = identity(self.n)
        T[src][dst] = c % self.mod
        self.apply(T)

    def unit_of(self, i, k):
        """Unit u with b_ii = p^k u for a unit diagonal position."""
        return self.div(self.A[i][i], 2 * self.p ** k)

    def normalize_unit(self, i, k):
        u = self.unit_of(i, k)
        v = unit_rep(u, self.p)
        s = _sqrt_unit(u * _inv(v, self.mod), self.p, self.N)
        self.scale_col(i, _inv(s, self.mod))
        assert self.unit_of(i, k) == v
        return v

    def normalize_plane(self, i, j, m):
        """Rewrite the 2x2 even unimodular block at scale m to exactly H or Y."""
        mod = self.mod
        s = self.p ** m

        def vals():
            return (self.div(self.A[i][i], 2 * s), self.div(self.A[i][j], s), self.div(self.A[j][j], 2 * s))

        al, w, be = vals()
        self.scale_col(j, _inv(w, mod))
        al, w, be = vals()
        if (al * be) % 2 == 0:
            if al % 2:
                T = identity(self.n)
                T[i][i], T[j][j], T[i][j], T[j][i] = 0, 0, 1, 1
                self.apply(T)
                al, w, be = vals()
            t = _hensel_root(be, 1, al, 0, mod)
            self.add_col(i, j, t)
            al, w, be = vals()
            self.scale_col(j, _inv(w, mod))
            al, w, be = vals()
            self.add_col(j, i, -be)
            core = H
            target = (0, 1, 0)
        else:
            t = _hensel_root(be, 1, al - 1, 0, mod)
            self.add_col(i, j, t)
            al, w, be = vals()
            self.scale_col(j, _inv(w, mod))
            al, w, be = vals()
            # f <- x e + (1 - 2x) f keeps 2b(e, f) = 1; solve q = 1 for x
            x = _hensel_root(4 * be - 1, 1 - 4 * be, be - 1, 0, mod)
            T = identity(self.n)
            T[i][j] = x
            T[j][j] = (1 - 2 * x) % mod
            self.apply(T)
            core = Y
            target = (1, 1, 1)
        assert vals() == target, (vals(), target)
        return core


def _working_precision(B, M_extra=0):
    from ._linalg import det as _det

    d = _det(B.twiceB)
    if d == 0:
        raise ValueError("singular form")
    return 2 * ord_p(d, B.p) + 24 + M_extra


def _finish(work, B, order):
    """order: list of (Block, positions).  Build the decomposition."""
    cols = [pos for _, ps in order for pos in ps]
    U = [[work.U[r][c] for c in cols] for r in range(work.n)]
    blocks = [b for b, _ in order]
    top = max((b.k for b in blocks), default=0)
    M = max(4, top + 4)
    mod = B.p ** M
    U = [[x % mod for x in r] for r in U]
    dec = BlockDecomposition(B.p, blocks, U, M, B)
    if not dec.verify(B):
        raise AssertionError("decomposition witness failed to verify")
    return dec


def diagonalize_odd(B):
    """Diagonal splitting over Z_p for odd p, scales non-decreasing."""
    if B.p == 2:
        raise ValueError("use weak_canonical for p = 2")
    B.require_nondegenerate()
    work = _Work(B, _working_precision(B))
    rest = list(range(B.n))
    found = []
    while rest:
        best = min(((work.ordA(i, j), i, j) for i in rest for j in rest if j >= i))
        o, i, j = best
        diag = min((work.ordA(t, t), t) for t in rest)
        if diag[0] > o:
            work.add_col(i, j, 1)
            piv = i
        else:
            piv = diag[1]
        rest.remove(piv)
        work.eliminate_from([piv], rest)
        found.append(piv)
    order = []
    for i in found:
        k = work.ordA(i, i)
        u = work.normalize_unit(i, k)
        order.append((Block(k, UNIT, (u,)), [i]))
    order.sort(key=lambda t: (t[0].k, t[0].units))
    return _finish(work, B, order)


def _jordan_work(B):
    """Jordan splitting at p = 2; returns the work state and raw pieces."""
    if B.p != 2:
        raise ValueError("2-adic splitting needs p = 2")
    B.require_nondegenerate()
    work = _Work(B, _working_precision(B))
    rest = list(range(B.n))
    pieces = []  # (kind, k, positions)
    while rest:
        o = min(work.ordA(i, j) for i in rest for j in rest if j >= i)
        diag = [t for t in rest if work.ordA(t, t) == o]
        if diag:
            i = diag[0]
            rest.remove(i)
            work.eliminate_from([i], rest)
            pieces.append((UNIT, o - 1, [i]))
        else:
            i, j = next((i, j) for i in rest for j in rest if j > i and work.ordA(i, j) == o)
            rest.remove(i)
            rest.remove(j)
            work.eliminate_from([i, j], rest)
            pieces.append(("plane", o, [i, j]))
    out = []
    for kind, k, ps in pieces:
        if kind == UNIT:
            out.append((UNIT, k, ps, work.normalize_unit(ps[0], k)))
        else:
            out.append((work.normalize_plane(ps[0], ps[1], k), k, ps, None))
    return work, out


def _sort_key(item):
    core, k, _, u = item
    return (k, 0 if core == H else 1 if core == Y else 2, u or 0)


def jordan_2adic(B):
    """Splitting into unit diagonal entries and even planes H, Y (p = 2)."""
    work, pieces = _jordan_work(B)
    pieces.sort(key=_sort_key)
    order = []
    for core, k, ps, u in pieces:
        order.append((Block(k, core, (u,) if core == UNIT else ()), ps))
    return _finish(work, B, order)


def _prefix_form(blocks, p):
    return assemble(blocks, p)


def weak_canonical(B):
    """A weak canonical splitting of B at p = 2 with its witness."""
    work, pieces = _jordan_work(B)
    # at most two unit entries per scale: push surplus units up as planes
    while True:
        byscale = {}
        for idx, (core, k, ps, u) in enumerate(pieces):
            if core == UNIT:
                byscale.setdefault(k, []).append(idx)
        crowded = sorted(k for k, v in byscale.items() if len(v) >= 3)
        if not crowded:
            break
        k = crowded[0]
        i1, i2, i3 = byscale[k][:3]
        e1, e2, e3 = pieces[i1][2][0], pieces[i2][2][0], pieces[i3][2][0]
        u1, u2, u3 = (work.unit_of(e, k) for e in (e1, e2, e3))
        T = identity(work.n)
        # columns e1 + e2, e2 + e3 span an even plane; g is orthogonal to both
        T[e2][e1] = 1
        T[e3][e2] = 1
        T[e1][e3], T[e2][e3], T[e3][e3] = u2 * u3, -u1 * u3, u1 * u2
        work.apply(T)
        assert work.ordA(e1, e3) == INFINITY and work.ordA(e2, e3) == INFINITY
        core = work.normalize_plane(e1, e2, k + 1)
        v = work.normalize_unit(e3, k)
        keep = [pc for idx, pc in enumerate(pieces) if idx not in (i1, i2, i3)]
        keep.append((core, k + 1, [e1, e2], None))
        keep.append((UNIT, k, [e3], v))
        pieces = keep
    pieces.sort(key=_sort_key)
    blocks, positions = _group_weak(pieces)
    blocks, positions = _fix_adjacent(work, blocks, positions)
    return _finish(work, B, list(zip(blocks, positions)))


def _group_weak(pieces):
    blocks, positions = [], []
    for core, k, ps, u in pieces:
        if core == UNIT and blocks and blocks[-1].core == UNIT and blocks[-1].k == k:
            prev = blocks[-1]
            blocks[-1] = Block(k, PAIR, tuple(sorted(prev.units + (u,))))
            positions[-1] = positions[-1] + ps
            if prev.units[0] > u:
                positions[-1] = positions[-1][::-1]
        else:
            blocks.append(Block(k, core, (u,) if core == UNIT else ()))
            positions.append(list(ps))
    return blocks, positions


def needs_adjacent_fix(blocks, i, p=2):
    """Whether the adjacent-scale condition of the weak canonical form fails at i."""
    if i + 1 >= len(blocks):
        return False
    bi, bj = blocks[i], blocks[i + 1]
    if not (bi.is_diagonal and bj.is_diagonal and bj.k == bi.k + 1):
        return False
    prefix = assemble(blocks[: i + 1], p)
    if prefix.n % 2:
        return False
    if ord_p(prefix.det(), p) % 2:
        return False
    return xi_of(prefix) != 0


def _fix_adjacent(work, blocks, positions):
    for i in range(len(blocks) - 1):
        if not needs_adjacent_fix(blocks, i):
            continue
        bi, bj = blocks[i], blocks[i + 1]
        e = positions[i][-1]
        f = positions[i + 1][0]
        k = bi.k
        work.add_col(e, f, 1)
        c = work.div(work.A[e][f], work.A[e][e])
        work.add_col(f, e, -c)
        assert work.ordA(e, f) == INFINITY
        ue = work.normalize_unit(e, k)
        uf = work.normalize_unit(f, k + 1)

        def rebuild(block, pos, which, val):
            units = list(block.units)
            units[which] = val
            pairs = sorted(zip(units, pos))
            units = tuple(x for x, _ in pairs)
            pos = [y for _, y in pairs]
            return Block(block.k, block.core, units), pos

        blocks[i], positions[i] = rebuild(bi, positions[i], len(bi.units) - 1, ue)
        blocks[i + 1], positions[i + 1] = rebuild(bj, positions[i + 1], 0, uf)
        assert not needs_adjacent_fix(blocks, i)
    return blocks, positions


def weak_canonical_violation(blocks, p=2):
    """First violated condition of the weak canonical shape, or None."""
    for i, b in enumerate(blocks):
        if b.core == UNIT and len(b.units) != 1:
            return ("1", i)
        if b.core == PAIR and len(b.units) != 2:
            return ("1", i)
        if i + 1 < len(blocks) and blocks[i + 1].k < b.k:
            return ("1", i)
        if b.is_diagonal and i + 1 < len(blocks) and not b.k < blocks[i + 1].k:
            return ("2", i)
    for i in range(len(blocks)):
        if needs_adjacent_fix(blocks, i, p):
            return ("3", i)
    return None


def decompose(B):
    """Diagonal splitting for odd p, weak canonical form for p = 2."""
    return weak_canonical(B) if B.p == 2 else diagonalize_odd(B)
