"""Half-integral symmetric matrices over Z_p, stored exactly as 2B."""
from dataclasses import dataclass
from fractions import Fraction
import json

from ._linalg import congruence, det
from .padic_invariants import INFINITY, check_prime, ord_p


@dataclass(frozen=True)
class HalfIntMatrix:
    """A half-integral symmetric matrix B over Z_p.

    ``twiceB`` is the integer matrix 2B; its diagonal is even.
    """

    p: int
    twiceB: tuple

    def __post_init__(self):
        check_prime(self.p)
        rows = tuple(tuple(int(x) for x in row) for row in self.twiceB)
        object.__setattr__(self, "twiceB", rows)
        n = len(rows)
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ValueError("twiceB must be square")
            if row[i] % 2:
                raise ValueError(f"diagonal entry {i} of twiceB is odd")
            for j in range(i):
                if row[j] != rows[j][i]:
                    raise ValueError("twiceB must be symmetric")

    @classmethod
    def from_B(cls, p, B):
        """Build from the entries of B itself (rationals with denominator 2)."""
        tw = []
        for row in B:
            r = []
            for x in row:
                y = 2 * Fraction(x)
                if y.denominator != 1:
                    raise ValueError("B is not half-integral")
                r.append(int(y))
            tw.append(r)
        return cls(p, tw)

    @classmethod
    def diagonal(cls, p, entries):
        n = len(entries)
        return cls(p, [[2 * entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def empty(cls, p):
        return cls(p, ())

    @property
    def n(self):
        return len(self.twiceB)

    def b(self, i, j):
        return Fraction(self.twiceB[i][j], 2)

    @property
    def B(self):
        return [[self.b(i, j) for j in range(self.n)] for i in range(self.n)]

    def det(self):
        return Fraction(det(self.twiceB), 2 ** self.n)

    @property
    def nondegenerate(self):
        return det(self.twiceB) != 0

    def require_nondegenerate(self):
        if not self.nondegenerate:
            raise ValueError("singular form")

    def diag_order(self, i):
        """ord(b_ii)."""
        return ord_p(self.b(i, i), self.p)

    def off_order(self, i, j):
        """ord(2 b_ij)."""
        return ord_p(self.twiceB[i][j], self.p)

    def to_json(self):
        return {"p": self.p, "twiceB": [list(r) for r in self.twiceB]}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        if not isinstance(obj, dict) or "p" not in obj or "twiceB" not in obj:
            raise ValueError("form object needs keys 'p' and 'twiceB'")
        return cls(obj["p"], obj["twiceB"])

    def __repr__(self):
        return f"HalfIntMatrix(p={self.p}, twiceB={[list(r) for r in self.twiceB]})"


def is_unimodular(U, p):
    d = det(U)
    return d != 0 and Fraction(d).numerator % p != 0 and Fraction(d).denominator == 1


def transform(B, U):
    """B[U] = U^T B U for U in GL_n(Z_p) with integer entries."""
    if len(U) != B.n or any(len(r) != B.n for r in U):
        raise ValueError("U has the wrong shape")
    if not is_unimodular(U, B.p):
        raise ValueError("not in GL_n(Z_p)")
    return HalfIntMatrix(B.p, congruence(B.twiceB, U))


def direct_sum(*forms):
    if not forms:
        raise ValueError("direct_sum needs at least one form")
    p = forms[0].p
    if any(f.p != p for f in forms):
        raise ValueError("prime mismatch")
    n = sum(f.n for f in forms)
    out = [[0] * n for _ in range(n)]
    off = 0
    for f in forms:
        for i in range(f.n):
            for j in range(f.n):
                out[off + i][off + j] = f.twiceB[i][j]
        off += f.n
    return HalfIntMatrix(p, out)


def principal_submatrix(B, m):
    """The upper left m x m block B^(m)."""
    if not 0 <= m <= B.n:
        raise ValueError(f"m={m} out of range 0..{B.n}")
    return HalfIntMatrix(B.p, [row[:m] for row in B.twiceB[:m]])


def in_S(B, a):
    """Whether the sequence a lies in S(B)."""
    n = B.n
    if len(a) != n or any(x < 0 for x in a):
        return False
    if any(a[i] > a[i + 1] for i in range(n - 1)):
        return False
    for i in range(n):
        if a[i] > B.diag_order(i):
            return False
        for j in range(i + 1, n):
            if a[i] + a[j] > 2 * B.off_order(i, j):
                return False
    return True


def lex_max_S(B):
    """Lexicographically greatest element of S(B) for this fixed matrix.

    Coordinates are fixed left to right.  Since every constraint is an upper
    bound, a prefix extends to an element of S(B) exactly when the constant
    tail repeating its last value does, so each coordinate is the largest
    value compatible with that tail.
    """
    n = B.n
    B.require_nondegenerate()
    d = [B.diag_order(i) for i in range(n)]
    o = [[B.off_order(i, j) for j in range(n)] for i in range(n)]
    a = []
    for k in range(n):
        cap = INFINITY
        for j in range(k, n):
            cap = min(cap, d[j])
            for i in range(j + 1, n):
                cap = min(cap, o[j][i])
            for i in range(k):
                cap = min(cap, 2 * o[i][j] - a[i])
        if cap == INFINITY:
            raise ValueError("singular form")
        a.append(int(cap))
    return tuple(a)
