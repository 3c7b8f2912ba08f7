"""Small exact linear algebra helpers over Z and Q."""
from fractions import Fraction


def det(m):
    """Determinant of a square integer or rational matrix (Bareiss, exact)."""
    n = len(m)
    if n == 0:
        return 1
    integral = all(isinstance(x, int) for row in m for x in row)
    a = [list(row) if integral else [Fraction(x) for x in row] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                x = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                # Bareiss: the division is exact over Z
                a[i][j] = x // prev if integral else x / prev
        prev = a[k][k]
    d = sign * a[n - 1][n - 1]
    if integral:
        return d
    return int(d) if d.denominator == 1 else d


def matmul(a, b):
    cols = list(zip(*b)) if b else []
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


def transpose(a):
    return [list(r) for r in zip(*a)]


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def congruence(s, u):
    """Return u^T s u."""
    return matmul(matmul(transpose(u), s), u)


def diagonalize_rational(s):
    """Diagonal entries of a symmetric rational matrix after congruence over Q.

    Uses symmetric elimination; a zero pivot is repaired with an e_i + e_j
    move, which always works for a non-degenerate matrix.
    """
    a = [[Fraction(x) for x in row] for row in s]
    n = len(a)
    out = []
    for k in range(n):
        if a[k][k] == 0:
            j = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
            if j is None:
                raise ValueError("singular form")
            if a[j][j] != 0:
                a[k], a[j] = a[j], a[k]
                for row in a:
                    row[k], row[j] = row[j], row[k]
            else:
                # e_k <- e_k + e_j gives a_kk = 2 a_kj != 0
                for i in range(n):
                    a[i][k] += a[i][j]
                for i in range(n):
                    a[k][i] += a[j][i]
        piv = a[k][k]
        out.append(piv)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] -= a[i][k] * a[k][j] / piv
        for i in range(k + 1, n):
            a[k][i] = a[i][k] = Fraction(0)
    return out
