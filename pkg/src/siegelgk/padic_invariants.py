"""Valuations, square classes, Hilbert symbols and the scalar invariants of a form.

Every function works with exact rationals.  A form is anything with the
attributes ``p``, ``n`` and ``twiceB`` (see :class:`siegelgk.forms.HalfIntMatrix`).
"""
from fractions import Fraction
from math import inf

from ._linalg import det, diagonalize_rational

INFINITY = inf

SQUARE = "square"
UNRAMIFIED = "unramified-nonsquare"
RAMIFIED = "ramified"


def is_prime(p):
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def check_prime(p):
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"{p!r} is not a prime")
    return p


def ord_p(r, p):
    """p-adic order of a rational; ``INFINITY`` for zero."""
    r = Fraction(r)
    if r == 0:
        return INFINITY
    v = 0
    num, den = r.numerator, r.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def unit_part(r, p):
    """Return (v, u) with r = p^v * u and u an integer prime to p.

    The unit is only meaningful up to squares of units: a denominator d is
    replaced by multiplying with d (since 1/d = d / d^2).
    """
    r = Fraction(r)
    v = ord_p(r, p)
    s = r / Fraction(p) ** v
    return v, s.numerator * s.denominator


def is_square_unit(u, p):
    """Whether the p-adic unit u (an integer prime to p) is a square."""
    if p == 2:
        return u % 8 == 1
    return pow(u % p, (p - 1) // 2, p) == 1


def square_class(d, p):
    """Classify d in Q_p^x / Q_p^x2 by the extension Q_p(sqrt d)."""
    v, u = unit_part(d, p)
    if v % 2:
        return RAMIFIED
    if is_square_unit(u, p):
        return SQUARE
    if p == 2 and u % 4 == 3:
        return RAMIFIED
    return UNRAMIFIED


def hilbert_symbol(a, b, p):
    """The local Hilbert symbol (a, b)_p for nonzero rationals."""
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol of zero")
    alpha, u = unit_part(a, p)
    beta, v = unit_part(b, p)
    if p == 2:
        def eps(x):
            return ((x - 1) // 2) % 2

        def omega(x):
            return ((x * x - 1) // 8) % 2

        e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
        return -1 if e % 2 else 1

    def leg(x):
        return 1 if pow(x % p, (p - 1) // 2, p) == 1 else -1

    s = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    if beta % 2:
        s *= leg(u)
    if alpha % 2:
        s *= leg(v)
    return s


def det_half(B):
    """det B as an exact rational (B = twiceB / 2)."""
    return Fraction(det(B.twiceB), 2 ** B.n)


def disc(B):
    """D_B = (-4)^[n/2] det B."""
    d = Fraction((-4) ** (B.n // 2)) * det_half(B)
    if d == 0:
        raise ValueError("singular form")
    return d


def xi_of_disc(d, p):
    tag = square_class(d, p)
    return {SQUARE: 1, UNRAMIFIED: -1, RAMIFIED: 0}[tag]


def xi(B):
    """The square-class invariant of D_B: 1, -1 (unramified) or 0 (ramified)."""
    return xi_of_disc(disc(B), B.p)


def conductor_order(d, p):
    """Order of the discriminant of Q_p(sqrt d)/Q_p."""
    v, u = unit_part(d, p)
    if p != 2:
        return v % 2
    if v % 2:
        return 3
    return 2 if u % 4 == 3 else 0


def delta(B):
    """Order invariant Delta(B); equals the size of the GK invariant."""
    d = disc(B)
    o = ord_p(d, B.p)
    if B.n % 2:
        return o
    x = xi_of_disc(d, B.p)
    return o - conductor_order(d, B.p) + 1 - x * x


def eta(B):
    """Clifford invariant of B, computed from a diagonalization over Q_p."""
    n, p = B.n, B.p
    if n == 0:
        return 1
    if det(B.twiceB) == 0:
        raise ValueError("singular form")
    diag = [x / 2 for x in diagonalize_rational(B.twiceB)]
    e = 1
    if ((n + 1) // 4) % 2:
        e *= hilbert_symbol(-1, -1, p)
    if ((n - 1) // 2) % 2:
        e *= hilbert_symbol(-1, det_half(B), p)
    for i in range(n):
        for j in range(i + 1, n):
            e *= hilbert_symbol(diag[i], diag[j], p)
    return e
