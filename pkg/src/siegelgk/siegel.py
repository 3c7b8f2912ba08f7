"""Siegel series as exact Laurent polynomials in x = X^(1/2).

Coefficients live in Q[q]/(q^4 - p) with q = p^(1/4), stored as 4-tuples of
Fractions (the coefficients of 1, q, q^2, q^3).  The substitution
X -> p^(1/2) X is x -> q x.
"""
from dataclasses import dataclass
from fractions import Fraction

from .decompose import PAIR
from .forms import HalfIntMatrix, principal_submatrix
from .padic_invariants import check_prime, eta, ord_p, xi

ZERO = (Fraction(0),) * 4


def r_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def r_neg(a):
    return tuple(-x for x in a)


def r_scale(a, c):
    c = Fraction(c)
    return tuple(x * c for x in a)


def r_mul(a, b, p):
    out = [Fraction(0)] * 4
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if y:
                k = i + j
                out[k % 4] += x * y * (p if k >= 4 else 1)
    return tuple(out)


def q_power(e, p):
    """q^e as a ring element, for any integer e."""
    out = [Fraction(0)] * 4
    out[e % 4] = Fraction(p) ** (e // 4)
    return tuple(out)


def r_is_zero(a):
    return not any(a)


def r_monomial_inverse(a, p):
    nz = [i for i, x in enumerate(a) if x]
    if len(nz) != 1:
        raise ArithmeticError("only monomials c*q^j are inverted")
    j = nz[0]
    return r_scale(q_power(-j, p), 1 / a[j])


class AlgebraicLaurent:
    """Laurent polynomial in x with coefficients in Q[q]/(q^4 - p)."""

    __slots__ = ("p", "terms")

    def __init__(self, p, terms=None):
        self.p = p
        self.terms = {}
        for e, c in (terms or {}).items():
            c = tuple(Fraction(x) for x in c)
            if not r_is_zero(c):
                self.terms[int(e)] = c

    @classmethod
    def monomial(cls, p, exp, coeff=1, qexp=0):
        return cls(p, {exp: r_scale(q_power(qexp, p), coeff)})

    @classmethod
    def one(cls, p):
        return cls.monomial(p, 0)

    @classmethod
    def from_ints(cls, p, coeffs):
        """Build from {x_exp: rational} with rational (q^0) coefficients."""
        return cls(p, {e: (Fraction(c), 0, 0, 0) for e, c in coeffs.items()})

    def _new(self, terms):
        out = AlgebraicLaurent.__new__(AlgebraicLaurent)
        out.p = self.p
        out.terms = {e: c for e, c in terms.items() if not r_is_zero(c)}
        return out

    def __add__(self, other):
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = r_add(t[e], c) if e in t else c
        return self._new(t)

    def __neg__(self):
        return self._new({e: r_neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, AlgebraicLaurent):
            return self._new({e: r_scale(c, other) for e, c in self.terms.items()})
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                c = r_mul(c1, c2, self.p)
                e = e1 + e2
                t[e] = r_add(t[e], c) if e in t else c
        return self._new(t)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, AlgebraicLaurent) and self.p == other.p and self.terms == other.terms

    def __hash__(self):
        return hash((self.p, tuple(sorted(self.terms.items()))))

    def is_zero(self):
        return not self.terms

    def shift(self, k):
        return self._new({e + k: c for e, c in self.terms.items()})

    def substitute(self, qexp=0, invert=False):
        """f(q^qexp * x) or, with invert, f(q^qexp / x)."""
        t = {}
        for e, c in self.terms.items():
            c2 = r_mul(c, q_power(qexp * e, self.p), self.p)
            t[-e if invert else e] = c2
        return self._new(t)

    def support(self):
        return (min(self.terms), max(self.terms)) if self.terms else None

    def divmod_exact(self, den):
        """(quotient, remainder) of Laurent division by ``den``.

        ``den`` must have monomial leading and trailing coefficients.  The
        quotient is normalized so that the remainder is a Laurent polynomial
        whose degree range lies strictly below the top of ``den``.
        """
        if den.is_zero():
            raise ZeroDivisionError("division by zero Laurent polynomial")
        if self.is_zero():
            return self._new({}), self._new({})
        d_lo, d_hi = den.support()
        n_lo, _ = self.support()
        lead_inv = r_monomial_inverse(den.terms[d_hi], self.p)
        # work with polynomials: N * x^-n_lo and D * x^-d_lo
        rem = dict(self.shift(-n_lo).terms)
        dpoly = den.shift(-d_lo).terms
        ddeg = d_hi - d_lo
        quot = {}
        while rem:
            top = max(rem)
            if top < ddeg:
                break
            c = r_mul(rem[top], lead_inv, self.p)
            k = top - ddeg
            quot[k] = c
            for e, dc in dpoly.items():
                v = r_add(rem.get(e + k, ZERO), r_neg(r_mul(c, dc, self.p)))
                if r_is_zero(v):
                    rem.pop(e + k, None)
                else:
                    rem[e + k] = v
        q = self._new(quot).shift(n_lo - d_lo)
        r = self._new(rem).shift(n_lo)
        return q, r

    def exact_div(self, den):
        q, r = self.divmod_exact(den)
        if not r.is_zero():
            raise ArithmeticError("recursion did not collapse: nonzero division remainder")
        return q

    def evaluate_q_power(self, m):
        """Value at x = q^m, as a ring element."""
        out = ZERO
        for e, c in self.terms.items():
            out = r_add(out, r_mul(c, q_power(m * e, self.p), self.p))
        return out

    def only_even_q(self):
        return all(not c[1] and not c[3] for c in self.terms.values())

    def is_palindromic(self):
        return all(self.terms.get(-e) == c for e, c in self.terms.items())

    def to_json(self):
        terms = []
        for e in sorted(self.terms):
            c = self.terms[e]
            terms.append({"x_exp": e, "coeff": {f"q{i}": str(c[i]) for i in range(4)}})
        return {"variable": "x = X^(1/2)", "terms": terms}

    @classmethod
    def from_json(cls, p, obj):
        return cls(p, {t["x_exp"]: tuple(Fraction(t["coeff"][f"q{i}"]) for i in range(4)) for t in obj["terms"]})

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            c = self.terms[e]
            coeff = " + ".join(f"{c[i]}" + ("" if i == 0 else f"*q^{i}") for i in range(4) if c[i])
            parts.append(f"({coeff})*x^{e}")
        return " + ".join(parts)


@dataclass(frozen=True)
class RationalFn:
    """num / den with both numerator and denominator Laurent polynomials in x."""

    num: AlgebraicLaurent
    den: AlgebraicLaurent

    def __add__(self, other):
        if self.den == other.den:
            return RationalFn(self.num + other.num, self.den)
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den)

    def __mul__(self, other):
        if isinstance(other, RationalFn):
            return RationalFn(self.num * other.num, self.den * other.den)
        return RationalFn(self.num * other, self.den)

    def substitute(self, qexp=0, invert=False):
        return RationalFn(self.num.substitute(qexp, invert), self.den.substitute(qexp, invert))

    def to_laurent(self):
        return self.num.exact_div(self.den)


def e_frak(a, i):
    """Partial sum of a_1..a_i, rounded down to even when i is even; 0 for i = 0."""
    s = sum(a[:i])
    return s if i % 2 else 2 * (s // 2)


def _check_exponents(e, et):
    if e < et or et < 0:
        raise ValueError(f"need e >= et >= 0, got e={e}, et={et}")


def c_factor(e, et, xi_, p):
    """C(e, et, xi; X) = p^(et/4) X^(-(e-et)/2 - 1) (1 - xi p^(-1/2) X) / (X^-1 - X)."""
    _check_exponents(e, et)
    L = AlgebraicLaurent
    num = L.monomial(p, -(e - et) - 2, 1, et) * (L.one(p) - L.monomial(p, 2, xi_, -2))
    den = L.from_ints(p, {-2: 1, 2: -1})
    return RationalFn(num, den)


def d_factor(e, et, xi_, p):
    """D(e, et, xi; X) = p^(et/4) X^(-(e-et)/2) / (1 - xi X)."""
    _check_exponents(e, et)
    L = AlgebraicLaurent
    num = L.monomial(p, -(e - et), 1, et)
    den = L.from_ints(p, {0: 1, 2: -xi_})
    return RationalFn(num, den)


def level_factor(i, e, et, xi_, p):
    """C_i: the C factor for even i and the D factor for odd i."""
    return c_factor(e, et, xi_, p) if i % 2 == 0 else d_factor(e, et, xi_, p)


def rank_one_series(a, p):
    """X^(-a/2) + X^(-a/2 + 1) + ... + X^(a/2)."""
    return AlgebraicLaurent.from_ints(p, {2 * i - a: 1 for i in range(a + 1)})


def _step(n, a, xi_, zeta, prev, p):
    """One level of the two-term recursion, divided out exactly."""
    e, et = e_frak(a, n), e_frak(a, n - 1)
    f = level_factor(n, e, et, xi_, p)
    t1 = f * prev.substitute(1)
    t2 = f.substitute(0, invert=True) * (prev.substitute(1, invert=True) * zeta)
    return (t1 + t2).to_laurent()


def f_naive(H, p):
    """The series attached to a naive EGK datum by the two-term recursion."""
    from .gk import validate_naive_egk

    check_prime(p)
    bad = validate_naive_egk(H)
    if bad:
        raise ValueError(f"invalid naive EGK datum: {bad}")
    a, eps = list(H.a), list(H.eps)
    if not a:
        return AlgebraicLaurent.one(p)
    F = rank_one_series(a[0], p)
    for n in range(2, len(a) + 1):
        if n % 2 == 0:
            xi_, zeta = eps[n - 1], 1
        else:
            xi_, zeta = eps[n - 2], eps[n - 1]
        F = _step(n, a, xi_, zeta, F, p)
    return F


def _finalize(F):
    if not F.only_even_q():
        raise ArithmeticError("odd power of p^(1/4) survived in the Siegel series")
    return F


def siegel_series(B):
    """F~(B, X) through decomposition, pre-optimal form and the naive EGK datum."""
    from .gk import naive_egk

    B.require_nondegenerate()
    return _finalize(f_naive(naive_egk(B), B.p))


# -- block recursion ---------------------------------------------------------

def _two_level(n, a, p, xi_top, xi_mid, eta_top, eta_mid, prev):
    """Peel a rank-2 block at once.

    The outer pair of terms evaluates F(B^(n-2)) at p X^{+-1}, the inner pair
    at X.  The signs are eta on the X^-1 branch of level n and eta' on the
    inverted branch of level n - 1.
    """
    e2, e1, e0 = e_frak(a, n), e_frak(a, n - 1), e_frak(a, n - 2)
    top = level_factor(n, e2, e1, xi_top, p)
    mid = level_factor(n - 1, e1, e0, xi_mid, p)
    top_inv = top.substitute(0, invert=True)
    t1 = top * mid.substitute(1) * prev.substitute(2)
    t2 = top_inv * mid.substitute(1, invert=True) * prev.substitute(2, invert=True) * eta_top
    t3 = top * mid.substitute(-1, invert=True) * prev * eta_mid
    t4 = top_inv * mid.substitute(-1) * prev * (eta_top * eta_mid)
    return (t1 + t2 + t3 + t4).to_laurent()


def f_block_recursion(P, free_sign=1):
    """F~(B, X) by peeling the last component of a pre-optimal form.

    Rank-1 components use the one-level recursion with (xi, eta) read off
    B and B^(n-1); rank-2 components use the two-level recursion with
    (xi, xi', eta, eta') read off B, B^(n-1) and B^(n-2).
    """
    from .gk import gk_invariant
    from .preoptimal import PreOptimalForm, preoptimal_form

    if isinstance(P, HalfIntMatrix):
        P = preoptimal_form(P)
    p = P.p
    form = P.assembled()
    blocks = P.blocks
    a = list(gk_invariant(P))

    def sub(m):
        return principal_submatrix(form, m)

    def rec(r):
        if r == 0:
            return AlgebraicLaurent.one(p)
        n = sum(b.rank for b in blocks[:r])
        C = blocks[r - 1]
        prev = rec(r - 1)
        B = sub(n)
        if C.rank == 1:
            if n == 1:
                return rank_one_series(a[0], p)
            if n % 2 == 0:
                xi_, zeta = xi(B), 1
            else:
                xi_, zeta = xi(sub(n - 1)), eta(B)
            return _step(n, a, xi_, zeta, prev, p)
        S = sum(a[:n])
        if n % 2 == 0:
            xi_top = xi(B)
            xi_mid = xi(sub(n - 2))
            eta_top = 1
            if S % 2 == 0:
                eta_mid = eta(B) * xi(B) ** a[n - 1]
            else:
                eta_mid = free_sign
        else:
            xi_top = xi_mid = 0 if sum(a[: n - 1]) % 2 else free_sign
            eta_top = eta(B)
            eta_mid = eta(sub(n - 2))
        return _two_level(n, a, p, xi_top, xi_mid, eta_top, eta_mid, prev)

    return _finalize(rec(len(blocks)))


def siegel_json(F):
    return F.to_json()
