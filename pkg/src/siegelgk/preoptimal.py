"""Pre-optimal forms: the PO1-PO6 predicate and the rewriting from a weak canonical form."""
from dataclasses import dataclass, field
from functools import cached_property

from .decompose import PAIR, UNIT, BlockDecomposition, assemble, decompose, weak_canonical_violation
from .forms import HalfIntMatrix
from .padic_invariants import eta, ord_p, xi


@dataclass(frozen=True)
class PrefixData:
    deg: int
    ord_det: int
    xi: int
    eta: int


def prefix_data(blocks, p):
    """Invariants of each prefix B^[j], j = 0..r."""
    out = []
    for j in range(len(blocks) + 1):
        f = assemble(blocks[:j], p)
        out.append(PrefixData(f.n, ord_p(f.det(), p) if f.n else 0, xi(f), eta(f)))
    return out


@dataclass
class PreOptimalForm:
    p: int
    blocks: list
    witness: list
    precision: int
    source: HalfIntMatrix = field(default=None, repr=False)
    cases: list = field(default_factory=list)

    @cached_property
    def prefix(self):
        return prefix_data(self.blocks, self.p)

    @property
    def n(self):
        return sum(b.rank for b in self.blocks)

    def boundaries(self):
        """Cumulative degrees n~_1, ..., n~_r."""
        out, t = [], 0
        for b in self.blocks:
            t += b.rank
            out.append(t)
        return out

    def assembled(self):
        return assemble(self.blocks, self.p)

    def verify(self, B=None):
        dec = BlockDecomposition(self.p, self.blocks, self.witness, self.precision, self.source)
        return dec.verify(B)

    def to_json(self):
        return {
            "blocks": [b.to_json() for b in self.blocks],
            "witness": [list(r) for r in self.witness],
            "precision": self.precision,
            "poc": [b.to_json() for b in self.blocks],
        }


def is_preoptimal(blocks, p=2):
    """None if the component list is pre-optimal, else (clause, indices).

    Indices in the report are 1-based, matching the component numbering.
    """
    if p != 2:
        ks = [b.k for b in blocks]
        if any(b.core != UNIT for b in blocks) or ks != sorted(ks):
            return ("diagonal", ())
        return None
    r = len(blocks)
    pre = prefix_data(blocks, p)
    k = [None] + [b.k for b in blocks]
    C = [None] + list(blocks)
    # PO1
    for m in set(k[1:]):
        if sum(C[i].rank for i in range(1, r + 1) if k[i] == m and C[i].is_diagonal) > 2:
            return ("PO1", (m,))
        E = [i for i in range(1, r + 1) if k[i] == m and C[i].is_plane]
        if E and E != list(range(E[0], E[-1] + 1)):
            return ("PO1", tuple(E))
    # PO2
    for i in range(1, r + 1):
        for j in range(i + 1, r + 1):
            di, dj = C[i].is_diagonal, C[j].is_diagonal
            if di == dj:
                ok = k[i] <= k[j]
            elif di:
                ok = k[i] <= k[j] - 1
            else:
                ok = k[i] <= k[j] + 1
            if not ok:
                return ("PO2", (i, j))
    for i in range(1, r + 1):
        cur, prev = pre[i], pre[i - 1]
        # PO3
        if C[i].core == PAIR:
            c1 = cur.deg % 2 == 0 and prev.xi == 0 and cur.xi == 0
            c2 = prev.deg % 2 == 1 and (prev.ord_det + k[i]) % 2 == 0
            if i < 2 or not (c1 or c2):
                return ("PO3", (i,))
        # PO4
        if i >= 2 and k[i] == k[i - 1] - 1 and C[i].is_diagonal and C[i - 1].is_plane:
            if C[i].rank == 1:
                c1 = cur.deg % 2 == 0 and cur.ord_det % 2 == 0
                c2 = cur.deg % 2 == 1 and prev.xi == 0
                if not (c1 or c2):
                    return ("PO4", (i,))
        # PO5
        if i < r and C[i].is_diagonal and C[i + 1].is_plane and k[i] == k[i + 1] - 1:
            c1 = cur.deg % 2 == 0 and cur.ord_det % 2 == 1
            c2 = cur.deg % 2 == 1 and (i == 1 or prev.xi != 0)
            if C[i].rank != 1 or not (c1 or c2):
                return ("PO5", (i,))
        # PO6
        if i < r and cur.deg % 2 == 0 and C[i].is_diagonal and C[i + 1].is_diagonal and k[i + 1] == k[i] + 1:
            if cur.xi != 0:
                return ("PO6", (i,))
    return None


class UncoveredCase(RuntimeError):
    pass


def _inv(blocks, p):
    f = assemble(blocks, p)
    return f.n, (ord_p(f.det(), p) if f.n else 0), xi(f)


def poc(items, p=2, trace=None):
    """Pre-optimal component list of a weak canonical form.

    ``items`` is a list of (Block, columns) pairs in weak canonical order.
    The last block (or the group of even planes at the top scale) is peeled
    off and the case analysis decides where it goes relative to the
    recursively treated remainder.
    """
    trace = trace if trace is not None else []
    if not items:
        return []
    blocks = [b for b, _ in items]
    last, cols = items[-1]
    if last.is_diagonal:
        rest = items[:-1]
        if last.core == UNIT:
            trace.append(("1", len(blocks)))
            return poc(rest, p, trace) + [items[-1]]
        n, _, xb = _inv(blocks, p)
        n1, o1, x1 = _inv(blocks[:-1], p)
        if (n % 2 == 0 and x1 == 0 and xb == 0) or (n % 2 == 1 and (o1 + last.k) % 2 == 0):
            trace.append(("2.1", len(blocks)))
            return poc(rest, p, trace) + [items[-1]]
        trace.append(("2.2", len(blocks)))
        u1, u2 = last.split()
        return poc(rest, p, trace) + [(u1, cols[:1]), (u2, cols[1:])]
    j = len(items)
    while j > 0 and items[j - 1][0].is_plane and items[j - 1][0].k == last.k:
        j -= 1
    planes, rest = items[j:], items[:j]
    if not rest:
        trace.append(("3.0", len(blocks)))
        return planes
    prev, pcols = rest[-1]
    if prev.is_plane or last.k >= prev.k + 2:
        trace.append(("3.3" if last.k >= prev.k + 2 else "3.0", len(blocks)))
        return poc(rest, p, trace) + planes
    if last.k != prev.k + 1:
        raise UncoveredCase(f"block {len(rest)}: diagonal block at the scale of the following planes")
    B1 = rest[:-1]
    b1 = [b for b, _ in B1]
    d1, o1, x1 = _inv(b1, p)
    dr, orr, xr = _inv(b1 + [prev], p)
    if prev.core == UNIT:
        a = dr % 2 == 0 and orr % 2 == 0
        b = len(B1) >= 1 and d1 % 2 == 0 and x1 == 0
        if a or b:
            trace.append(("3.1.1", len(rest)))
            return poc(B1, p, trace) + planes + [rest[-1]]
        trace.append(("3.1.2", len(rest)))
        return poc(B1, p, trace) + [rest[-1]] + planes
    u1, u2 = prev.split()
    c1 = (not B1) or (d1 % 2 == 0 and x1 != 0) or (d1 % 2 == 1 and (o1 + prev.k) % 2 == 1)
    c2 = (B1 and d1 % 2 == 0 and x1 == 0 and xr == 0) or (d1 % 2 == 1 and (o1 + prev.k) % 2 == 0)
    c3 = bool(B1) and d1 % 2 == 0 and x1 == 0 and xr != 0
    if sum(map(bool, (c1, c2, c3))) != 1:
        raise UncoveredCase(f"block {len(rest)}: unit pair below planes matches {(c1, c2, c3)}")
    if c1:
        trace.append(("3.2.1", len(rest)))
        return poc(B1, p, trace) + [(u1, pcols[:1])] + planes + [(u2, pcols[1:])]
    if c2:
        trace.append(("3.2.2", len(rest)))
        return poc(B1, p, trace) + planes + [rest[-1]]
    trace.append(("3.2.3", len(rest)))
    return poc(B1, p, trace) + planes + [(u1, pcols[:1]), (u2, pcols[1:])]


def to_preoptimal(dec):
    """Rewrite a weak canonical decomposition (p = 2) into a pre-optimal form."""
    p = dec.p
    if p != 2:
        return PreOptimalForm(p, list(dec.blocks), dec.witness, dec.precision, dec.source, [])
    bad = weak_canonical_violation(dec.blocks)
    if bad:
        raise ValueError(f"input is not weak canonical: condition {bad[0]} at block {bad[1] + 1}")
    items, c = [], 0
    for b in dec.blocks:
        items.append((b, list(range(c, c + b.rank))))
        c += b.rank
    trace = []
    comps = poc(items, p, trace)
    order = [col for _, cols in comps for col in cols]
    W = [[row[c] for c in order] for row in dec.witness]
    out = PreOptimalForm(p, [b for b, _ in comps], W, dec.precision, dec.source, trace[::-1])
    bad = is_preoptimal(out.blocks, p)
    if bad:
        raise AssertionError(f"rewriting produced a non pre-optimal form: {bad}")
    if dec.source is not None and not out.verify():
        raise AssertionError("pre-optimal witness failed to verify")
    return out


def preoptimal_form(B):
    """Decompose B and return a pre-optimal form (sorted diagonal for odd p)."""
    return to_preoptimal(decompose(B))
