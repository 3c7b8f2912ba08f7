"""Gross-Keating invariants, EGK data and Siegel series of p-adic half-integral forms."""
from .forms import HalfIntMatrix, direct_sum, transform
from .padic_invariants import delta, eta, hilbert_symbol, xi
from .decompose import decompose
from .preoptimal import preoptimal_form
from .gk import egk_datum, gk_invariant, naive_egk, upsilon
from .siegel import f_block_recursion, f_naive, siegel_series

__all__ = [
    "HalfIntMatrix",
    "decompose",
    "delta",
    "direct_sum",
    "egk_datum",
    "eta",
    "f_block_recursion",
    "f_naive",
    "gk_invariant",
    "hilbert_symbol",
    "naive_egk",
    "preoptimal_form",
    "siegel_series",
    "transform",
    "upsilon",
    "xi",
]
