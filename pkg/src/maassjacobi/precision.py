"""Explicit precision control for all floating-point work.

Every numeric routine takes a PrecisionContext; nothing reads or writes
ambient precision outside a ``with ctx.working():`` block, and the block
restores the previous mpmath state on exit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp

from .errors import PrecisionError
from .gaussian import GaussianRational

GUARD_BITS = 24


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision in bits plus a cap on series summation length."""

    bits: int = 128
    max_terms: int = 20000

    def __post_init__(self):
        if self.bits < 53:
            raise ValueError("precision below 53 bits is not supported")
        if self.max_terms <= 0:
            raise ValueError("max_terms must be positive")

    def working(self):
        """mpmath workprec block at bits + guard digits."""
        return mp.workprec(self.bits + GUARD_BITS)

    @property
    def eps(self):
        with self.working():
            return mp.mpf(2) ** (-self.bits)

    def doubled(self) -> "PrecisionContext":
        return PrecisionContext(bits=2 * self.bits, max_terms=2 * self.max_terms)

    def exhausted(self, what: str):
        raise PrecisionError(
            f"{what}: did not converge within {self.max_terms} terms at {self.bits} bits"
        )


DEFAULT_CONTEXT = PrecisionContext()


def to_mpf(x):
    """Exact rational (or int/float/mpf) to mpf at current working precision."""
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def to_mpc(x):
    """Coerce exact and floating inputs to mpc at current working precision."""
    if isinstance(x, GaussianRational):
        return x.to_mpc(mp)
    if isinstance(x, Fraction):
        return mp.mpc(to_mpf(x))
    return mp.mpc(x)


def e_of(x):
    """e(x) = exp(2 pi i x) at current working precision."""
    return mp.exp(2j * mp.pi * to_mpc(x))


def mpf_str(x) -> str:
    """Round-trip-exact decimal string for an mpf/mpc at current precision."""
    if isinstance(x, mpmath.mpc) or (hasattr(x, "imag") and getattr(x, "imag", 0)):
        x = mp.mpc(x)
        return f"({mpf_str(x.real)} {mpf_str(x.imag)}j)"
    digits = mp.dps + 6
    return mp.nstr(mp.mpf(x), digits, strip_zeros=False)
