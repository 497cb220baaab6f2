"""Small shared helpers: stable seed mixing and exact-number coercion."""

from __future__ import annotations

from fractions import Fraction

_MASK64 = (1 << 64) - 1


def _mix_word(z: int) -> int:
    # splitmix64 finalizer; stable across platforms and Python versions.
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D4A4A979FB4A1E & _MASK64
    return z ^ (z >> 31)


def mix64(*words: int) -> int:
    """Deterministic 64-bit hash of integer words (order-sensitive)."""
    acc = 0x9E3779B97F4A7C15
    for w in words:
        acc = _mix_word((acc + (w & _MASK64) + 0x9E3779B97F4A7C15) & _MASK64)
    return acc


def mix64_array(base: int, indices) -> "np.ndarray":
    """Vectorized ``mix64(base, i)`` for an array of indices (uint64)."""
    import numpy as np

    with np.errstate(over="ignore"):
        acc0 = np.uint64(mix64(base))
        # inline of mix64's second round with acc0 as the running accumulator
        z = acc0 + indices.astype(np.uint64) + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D4A4A979FB4A1E)
        return z ^ (z >> np.uint64(31))


def as_fraction(x: int | float | str | Fraction) -> Fraction:
    """Exact rational form of a parameter.

    Strings and Fractions convert exactly; floats convert to the exact
    binary rational they already denote.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)
