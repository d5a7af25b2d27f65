"""k-gram profile distances and Levenshtein edit distance between sequences."""
from __future__ import annotations

from fractions import Fraction
from typing import Union

from .measures import RationalLike, as_rational, delta, pair_stats

Sequence_ = Union[str, bytes]


def kgram_profile(sequence: Sequence_, k: int = 2) -> frozenset:
    """All distinct contiguous substrings of length ``k``."""
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    return frozenset(sequence[i : i + k] for i in range(len(sequence) - k + 1))


def z_distance(
    alpha: RationalLike, k: int, x0: Sequence_, x1: Sequence_, normalize: bool = False
) -> Fraction:
    """alpha*min(|A0|,|A1|) + (1-alpha)*max(|A0|,|A1|), A_i the k-grams of x_i absent from the other.

    With ``normalize`` the value is divided by the size of the union of the
    two profiles (0 when both profiles are empty), which maps it into [0, 1].
    """
    alpha = as_rational(alpha)
    p0, p1 = kgram_profile(x0, k), kgram_profile(x1, k)
    value = delta(alpha, p0, p1)
    if normalize:
        union = pair_stats(p0, p1).union
        return value / union if union else Fraction(0)
    return value


def levenshtein(a: Sequence_, b: Sequence_) -> int:
    """Unit-cost insert/delete/substitute distance, two-row DP in O(len(a)*len(b))."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i]
        for j, cb in enumerate(b, 1):
            current.append(
                min(
                    previous[j] + 1,
                    current[j - 1] + 1,
                    previous[j - 1] + (ca != cb),
                )
            )
        previous = current
    return previous[-1]
