"""Set dissimilarities of the symmetric Tversky family and its relatives.

Every measure takes two finite sets and returns an exact ``Fraction``; the
only exception is :func:`jp_distance`, whose outer p-th root is evaluated in
binary floating point.  All measures return 0 when both operands are empty.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import AbstractSet, Callable, Hashable, Iterable, Optional, Union

from .errors import DomainError, UndefinedValue, UniverseTooSmall

FiniteSet = frozenset
RationalLike = Union[Fraction, int, str, float]
SetMeasure = Callable[[AbstractSet, AbstractSet], Union[Fraction, float]]

JP_MAX_EXPONENT = 1024


def as_rational(value: RationalLike) -> Fraction:
    """Convert ``value`` to an exact ``Fraction``.

    Strings are parsed exactly ("0.21" -> 21/100, "2/3" -> 2/3).  Floats are
    read through their shortest repr, so ``0.3`` means 3/10 rather than the
    nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise DomainError(f"non-finite parameter {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse {value!r} as an exact rational") from exc
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def parse_set(text: str) -> FiniteSet:
    """Parse a comma-separated atom list; all-integer atoms become ints."""
    atoms = [tok.strip() for tok in text.split(",")]
    atoms = [tok for tok in atoms if tok]
    try:
        return frozenset(int(tok) for tok in atoms)
    except ValueError:
        return frozenset(atoms)


@dataclass(frozen=True)
class PairStats:
    cap: int
    xy: int
    yx: int

    @property
    def m(self) -> int:
        return min(self.xy, self.yx)

    @property
    def M(self) -> int:
        return max(self.xy, self.yx)

    @property
    def union(self) -> int:
        return self.cap + self.xy + self.yx


def pair_stats(X: AbstractSet, Y: AbstractSet) -> PairStats:
    cap = len(X & Y)
    return PairStats(cap=cap, xy=len(X) - cap, yx=len(Y) - cap)


@dataclass(frozen=True)
class TriplePartition:
    """Venn-region counts of (X, Y, Z); ``counts[0b101]`` is |X ∩ ¬Y ∩ Z|."""

    counts: tuple

    def __getitem__(self, key: str) -> int:
        # key like "101": membership in X, Y, Z
        return self.counts[int(key, 2)]

    @property
    def size(self) -> int:
        return sum(self.counts)

    def pair(self, first: int, second: int) -> PairStats:
        """Pairwise stats for two of the sets, indexed 0=X, 1=Y, 2=Z."""
        cap = xy = yx = 0
        for region, count in enumerate(self.counts):
            a = region >> (2 - first) & 1
            b = region >> (2 - second) & 1
            if a and b:
                cap += count
            elif a:
                xy += count
            elif b:
                yx += count
        return PairStats(cap, xy, yx)


def triple_partition(
    X: AbstractSet, Y: AbstractSet, Z: AbstractSet, universe: Optional[AbstractSet] = None
) -> TriplePartition:
    covered = X | Y | Z
    if universe is None:
        universe = covered
    elif not covered <= universe:
        raise UniverseTooSmall(
            f"{len(covered - universe)} element(s) of X∪Y∪Z lie outside the universe"
        )
    counts = [0] * 8
    for e in covered:
        counts[(e in X) << 2 | (e in Y) << 1 | (e in Z)] += 1
    counts[0] = len(universe) - len(covered)
    return TriplePartition(tuple(counts))


def _weighted_difference(alpha: Fraction, stats: PairStats) -> Fraction:
    return alpha * stats.m + (1 - alpha) * stats.M


def delta(alpha: RationalLike, X: AbstractSet, Y: AbstractSet) -> Fraction:
    """alpha*min(|X\\Y|,|Y\\X|) + (1-alpha)*max(|X\\Y|,|Y\\X|)."""
    alpha = as_rational(alpha)
    return _weighted_difference(alpha, pair_stats(X, Y))


def strm_dissimilarity(
    alpha: RationalLike,
    beta: RationalLike,
    X: AbstractSet,
    Y: AbstractSet,
    bias: RationalLike = 0,
) -> Fraction:
    """Complement of the symmetric Tversky ratio model, D_{alpha,beta}.

    Raises UndefinedValue at alpha=1 for one empty operand and one nonempty
    one with bias 0: the ratio is 0/0 there.
    """
    alpha, beta, bias = as_rational(alpha), as_rational(beta), as_rational(bias)
    stats = pair_stats(X, Y)
    if stats.union == 0:
        return Fraction(0)
    weighted = beta * _weighted_difference(alpha, stats)
    denom = stats.cap + bias + weighted
    if denom == 0:
        raise UndefinedValue(
            f"D_{{{alpha},{beta}}} is 0/0 for |X∩Y|={stats.cap}, |X\\Y|={stats.xy}, |Y\\X|={stats.yx}"
        )
    return weighted / denom


def tversky_dissimilarity(
    alpha: RationalLike, beta: RationalLike, X: AbstractSet, Y: AbstractSet
) -> Fraction:
    alpha, beta = as_rational(alpha), as_rational(beta)
    stats = pair_stats(X, Y)
    if stats.union == 0:
        return Fraction(0)
    denom = stats.cap + alpha * stats.xy + beta * stats.yx
    if denom == 0:
        raise UndefinedValue(f"Tversky index is 0/0 at alpha={alpha}, beta={beta}")
    return 1 - Fraction(stats.cap) / denom


def jaccard(X: AbstractSet, Y: AbstractSet) -> Fraction:
    stats = pair_stats(X, Y)
    if stats.union == 0:
        return Fraction(0)
    return Fraction(stats.xy + stats.yx, stats.union)


def nid_analogue(X: AbstractSet, Y: AbstractSet) -> Fraction:
    """max(|X\\Y|,|Y\\X|) / max(|X|,|Y|)."""
    stats = pair_stats(X, Y)
    if stats.union == 0:
        return Fraction(0)
    return Fraction(stats.M, max(len(X), len(Y)))


def jp_distance(p: RationalLike, X: AbstractSet, Y: AbstractSet) -> Union[float, Fraction]:
    """The J_p interpolation between Jaccard (p=1) and the NID analogue (p→∞).

    The inner ratio is formed exactly in integers (rational p), the p-th root
    is taken in log space so large exponents cannot underflow.  Relative
    error is a few ulps.  At p=1 no root is needed and the exact Jaccard
    ``Fraction`` is returned.
    """
    p = as_rational(p)
    if not 1 <= p <= JP_MAX_EXPONENT:
        raise DomainError(f"p must lie in [1, {JP_MAX_EXPONENT}], got {p}")
    stats = pair_stats(X, Y)
    if stats.union == 0:
        return 0.0
    if p == 1:
        return jaccard(X, Y)
    if stats.xy == 0 and stats.yx == 0:
        return 0.0
    terms = (len(X), len(Y), stats.yx, stats.xy)
    if p.denominator == 1:
        e = p.numerator
        num = 2 * (stats.yx**e + stats.xy**e)
        den = sum(t**e for t in terms)
        log_ratio = math.log(num) - math.log(den)
    else:
        # irrational powers: fall back to floating terms scaled by the largest
        top = max(terms)
        pf = float(p)
        num = 2 * sum((t / top) ** pf for t in (stats.yx, stats.xy))
        den = sum((t / top) ** pf for t in terms)
        log_ratio = math.log(num) - math.log(den)
    return min(1.0, math.exp(log_ratio / float(p)))


def dice_similarity(X: AbstractSet, Y: AbstractSet) -> Fraction:
    total = len(X) + len(Y)
    if total == 0:
        return Fraction(1)
    return Fraction(2 * len(X & Y), total)


def overlap_coefficient(X: AbstractSet, Y: AbstractSet) -> Fraction:
    if not X and not Y:
        return Fraction(1)
    smaller = min(len(X), len(Y))
    if smaller == 0:
        raise UndefinedValue("overlap coefficient is undefined when exactly one set is empty")
    return Fraction(len(X & Y), smaller)


def steinhaus_general(
    gamma: RationalLike, s: RationalLike, X: AbstractSet, Y: AbstractSet
) -> Fraction:
    """(γm + M) / (|X∩Y| + s|X∪Y| + γm + M); s=1 is the Steinhaus transform of delta."""
    gamma, s = as_rational(gamma), as_rational(s)
    stats = pair_stats(X, Y)
    if stats.union == 0:
        return Fraction(0)
    top = gamma * stats.m + stats.M
    return top / (stats.cap + s * stats.union + top)


@dataclass(frozen=True)
class EmptyExtension:
    """Extend a measure on nonempty sets to the empty set: d(X,∅)=1, d(∅,∅)=0.

    This is a metric extension whenever ``base`` is a metric bounded by 2.
    """

    base: SetMeasure

    def __call__(self, X: AbstractSet, Y: AbstractSet):
        if not X and not Y:
            return Fraction(0)
        if not X or not Y:
            return Fraction(1)
        return self.base(X, Y)


def extend_with_empty(d: SetMeasure) -> EmptyExtension:
    return EmptyExtension(d)


class Family(enum.Enum):
    STRM = "strm"
    TVERSKY = "tversky"
    J1 = "j1"
    JINF = "jinf"
    JP = "jp"
    DICE = "dice"
    OVERLAP = "overlap"
    DELTA = "delta"
    STEINHAUS = "steinhaus"
    LZJD = "lzjd"
    ZKGRAM = "zkgram"
    EDIT = "edit"

    @classmethod
    def parse(cls, name: str) -> "Family":
        key = name.strip().lower().replace("-", "").replace("_", "")
        aliases = {"jaccard": "j1", "nid": "jinf", "z": "zkgram", "levenshtein": "edit"}
        key = aliases.get(key, key)
        for member in cls:
            if member.value == key:
                return member
        raise DomainError(f"unknown measure family {name!r}")


SEQUENCE_FAMILIES = frozenset({Family.LZJD, Family.ZKGRAM, Family.EDIT})


@dataclass(frozen=True)
class MeasureSpec:
    """A named dissimilarity with exact parameters.

    Only the fields relevant to ``family`` are read.  Instances are callable
    on two sets for every set-valued family.
    """

    family: Family
    alpha: Optional[Fraction] = None
    beta: Optional[Fraction] = None
    gamma: Optional[Fraction] = None
    s: Optional[Fraction] = None
    p: Optional[Fraction] = None
    k: int = 2
    bias: Fraction = Fraction(0)
    normalize: bool = False

    def __post_init__(self):
        if isinstance(self.family, str):
            object.__setattr__(self, "family", Family.parse(self.family))
        for name in ("alpha", "beta", "gamma", "s", "p", "bias"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, as_rational(value))
        self._validate()

    def _require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise DomainError(f"{self.family.value} needs parameter(s): {', '.join(missing)}")

    def _validate(self) -> None:
        f = self.family
        if f in (Family.STRM, Family.DELTA, Family.ZKGRAM):
            self._require("alpha")
            if not 0 <= self.alpha <= 1:
                raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")
        if f is Family.STRM:
            self._require("beta")
            if self.beta <= 0:
                raise DomainError(f"beta must be > 0, got {self.beta}")
            if self.bias < 0:
                raise DomainError(f"bias must be >= 0, got {self.bias}")
        if f is Family.TVERSKY:
            self._require("alpha", "beta")
            if self.alpha < 0 or self.beta < 0:
                raise DomainError("Tversky parameters must be >= 0")
        if f is Family.JP:
            self._require("p")
            if not 1 <= self.p <= JP_MAX_EXPONENT:
                raise DomainError(f"p must lie in [1, {JP_MAX_EXPONENT}], got {self.p}")
        if f is Family.STEINHAUS:
            self._require("gamma", "s")
            if not 0 <= self.gamma <= 1:
                raise DomainError(f"gamma must lie in [0, 1], got {self.gamma}")
            if self.s < 0:
                raise DomainError(f"s must be >= 0, got {self.s}")
        if self.k < 1:
            raise DomainError(f"k must be a positive integer, got {self.k}")

    @property
    def is_sequence_measure(self) -> bool:
        return self.family in SEQUENCE_FAMILIES

    def __call__(self, X: AbstractSet, Y: AbstractSet):
        f = self.family
        if f is Family.STRM:
            return strm_dissimilarity(self.alpha, self.beta, X, Y, self.bias)
        if f is Family.TVERSKY:
            return tversky_dissimilarity(self.alpha, self.beta, X, Y)
        if f is Family.J1:
            return jaccard(X, Y)
        if f is Family.JINF:
            return nid_analogue(X, Y)
        if f is Family.JP:
            return jp_distance(self.p, X, Y)
        if f is Family.DICE:
            return 1 - dice_similarity(X, Y)
        if f is Family.OVERLAP:
            return 1 - overlap_coefficient(X, Y)
        if f is Family.DELTA:
            return delta(self.alpha, X, Y)
        if f is Family.STEINHAUS:
            return steinhaus_general(self.gamma, self.s, X, Y)
        raise DomainError(f"{f.value} compares sequences, not sets")

    def describe(self) -> str:
        parts = [self.family.value]
        for name in ("alpha", "beta", "gamma", "s", "p"):
            value = getattr(self, name)
            if value is not None:
                parts.append(f"{name}={value}")
        if self.family is Family.ZKGRAM:
            parts.append(f"k={self.k}")
        if self.bias:
            parts.append(f"bias={self.bias}")
        if self.normalize:
            parts.append("normalized")
        return " ".join(parts)


def strm(alpha: RationalLike, beta: RationalLike, bias: RationalLike = 0) -> MeasureSpec:
    return MeasureSpec(Family.STRM, alpha=alpha, beta=beta, bias=bias)


def tversky(alpha: RationalLike, beta: RationalLike) -> MeasureSpec:
    return MeasureSpec(Family.TVERSKY, alpha=alpha, beta=beta)


def delta_measure(alpha: RationalLike) -> MeasureSpec:
    return MeasureSpec(Family.DELTA, alpha=alpha)


def jp(p: RationalLike) -> MeasureSpec:
    return MeasureSpec(Family.JP, p=p)


def subsets(n: int) -> list:
    """All subsets of {0,…,n-1}, indexed by bitmask."""
    return [frozenset(i for i in range(n) if mask >> i & 1) for mask in range(1 << n)]


def set_to_mask(X: Iterable[Hashable], universe: Optional[Iterable] = None) -> int:
    """Bitmask of X; bit i is the i-th smallest element of ``universe`` (default: X itself)."""
    order = sorted(universe if universe is not None else X)
    rank = {e: i for i, e in enumerate(order)}
    return sum(1 << rank[e] for e in X)
