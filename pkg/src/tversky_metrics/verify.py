"""Metricity of the D_{alpha,beta} family: closed-form region, exhaustive
triangle scans over small power sets, and constructive counterexamples.

Exhaustive scans evaluate the measure once per ordered pair, scale the whole
distance table to a common integer denominator and compare in integers, so
equality on the region boundary is never perturbed by rounding.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import AbstractSet, Callable, Iterable, List, Optional, Sequence, Union

import numpy as np

from .errors import DomainError, GroundTooLarge, NotInRegime
from .measures import (
    RationalLike,
    SetMeasure,
    as_rational,
    pair_stats,
    strm,
    strm_dissimilarity,
    subsets,
)

MAX_GROUND = 6
# float-valued measures (J_p) are compared with this slack
FLOAT_TOLERANCE = 1e-12

Number = Union[Fraction, int, float]


def boundary_beta(alpha: RationalLike) -> Optional[Fraction]:
    """Least beta with D_{alpha,beta} satisfying the triangle on the pair
    witness, 1/(1-alpha); None at alpha = 1 where no beta suffices."""
    alpha = as_rational(alpha)
    if alpha == 1:
        return None
    return 1 / (1 - alpha)


def region_predicate(alpha: RationalLike, beta: RationalLike) -> bool:
    """True iff D_{alpha,beta} is a metric on every finite power set."""
    alpha, beta = as_rational(alpha), as_rational(beta)
    if not 0 <= alpha <= 1:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    if beta <= 0:
        raise DomainError(f"beta must be > 0, got {beta}")
    return alpha <= Fraction(1, 2) and beta >= 1 / (1 - alpha)


@dataclass(frozen=True)
class Counterexample:
    """A certified strict violation d(X,Y) > d(X,Z) + d(Z,Y)."""

    X: object
    Y: object
    Z: object
    dXY: Number
    dXZ: Number
    dZY: Number

    @property
    def margin(self) -> Number:
        return self.dXY - self.dXZ - self.dZY

    def reverify(self, measure: Callable) -> bool:
        """Recompute the three distances from scratch and compare exactly."""
        fresh = (measure(self.X, self.Y), measure(self.X, self.Z), measure(self.Z, self.Y))
        if fresh != (self.dXY, self.dXZ, self.dZY):
            return False
        return fresh[0] - fresh[1] - fresh[2] > 0


def _triple(measure: Callable, X, Y, Z) -> Counterexample:
    return Counterexample(X, Y, Z, measure(X, Y), measure(X, Z), measure(Z, Y))


def distance_table(points: Sequence, measure: Callable) -> list:
    return [[measure(a, b) for b in points] for a in points]


def _scaled_array(table: list):
    """Return (array, tolerance) with the table in a comparison-safe dtype."""
    flat = [v for row in table for v in row]
    if all(isinstance(v, (int, Fraction)) for v in flat):
        lcm = 1
        for v in flat:
            den = Fraction(v).denominator
            lcm = lcm * den // math.gcd(lcm, den)
        ints = [[int(Fraction(v) * lcm) for v in row] for row in table]
        biggest = max((abs(v) for row in ints for v in row), default=0)
        dtype = np.int64 if 3 * biggest < 2**62 else object
        return np.array(ints, dtype=dtype), 0
    return np.array(table, dtype=float), FLOAT_TOLERANCE


def _scan(D: np.ndarray, tol, start: int, stop: int):
    """First (x, y, z) in lexicographic order with x in [start, stop)."""
    DT = D.T
    for x in range(start, stop):
        row = D[x]
        # bad[y, z] = d(x,y) > d(x,z) + d(z,y)
        bad = row[:, None] > row[None, :] + DT + tol
        hits = np.argwhere(bad)
        if len(hits):
            y, z = hits[0]
            return x, int(y), int(z)
    return None


def default_workers() -> int:
    env = os.environ.get("TVERSKY_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def check_triangle(
    points: Sequence, measure: Callable, workers: int = 1
) -> Optional[Counterexample]:
    """First ordered triple of ``points`` (by index) violating the triangle inequality.

    With ``workers > 1`` the scan over the first index is split into ranges
    run in separate processes; the answer is the same triple as the serial scan.
    """
    table = distance_table(points, measure)
    D, tol = _scaled_array(table)
    size = len(points)
    if workers <= 1 or size < 32:
        hit = _scan(D, tol, 0, size)
    else:
        bounds = np.linspace(0, size, workers + 1).astype(int)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_scan, D, tol, int(lo), int(hi))
                for lo, hi in zip(bounds[:-1], bounds[1:])
                if hi > lo
            ]
            results = [f.result() for f in futures]
        hit = next((r for r in results if r is not None), None)
    if hit is None:
        return None
    x, y, z = hit
    return Counterexample(points[x], points[y], points[z], table[x][y], table[x][z], table[z][y])


def _check_ground(n: int, max_ground: int) -> None:
    if n < 1:
        raise DomainError(f"ground-set size must be >= 1, got {n}")
    if n > max_ground:
        raise GroundTooLarge(f"ground-set size {n} exceeds the cap of {max_ground}")


def check_triangle_exhaustive(
    measure: SetMeasure, n: int, max_ground: int = MAX_GROUND, workers: int = 1
) -> Optional[Counterexample]:
    """Scan all 8**n ordered triples of subsets of {0,…,n-1}.

    Subsets are ordered by bitmask, so the returned triple is the
    lexicographically first violation.
    """
    _check_ground(n, max_ground)
    return check_triangle(subsets(n), measure, workers=workers)


def symmetry_violation(measure: SetMeasure, n: int, max_ground: int = MAX_GROUND):
    """First pair (X, Y) of subsets with d(X,Y) != d(Y,X), or None."""
    _check_ground(n, max_ground)
    sets = subsets(n)
    for i, X in enumerate(sets):
        for Y in sets[i + 1 :]:
            if measure(X, Y) != measure(Y, X):
                return X, Y
    return None


def counterexample_small(alpha: RationalLike, beta: RationalLike) -> Counterexample:
    """The triple ({0}, {1}, {0,1}), which violates exactly when beta < 1/(1-alpha)."""
    alpha, beta = as_rational(alpha), as_rational(beta)
    bound = boundary_beta(alpha)
    if bound is not None and beta >= bound:
        raise NotInRegime(f"beta={beta} >= 1/(1-alpha)={bound}: the pair witness does not violate")
    return _triple(strm(alpha, beta), frozenset({0}), frozenset({1}), frozenset({0, 1}))


def large_n_triple(alpha: RationalLike, beta: RationalLike, n: int) -> Counterexample:
    """(X_n, Y_n, Z_n) with Z_n = {-(n-1),…,0}, X_n = Z_n ∪ {2}, Y_n = Z_n ∪ {1}.

    The returned object may have non-positive margin; callers check it.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    Z = frozenset(range(-(n - 1), 1))
    return _triple(strm(alpha, beta), Z | {2}, Z | {1}, Z)


def large_n_size(alpha: RationalLike, beta: RationalLike) -> int:
    """Least integer n with n > beta(1-alpha) / (1 - 2(1-alpha))."""
    alpha, beta = as_rational(alpha), as_rational(beta)
    if alpha <= Fraction(1, 2):
        raise NotInRegime(f"alpha={alpha} <= 1/2: the growing-core construction never violates")
    comp = 1 - alpha
    bound = beta * comp / (1 - 2 * comp)
    return math.floor(bound) + 1


def counterexample_large_n(alpha: RationalLike, beta: RationalLike) -> Counterexample:
    return large_n_triple(alpha, beta, large_n_size(alpha, beta))


def constructive_counterexample(alpha: RationalLike, beta: RationalLike) -> Optional[Counterexample]:
    """A violation from whichever construction applies, or None inside the region."""
    alpha, beta = as_rational(alpha), as_rational(beta)
    bound = boundary_beta(alpha)
    if bound is None or beta < bound:
        return counterexample_small(alpha, beta)
    if alpha > Fraction(1, 2):
        return counterexample_large_n(alpha, beta)
    return None


def gragera_rho(alpha: RationalLike, beta: RationalLike) -> Union[Fraction, float]:
    """Optimal relaxed-triangle constant (1 + sqrt(1/(alpha*beta))) / 2 of the
    Tversky dissimilarity.

    Returned as an exact ``Fraction`` whenever alpha*beta is the square of a
    rational, otherwise as a float.
    """
    alpha, beta = as_rational(alpha), as_rational(beta)
    if alpha <= 0 or beta <= 0:
        raise DomainError("rho is unbounded unless alpha > 0 and beta > 0")
    inv = 1 / (alpha * beta)
    rn, rd = math.isqrt(inv.numerator), math.isqrt(inv.denominator)
    if rn * rn == inv.numerator and rd * rd == inv.denominator:
        return (1 + Fraction(rn, rd)) / 2
    return 0.5 * (1 + math.sqrt(inv.numerator / inv.denominator))


def estimate_rho(
    measure: SetMeasure, n: int, max_ground: int = MAX_GROUND
) -> Union[Fraction, float]:
    """max d(X,Y) / (d(X,Z) + d(Z,Y)) over subsets of {0,…,n-1}.

    Triples with a zero denominator are skipped when d(X,Y) = 0 too; a zero
    denominator under a positive d(X,Y) yields ``math.inf``.
    """
    _check_ground(n, max_ground)
    table = distance_table(subsets(n), measure)
    D, _ = _scaled_array(table)
    if D.dtype == float:
        raise DomainError("estimate_rho needs an exactly-valued measure")
    D = D.tolist()
    size = len(D)
    best_num, best_den = 0, 1
    for x in range(size):
        row = D[x]
        for z in range(size):
            dxz = row[z]
            zrow = D[z]
            for y in range(size):
                num = row[y]
                den = dxz + zrow[y]
                if den == 0:
                    if num > 0:
                        return math.inf
                    continue
                if num * best_den > best_num * den:
                    best_num, best_den = num, den
    return Fraction(best_num, best_den)


@dataclass(frozen=True)
class EpsilonTransform:
    """(x, y) -> a(x,y) / (b(x,y) + epsilon * a(x,y)), and 0 where a vanishes.

    Preserves the triangle inequality of a/b.
    """

    numerator: Callable
    denominator: Callable
    epsilon: Fraction

    def __call__(self, X, Y):
        a = self.numerator(X, Y)
        if a == 0:
            return Fraction(0)
        return Fraction(a) / (self.denominator(X, Y) + self.epsilon * a)


def epsilon_transform(a: Callable, b: Callable, epsilon: RationalLike) -> EpsilonTransform:
    epsilon = as_rational(epsilon)
    if epsilon <= 0:
        raise DomainError(f"epsilon must be > 0, got {epsilon}")
    return EpsilonTransform(a, b, epsilon)


def symmetric_difference_size(X: AbstractSet, Y: AbstractSet) -> int:
    return len(X ^ Y)


def union_size(X: AbstractSet, Y: AbstractSet) -> int:
    return len(X | Y)


@dataclass(frozen=True)
class DeltaNumerator:
    alpha: Fraction

    def __call__(self, X, Y):
        s = pair_stats(X, Y)
        return self.alpha * s.m + (1 - self.alpha) * s.M


@dataclass(frozen=True)
class StrmDenominator:
    """|X∩Y| + beta0 * delta(X,Y): with DeltaNumerator, D_{alpha,beta0} / beta0."""

    alpha: Fraction
    beta0: Fraction

    def __call__(self, X, Y):
        s = pair_stats(X, Y)
        return s.cap + self.beta0 * (self.alpha * s.m + (1 - self.alpha) * s.M)


@dataclass(frozen=True)
class RegionCell:
    alpha: Fraction
    beta: Fraction
    predicted_metric: bool
    observed_violation: Optional[Counterexample]
    method: str

    @property
    def violated(self) -> bool:
        return self.observed_violation is not None

    @property
    def contradicts_prediction(self) -> bool:
        return self.predicted_metric == self.violated


def grid_alphas(steps: int) -> List[Fraction]:
    """``steps`` equally spaced exact points covering [0, 1] inclusive."""
    if steps < 2:
        raise DomainError("alpha grid needs at least 2 steps")
    return [Fraction(i, steps - 1) for i in range(steps)]


def grid_betas(beta_max: RationalLike, steps: int) -> List[Fraction]:
    """``steps`` equally spaced exact points covering (0, beta_max]."""
    beta_max = as_rational(beta_max)
    if steps < 1 or beta_max <= 0:
        raise DomainError("beta grid needs steps >= 1 and beta_max > 0")
    return [beta_max * j / steps for j in range(1, steps + 1)]


def classify_cell(alpha: Fraction, beta: Fraction, n: int, workers: int = 1) -> RegionCell:
    predicted = region_predicate(alpha, beta)
    if predicted:
        found = check_triangle_exhaustive(strm(alpha, beta), n, workers=workers)
        return RegionCell(alpha, beta, True, found, f"exhaustive n={n}")
    found = constructive_counterexample(alpha, beta)
    method = "pair witness" if len(found.X) == 1 else f"growing core n={len(found.Z)}"
    return RegionCell(alpha, beta, False, found, method)


def region_grid(
    alpha_steps: int, beta_max: RationalLike, beta_steps: int, n: int, workers: int = 1
) -> List[RegionCell]:
    """Classify each exact grid point; predicted-metric cells are scanned
    exhaustively at ground size ``n``, the rest get a constructive witness."""
    _check_ground(n, MAX_GROUND)
    return [
        classify_cell(a, b, n, workers=workers)
        for a in grid_alphas(alpha_steps)
        for b in grid_betas(beta_max, beta_steps)
    ]


def upward_closure_holds(alpha: RationalLike, betas: Iterable[RationalLike], n: int) -> bool:
    """Once the exhaustive scan passes at some beta it passes for all larger ones."""
    alpha = as_rational(alpha)
    passed = False
    for beta in sorted(as_rational(b) for b in betas):
        ok = check_triangle_exhaustive(strm(alpha, beta), n) is None
        if passed and not ok:
            return False
        passed = passed or ok
    return True


def pair_witness_margin(alpha: RationalLike, beta: RationalLike) -> Fraction:
    """d({0},{1}) - 2 d({0},{0,1}) under D_{alpha,beta}; positive iff beta < 1/(1-alpha)."""
    X, Y, Z = frozenset({0}), frozenset({1}), frozenset({0, 1})
    return (
        strm_dissimilarity(alpha, beta, X, Y)
        - strm_dissimilarity(alpha, beta, X, Z)
        - strm_dissimilarity(alpha, beta, Z, Y)
    )
