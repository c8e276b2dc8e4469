"""Mahler expansions f(x) = sum_k a_k binom(x, k) on Z_p.

Coefficient-side criteria: sup norm (max |a_k|), Lipschitz constant
(max kappa_k |a_k| with kappa_k = p^floor(log_p k)), and a sufficient
condition for a map to be isometrically Bernoulli. Also builds polynomials
that realize a prescribed transition matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import RationalPoly, norm, vp
from .errors import (
    ContractionDetected,
    NotRealizable,
    NotSelfMap,
    RealizationDepthExceeded,
)
from .scaling import TransitionMatrix, scaling_profile, transition_matrix

DEFAULT_MAX_REALIZATION_DEGREE = 512


@dataclass(frozen=True)
class MahlerSeries:
    prime: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(a) for a in self.coeffs))

    def __len__(self) -> int:
        return len(self.coeffs)

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if k < len(self.coeffs) else Fraction(0)


def _forward_differences(values: list[Fraction]) -> list[Fraction]:
    # a_k = sum_j (-1)^(k-j) binom(k, j) f(j), computed as the leading
    # entries of the difference table
    row = list(values)
    out = []
    while row:
        out.append(row[0])
        row = [b - a for a, b in zip(row, row[1:])]
    return out


def to_mahler(f: RationalPoly) -> MahlerSeries:
    """Mahler coefficients a_0..a_d of a degree-d polynomial."""
    values = [f(j) for j in range(f.degree + 1)]
    return MahlerSeries(f.prime, tuple(_forward_differences(values)))


def mahler_from_values(p: int, values: list) -> MahlerSeries:
    """Coefficients of the polynomial interpolating ``values`` at 0, 1, 2, ..."""
    return MahlerSeries(p, tuple(_forward_differences([Fraction(v) for v in values])))


def from_mahler(s: MahlerSeries) -> RationalPoly:
    p = s.prime
    total = [Fraction(0)] * len(s.coeffs)
    basis = [Fraction(1)]  # binom(x, 0)
    for k, a in enumerate(s.coeffs):
        if k:
            # binom(x, k) = binom(x, k-1) * (x - k + 1) / k
            nxt = [Fraction(0)] * (len(basis) + 1)
            for i, c in enumerate(basis):
                nxt[i + 1] += c / k
                nxt[i] -= c * (k - 1) / k
            basis = nxt
        if a:
            for i, c in enumerate(basis):
                total[i] += a * c
    return RationalPoly(p, total)


def kappa(k: int, p: int) -> int:
    """p^floor(log_p k), the Lipschitz constant of binom(x, k)."""
    if k < 1:
        raise ValueError("kappa is defined for k >= 1")
    out = 1
    while out * p <= k:
        out *= p
    return out


def sup_norm(s: MahlerSeries) -> Fraction:
    """sup over Z_p of |f| = max_k |a_k|; at most 1 iff f maps Z_p into Z_p."""
    return max((norm(a, s.prime) for a in s.coeffs), default=Fraction(0))


def lipschitz_constant(s: MahlerSeries) -> Fraction:
    """Least r with |f(x) - f(y)| <= r |x - y| on Z_p: max_{k>=1} kappa_k |a_k|."""
    p = s.prime
    return max(
        (kappa(k, p) * norm(a, p) for k, a in enumerate(s.coeffs) if k >= 1),
        default=Fraction(0),
    )


def _weights(s: MahlerSeries) -> list[Fraction]:
    # the constant term carries weight 1
    p = s.prime
    return [norm(a, p) * (kappa(k, p) if k else 1) for k, a in enumerate(s.coeffs)]


@dataclass(frozen=True)
class BernoulliVerdict:
    """Outcome of the Mahler-coefficient Bernoulli test.

    ``applies`` False means the test is inconclusive, not that the map fails
    to be Bernoulli.
    """

    applies: bool
    M: Fraction
    k_max: int | None = None
    ell: int | None = None
    reason: str = ""

    def __post_init__(self):
        if self.applies and not (self.ell and self.ell >= 1):
            raise ValueError("a passing verdict needs ell >= 1")

    @property
    def radius_exponent(self) -> int | None:
        return self.ell


def bernoulli_criterion(s: MahlerSeries) -> BernoulliVerdict:
    """Sufficient test: max_k kappa_k |a_k| is attained only at k = p^ell
    (ell >= 1) and |a_{p^ell}| = 1. Then f is isometrically Bernoulli with
    radius p^-ell.
    """
    p = s.prime
    if sup_norm(s) > 1:
        raise NotSelfMap(f"some Mahler coefficient has |a_k|_{p} > 1")
    w = _weights(s)
    M = max(w, default=Fraction(0))
    if M == 0:
        return BernoulliVerdict(False, M, reason="zero map")
    winners = [k for k, x in enumerate(w) if x == M]
    if len(winners) > 1:
        return BernoulliVerdict(
            False, M, reason=f"maximum {M} attained at k = {winners}"
        )
    k = winners[0]
    ell = round(math.log(k, p)) if k > 1 else 0
    if k < p or p**ell != k:
        return BernoulliVerdict(
            False, M, k, reason=f"maximum at k = {k}, not a power p^ell with ell >= 1"
        )
    if norm(s.coeffs[k], p) != 1:
        return BernoulliVerdict(False, M, k, reason=f"a_{k} is not a {p}-adic unit")
    return BernoulliVerdict(True, M, k, ell)


def _row_structure(A: TransitionMatrix, i: int) -> tuple[int, int]:
    """(c_i, t_i) such that row i is p^-c on {j = t (mod p^(m-c))}."""
    p, m = A.prime, A.depth
    row = A.row(i)
    values = set(row.values())
    if len(values) != 1:
        raise NotRealizable(f"row {i} has unequal nonzero entries {sorted(values)}")
    (w,) = values
    c = vp(w, p)
    if w.numerator != 1 or Fraction(1, p ** (-c)) != w or not 0 <= -c <= m:
        raise NotRealizable(f"row {i}: entry {w} is not p^-c with 0 <= c <= {m}")
    c = -c
    step = p ** (m - c)
    t = min(row) % step
    if set(row) != set(range(t, p**m, step)):
        raise NotRealizable(
            f"row {i}: support is not the residue class {t} mod {step} "
            f"(entry {w} needs exactly {p**c} targets)"
        )
    return c, t


def realize_matrix(
    A: TransitionMatrix, max_degree: int = DEFAULT_MAX_REALIZATION_DEGREE
) -> RationalPoly:
    """A polynomial whose transition matrix at depth m is exactly A.

    Interpolates the locally affine map x -> p^-c_i (x - i) + t_i on each
    coset i at 0..K, and returns the degree-K interpolant once its own
    transition matrix has been recomputed and found equal to A. K starts at
    2 p^m and doubles up to ``max_degree``.
    """
    p, m = A.prime, A.depth
    n = p**m
    structure = [_row_structure(A, i) for i in range(n)]

    def affine(x: int) -> Fraction:
        i = x % n
        c, t = structure[i]
        return Fraction(x - i, p**c) + t

    K = max(n + 1, 2 * n)
    while True:
        degree = min(K, max_degree)
        coeffs = mahler_from_values(p, [affine(x) for x in range(degree + 1)])
        f = from_mahler(coeffs)
        if not f.is_constant():
            try:
                profile = scaling_profile(f, m)
            except ContractionDetected:
                profile = None
            if profile is not None and transition_matrix(f, profile) == A:
                return f
        if degree >= max_degree:
            raise RealizationDepthExceeded(
                f"no verified realization up to degree {max_degree}"
            )
        K *= 2


def qk_exact_scaling_check(ell: int, p: int, depth: int) -> bool:
    """|binom(x,k) - binom(y,k)| = k |x - y| for k = p^ell, all residue
    pairs mod p^depth with |x - y| <= p^-ell.
    """
    if depth < ell + 2:
        raise ValueError("depth must be at least ell + 2")
    k = p**ell
    N = p**depth
    step = p**ell
    vals = [math.comb(x, k) for x in range(N)]
    for x in range(N):
        for y in range(x + step, N, step):
            if vp(vals[x] - vals[y], p) != vp(x - y, p) - ell:
                return False
    return True
