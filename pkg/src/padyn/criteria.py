"""Named sufficient conditions and worked families.

* metric vs. matrix characterisations of isometrically Bernoulli maps,
* the per-prime Mahler-coefficient test for integer sequences,
* binomial maps binom(x, n) with constant |f'| and the non-measure-preserving
  family n = (p - 2) p^ell with its invariant measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (
    RationalPoly,
    binom_poly,
    derivative,
    is_prime,
    is_self_map,
    residue_map,
    vp,
)
from .errors import InternalInconsistency, NotSelfMap
from .mahler import BernoulliVerdict, bernoulli_criterion, to_mahler
from .markov import (
    ComponentClass,
    Decomposition,
    classify_component,
    decompose,
    stationary_distributions,
)
from .scaling import (
    TransitionMatrix,
    brute_force_matrix,
    is_measure_preserving,
    scaling_profile,
    transition_matrix,
)


def _pair_exponents(f: RationalPoly, ell: int, depth: int) -> dict[int, set[int]]:
    """For each coset mod p^ell, the set of vp(x-y) - vp(f(x)-f(y)) over
    residue pairs x != y mod p^depth lying in that coset (the exponent c in
    |f(x) - f(y)| = p^c |x - y|).
    """
    p = f.prime
    N = p**depth
    # values mod p^(depth + ell + 1) are enough: differences have valuation
    # at most depth - 1 + ell when the scaling factor is at most p^ell
    big = depth + ell + 1
    image = residue_map(f, big)
    vals = [image(x) for x in range(N)]
    step = p**ell
    seen: dict[int, set[int]] = {i: set() for i in range(step)}
    for x in range(N):
        for y in range(x + step, N, step):
            d = vals[x] - vals[y]
            v = vp(d, p) if d % p**big else big
            seen[x % step].add(vp(x - y, p) - v)
    return seen


def isometric_bernoulli_equivalence_check(f: RationalPoly, ell: int, depth: int) -> bool:
    """Decide whether f is isometrically Bernoulli for r = p^-ell, two ways.

    Metric: |f(x) - f(y)| = p^ell |x - y| for all residue pairs mod p^depth
    with |x - y| <= p^-ell. Matrix: f scales every ell-coset by a constant
    factor >= 1 and its enumerated transition matrix at depth ell has all
    entries equal. The two must agree; disagreement raises
    :class:`InternalInconsistency`.
    """
    if depth < ell + 2:
        raise ValueError("depth must be at least ell + 2")
    if not is_self_map(f):
        raise NotSelfMap(f"{f} does not map Z_{f.prime} into itself")
    seen = _pair_exponents(f, ell, depth)
    metric = all(s == {ell} for s in seen.values())

    # each ell-coset scaled by one factor p^c with c >= 0
    scaling = all(len(s) == 1 and next(iter(s)) >= 0 for s in seen.values())
    if scaling:
        max_c = max(next(iter(s)) for s in seen.values())
        A = brute_force_matrix(f, ell, ell + max_c)
        matrix = A.all_entries_equal()
    else:
        matrix = False
    if metric != matrix:
        raise InternalInconsistency(
            f"metric test says {metric}, matrix test says {matrix} for {f}"
        )
    return metric


def zhat_bernoulli_check(a: Sequence[int], primes: Iterable[int]) -> dict[int, bool]:
    """Per prime p: |a_p|_p = 1 and |a_k|_p < p^-floor(log_p k) for k > p.

    Coefficients beyond the list are zero and satisfy the second condition.
    """
    out = {}
    for p in primes:
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        ok = p < len(a) and vp(a[p], p) == 0
        k = p + 1
        while ok and k < len(a):
            if vp(a[k], p) <= _floor_log(k, p):
                ok = False
            k += 1
        out[p] = ok
    return out


def factorial_power_sequence(K: int) -> list[int]:
    """a_k = ((k-1)!)^k for 1 <= k <= K, with a_0 = 0."""
    return [0] + [math.factorial(k - 1) ** k for k in range(1, K + 1)]


def prime_product_sequence(K: int) -> list[int]:
    """a_q = prod over primes q' < q of q'^(1 + floor(log_q' q)) at primes q <= K,
    a_k = 0 otherwise.
    """
    primes = [q for q in range(2, K + 1) if is_prime(q)]
    a = [0] * (K + 1)
    for q in primes:
        a[q] = math.prod(r ** (1 + _floor_log(q, r)) for r in primes if r < q)
    return a


def _floor_log(k: int, p: int) -> int:
    e = 0
    while p ** (e + 1) <= k:
        e += 1
    return e


@dataclass(frozen=True)
class HarmonicCheckResult:
    n: int
    p: int
    a: int
    ell: int
    passes: bool
    failing_u: int | None = None


def constant_derivative_check(n: int, p: int) -> HarmonicCheckResult:
    """|d/dx binom(x, n)| is constant on Z_p iff n = a p^ell (1 <= a < p) and
    1/u + ... + 1/(u + a - 1) is nonzero mod p for every u in 1..p-a.
    """
    if n < 1:
        raise ValueError("n must be positive")
    ell = _floor_log(n, p)
    a, r = divmod(n, p**ell)
    if r:
        return HarmonicCheckResult(n, p, a, ell, False)
    for u in range(1, p - a + 1):
        if sum(pow(u + i, -1, p) for i in range(a)) % p == 0:
            return HarmonicCheckResult(n, p, a, ell, False, u)
    return HarmonicCheckResult(n, p, a, ell, True)


def constant_derivative_oracle(n: int, p: int, depth: int) -> tuple[int, int]:
    """(min, max) of vp(f'(x)) over x mod p^depth for f = binom(x, n)."""
    if depth < _floor_log(n, p) + 2:
        raise ValueError("depth must be at least floor(log_p n) + 2")
    df = derivative(binom_poly(n, p))
    vals = [vp(df(x), p) for x in range(p**depth)]
    return min(vals), max(vals)


def binomial_residue_mod_p(x: int, n: int, p: int) -> int:
    """binom(x, n) mod p for n = a p^ell, from the block of multiples of p^ell.

    The window x-n+1..x holds exactly a multiples of p^ell, namely
    u p^ell, ..., (u+a-1) p^ell, and binom(x, n) = prod(u+i) / a! (mod p).
    """
    ell = _floor_log(n, p)
    a, r = divmod(n, p**ell)
    if r:
        raise ValueError("n must have the form a * p^ell with 1 <= a < p")
    q = p**ell
    u = -((n - 1 - x) // q)  # ceil((x - n + 1) / q)
    num = math.prod(u + i for i in range(a))
    return num * pow(math.factorial(a), -1, p) % p


ALMOST_BERNOULLI_NOTES = (
    "each nonzero entry of row i is p^-ell (p^ell targets per row); entries "
    "(p-2)/p on rows with t(i) = 0 and 1/p elsewhere would give row sums "
    "(p-2) p^(ell-1) and p^(ell-1), so those values are not used",
    "stationary vector is normalized to total mass 1; it is proportional "
    "to (p-2)/p on states = 0 (mod p) and 1/p on states = +-1 (mod p)",
)


def is_almost_bernoulli_map(f: RationalPoly) -> bool:
    """Whether f is binom(x, (p-2) p^ell) for some ell >= 1, p >= 5."""
    p, n = f.prime, f.degree
    if p < 5 or n < 1 or n % (p - 2):
        return False
    q = n // (p - 2)
    ell = _floor_log(q, p)
    return ell >= 1 and p**ell == q and f == binom_poly(n, p)


@dataclass(frozen=True)
class AlmostBernoulliReport:
    p: int
    ell: int
    n: int
    polynomial: RationalPoly
    matrix: TransitionMatrix
    image_class: dict[int, int]
    measure_preserving: bool
    column_sums: dict[int, Fraction]
    stationary: dict[int, Fraction]
    decomposition: Decomposition
    classification: ComponentClass
    bernoulli: BernoulliVerdict
    notes: tuple[str, ...] = ()


def _three_case_class(i: int, n: int, p: int, ell: int) -> int:
    q = p**ell
    i %= p ** (ell + 1)
    if i < n:
        return 0
    if i < n + q:
        return 1
    return -1


def almost_bernoulli_report(p: int, ell: int) -> AlmostBernoulliReport:
    """binom(x, (p-2) p^ell): constant |f'| = p^ell, locally scaling at depth
    ell + 1, Haar-invariant only for p = 3, with an invariant measure
    weighting the classes 0 : 1 : -1 (mod p) as (p - 2) : 1 : 1.

    p = 3 is accepted and reported as the Bernoulli map binom(x, 3^ell).
    """
    if p < 3 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    if ell < 1:
        raise ValueError("ell must be positive")
    n = (p - 2) * p**ell
    f = binom_poly(n, p)
    m = ell + 1
    profile = scaling_profile(f, m)
    if profile is None:
        raise InternalInconsistency(f"binom(x, {n}) not certified at depth {m}")
    A = transition_matrix(f, profile)
    image_class = {}
    for i in range(A.size):
        t = profile.image_centers[i] % p
        t = t - p if t > p // 2 else t
        if t != _three_case_class(i, n, p, ell):
            raise InternalInconsistency(f"image class of coset {i} is {t}")
        image_class[i] = t
    (v,) = stationary_distributions(A)
    dec = decompose(A, v)
    (Ak,) = dec.component_matrices
    verdict = bernoulli_criterion(to_mahler(f))
    notes = ALMOST_BERNOULLI_NOTES
    if p == 3:
        notes += (
            f"p = 3 gives n = 3^{ell}, the isometrically Bernoulli map "
            f"binom(x, 3^{ell}); Haar measure is preserved",
        )
    return AlmostBernoulliReport(
        p=p,
        ell=ell,
        n=n,
        polynomial=f,
        matrix=A,
        image_class=image_class,
        measure_preserving=is_measure_preserving(A),
        column_sums=A.column_sums(),
        stationary=v,
        decomposition=dec,
        classification=classify_component(Ak, A.size),
        bernoulli=verdict,
        notes=notes,
    )
