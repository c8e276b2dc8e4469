"""Locally-scaling radius detection and the associated transition matrix.

A polynomial f: Z_p -> Z_p is locally scaling at depth m when on every coset
a + p^m Z_p it multiplies distances by the constant factor |f'(a)| >= 1. The
per-coset test used here is the dominance of the linear Taylor term:

    vp(c_j(a)) + (j - 1) m  >  vp(c_1(a))    for every j >= 2,

where c_j(a) are the coefficients of f(a + z). When it holds, the strong
triangle inequality gives |f(x) - f(y)| = |f'(a)| |x - y| on the whole coset.
The test is sufficient, and once it holds at depth m it holds at all deeper
depths.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import INF, RationalPoly, is_self_map, residue_map, taylor_shift, vp
from .errors import (
    ContractionDetected,
    NotLocallyScalingUpToDepth,
    NotSelfMap,
)
from .markov import StochasticMatrix

DEFAULT_MAX_DEPTH = 8


@dataclass(frozen=True)
class ScalingProfile:
    """Scale exponents and image centers of a locally scaling map at depth m.

    On coset i (the residue i mod p^m) the map scales by p**scale_exponents[i]
    and sends the coset onto the ball of radius p^(c_i - m) around
    image_centers[i].
    """

    prime: int
    depth: int
    scale_exponents: dict[int, int]
    image_centers: dict[int, int]

    def __post_init__(self):
        for i, c in self.scale_exponents.items():
            if not 0 <= c <= self.depth:
                raise ValueError(
                    f"scale exponent {c} on coset {i} outside [0, {self.depth}]"
                )

    @property
    def radius(self) -> Fraction:
        return Fraction(1, self.prime**self.depth)

    @property
    def max_exponent(self) -> int:
        return max(self.scale_exponents.values())

    def scaling_factor(self, i: int) -> int:
        return self.prime ** self.scale_exponents[i]


class TransitionMatrix(StochasticMatrix):
    """Stochastic matrix on the p^m cosets of p^m Z_p.

    State i is the coset i + p^m Z_p.
    """

    def __init__(self, prime: int, depth: int, rows, *, check: bool = True):
        self.prime = prime
        self.depth = depth
        n = prime**depth
        if set(rows) != set(range(n)):
            raise ValueError(f"a depth-{depth} matrix needs rows for 0..{n - 1}")
        super().__init__(rows, states=range(n), check=check)

    def __repr__(self) -> str:
        return f"TransitionMatrix(prime={self.prime}, depth={self.depth}, states={self.size})"


def _coset_exponent(f: RationalPoly, a: int, m: int) -> int | float | None:
    """vp(f'(a)) if the linear term dominates on a + p^m Z_p, else None."""
    p = f.prime
    cs = taylor_shift(f, a)
    v1 = vp(cs[1], p) if len(cs) > 1 else INF
    if v1 == INF:
        return None
    for j in range(2, len(cs)):
        if cs[j] and vp(cs[j], p) + (j - 1) * m <= v1:
            return None
    return v1


def _require_self_map(f: RationalPoly) -> None:
    if not is_self_map(f):
        raise NotSelfMap(f"{f} does not map Z_{f.prime} into itself")


def scaling_profile(f: RationalPoly, m: int) -> ScalingProfile | None:
    """The profile at exactly depth m, or None if some coset fails the test.

    Raises :class:`ContractionDetected` when a coset passes with |f'| < 1.
    """
    p = f.prime
    image = residue_map(f, m)
    exponents: dict[int, int] = {}
    centers: dict[int, int] = {}
    failed = False
    # scan every coset: a contraction anywhere is decisive even if other
    # cosets fail the test at this depth
    for a in range(p**m):
        v1 = _coset_exponent(f, a, m)
        if v1 is None:
            failed = True
            continue
        if v1 > 0:
            raise ContractionDetected(
                f"{f} contracts {a} + {p}^{m} Z_{p} by {p}^-{v1}",
                coset=(m, a),
                valuation=int(v1),
            )
        exponents[a] = -int(v1)
        centers[a] = image(a)
    if failed:
        return None
    return ScalingProfile(p, m, exponents, centers)


def find_scaling_radius(
    f: RationalPoly, m_max: int = DEFAULT_MAX_DEPTH
) -> ScalingProfile:
    """Smallest depth m <= m_max at which f is certified locally scaling."""
    if f.is_constant():
        raise ValueError("constant maps are not locally scaling")
    _require_self_map(f)
    for m in range(m_max + 1):
        profile = scaling_profile(f, m)
        if profile is not None:
            return profile
    raise NotLocallyScalingUpToDepth(
        f"{f} is not certified locally scaling at any depth <= {m_max} "
        f"(f' may vanish somewhere in Z_{f.prime})"
    )


def transition_matrix(f: RationalPoly, profile: ScalingProfile) -> TransitionMatrix:
    """Row i puts mass p^-c_i on each j with j = f(i) (mod p^(m - c_i))."""
    p, m = profile.prime, profile.depth
    n = p**m
    rows = {}
    for i in range(n):
        c = profile.scale_exponents[i]
        step = p ** (m - c)
        start = profile.image_centers[i] % step
        w = Fraction(1, p**c)
        rows[i] = {j: w for j in range(start, n, step)}
    return TransitionMatrix(p, m, rows, check=False)


def is_measure_preserving(A: StochasticMatrix) -> bool:
    """Haar measure is preserved iff every column sums to exactly 1."""
    return all(s == 1 for s in A.column_sums().values())


def brute_force_matrix(f: RationalPoly, m: int, enum_depth: int) -> TransitionMatrix:
    """A(i, j) = #{x mod p^E : x in i, f(x) in j} / p^(E - m), by enumeration.

    Independent of the Taylor-coefficient route; needs E >= m + max c_i for
    the counts to have stabilised.
    """
    if enum_depth < m:
        raise ValueError("enum_depth must be at least m")
    p = f.prime
    _require_self_map(f)
    image = residue_map(f, m)
    n = p**m
    counts: dict[int, dict[int, int]] = {i: {} for i in range(n)}
    for x in range(p**enum_depth):
        row = counts[x % n]
        j = image(x)
        row[j] = row.get(j, 0) + 1
    per_coset = p ** (enum_depth - m)
    rows = {
        i: {j: Fraction(k, per_coset) for j, k in row.items()}
        for i, row in counts.items()
    }
    return TransitionMatrix(p, m, rows)
