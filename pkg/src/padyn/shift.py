"""Symbolic side of a locally scaling map: itineraries and cylinder preimages.

The coding map sends x to the sequence of cosets (mod p^m) visited by its
orbit. The preimage of a cylinder [d_0 ... d_l] is a single ball of depth
m + c_{d_0} + ... + c_{d_{l-1}}, whose Haar measure equals the Markov
measure of the cylinder with the uniform initial vector.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .core import CosetIndex, PadicInt, RationalPoly, poly_eval_padic, precision_loss
from .errors import EmptyCylinder, InsufficientPrecision, InternalInconsistency, NotLocallyScalingUpToDepth
from .markov import cylinder_measure
from .scaling import ScalingProfile, TransitionMatrix, scaling_profile, transition_matrix

MAX_SAMPLED_WORDS = 100_000


@dataclass(frozen=True)
class Itinerary:
    prime: int
    depth: int
    word: tuple[int, ...]

    def cosets(self) -> tuple[CosetIndex, ...]:
        return tuple(CosetIndex(self.depth, d) for d in self.word)

    def __str__(self) -> str:
        return " ".join(map(str, self.word))


class BallDescription(CosetIndex):
    """The ball residue + p^depth Z_p."""


def itinerary(f: RationalPoly, x: PadicInt, steps: int, m: int) -> Itinerary:
    """Cosets mod p^m of x, f(x), ..., f^steps(x), each certified."""
    if x.precision < m:
        raise InsufficientPrecision(f"x is known mod {x.prime}^{x.precision} < depth {m}")
    mod = f.prime**m
    cur = x
    word = [cur.residue % mod]
    for t in range(steps):
        cur = poly_eval_padic(f, cur)
        if cur.precision < m:
            raise InsufficientPrecision(
                f"iterate {t + 1} is only known mod {f.prime}^{cur.precision}"
            )
        word.append(cur.residue % mod)
    return Itinerary(f.prime, m, tuple(word))


def _profile_and_matrix(f: RationalPoly, m: int, profile: ScalingProfile | None):
    if profile is None:
        profile = scaling_profile(f, m)
        if profile is None:
            raise NotLocallyScalingUpToDepth(f"{f} is not certified locally scaling at depth {m}")
    return profile, transition_matrix(f, profile)


def cylinder_preimage(
    f: RationalPoly,
    word: Sequence[int] | Itinerary,
    m: int,
    profile: ScalingProfile | None = None,
) -> BallDescription:
    """The ball of points whose itinerary starts with ``word``.

    Found by enumerating the coset word[0] at the forced depth
    m + sum of the scale exponents along the word (all but the last symbol).
    """
    if isinstance(word, Itinerary):
        word = word.word
    word = tuple(word)
    p = f.prime
    profile, A = _profile_and_matrix(f, m, profile)
    for a, b in zip(word, word[1:]):
        if not A.entry(a, b):
            raise EmptyCylinder(f"A({a},{b}) = 0; word {word} is inadmissible")
    D = m + sum(profile.scale_exponents[d] for d in word[:-1])
    # enough digits for every iterate to stay certified mod p^m
    prec = max(D, m + (len(word) - 1) * precision_loss(f))
    mod = p**m
    hits = []
    for k in range(p ** (D - m)):
        x = word[0] + mod * k
        if itinerary(f, PadicInt(p, prec, x), len(word) - 1, m).word == word:
            hits.append(x)
    if len(hits) != 1:
        raise InternalInconsistency(
            f"admissible word {word} has {len(hits)} preimage residues at depth {D}"
        )
    return BallDescription(D, hits[0])


def admissible_words(A: TransitionMatrix, length: int) -> Iterator[tuple[int, ...]]:
    if length < 1:
        return
    stack = [(s,) for s in reversed(A.states)]
    while stack:
        w = stack.pop()
        if len(w) == length:
            yield w
            continue
        for t in sorted(A.successors(w[-1]), reverse=True):
            stack.append(w + (t,))


def verify_cylinder_measures(f: RationalPoly, m: int, max_len: int) -> bool:
    """Every admissible word of length <= max_len has preimage measure equal
    to its Markov measure v(d_0) A(d_0,d_1) ... with v uniform.
    """
    profile, A = _profile_and_matrix(f, m, None)
    p = f.prime
    v = {s: Fraction(1, A.size) for s in A.states}
    for length in range(1, max_len + 1):
        for w in admissible_words(A, length):
            ball = cylinder_preimage(f, w, m, profile)
            if Fraction(1, p**ball.depth) != cylinder_measure(A, v, w):
                return False
    return True


@dataclass(frozen=True)
class FrequencyRow:
    count: int
    empirical: Fraction
    exact: Fraction

    @property
    def deviation(self) -> Fraction:
        return abs(self.empirical - self.exact)


def sample_itinerary_frequencies(
    f: RationalPoly, m: int, word_len: int, samples: int, seed: int
) -> dict[tuple[int, ...], FrequencyRow]:
    """Empirical frequencies of length-``word_len`` itineraries of random points.

    Points are drawn with ``random.Random(seed).randrange(p**P)`` where
    P = m + word_len * max(d, max_c + 1), d the per-step precision loss and
    max_c the largest scale exponent; the table lists every word over the
    p^m symbols.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    profile, A = _profile_and_matrix(f, m, None)
    p = f.prime
    n_words = A.size**word_len
    if n_words > MAX_SAMPLED_WORDS:
        raise ValueError(f"{n_words} words exceed the table cap {MAX_SAMPLED_WORDS}")
    prec = m + word_len * max(precision_loss(f), profile.max_exponent + 1)
    rng = random.Random(seed)
    counts: dict[tuple[int, ...], int] = {}
    for _ in range(samples):
        x = PadicInt(p, prec, rng.randrange(p**prec))
        w = itinerary(f, x, word_len - 1, m).word
        counts[w] = counts.get(w, 0) + 1
    v = {s: Fraction(1, A.size) for s in A.states}
    table = {}
    for w in itertools.product(A.states, repeat=word_len):
        k = counts.get(w, 0)
        table[w] = FrequencyRow(k, Fraction(k, samples), cylinder_measure(A, v, w))
    return table
