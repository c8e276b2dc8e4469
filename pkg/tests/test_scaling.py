from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padyn.analysis import analyze, analyze_matrix
from padyn.core import RationalPoly, binom_poly, derivative, residue_map, vp
from padyn.errors import (
    ContractionDetected,
    NotLocallyScaling,
    NotLocallyScalingUpToDepth,
    NotSelfMap,
)
from padyn.markov import ComponentKind
from padyn.parse import parse_poly
from padyn.scaling import (
    ScalingProfile,
    TransitionMatrix,
    brute_force_matrix,
    find_scaling_radius,
    is_measure_preserving,
    scaling_profile,
    transition_matrix,
)

H = Fraction(1, 2)


def dense(A):
    return A.to_dense()


class TestRadius:
    def test_choose2(self):
        pr = find_scaling_radius(binom_poly(2, 2), 4)
        assert pr.depth == 1
        assert pr.scale_exponents == {0: 1, 1: 1}
        assert pr.radius == H

    def test_translation(self):
        pr = find_scaling_radius(parse_poly("x + 1", 2))
        assert pr.depth == 0 and pr.scale_exponents == {0: 0}

    def test_woodcock_smart_3(self):
        pr = find_scaling_radius(parse_poly("(x^3 - x)/3", 3), 4)
        assert pr.depth == 1 and pr.scale_exponents == {0: 1, 1: 1, 2: 1}

    def test_square_contracts(self):
        with pytest.raises(ContractionDetected) as info:
            find_scaling_radius(parse_poly("x^2", 2))
        m, a = info.value.coset
        assert a % 2 == 1 and info.value.valuation == 1

    def test_root_of_derivative(self):
        # f' = 2x vanishes at 0: the coset of 0 never passes, and the
        # contraction near 0 only becomes visible at depth 2
        f = parse_poly("x^2", 3)
        with pytest.raises(NotLocallyScalingUpToDepth):
            find_scaling_radius(f, 1)
        with pytest.raises(ContractionDetected) as info:
            find_scaling_radius(f, 2)
        assert info.value.coset[0] == 2 and info.value.coset[1] % 3 == 0

    def test_not_self_map(self):
        with pytest.raises(NotSelfMap):
            find_scaling_radius(parse_poly("(x^2 - x)/4", 2))

    def test_constant_rejected(self):
        with pytest.raises(ValueError):
            find_scaling_radius(RationalPoly.constant(2, 1))

    def test_corpus(self, corpus_entry):
        f, m, c, _ = corpus_entry
        pr = find_scaling_radius(f)
        assert pr.depth == m
        assert set(pr.scale_exponents.values()) == {c}

    def test_minimal(self, corpus_entry):
        f, m, _, _ = corpus_entry
        for k in range(m):
            assert scaling_profile(f, k) is None

    def test_monotone(self, corpus_entry):
        f, m, _, _ = corpus_entry
        p = f.prime
        for k in range(m, m + 2):
            if p**k > 200:
                break
            pr = scaling_profile(f, k)
            assert pr is not None
            # the exponent is inherited by sub-cosets
            base = find_scaling_radius(f)
            for a, e in pr.scale_exponents.items():
                assert e == base.scale_exponents[a % p**m]

    def test_profile_validates(self):
        with pytest.raises(ValueError):
            ScalingProfile(2, 1, {0: 2, 1: 0}, {0: 0, 1: 0})


class TestMatrix:
    def test_choose2(self):
        A = transition_matrix(binom_poly(2, 2), find_scaling_radius(binom_poly(2, 2)))
        assert dense(A) == [[H, H], [H, H]]

    def test_translation_at_depth_one(self):
        f = parse_poly("x + 1", 2)
        A = transition_matrix(f, scaling_profile(f, 1))
        assert dense(A) == [[0, 1], [1, 0]]
        assert is_measure_preserving(A)

    def test_binom15(self):
        f = binom_poly(15, 5)
        A = transition_matrix(f, find_scaling_radius(f))
        assert A.size == 25
        for i in range(25):
            r = i % 25
            t = 0 if r < 15 else 1 if r < 20 else 4
            assert A.row(i) == {j: Fraction(1, 5) for j in range(25) if j % 5 == t}
        assert not is_measure_preserving(A)

    def test_measure_preserving_examples(self):
        assert is_measure_preserving(TransitionMatrix(2, 1, {0: {0: H, 1: H}, 1: {0: H, 1: H}}))
        assert is_measure_preserving(TransitionMatrix(3, 1, {0: {2: 1}, 1: {0: 1}, 2: {1: 1}}))
        assert not is_measure_preserving(TransitionMatrix(2, 1, {0: {0: 1}, 1: {0: 1}}))

    def test_rows_sum_to_one(self, corpus_entry):
        f, *_ = corpus_entry
        A = transition_matrix(f, find_scaling_radius(f))
        for i in A.states:
            assert sum(A.row(i).values()) == 1

    def test_entries_are_inverse_scale(self, corpus_entry):
        f, *_ = corpus_entry
        pr = find_scaling_radius(f)
        A = transition_matrix(f, pr)
        for i, j, a in A.items():
            assert a == Fraction(1, f.prime ** pr.scale_exponents[i])

    def test_measure_preserving_flag(self, corpus_entry):
        f, _, _, mp = corpus_entry
        assert is_measure_preserving(transition_matrix(f, find_scaling_radius(f))) == mp


class TestBruteForce:
    def test_choose2(self):
        assert dense(brute_force_matrix(binom_poly(2, 2), 1, 3)) == [[H, H], [H, H]]

    def test_translation_cycle(self):
        A = brute_force_matrix(parse_poly("x + 1", 3), 1, 2)
        assert dense(A) == [[0, 1, 0], [0, 0, 1], [1, 0, 0]]

    def test_choose2_depth_two(self):
        f = binom_poly(2, 2)
        assert brute_force_matrix(f, 2, 4) == transition_matrix(f, scaling_profile(f, 2))

    def test_oracle_equivalence(self, corpus_entry):
        f, *_ = corpus_entry
        pr = find_scaling_radius(f)
        E = pr.depth + pr.max_exponent
        assert transition_matrix(f, pr) == brute_force_matrix(f, pr.depth, E)
        # counting is already stable, so one more digit changes nothing
        assert transition_matrix(f, pr) == brute_force_matrix(f, pr.depth, E + 1)


def test_exact_scaling_by_enumeration(corpus_entry):
    """|f(x) - f(y)| = p^c |x - y| for 0 < |x - y| <= p^-m, enumerated."""
    f, *_ = corpus_entry
    p = f.prime
    pr = find_scaling_radius(f)
    m = pr.depth
    D = m + pr.max_exponent + 1
    if p**D > 700:
        D = m + pr.max_exponent
    image = residue_map(f, D + pr.max_exponent + 1)
    N = p**D
    vals = [image(x) for x in range(N)]
    cap = D + pr.max_exponent + 1
    for x in range(N):
        for y in range(x + p**m, N, p**m):
            c = pr.scale_exponents[x % p**m]
            d = vals[x] - vals[y]
            v = vp(d, p) if d % p**cap else cap
            assert v == vp(x - y, p) - c


def test_measure_preserving_maps_have_unit_derivative_or_more(corpus_entry):
    f, m, _, mp = corpus_entry
    if not mp:
        return
    df = derivative(f)
    for a in range(f.prime**m):
        assert vp(df(a), f.prime) <= 0


@settings(max_examples=25, deadline=None)
@given(
    st.sampled_from([2, 3]),
    st.lists(st.integers(-4, 4), min_size=2, max_size=5),
    st.integers(0, 1),
)
def test_random_polys_match_oracle(p, num, e):
    f = RationalPoly(p, [Fraction(c, p**e) for c in num])
    if f.is_constant():
        return
    try:
        pr = find_scaling_radius(f, 3)
    except (NotLocallyScaling, NotSelfMap):
        return
    assert transition_matrix(f, pr) == brute_force_matrix(f, pr.depth, pr.depth + pr.max_exponent)


class TestAnalyze:
    def test_choose2(self):
        r = analyze(binom_poly(2, 2))
        assert r.measure_preserving and r.mixing
        (cls,) = r.classes
        assert cls.kind is ComponentKind.ERGODIC_MARKOV and cls.isometrically_bernoulli
        assert r.bernoulli.applies and r.bernoulli.ell == 1

    def test_translation(self):
        r = analyze(parse_poly("x + 1", 2))
        assert r.measure_preserving
        (cls,) = r.classes
        assert cls.kind is ComponentKind.LOCAL_ISOMETRY and not cls.mixing

    def test_binom15(self):
        r = analyze(binom_poly(15, 5))
        assert not r.measure_preserving
        (v,) = r.stationary
        assert {j for j, x in v.items() if x} == {j for j in range(25) if j % 5 in (0, 1, 4)}
        assert len(r.decomposition.transient_states) == 10
        assert r.classes[0].mixing
        assert any("normalized" in n for n in r.notes)

    def test_not_self_map(self):
        with pytest.raises(NotSelfMap):
            analyze(parse_poly("(x^2 - x)/4", 2))


class TestAnalyzeMatrix:
    def test_identity(self):
        ma = analyze_matrix(TransitionMatrix(2, 1, {0: {0: Fraction(1)}, 1: {1: Fraction(1)}}))
        assert ma.measure_preserving and ma.stationary is None
        assert [c.kind for c in ma.classes] == [ComponentKind.LOCAL_ISOMETRY] * 2

    def test_transient_state(self):
        ma = analyze_matrix(TransitionMatrix(2, 1, {0: {0: Fraction(1)}, 1: {0: H, 1: H}}))
        assert not ma.measure_preserving
        assert ma.stationary == [{0: 1, 1: 0}]
        assert ma.decomposition.transient_states == (1,)

    def test_agrees_with_analyze(self, corpus_entry):
        f, *_ = corpus_entry
        r = analyze(f)
        ma = analyze_matrix(r.matrix)
        assert ma.classes == r.classes and ma.decomposition == r.decomposition
