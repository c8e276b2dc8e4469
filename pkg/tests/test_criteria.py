import math
from fractions import Fraction

import pytest
import sympy

from padyn.core import binom_poly, poly_eval_exact
from padyn.criteria import (
    almost_bernoulli_report,
    binomial_residue_mod_p,
    constant_derivative_check,
    constant_derivative_oracle,
    factorial_power_sequence,
    is_almost_bernoulli_map,
    isometric_bernoulli_equivalence_check,
    prime_product_sequence,
    zhat_bernoulli_check,
)
from padyn.errors import NotSelfMap
from padyn.mahler import MahlerSeries, bernoulli_criterion
from padyn.markov import ComponentKind, mat_vec_product
from padyn.parse import parse_poly

from corpus import CORPUS


class TestIsometricBernoulli:
    def test_examples(self):
        assert isometric_bernoulli_equivalence_check(binom_poly(2, 2), 1, 3)
        assert not isometric_bernoulli_equivalence_check(parse_poly("x + 1", 2), 1, 3)
        assert isometric_bernoulli_equivalence_check(parse_poly("(x^3 - x)/3", 3), 1, 4)

    @pytest.mark.parametrize("p,ell", [(2, 1), (2, 2), (3, 1), (5, 1)])
    def test_binomial_family(self, p, ell):
        assert isometric_bernoulli_equivalence_check(binom_poly(p**ell, p), ell, ell + 3)

    def test_wrong_ell(self):
        assert not isometric_bernoulli_equivalence_check(binom_poly(2, 2), 2, 4)
        assert not isometric_bernoulli_equivalence_check(binom_poly(4, 2), 1, 4)

    @pytest.mark.parametrize("expr,p", [(e, p) for e, p, *_ in CORPUS if p ** 4 <= 700])
    def test_subchecks_agree_on_corpus(self, expr, p):
        # raises InternalInconsistency on disagreement
        f = parse_poly(expr, p)
        for ell in (1, 2):
            isometric_bernoulli_equivalence_check(f, ell, ell + 2)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            isometric_bernoulli_equivalence_check(binom_poly(2, 2), 1, 2)
        with pytest.raises(NotSelfMap):
            isometric_bernoulli_equivalence_check(parse_poly("(x^2 - x)/4", 2), 1, 3)


class TestZhat:
    def test_factorial(self):
        assert zhat_bernoulli_check(factorial_power_sequence(20), [2, 3, 5]) == {2: True, 3: True, 5: True}

    def test_prime_product(self):
        assert zhat_bernoulli_check(prime_product_sequence(20), [2, 3, 5]) == {2: True, 3: True, 5: True}

    def test_prime_product_values(self):
        # 2^(1+1) = 4 at q = 3; 2^3 * 3^2 = 72 at q = 5
        a = prime_product_sequence(20)
        assert a[2] == 1 and a[3] == 4 and a[5] == 72
        assert all(a[k] == 0 for k in range(21) if not sympy.isprime(k))

    def test_non_unit_fails(self):
        a = factorial_power_sequence(10)
        a[3] = 3
        assert zhat_bernoulli_check(a, [3]) == {3: False}

    def test_condition_two(self):
        a = [0] * 10
        a[2] = 1
        a[5] = 2  # vp = 1 = floor(log_2 5) - 1 < 2
        assert zhat_bernoulli_check(a, [2]) == {2: False}

    def test_missing_index(self):
        assert zhat_bernoulli_check([0, 1, 1], [3]) == {3: False}

    @pytest.mark.parametrize("seq", [factorial_power_sequence(20), prime_product_sequence(20)])
    def test_implies_mahler_criterion(self, seq):
        for p, ok in zhat_bernoulli_check(seq, [2, 3, 5, 7]).items():
            if ok:
                v = bernoulli_criterion(MahlerSeries(p, tuple(seq)))
                assert v.applies and v.k_max == p


class TestHarmonic:
    @pytest.mark.parametrize("p", [5, 7])
    @pytest.mark.parametrize("ell", [0, 1])
    def test_almost_bernoulli_family(self, p, ell):
        assert constant_derivative_check((p - 2) * p**ell, p).passes

    def test_negative(self):
        r = constant_derivative_check(2, 3)
        assert not r.passes and r.failing_u == 1 and r.a == 2 and r.ell == 0

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_prime_powers(self, p):
        for ell in range(3):
            assert constant_derivative_check(p**ell, p).passes

    def test_not_of_form(self):
        r = constant_derivative_check(6, 5)
        assert not r.passes and r.failing_u is None

    def test_oracle_examples(self):
        assert constant_derivative_oracle(15, 5, 4) == (-1, -1)
        lo, hi = constant_derivative_oracle(2, 3, 3)
        assert lo != hi
        assert constant_derivative_oracle(2, 2, 3) == (-1, -1)

    def test_oracle_precondition(self):
        with pytest.raises(ValueError):
            constant_derivative_oracle(9, 3, 3)

    @pytest.mark.parametrize("p", [2, 3, 5, 7])
    def test_agrees_with_oracle(self, p):
        for n in range(1, 31):
            depth = int(math.log(n, p) + 1e-9) + 2
            lo, hi = constant_derivative_oracle(n, p, depth)
            assert constant_derivative_check(n, p).passes == (lo == hi), n


class TestResidueFormula:
    @pytest.mark.parametrize("n,p", [(15, 5), (35, 7), (3, 5), (9, 3), (50, 5), (2, 3), (18, 3)])
    def test_matches_binomial(self, n, p):
        for x in range(3 * p**3):
            assert binomial_residue_mod_p(x, n, p) == math.comb(x, n) % p

    def test_negative_arguments(self):
        f = binom_poly(15, 5)
        for x in range(-60, 0):
            v = poly_eval_exact(f, x)
            assert binomial_residue_mod_p(x, 15, 5) == v.numerator * pow(v.denominator, -1, 5) % 5

    def test_rejects_other_n(self):
        with pytest.raises(ValueError):
            binomial_residue_mod_p(3, 6, 5)


class TestAlmostBernoulli:
    def test_p5(self):
        r = almost_bernoulli_report(5, 1)
        assert r.n == 15 and r.matrix.depth == 2
        assert not r.measure_preserving
        for j in range(25):
            want = Fraction(3, 25) if j % 5 == 0 else Fraction(1, 25) if j % 5 in (1, 4) else 0
            assert r.stationary[j] == want
            assert r.column_sums.get(j, 0) == (3 if j % 5 == 0 else 1 if j % 5 in (1, 4) else 0)
        assert r.classification.kind is ComponentKind.ERGODIC_MARKOV
        assert r.classification.mixing
        assert r.notes

    def test_image_classes(self):
        r = almost_bernoulli_report(5, 1)
        for i in range(25):
            t = 0 if i < 15 else 1 if i < 20 else -1
            assert r.image_class[i] == t

    def test_p7(self):
        r = almost_bernoulli_report(7, 1)
        assert not r.measure_preserving
        assert r.classification.mixing

    def test_p3_is_bernoulli(self):
        r = almost_bernoulli_report(3, 1)
        assert r.measure_preserving
        assert r.bernoulli.applies and r.bernoulli.ell == 1

    @pytest.mark.parametrize("p,ell", [(3, 1), (3, 2), (5, 1), (5, 2), (7, 1)])
    def test_invariants(self, p, ell):
        r = almost_bernoulli_report(p, ell)
        v = r.stationary
        assert mat_vec_product(v, r.matrix) == v
        assert sum(v.values()) == 1
        (comp,) = r.decomposition.recurrent_components
        assert set(comp) == {j for j in r.matrix.states if j % p in (0, 1, p - 1)}
        assert v[0] / v[1] == p - 2
        assert r.measure_preserving == (p == 3)
        for i in r.matrix.states:
            row = r.matrix.row(i)
            assert len(row) == p**ell and set(row.values()) == {Fraction(1, p**ell)}

    def test_rejects(self):
        with pytest.raises(ValueError):
            almost_bernoulli_report(2, 1)
        with pytest.raises(ValueError):
            almost_bernoulli_report(5, 0)

    def test_detection(self):
        assert is_almost_bernoulli_map(binom_poly(15, 5))
        assert is_almost_bernoulli_map(binom_poly(35, 7))
        assert not is_almost_bernoulli_map(binom_poly(3, 5))
        assert not is_almost_bernoulli_map(binom_poly(9, 3))
