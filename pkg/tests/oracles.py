"""Independent oracles shared by the unit and acceptance tests."""

import itertools
from fractions import Fraction

import sympy

from padyn.core import norm, poly_eval_exact, vp


def enumerated_sup_norm(f, depth=6):
    p = f.prime
    return max(norm(poly_eval_exact(f, x), p) for x in range(p**depth))


def _integer_values(f, depth):
    D, g = f.integer_numerator()
    vals = [sum(c * x**k for k, c in enumerate(g)) for x in range(f.prime**depth)]
    return vals, vp(D, f.prime)


def enumerated_lipschitz(f, depth=6):
    """max |f(x) - f(y)| / |x - y| over all distinct pairs in range(p^depth)."""
    p = f.prime
    vals, e = _integer_values(f, depth)
    best = Fraction(0)
    for x, y in itertools.combinations(range(p**depth), 2):
        d = vals[x] - vals[y]
        if d == 0:
            continue
        # |f(x) - f(y)| / |x - y| = p^(vp(x - y) - vp(d) + e)
        r = Fraction(p) ** (vp(x - y, p) - vp(d, p) + e)
        if r > best:
            best = r
    return best


def digit_step_lipschitz(f, depth=6):
    """Same maximum, over pairs (x, x + d p^s) with 0 < d < p only.

    Any pair x < y in range(p^depth) is joined by a chain adding one base-p
    digit of y - x at a time, and the ultrametric inequality bounds the
    ratio of the pair by the largest ratio along the chain.
    """
    p = f.prime
    N = p**depth
    vals, e = _integer_values(f, depth)
    best = Fraction(0)
    for s in range(depth):
        for d in range(1, p):
            step = d * p**s
            for x in range(N - step):
                diff = vals[x + step] - vals[x]
                if diff == 0:
                    continue
                r = Fraction(p) ** (s - vp(diff, p) + e)
                if r > best:
                    best = r
    return best


def sympy_stationary(A):
    """Left null space basis of A - I, by sympy's rational elimination."""
    n = A.size
    M = sympy.Matrix(n, n, lambda i, j: sympy.Rational(str(A.entry(i, j))))
    basis = (M.T - sympy.eye(n)).nullspace()
    return [[Fraction(str(x)) for x in b] for b in basis]
