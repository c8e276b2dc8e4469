"""Exact arithmetic substrate: valuations, finite-precision p-adic integers,
polynomials with rational coefficients, and cosets of p^m Z_p.

Rationals are ``fractions.Fraction`` throughout; nothing in this package ever
touches floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from functools import reduce as _fold
from typing import Callable, Iterable, Union

from .errors import InsufficientPrecision, NotIntegral, NotSelfMap

Rational = Union[int, Fraction]

#: Valuation of zero.
INF = math.inf


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


def _vp_int(n: int, p: int) -> int:
    # n != 0
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp(x: Rational, p: int) -> int | float:
    """Exponent of ``p`` in ``x``; ``INF`` for zero.

    >>> vp(Fraction(8, 3), 2)
    3
    >>> vp(Fraction(1, 5), 5)
    -1
    """
    x = Fraction(x)
    if x == 0:
        return INF
    return _vp_int(x.numerator, p) - _vp_int(x.denominator, p)


def norm(x: Rational, p: int) -> Fraction:
    """The p-adic absolute value p^(-vp(x)), with norm(0) = 0."""
    v = vp(x, p)
    if v == INF:
        return Fraction(0)
    return Fraction(p) ** (-v)


@dataclass(frozen=True)
class PadicInt:
    """All x in Z_p with x = residue (mod prime**precision).

    Precision is absolute: the digits in positions 0..precision-1 are known.
    """

    prime: int
    precision: int
    residue: int

    def __post_init__(self):
        _check_prime(self.prime)
        if self.precision < 0:
            raise ValueError("precision must be nonnegative")
        if not 0 <= self.residue < self.modulus:
            raise ValueError(
                f"residue {self.residue} outside [0, {self.prime}^{self.precision})"
            )

    @property
    def modulus(self) -> int:
        return self.prime**self.precision

    def coset(self, depth: int) -> "CosetIndex":
        if depth > self.precision:
            raise InsufficientPrecision(
                f"coset at depth {depth} needs precision {depth}, have {self.precision}"
            )
        return CosetIndex(depth, self.residue % self.prime**depth)

    def __str__(self) -> str:
        return f"{self.residue} (mod {self.prime}^{self.precision})"


def reduce(x: Rational, p: int, N: int) -> PadicInt:
    """The residue of a p-integral rational modulo p**N."""
    x = Fraction(x)
    if vp(x, p) < 0:
        raise NotIntegral(f"{x} has negative {p}-adic valuation")
    mod = p**N
    if mod == 1:
        return PadicInt(p, N, 0)
    residue = x.numerator * pow(x.denominator, -1, mod) % mod
    return PadicInt(p, N, residue)


@dataclass(frozen=True)
class CosetIndex:
    """The ball residue + p^depth Z_p; depth 0 is Z_p itself."""

    depth: int
    residue: int

    def __post_init__(self):
        if self.depth < 0 or self.residue < 0:
            raise ValueError("depth and residue must be nonnegative")

    def measure(self, p: int) -> Fraction:
        return Fraction(1, p**self.depth)

    def contains(self, other: "CosetIndex", p: int) -> bool:
        return (
            other.depth >= self.depth
            and other.residue % p**self.depth == self.residue
        )


def _trim(coeffs: Iterable[Rational]) -> tuple[Fraction, ...]:
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class RationalPoly:
    """A polynomial with exact rational coefficients, viewed as a map on Z_p.

    ``coeffs[k]`` is the coefficient of x**k. Trailing zeros are trimmed, so
    the zero polynomial has no coefficients at all.
    """

    prime: int
    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self):
        _check_prime(self.prime)
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def x(cls, p: int) -> "RationalPoly":
        return cls(p, (0, 1))

    @classmethod
    def constant(cls, p: int, c: Rational) -> "RationalPoly":
        return cls(p, (c,))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def is_constant(self) -> bool:
        return self.degree <= 0

    def _lift(self, other) -> "RationalPoly":
        if isinstance(other, RationalPoly):
            if other.prime != self.prime:
                raise ValueError("polynomials over different primes")
            return other
        if isinstance(other, (int, Fraction)):
            return RationalPoly(self.prime, (other,))
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        n = max(len(self.coeffs), len(other.coeffs))
        return RationalPoly(
            self.prime, [self.coeff(k) + other.coeff(k) for k in range(n)]
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly(self.prime, [-c for c in self.coeffs])

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if not self.coeffs or not other.coeffs:
            return RationalPoly(self.prime)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RationalPoly(self.prime, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = RationalPoly(self.prime, (1,))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, c: Rational):
        c = Fraction(c)
        if c == 0:
            raise ZeroDivisionError("division of a polynomial by zero")
        return RationalPoly(self.prime, [a / c for a in self.coeffs])

    def __call__(self, x: Rational) -> Fraction:
        return poly_eval_exact(self, x)

    def common_denominator(self) -> int:
        return _fold(math.lcm, (c.denominator for c in self.coeffs), 1)

    def integer_numerator(self) -> tuple[int, list[int]]:
        """``(D, g)`` with D*f = g and g an integer coefficient list."""
        D = self.common_denominator()
        return D, [int(c * D) for c in self.coeffs]

    def __str__(self) -> str:
        return format_poly(self)


def format_poly(f: RationalPoly) -> str:
    """Render as ``c*x^k`` terms, highest degree first; parseable by the CLI."""
    if not f.coeffs:
        return "0"
    parts: list[str] = []
    for k in range(f.degree, -1, -1):
        c = f.coeffs[k]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if not parts:
            parts.append(body if sign == "+" else f"-{body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


def poly_eval_exact(f: RationalPoly, x: Rational) -> Fraction:
    """Horner evaluation over the rationals."""
    acc = Fraction(0)
    for c in reversed(f.coeffs):
        acc = acc * x + c
    return acc


def precision_loss(f: RationalPoly) -> int:
    """Digits lost by one evaluation: max(0, -min vp(c_j)) over j >= 1."""
    vals = [vp(c, f.prime) for c in f.coeffs[1:] if c != 0]
    if not vals:
        return 0
    return max(0, -min(vals))


def poly_eval_padic(f: RationalPoly, x: PadicInt) -> PadicInt:
    """f(x) for x known mod p^N, certified modulo p^(N - d).

    Here d is :func:`precision_loss`: f(x + p^N t) - f(x) is divisible by
    p^(N-d) for every integral t, so exactly N - d digits are determined.
    """
    if x.prime != f.prime:
        raise ValueError("prime mismatch")
    out_prec = x.precision - precision_loss(f)
    if out_prec <= 0:
        raise InsufficientPrecision(
            f"input known mod {x.prime}^{x.precision}, evaluation loses "
            f"{precision_loss(f)} digit(s)"
        )
    value = poly_eval_exact(f, x.residue)
    if vp(value, f.prime) < 0:
        raise NotIntegral(f"f({x.residue}) = {value} is not {f.prime}-integral")
    return reduce(value, f.prime, out_prec)


def residue_map(f: RationalPoly, m: int) -> Callable[[int], int]:
    """Return ``x -> f(x) mod p^m`` for integers x, using integer arithmetic.

    Raises :class:`NotSelfMap` when some evaluated value is not p-integral.
    """
    p = f.prime
    D, g = f.integer_numerator()
    e = _vp_int(D, p) if D != 1 else 0
    unit = D // p**e
    big = p ** (m + e)
    pe = p**e
    mod = p**m
    inv = pow(unit, -1, mod) if mod > 1 else 0
    g_rev = [c % big for c in reversed(g)]

    def evaluate(x: int) -> int:
        acc = 0
        for c in g_rev:
            acc = (acc * x + c) % big
        if acc % pe:
            raise NotSelfMap(f"f({x}) is not {p}-integral")
        return (acc // pe) * inv % mod

    return evaluate


def is_self_map(f: RationalPoly) -> bool:
    """True iff f maps Z_p into Z_p.

    Exact and complete: f(0), ..., f(deg f) are p-integral iff every Mahler
    coefficient is (the two lists are related by integer triangular matrices).
    """
    p = f.prime
    return all(vp(poly_eval_exact(f, j), p) >= 0 for j in range(max(f.degree, 0) + 1))


def taylor_shift(f: RationalPoly, a: int) -> list[Fraction]:
    """Coefficients c_0(a), ..., c_d(a) of f(a + z) as a polynomial in z."""
    D, g = f.integer_numerator()
    # repeated synthetic division by (x - a) on integer coefficients
    c = list(g)
    n = len(c)
    for i in range(n):
        for k in range(n - 2, i - 1, -1):
            c[k] += a * c[k + 1]
    return [Fraction(ci, D) for ci in c]


def derivative(f: RationalPoly) -> RationalPoly:
    return RationalPoly(f.prime, [k * c for k, c in enumerate(f.coeffs)][1:])


def binom_poly(n: int, p: int) -> RationalPoly:
    """x(x-1)...(x-n+1)/n! expanded in the monomial basis."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    coeffs = [1]
    for i in range(n):
        # multiply by (x - i)
        nxt = [0] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            nxt[k + 1] += c
            nxt[k] -= i * c
        coeffs = nxt
    fact = math.factorial(n)
    return RationalPoly(p, [Fraction(c, fact) for c in coeffs])
