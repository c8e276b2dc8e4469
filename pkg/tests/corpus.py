"""Maps shared by several test modules."""

# (expression, prime, radius exponent, scale exponents if constant, measure-preserving)
CORPUS = [
    ("binom(x,2)", 2, 1, 1, True),
    ("x + 1", 2, 0, 0, True),
    ("x + x^2", 2, 1, 0, False),
    ("(x^3 - x)/3", 3, 1, 1, True),
    ("(x^5 - x)/5", 5, 1, 1, True),
    ("binom(x,4)", 2, 2, 2, True),
    ("binom(x,3)", 3, 1, 1, True),
    ("binom(x,9)", 3, 2, 2, True),
    ("binom(x,3)", 5, 1, 0, False),
    ("binom(x,15)", 5, 2, 1, False),
    ("2x + 1", 3, 0, 0, True),
    ("x^3 + x + 1", 3, 1, 0, True),
    ("x^2 + x + 1", 2, 1, 0, False),
]
