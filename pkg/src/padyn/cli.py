"""Command-line interface: ``padyn analyze|mahler|realize|itinerary|sample|examples``.

Exit codes: 0 success, 1 usage or input error, 2 the map or matrix is outside
the theory (not a self-map, contracting, not locally scaling, not
realizable), 3 a precision or degree cap was hit, 4 an internal consistency
check or a replayed example failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .analysis import AnalysisReport, analyze
from .core import PadicInt, RationalPoly, binom_poly, is_prime, norm, precision_loss
from .criteria import (
    almost_bernoulli_report,
    factorial_power_sequence,
    isometric_bernoulli_equivalence_check,
    prime_product_sequence,
    zhat_bernoulli_check,
)
from .errors import (
    InsufficientPrecision,
    InternalInconsistency,
    NotLocallyScaling,
    NotLocallyScalingUpToDepth,
    NotRealizable,
    NotSelfMap,
    NotStochastic,
    ParseError,
    RealizationDepthExceeded,
)
from .mahler import (
    MahlerSeries,
    bernoulli_criterion,
    kappa,
    lipschitz_constant,
    realize_matrix,
    sup_norm,
    to_mahler,
)
from .markov import StochasticMatrix
from .parse import parse_poly
from .scaling import TransitionMatrix, brute_force_matrix
from .shift import itinerary, sample_itinerary_frequencies

SCHEMA_VERSION = "1"
DEFAULT_MAX_STATES = 3000
DEFAULT_MAX_PRIME = 13


class UsageError(Exception):
    """Bad arguments or input; exit status 1."""


class ReplayFailed(Exception):
    """A replayed worked example did not reproduce; exit status 4."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def q(x) -> str:
    """Exact rational as "num/den", always with a denominator."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _check_prime(p: int, max_prime: int) -> None:
    if not is_prime(p):
        raise UsageError(f"{p} is not prime")
    if p > max_prime:
        raise UsageError(f"p = {p} exceeds --max-prime {max_prime}")


def _max_depth_for(p: int, max_states: int) -> int:
    m = 0
    while p ** (m + 1) <= max_states:
        m += 1
    return m


def _parse(expr: str, p: int) -> RationalPoly:
    try:
        return parse_poly(expr, p)
    except ParseError as e:
        raise UsageError(f"cannot parse {expr!r}: {e}") from e


def _analyze(f: RationalPoly, args) -> AnalysisReport:
    cap = _max_depth_for(f.prime, args.max_states)
    depth = min(args.max_depth, cap)
    try:
        return analyze(f, depth)
    except NotLocallyScalingUpToDepth:
        if depth < args.max_depth:
            raise UsageError(
                f"no radius found with at most {args.max_states} states "
                f"(depth {depth}); raise --max-states to search up to depth {args.max_depth}"
            ) from None
        raise


def _matrix_triplets(A: StochasticMatrix) -> list[list]:
    return [[i, j, q(a)] for i, j, a in A.items()]


def _verdict_json(v) -> dict:
    return {
        "applies": v.applies,
        "M": q(v.M),
        "k_max": v.k_max,
        "ell": v.ell,
        "reason": v.reason,
    }


def report_json(expr: str, r: AnalysisReport, enum_depth: int | None) -> dict:
    A = r.matrix
    components = []
    for states, cls in zip(r.decomposition.recurrent_components, r.classes):
        components.append(
            {
                "states": list(states),
                "class": cls.kind.value,
                "mixing": cls.mixing,
                "bernoulli": cls.isometrically_bernoulli,
            }
        )
    stationary = None
    if r.stationary is not None:
        stationary = [{str(s): q(x) for s, x in vec.items() if x} for vec in r.stationary]
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "input": expr,
        "polynomial": str(r.polynomial),
        "prime": A.prime,
        "radius_exponent": A.depth,
        "radius": q(r.profile.radius),
        "enum_depth": enum_depth,
        "scale_exponents": {str(i): c for i, c in sorted(r.profile.scale_exponents.items())},
        "matrix": _matrix_triplets(A),
        "measure_preserving": r.measure_preserving,
        "components": components,
        "transient_states": list(r.decomposition.transient_states),
        "stationary": stationary,
        "bernoulli_verdict": _verdict_json(r.bernoulli),
        "notes": list(r.notes),
    }


def _fmt_matrix(A: StochasticMatrix, limit: int = 16) -> list[str]:
    if A.size <= limit:
        dense = A.to_dense()
        cells = [[str(a) if a else "0" for a in row] for row in dense]
        w = max(len(c) for row in cells for c in row)
        return ["  " + " ".join(c.rjust(w) for c in row) for row in cells]
    lines = [f"  ({A.size} states, showing rows with their targets)"]
    for i in A.states:
        row = A.row(i)
        vals = set(row.values())
        val = str(vals.pop()) if len(vals) == 1 else "mixed"
        lines.append(f"  {i}: {val} -> {' '.join(map(str, sorted(row)))}")
    return lines


def _fmt_verdict(v) -> str:
    if v.applies:
        return f"applies: isometrically Bernoulli with ell = {v.ell} (M = {v.M} at k = {v.k_max})"
    return f"inconclusive ({v.reason})"


def report_text(r: AnalysisReport) -> str:
    A = r.matrix
    p, m = A.prime, A.depth
    out = [
        f"f(x) = {r.polynomial}  on Z_{p}",
        f"radius r = {r.profile.radius} (m = {m})",
        "scale exponents: "
        + " ".join(f"{i}:{c}" for i, c in sorted(r.profile.scale_exponents.items())),
        "transition matrix:",
        *_fmt_matrix(A),
        f"measure-preserving: {'yes' if r.measure_preserving else 'no'}",
    ]
    if r.stationary is not None:
        out.append("stationary distribution(s):")
        for vec in r.stationary:
            support = {s: x for s, x in vec.items() if x}
            out.append("  " + " ".join(f"{s}:{x}" for s, x in support.items()))
    out.append("components:")
    for states, cls in zip(r.decomposition.recurrent_components, r.classes):
        tags = [cls.kind.value, "mixing" if cls.mixing else "not mixing"]
        if cls.isometrically_bernoulli:
            tags.append("isometrically Bernoulli")
        out.append(f"  {list(states)}  {', '.join(tags)}")
    transient = r.decomposition.transient_states
    out.append(f"transient states: {list(transient) if transient else 'none'}")
    out.append(f"Mahler Bernoulli criterion: {_fmt_verdict(r.bernoulli)}")
    for note in r.notes:
        out.append(f"note: {note}")
    return "\n".join(out)


def cmd_analyze(args) -> int:
    _check_prime(args.p, args.max_prime)
    f = _parse(args.expr, args.p)
    r = _analyze(f, args)
    if args.enum_depth is not None:
        if args.enum_depth < r.matrix.depth + r.profile.max_exponent:
            raise UsageError(
                f"--enum-depth must be at least {r.matrix.depth + r.profile.max_exponent}"
            )
        if brute_force_matrix(f, r.matrix.depth, args.enum_depth) != r.matrix:
            raise InternalInconsistency("enumerated matrix differs from the computed one")
    if args.json:
        _dump(report_json(args.expr, r, args.enum_depth))
    else:
        print(report_text(r))
        if args.enum_depth is not None:
            print(f"matrix confirmed by enumeration mod {args.p}^{args.enum_depth}")
    return 0


def cmd_mahler(args) -> int:
    _check_prime(args.p, args.max_prime)
    f = _parse(args.expr, args.p)
    s = to_mahler(f)
    p = args.p
    if sup_norm(s) > 1:
        raise NotSelfMap(
            f"sup norm max |a_k|_{p} = {sup_norm(s)} > 1: {f} does not map Z_{p} into Z_{p}"
        )
    verdict = bernoulli_criterion(s)
    if args.json:
        _dump(
            {
                "schema_version": SCHEMA_VERSION,
                "tool_version": __version__,
                "input": args.expr,
                "prime": p,
                "coefficients": [
                    {
                        "k": k,
                        "a_k": q(a),
                        "abs_a_k": q(norm(a, p)),
                        "weight": q(norm(a, p) * (kappa(k, p) if k else 1)),
                    }
                    for k, a in enumerate(s.coeffs)
                ],
                "sup_norm": q(sup_norm(s)),
                "lipschitz_constant": q(lipschitz_constant(s)),
                "bernoulli_verdict": _verdict_json(verdict),
            }
        )
        return 0
    print(f"f(x) = {f}  on Z_{p}")
    rows = [("k", "a_k", "|a_k|", "kappa_k|a_k|", "")]
    for k, a in enumerate(s.coeffs):
        w = norm(a, p) * (kappa(k, p) if k else 1)
        mark = "*" if verdict.k_max == k and verdict.applies else ""
        rows.append((str(k), str(a), str(norm(a, p)), str(w), mark))
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    for r in rows:
        print("  " + "  ".join(c.rjust(w) for c, w in zip(r, widths)) + ("  " + r[4] if r[4] else ""))
    print(f"sup norm: {sup_norm(s)}")
    print(f"Lipschitz constant: {lipschitz_constant(s)}")
    print(f"Bernoulli criterion: {_fmt_verdict(verdict)}")
    return 0


def read_matrix_file(path: Path) -> TransitionMatrix:
    """Header ``p m``, then sparse lines ``i j num/den``; ``#`` starts a comment."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}") from e
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line.split()))
    if not lines:
        raise NotRealizable(f"{path}: empty matrix file")
    lineno, head = lines[0]
    try:
        p, m = (int(t) for t in head)
    except ValueError:
        raise NotRealizable(f"{path}:{lineno}: header must be 'p m'") from None
    if not is_prime(p) or m < 0:
        raise NotRealizable(f"{path}:{lineno}: bad header {' '.join(head)}")
    n = p**m
    rows: dict[int, dict[int, Fraction]] = {i: {} for i in range(n)}
    for lineno, parts in lines[1:]:
        try:
            i, j, a = int(parts[0]), int(parts[1]), Fraction(parts[2])
            if len(parts) != 3:
                raise ValueError
        except (ValueError, IndexError, ZeroDivisionError):
            raise NotRealizable(f"{path}:{lineno}: expected 'i j num/den'") from None
        if not (0 <= i < n and 0 <= j < n):
            raise NotRealizable(f"{path}:{lineno}: state out of range 0..{n - 1}")
        if j in rows[i]:
            raise NotRealizable(f"{path}:{lineno}: entry ({i},{j}) given twice")
        if a:
            rows[i][j] = a
    try:
        return TransitionMatrix(p, m, rows)
    except (NotStochastic, ValueError) as e:
        raise NotRealizable(f"{path}: {e}") from e


def cmd_realize(args) -> int:
    A = read_matrix_file(Path(args.matrix_file))
    if args.p is not None and args.p != A.prime:
        raise UsageError(f"-p {args.p} does not match the file header prime {A.prime}")
    _check_prime(A.prime, args.max_prime)
    if A.size > args.max_states:
        raise UsageError(f"{A.size} states exceed --max-states {args.max_states}")
    f = realize_matrix(A, args.max_degree)
    if args.json:
        _dump(
            {
                "schema_version": SCHEMA_VERSION,
                "tool_version": __version__,
                "input": args.matrix_file,
                "prime": A.prime,
                "radius_exponent": A.depth,
                "matrix": _matrix_triplets(A),
                "polynomial": str(f),
                "degree": f.degree,
            }
        )
    else:
        print(f)
    return 0


def cmd_itinerary(args) -> int:
    _check_prime(args.p, args.max_prime)
    f = _parse(args.expr, args.p)
    if args.n < 0 or args.m < 0:
        raise UsageError("-n and -m must be nonnegative")
    prec = args.precision
    if prec is None:
        prec = args.m + args.n * precision_loss(f)
    x = PadicInt(args.p, prec, args.x % args.p**prec)
    print(itinerary(f, x, args.n, args.m))
    return 0


def cmd_sample(args) -> int:
    _check_prime(args.p, args.max_prime)
    f = _parse(args.expr, args.p)
    if args.samples < 1 or args.word_len < 1:
        raise UsageError("--samples and --word-len must be positive")
    table = sample_itinerary_frequencies(f, args.m, args.word_len, args.samples, args.seed)
    if args.json:
        _dump(
            {
                "schema_version": SCHEMA_VERSION,
                "tool_version": __version__,
                "input": args.expr,
                "prime": args.p,
                "radius_exponent": args.m,
                "seed": args.seed,
                "samples": args.samples,
                "words": [
                    {
                        "word": list(w),
                        "count": row.count,
                        "empirical": q(row.empirical),
                        "exact": q(row.exact),
                        "deviation": q(row.deviation),
                    }
                    for w, row in table.items()
                ],
            }
        )
        return 0
    for w, row in table.items():
        print(
            f"{' '.join(map(str, w))}  count {row.count}  "
            f"empirical {float(row.empirical):.4f}  exact {row.exact}  "
            f"|diff| {float(row.deviation):.4f}"
        )
    return 0


def _expect(cond: bool, what: str, log: list[str]) -> None:
    log.append(f"{'ok  ' if cond else 'FAIL'} {what}")


def _replay_analysis(expr: str, p: int, ell: int, log: list[str]) -> None:
    f = parse_poly(expr, p)
    r = analyze(f)
    log.append(f"f(x) = {f} on Z_{p}")
    _expect(r.bernoulli.applies and r.bernoulli.ell == ell, f"Bernoulli criterion with ell = {ell}", log)
    _expect(r.measure_preserving, "Haar measure preserved", log)
    _expect(r.mixing, "single mixing component", log)
    _expect(
        isometric_bernoulli_equivalence_check(f, ell, ell + 2),
        f"|f(x) - f(y)| = {p}^{ell} |x - y| on {p}^-{ell}-balls, by enumeration",
        log,
    )


def example_choose2(args, log: list[str]) -> None:
    f = binom_poly(2, 2)
    r = analyze(f)
    _expect(r.matrix.depth == 1, "radius 1/2", log)
    _expect(r.profile.scale_exponents == {0: 1, 1: 1}, "scale factor 2 on both cosets", log)
    _expect(all(a == Fraction(1, 2) for _, _, a in r.matrix.items()) and r.matrix.all_entries_equal(),
            "matrix entries all 1/2", log)
    _replay_analysis("binom(x,2)", 2, 1, log)


def example_woodcock_smart(args, log: list[str]) -> None:
    p = args.p if args.p is not None else 3
    _check_prime(p, args.max_prime)
    _replay_analysis(f"(x^{p} - x)/{p}", p, 1, log)


def example_almost_bernoulli(args, log: list[str]) -> None:
    p, ell = args.params if args.params else (5, 1)
    if not is_prime(p) or p < 3 or ell < 1:
        raise UsageError("almost-bernoulli needs an odd prime p and ell >= 1")
    _check_prime(p, args.max_prime)
    if p ** (ell + 1) > args.max_states:
        raise UsageError(f"{p ** (ell + 1)} states exceed --max-states {args.max_states}")
    r = almost_bernoulli_report(p, ell)
    log.append(f"f(x) = binom(x, {r.n}) on Z_{p}, depth {ell + 1}")
    A = r.matrix
    q_ = p**ell
    _expect(
        all(len(A.row(i)) == q_ and set(A.row(i).values()) == {Fraction(1, q_)} for i in A.states),
        f"each row has {q_} entries equal to 1/{q_}",
        log,
    )
    _expect(r.measure_preserving == (p == 3), f"measure-preserving: {r.measure_preserving}", log)
    total = p ** (ell + 1)
    want = {}
    for j in A.states:
        c = j % p
        want[j] = Fraction(p - 2, total) if c == 0 else Fraction(1, total) if c in (1, p - 1) else Fraction(0)
    _expect(r.stationary == want, "stationary vector (p-2)/p^(ell+1) on 0 mod p, 1/p^(ell+1) on +-1 mod p", log)
    cs = r.column_sums
    _expect(
        all(cs.get(j, 0) == (p - 2 if j % p == 0 else 1 if j % p in (1, p - 1) else 0) for j in A.states),
        f"column sums {p - 2} on 0 mod p and 1 on +-1 mod p",
        log,
    )
    _expect(r.classification.mixing, "recurrent component mixing", log)
    for i in range(0, A.size, max(1, A.size // 5)):
        log.append(f"     t({i}) = {r.image_class[i]}")
    log.append("stationary values: " + ", ".join(f"{x}" for x in sorted(set(r.stationary.values()), reverse=True)))
    for note in r.notes:
        log.append(f"note: {note}")


def _replay_zhat(a: list[int], label: str, args, log: list[str]) -> None:
    primes = args.primes
    verdicts = zhat_bernoulli_check(a, primes)
    log.append(f"{label}, k <= {len(a) - 1}")
    for p, ok in verdicts.items():
        _expect(ok, f"p = {p}: |a_p| = 1 and |a_k| < p^-floor(log_p k) for k > p", log)
        v = bernoulli_criterion(MahlerSeries(p, tuple(a)))
        _expect(v.applies and v.k_max == p, f"p = {p}: Mahler criterion applies with k = {p}", log)


def example_zhat_factorial(args, log: list[str]) -> None:
    _replay_zhat(factorial_power_sequence(args.k_max), "a_k = ((k-1)!)^k", args, log)


def example_zhat_primorial(args, log: list[str]) -> None:
    _replay_zhat(prime_product_sequence(args.k_max), "a_q = prod q'^(1 + floor(log_q' q)) at primes", args, log)


EXAMPLES = {
    "choose2": example_choose2,
    "woodcock-smart": example_woodcock_smart,
    "almost-bernoulli": example_almost_bernoulli,
    "zhat-factorial": example_zhat_factorial,
    "zhat-primorial": example_zhat_primorial,
}


def cmd_examples(args) -> int:
    log: list[str] = []
    EXAMPLES[args.name](args, log)
    print("\n".join(log))
    if any(line.startswith("FAIL") for line in log):
        raise ReplayFailed(f"example {args.name} did not reproduce")
    return 0


def _dump(obj) -> None:
    print(json.dumps(obj, indent=2, ensure_ascii=False))


def _positive_int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="padyn",
        description="Exact dynamics of polynomial maps of the p-adic integers.",
    )
    parser.add_argument("--version", action="version", version=f"padyn {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--max-prime", type=int, default=DEFAULT_MAX_PRIME,
                        help="largest accepted prime (default %(default)s)")
    common.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES,
                        help="refuse matrices with more states (default %(default)s)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common], help="full classification of a polynomial map")
    p.add_argument("expr", help='polynomial in x, e.g. "binom(x,2)" or "(x^3 - x)/3"')
    p.add_argument("-p", type=int, required=True, help="the prime")
    p.add_argument("--max-depth", type=int, default=8, help="largest radius exponent tried (default %(default)s)")
    p.add_argument("--enum-depth", type=int, help="also confirm the matrix by enumeration mod p^E")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("mahler", parents=[common], help="Mahler coefficients and the Bernoulli test")
    p.add_argument("expr")
    p.add_argument("-p", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_mahler)

    p = sub.add_parser("realize", parents=[common], help="polynomial with a prescribed transition matrix")
    p.add_argument("matrix_file", help="header 'p m', then lines 'i j num/den'")
    p.add_argument("-p", type=int, help="must match the header prime if given")
    p.add_argument("--max-degree", type=int, default=512)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("itinerary", parents=[common], help="cosets visited by an orbit")
    p.add_argument("expr")
    p.add_argument("-p", type=int, required=True)
    p.add_argument("-x", type=int, required=True, help="starting point (an integer)")
    p.add_argument("-n", type=int, required=True, help="number of steps")
    p.add_argument("-m", type=int, required=True, help="coset depth")
    p.add_argument("--precision", type=int, help="digits of x assumed known (default m + n*loss)")
    p.set_defaults(func=cmd_itinerary)

    p = sub.add_parser("sample", parents=[common], help="empirical itinerary frequencies")
    p.add_argument("expr")
    p.add_argument("-p", type=int, required=True)
    p.add_argument("-m", type=int, required=True)
    p.add_argument("--word-len", type=int, default=2)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("examples", parents=[common], help="replay a worked example")
    p.add_argument("name", choices=sorted(EXAMPLES))
    p.add_argument("params", nargs="*", type=int, help="p ell for almost-bernoulli")
    p.add_argument("-p", type=int, help="prime for woodcock-smart")
    p.add_argument("--primes", type=_positive_int_list, default=[2, 3, 5])
    p.add_argument("--k-max", type=int, default=20)
    p.set_defaults(func=cmd_examples)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "examples" and args.params and len(args.params) != 2:
        parser.error("almost-bernoulli takes exactly two parameters: p ell")
    try:
        return args.func(args)
    except UsageError as e:
        print(f"padyn: error: {e}", file=sys.stderr)
        return 1
    except (NotLocallyScaling, NotSelfMap, NotRealizable) as e:
        print(f"padyn: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except (InsufficientPrecision, RealizationDepthExceeded) as e:
        print(f"padyn: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    except (InternalInconsistency, ReplayFailed) as e:
        print(f"padyn: {type(e).__name__}: {e}", file=sys.stderr)
        return 4
    except ValueError as e:
        print(f"padyn: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
