"""Exact stochastic-matrix machinery over the rationals.

Matrices are stored sparsely (only positive entries), rows keyed by state.
Row vectors are plain ``dict[state, Fraction]``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import InternalInconsistency, NegativeEntry, NotStationary, NotStochastic

State = Hashable
RowVector = dict


class StochasticMatrix:
    """Nonnegative square matrix with rows summing to exactly 1."""

    def __init__(
        self,
        rows: Mapping[State, Mapping[State, Fraction]],
        states: Iterable[State] | None = None,
        *,
        check: bool = True,
    ):
        self.states: tuple = tuple(states) if states is not None else tuple(rows)
        index = set(self.states)
        self._rows: dict = {}
        for i in self.states:
            row = {}
            for j, a in rows.get(i, {}).items():
                a = Fraction(a)
                if check and a < 0:
                    raise NotStochastic(f"negative entry A({i},{j}) = {a}")
                if a:
                    if check and j not in index:
                        raise NotStochastic(f"entry A({i},{j}) leaves the state set")
                    row[j] = a
            self._rows[i] = row
        if check:
            for i, row in self._rows.items():
                s = sum(row.values(), Fraction(0))
                if s != 1:
                    raise NotStochastic(f"row {i} sums to {s}")

    @classmethod
    def from_dense(
        cls, matrix: Sequence[Sequence], states: Sequence[State] | None = None
    ) -> "StochasticMatrix":
        states = list(states) if states is not None else list(range(len(matrix)))
        rows = {
            states[r]: {states[c]: Fraction(a) for c, a in enumerate(line) if a}
            for r, line in enumerate(matrix)
        }
        return cls(rows, states)

    @property
    def size(self) -> int:
        return len(self.states)

    def row(self, i: State) -> dict:
        return dict(self._rows[i])

    def entry(self, i: State, j: State) -> Fraction:
        return self._rows[i].get(j, Fraction(0))

    def successors(self, i: State):
        return self._rows[i].keys()

    def items(self):
        """Yield ``(i, j, A(i, j))`` for every positive entry, in state order."""
        order = {s: k for k, s in enumerate(self.states)}
        for i in self.states:
            for j in sorted(self._rows[i], key=order.__getitem__):
                yield i, j, self._rows[i][j]

    def column_sums(self) -> dict:
        sums = {j: Fraction(0) for j in self.states}
        for row in self._rows.values():
            for j, a in row.items():
                sums[j] += a
        return sums

    def restrict(self, states: Iterable[State]) -> "StochasticMatrix":
        keep = list(states)
        idx = set(keep)
        rows = {i: {j: a for j, a in self._rows[i].items() if j in idx} for i in keep}
        return StochasticMatrix(rows, keep)

    def to_dense(self) -> list[list[Fraction]]:
        return [[self.entry(i, j) for j in self.states] for i in self.states]

    def is_permutation(self) -> bool:
        """Every row and every column has exactly one nonzero entry, equal to 1."""
        hit = set()
        for row in self._rows.values():
            if len(row) != 1:
                return False
            (j, a), = row.items()
            if a != 1 or j in hit:
                return False
            hit.add(j)
        return len(hit) == self.size

    def all_entries_equal(self) -> bool:
        n = self.size
        return all(
            len(row) == n and all(a == Fraction(1, n) for a in row.values())
            for row in self._rows.values()
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, StochasticMatrix):
            return NotImplemented
        return set(self.states) == set(other.states) and self._rows == other._rows

    __hash__ = None

    def __repr__(self) -> str:
        return f"StochasticMatrix(states={self.size})"


def mat_vec_product(v: Mapping[State, Fraction], A: StochasticMatrix) -> dict:
    """The row vector vA(j) = sum_i v(i) A(i, j)."""
    out = {j: Fraction(0) for j in A.states}
    for i, vi in v.items():
        if vi:
            for j, a in A._rows[i].items():
                out[j] += vi * a
    return out


def strongly_connected_components(A: StochasticMatrix, states=None) -> list[tuple]:
    """SCCs of the positive-entry digraph restricted to ``states`` (Tarjan)."""
    nodes = list(A.states if states is None else states)
    allowed = set(nodes)
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    comps: list[tuple] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter([j for j in A.successors(root) if j in allowed]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter([j for j in A.successors(w) if j in allowed])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                order = {s: k for k, s in enumerate(nodes)}
                comps.append(tuple(sorted(comp, key=order.__getitem__)))
    return comps


def recurrent_classes(A: StochasticMatrix) -> list[tuple]:
    """Closed communicating classes, i.e. SCCs with no edge leaving them."""
    out = []
    for comp in strongly_connected_components(A):
        members = set(comp)
        if all(j in members for i in comp for j in A.successors(i)):
            out.append(comp)
    order = {s: k for k, s in enumerate(A.states)}
    return sorted(out, key=lambda c: order[c[0]])


def _gth_stationary(A: StochasticMatrix, states: Sequence[State]) -> dict:
    # Grassmann-Taksar-Heyman elimination; subtraction-free, exact over Q.
    n = len(states)
    pos = {s: k for k, s in enumerate(states)}
    P = [dict() for _ in range(n)]
    for s in states:
        for t, a in A._rows[s].items():
            P[pos[s]][pos[t]] = a
    for k in range(n - 1, 0, -1):
        S = sum((a for j, a in P[k].items() if j < k), Fraction(0))
        if S == 0:
            raise InternalInconsistency("GTH pivot vanished; class is not irreducible")
        row_k = {j: a for j, a in P[k].items() if j < k}
        for i in range(k):
            a_ik = P[i].pop(k, None)
            if a_ik:
                scale = a_ik / S
                P[i][k] = scale
                Pi = P[i]
                for j, a in row_k.items():
                    Pi[j] = Pi.get(j, Fraction(0)) + scale * a
    pi = [Fraction(0)] * n
    pi[0] = Fraction(1)
    for k in range(1, n):
        pi[k] = sum((pi[i] * P[i].get(k, 0) for i in range(k)), Fraction(0))
    total = sum(pi)
    return {states[k]: pi[k] / total for k in range(n)}


def stationary_distributions(A: StochasticMatrix) -> list[dict]:
    """One stationary probability vector per recurrent class.

    Each vector sums to 1, satisfies v = vA exactly, and is supported on
    exactly one recurrent class; every stationary distribution of A is a
    convex combination of these.
    """
    out = []
    for comp in recurrent_classes(A):
        local = _gth_stationary(A, comp)
        v = {s: Fraction(0) for s in A.states}
        v.update(local)
        out.append(v)
    return out


@dataclass(frozen=True)
class Decomposition:
    recurrent_components: list[tuple]
    transient_states: tuple
    component_matrices: list[StochasticMatrix] = field(repr=False)

    def component_of(self, state: State) -> int | None:
        for k, comp in enumerate(self.recurrent_components):
            if state in comp:
                return k
        return None


def decompose(A: StochasticMatrix, v: Mapping[State, Fraction]) -> Decomposition:
    """Ergodic decomposition of (A, v) into irreducible closed classes.

    Works on the support of v; states where v vanishes are reported as
    transient. Flux balance (v = vA) forces the support to split into
    strongly connected pieces with no edges between them.
    """
    v = {s: Fraction(v.get(s, 0)) for s in A.states}
    for s, x in v.items():
        if x < 0:
            raise NegativeEntry(f"v({s}) = {x} < 0")
    if mat_vec_product(v, A) != v:
        raise NotStationary("v != vA")
    support = [s for s in A.states if v[s] > 0]
    comps = strongly_connected_components(A, support)
    which = {s: k for k, comp in enumerate(comps) for s in comp}
    for s in support:
        for t in A.successors(s):
            if which.get(t) != which[s]:
                raise InternalInconsistency(
                    f"edge {s}->{t} leaves its component despite flux balance"
                )
    order = {s: k for k, s in enumerate(A.states)}
    comps.sort(key=lambda c: order[c[0]])
    transient = tuple(s for s in A.states if v[s] == 0)
    return Decomposition(comps, transient, [A.restrict(c) for c in comps])


def is_irreducible(A: StochasticMatrix) -> bool:
    return len(strongly_connected_components(A)) == 1


def _bool_rows(A: StochasticMatrix) -> list[int]:
    pos = {s: k for k, s in enumerate(A.states)}
    rows = []
    for s in A.states:
        bits = 0
        for t in A.successors(s):
            bits |= 1 << pos[t]
        rows.append(bits)
    return rows


def _bool_mul(X: list[int], Y: list[int]) -> list[int]:
    out = []
    for bits in X:
        acc = 0
        k = 0
        while bits:
            if bits & 1:
                acc |= Y[k]
            bits >>= 1
            k += 1
        out.append(acc)
    return out


def _primitive_wielandt(A: StochasticMatrix) -> bool:
    # A primitive  <=>  A^(n^2 - 2n + 2) > 0 entrywise (Wielandt's bound)
    n = A.size
    full = (1 << n) - 1
    e = n * n - 2 * n + 2
    base = _bool_rows(A)
    result: list[int] | None = None
    while e:
        if e & 1:
            result = base if result is None else _bool_mul(result, base)
        e >>= 1
        if e:
            base = _bool_mul(base, base)
    return all(r == full for r in result)


def period(A: StochasticMatrix) -> int:
    """gcd of cycle lengths through the first state (A irreducible).

    BFS levels from a root; every edge u -> w contributes level(u) + 1 - level(w).
    """
    root = A.states[0]
    level = {root: 0}
    frontier = [root]
    while frontier:
        nxt = []
        for u in frontier:
            for w in A.successors(u):
                if w not in level:
                    level[w] = level[u] + 1
                    nxt.append(w)
        frontier = nxt
    g = 0
    for u in level:
        for w in A.successors(u):
            if w in level:
                g = math.gcd(g, level[u] + 1 - level[w])
    return g


WIELANDT_MAX_STATES = 512


def is_primitive(A: StochasticMatrix, method: str = "auto") -> bool:
    """Some power of A is entrywise positive.

    ``method`` is ``"wielandt"`` (boolean powers up to n^2 - 2n + 2),
    ``"period"`` (irreducible and aperiodic), or ``"auto"``, which runs both
    and insists they agree for matrices up to WIELANDT_MAX_STATES states.
    """
    if method == "wielandt":
        return _primitive_wielandt(A)
    if method == "period":
        return is_irreducible(A) and period(A) == 1
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    by_period = is_primitive(A, "period")
    if A.size <= WIELANDT_MAX_STATES:
        if _primitive_wielandt(A) != by_period:
            raise InternalInconsistency("primitivity tests disagree")
    return by_period


class ComponentKind(enum.Enum):
    LOCAL_ISOMETRY = "LocalIsometry"
    ERGODIC_MARKOV = "ErgodicMarkov"


@dataclass(frozen=True)
class ComponentClass:
    """Dynamical type of one ergodic component.

    There is deliberately no "weakly mixing" label: for these systems weak
    mixing already forces mixing.
    """

    kind: ComponentKind
    mixing: bool
    isometrically_bernoulli: bool

    def __post_init__(self):
        if self.kind is ComponentKind.LOCAL_ISOMETRY and self.mixing:
            raise ValueError("a local isometry is never mixing")
        if self.isometrically_bernoulli and not self.mixing:
            raise ValueError("isometrically Bernoulli implies mixing")


def classify_component(A_k: StochasticMatrix, n_states: int | None = None) -> ComponentClass:
    """Local isometry (a cyclic permutation of balls) or ergodic Markov.

    ``n_states`` is the size of the full matrix A_k was cut from; the
    isometrically-Bernoulli label needs A_k to be all of it.
    """
    if A_k.is_permutation():
        return ComponentClass(ComponentKind.LOCAL_ISOMETRY, False, False)
    mixing = is_primitive(A_k)
    whole = n_states is None or n_states == A_k.size
    return ComponentClass(
        ComponentKind.ERGODIC_MARKOV, mixing, whole and A_k.all_entries_equal()
    )


def cylinder_measure(
    A: StochasticMatrix, v: Mapping[State, Fraction], word: Sequence[State]
) -> Fraction:
    """v(d_0) A(d_0, d_1) ... A(d_{l-1}, d_l)."""
    if not word:
        raise ValueError("empty word")
    out = Fraction(v.get(word[0], 0))
    for a, b in zip(word, word[1:]):
        if not out:
            break
        out *= A.entry(a, b)
    return out
