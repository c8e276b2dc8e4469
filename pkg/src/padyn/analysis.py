"""End-to-end classification of a polynomial map of Z_p."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import RationalPoly
from .criteria import ALMOST_BERNOULLI_NOTES, is_almost_bernoulli_map
from .errors import NotSelfMap
from .mahler import BernoulliVerdict, MahlerSeries, bernoulli_criterion, sup_norm, to_mahler
from .markov import (
    ComponentClass,
    Decomposition,
    StochasticMatrix,
    classify_component,
    decompose,
    stationary_distributions,
)
from .scaling import (
    DEFAULT_MAX_DEPTH,
    ScalingProfile,
    TransitionMatrix,
    find_scaling_radius,
    is_measure_preserving,
    transition_matrix,
)


@dataclass(frozen=True)
class MatrixAnalysis:
    matrix: StochasticMatrix
    measure_preserving: bool
    invariant_vector: dict
    decomposition: Decomposition
    classes: list[ComponentClass]
    stationary: list[dict] | None = None


def analyze_matrix(A: StochasticMatrix) -> MatrixAnalysis:
    """Measure preservation, decomposition and classification of a matrix.

    When every column sums to 1 the decomposition is taken with respect to
    the uniform vector. Otherwise the stationary distributions are computed
    and the decomposition uses their average, whose support is exactly the
    union of the recurrent classes.
    """
    mp = is_measure_preserving(A)
    stationary = None
    if mp:
        v = {s: Fraction(1, A.size) for s in A.states}
    else:
        stationary = stationary_distributions(A)
        k = len(stationary)
        v = {s: sum(vec[s] for vec in stationary) / k for s in A.states}
    dec = decompose(A, v)
    classes = [classify_component(Ak, A.size) for Ak in dec.component_matrices]
    return MatrixAnalysis(A, mp, v, dec, classes, stationary)


@dataclass(frozen=True)
class AnalysisReport:
    polynomial: RationalPoly
    mahler: MahlerSeries
    profile: ScalingProfile
    matrix: TransitionMatrix
    measure_preserving: bool
    invariant_vector: dict
    decomposition: Decomposition
    classes: list[ComponentClass]
    bernoulli: BernoulliVerdict
    stationary: list[dict] | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def ergodic(self) -> bool:
        """Single component and no transient states."""
        return (
            len(self.decomposition.recurrent_components) == 1
            and not self.decomposition.transient_states
        )

    @property
    def mixing(self) -> bool:
        return self.ergodic and self.classes[0].mixing


def analyze(f: RationalPoly, m_max: int = DEFAULT_MAX_DEPTH) -> AnalysisReport:
    """Radius, matrix, then :func:`analyze_matrix` and the Mahler verdict."""
    series = to_mahler(f)
    if sup_norm(series) > 1:
        raise NotSelfMap(
            f"{f} has a Mahler coefficient of {f.prime}-adic size "
            f"{sup_norm(series)} > 1, so it does not map Z_{f.prime} into itself"
        )
    profile = find_scaling_radius(f, m_max)
    A = transition_matrix(f, profile)
    ma = analyze_matrix(A)
    notes: list[str] = []
    if not ma.measure_preserving:
        notes.append(
            "not Haar measure-preserving; classification is with respect to "
            "the invariant measure given by the stationary vector"
        )
        if is_almost_bernoulli_map(f):
            notes.extend(ALMOST_BERNOULLI_NOTES)
    return AnalysisReport(
        polynomial=f,
        mahler=series,
        profile=profile,
        matrix=A,
        measure_preserving=ma.measure_preserving,
        invariant_vector=ma.invariant_vector,
        decomposition=ma.decomposition,
        classes=ma.classes,
        bernoulli=bernoulli_criterion(series),
        stationary=ma.stationary,
        notes=notes,
    )
