"""Exact p-adic dynamics of polynomial maps Z_p -> Z_p.

Finds the radius below which a polynomial is locally scaling, builds the
associated transition matrix, and classifies the resulting measurable
dynamics (measure preservation, ergodic components, mixing, Bernoulli).
Every quantity is an exact rational.
"""

__version__ = "0.1.0"

from .analysis import AnalysisReport, MatrixAnalysis, analyze, analyze_matrix
from .core import (
    CosetIndex,
    PadicInt,
    RationalPoly,
    binom_poly,
    format_poly,
    is_self_map,
    norm,
    poly_eval_padic,
    reduce,
    taylor_shift,
    vp,
)
from .criteria import (
    almost_bernoulli_report,
    constant_derivative_check,
    constant_derivative_oracle,
    isometric_bernoulli_equivalence_check,
    zhat_bernoulli_check,
)
from .errors import *  # noqa: F401,F403
from .mahler import (
    MahlerSeries,
    bernoulli_criterion,
    from_mahler,
    lipschitz_constant,
    realize_matrix,
    sup_norm,
    to_mahler,
)
from .markov import (
    ComponentClass,
    ComponentKind,
    StochasticMatrix,
    classify_component,
    decompose,
    is_primitive,
    stationary_distributions,
)
from .parse import parse_poly
from .scaling import (
    ScalingProfile,
    TransitionMatrix,
    brute_force_matrix,
    find_scaling_radius,
    is_measure_preserving,
    transition_matrix,
)
from .shift import cylinder_preimage, itinerary, verify_cylinder_measures
