"""Degree-weighted DeGroot learning on stochastic block models.

Thin Python surface over the C++ core: block-model generation, the
row-stochastic update matrix T = D1^{-1} A D2, its spectrum (numeric and
closed form on the two-type model), monotonicity regimes in the exponent
alpha, consensus weights, and worst-case initial beliefs.
"""

from degrootlearn._core import (
    AlphaInterval,
    RegimeClassification,
    SpectralReport,
    WorstBeliefs,
    __version__,
    classify_regime,
    consensus_weights,
    convergence_distance,
    expected_adjacency,
    iterate_beliefs,
    lambda2_closed_form,
    lambda2_numeric,
    learning_matrix,
    sample_adjacency,
    worst_initial_beliefs,
)

__all__ = [
    "AlphaInterval",
    "RegimeClassification",
    "SpectralReport",
    "WorstBeliefs",
    "__version__",
    "classify_regime",
    "consensus_weights",
    "convergence_distance",
    "expected_adjacency",
    "iterate_beliefs",
    "lambda2_closed_form",
    "lambda2_numeric",
    "learning_matrix",
    "sample_adjacency",
    "worst_initial_beliefs",
]
