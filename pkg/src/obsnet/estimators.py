"""Estimator-style wrappers over the functional API.

``fit`` takes a graph (or a structure) rather than a data matrix, so these
follow the scikit-learn parameter and fitted-attribute conventions without
claiming pipeline compatibility.
"""

from __future__ import annotations

from typing import Sequence

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .field import (
    DEFAULT_PRIME,
    DEFAULT_RETRIES,
    PrimeField,
    instantiate_deterministic,
    instantiate_random,
    recover_initial_state,
    simulate,
)
from .graph import PhysicalGraph
from .pipeline import DesignSolution, design
from .structural import (
    StructuralPair,
    extract_cactus_certificate,
    robust_structural_observability,
)


class RobustObservabilityDesigner(BaseEstimator):
    """Designs the cheapest structure that stays observable after ``k`` sensor failures.

    Fitted attributes: ``solution_``, ``a_pattern_``, ``c_pattern_``,
    ``cost_`` (per-output reading, micro-units) and ``certificate_``.
    """

    def __init__(self, k: int = 0, method: str = "auto"):
        self.k = k
        self.method = method

    def fit(self, X: PhysicalGraph, y=None) -> "RobustObservabilityDesigner":
        sol = design(X, self.k, method=self.method)
        self.solution_ = sol
        self.a_pattern_ = sol.structure.a_pattern
        self.c_pattern_ = sol.structure.c_pattern
        self.cost_ = sol.cost_per_output_sum
        self.certificate_ = extract_cactus_certificate(sol.structure)
        return self

    def verify(self, k: int | None = None):
        """True, or the smallest deletion set that breaks observability."""
        check_is_fitted(self, "solution_")
        return robust_structural_observability(self.solution_.structure, self.k if k is None else k)


class FieldRealizer(BaseEstimator):
    """Picks numeric (A, C) over GF(prime) for a structure and reconstructs initial states.

    ``transform`` maps output traces to initial states; ``inverse_transform``
    simulates traces from initial states.
    """

    def __init__(
        self,
        prime: int = DEFAULT_PRIME,
        seed: int = 0,
        max_retries: int = DEFAULT_RETRIES,
        deterministic: bool = False,
    ):
        self.prime = prime
        self.seed = seed
        self.max_retries = max_retries
        self.deterministic = deterministic

    def fit(self, X: StructuralPair | DesignSolution, y=None) -> "FieldRealizer":
        structure = X.structure if isinstance(X, DesignSolution) else X
        field = PrimeField(self.prime)
        if self.deterministic:
            self.system_, self.trials_ = instantiate_deterministic(structure, field), 0
        else:
            self.system_, self.trials_ = instantiate_random(structure, field, self.seed, self.max_retries)
        return self

    def transform(self, X: Sequence[Sequence[Sequence[int]]]) -> list[list[int]]:
        check_is_fitted(self, "system_")
        return [recover_initial_state(self.system_, trace) for trace in X]

    def inverse_transform(self, X: Sequence[Sequence[int]], steps: int | None = None) -> list[list[list[int]]]:
        check_is_fitted(self, "system_")
        t = self.system_.n if steps is None else steps
        return [simulate(self.system_, x0, t) for x0 in X]
