"""Simultaneous perturbation stochastic approximation."""
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from fermion_boson_sim.core.config import settings
from fermion_boson_sim.core.errors import ConfigurationError
from fermion_boson_sim.core.logging import get_logger

logger = get_logger(__name__)


@dataclass
class SpsaResult:
    best_params: np.ndarray
    best_value: float
    params: np.ndarray
    evaluations: int
    trace: List[float] = field(default_factory=list)


class SPSA:
    """
    Gain schedules a_k = a / (k + 1 + A)^alpha and c_k = c / (k + 1)^gamma

    The +-1 perturbations come from a seeded numpy Generator so runs with the
    same seed are identical.
    """

    def __init__(
        self,
        a: Optional[float] = None,
        c: Optional[float] = None,
        alpha: Optional[float] = None,
        gamma: Optional[float] = None,
        stability: Optional[float] = None,
        seed: int = 0,
    ):
        self.a = settings.SPSA_A if a is None else a
        self.c = settings.SPSA_C if c is None else c
        self.alpha = settings.SPSA_ALPHA if alpha is None else alpha
        self.gamma = settings.SPSA_GAMMA if gamma is None else gamma
        self.stability = stability
        self.seed = seed
        self._rng = np.random.default_rng(seed)
        if self.a <= 0 or self.c <= 0:
            raise ConfigurationError(f"SPSA gains must be positive, got a={self.a}, c={self.c}")

    def gains(self, k: int, iterations: int) -> tuple:
        stability = self.stability if self.stability is not None else 0.1 * iterations
        return self.a / (k + 1 + stability) ** self.alpha, self.c / (k + 1) ** self.gamma

    def minimize(
        self,
        loss: Callable[[np.ndarray], float],
        x0: np.ndarray,
        budget: Optional[int] = None,
    ) -> SpsaResult:
        """
        Run budget // 2 iterations of two-sided perturbation

        Args:
            loss: Objective to minimize
            x0: Starting parameters
            budget: Objective evaluations (defaults to settings.SPSA_BUDGET)

        Returns:
            SpsaResult with the best evaluated point and its best-so-far trace
        """
        budget = settings.SPSA_BUDGET if budget is None else budget
        iterations = max(1, budget // 2)
        params = np.array(x0, dtype=float)
        best_params, best_value = params.copy(), float(loss(params))
        trace = [best_value]
        evaluations = 1
        for k in range(iterations):
            a_k, c_k = self.gains(k, iterations)
            delta = self._rng.choice([-1.0, 1.0], size=params.shape)
            plus, minus = params + c_k * delta, params - c_k * delta
            y_plus, y_minus = float(loss(plus)), float(loss(minus))
            evaluations += 2
            for candidate, value in ((plus, y_plus), (minus, y_minus)):
                if value < best_value:
                    best_params, best_value = candidate.copy(), value
            params = params - a_k * (y_plus - y_minus) / (2.0 * c_k) * delta
            trace.append(best_value)
        logger.debug("SPSA finished", seed=self.seed, evaluations=evaluations, best=best_value)
        return SpsaResult(best_params, best_value, params, evaluations, trace)
