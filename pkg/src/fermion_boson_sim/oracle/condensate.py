"""Local occupation statistics of a uniform boson condensate."""
import math

import numpy as np
from scipy.special import gammaln

from fermion_boson_sim.core.errors import ConfigurationError


def condensate_local_distribution(n_sites: int, p: int) -> float:
    """
    Probability of p bosons on one site when N bosons share one uniform mode over N sites

    |w(p)|^2 = ((N-1)/N)^N N!/(N-p)! / (p! (N-1)^p), evaluated in logs.
    """
    if n_sites < 1:
        raise ConfigurationError(f"need at least one site, got {n_sites}")
    if p < 0 or p > n_sites:
        raise ConfigurationError(f"p must be in [0, {n_sites}], got {p}")
    if n_sites == 1:
        return 1.0 if p == 1 else 0.0
    n = n_sites
    log_w = (
        n * math.log((n - 1) / n)
        + gammaln(n + 1)
        - gammaln(n - p + 1)
        - gammaln(p + 1)
        - p * math.log(n - 1)
    )
    return math.exp(log_w)


def condensate_distribution(n_sites: int) -> np.ndarray:
    """|w(p)|^2 for p = 0 .. N"""
    return np.array([condensate_local_distribution(n_sites, p) for p in range(n_sites + 1)])


def poisson_bound(p: int) -> float:
    """Large-N limit 1 / (p! e)"""
    return math.exp(-gammaln(p + 1) - 1.0)
