import math

import numpy as np
import pytest
from scipy.special import gammaln


def exact_sphere_monomial(n, exps):
    """int_{S^{n-1}} prod u_i^{e_i} ds, the classical Gamma-function formula."""
    if any(e % 2 for e in exps):
        return 0.0
    num = sum(gammaln((e + 1) / 2.0) for e in exps)
    den = gammaln((n + sum(exps)) / 2.0)
    return 2.0 * math.exp(num - den)


def exact_ball_monomial(n, exps, radius=1.0):
    """int_{B^n_radius} prod y_i^{e_i} dy (center at the origin)."""
    s = exact_sphere_monomial(n, exps)
    total = n + sum(exps)
    return s / total * radius ** total


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
