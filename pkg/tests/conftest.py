import time

import numpy as np
import pytest

from oulab.energy import _profile_on, quantile_grid
from oulab.field2d import field_from_function, relax
from oulab.heteroclinic import collocate_refined, shoot
from oulab.potential import custom, double_well


@pytest.fixture(scope="session")
def timings():
    return {}


@pytest.fixture(scope="session")
def dw4():
    return double_well(4.0)


@pytest.fixture(scope="session")
def sign_flipped():
    return custom(
        F=lambda t: -((1.0 - t * t) ** 2) / 4.0,
        f=lambda t: t * t * t - t,
        fprime=lambda t: 3.0 * t * t - 1.0,
        c=1.0,
        label="sign-flipped well",
    )


@pytest.fixture(scope="session")
def shoot4(dw4, timings):
    t0 = time.time()
    result = shoot(dw4, T=8.0, tol=1e-5)
    timings["shoot4"] = time.time() - t0
    assert result.status == "converged"
    return result


@pytest.fixture(scope="session")
def profile4(dw4, shoot4, timings):
    """Richardson-refined collocation profile at A = 4 (values O(h^4))."""
    t0 = time.time()
    prof = collocate_refined(dw4, shoot4.profile, T=8.0, n=4096)
    timings["profile4"] = time.time() - t0
    return prof


@pytest.fixture(scope="session")
def quantile_2048():
    nodes, masses = quantile_grid(2048)
    return nodes, masses


def random_halfline_profile(rng, nodes, c=1.0):
    """Smooth random profile on the quantile grid, pinned to 0 at the origin."""
    u = np.zeros_like(nodes)
    for _ in range(rng.integers(1, 6)):
        amp = rng.uniform(0.2, 1.0)
        loc = rng.uniform(0.0, 4.0)
        width = rng.uniform(0.3, 2.0)
        u += amp * np.exp(-(((nodes - loc) / width) ** 2))
    u *= nodes / (nodes + 0.2)
    peak = max(float(u.max()), 1e-9)
    u = np.clip(u / peak * rng.uniform(0.3, 1.0) * c, 0.0, c)
    grid = np.concatenate([[0.0], nodes])
    vals = np.concatenate([[0.0], u])
    return _profile_on(grid, vals, c)


@pytest.fixture(scope="session")
def relaxed_field_full(dw4, timings):
    """Converged flow from tanh(x + 0.3 sin y) at production resolution."""
    t0 = time.time()
    u0 = field_from_function(lambda X, Y: np.tanh(X + 0.3 * np.sin(Y)), L=5.0, h=0.025)
    out = relax(dw4, u0, tol=1e-5, max_steps=400_000)
    timings["relax_full"] = time.time() - t0
    return out


@pytest.fixture(scope="session")
def relaxed_field_coarse(dw4):
    u0 = field_from_function(lambda X, Y: np.tanh(X + 0.3 * np.sin(Y)), L=5.0, h=0.1)
    return relax(dw4, u0, tol=5e-5, max_steps=100_000)
