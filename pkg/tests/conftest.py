import pytest
from hypothesis import settings

from rdlab import make_grid, make_problem, required_depth, solve

settings.register_profile("suite", max_examples=50, deadline=None)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def heat_problem():
    return make_problem("gaussian", "zero")


@pytest.fixture(scope="session")
def heat_field(heat_problem):
    """Heat field on a triangle covering |x| <= 3, t <= 1.2 at dx = 0.1."""
    dx = 0.1
    dt = 0.25 * dx * dx
    big_n = required_depth(3.0, 1.2, dx, dt)
    return solve(make_grid(dx, dt, big_n), heat_problem)


@pytest.fixture(scope="session")
def logistic_problem():
    return make_problem("cauchy", "clamped_logistic", reaction_param=2.0)
