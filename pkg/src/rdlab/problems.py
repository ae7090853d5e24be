"""Named initial data and the builtin problem suite.

Each initial datum carries its exact sup bound M and Lipschitz constant L
so the a-priori reports can be checked without hand-entering constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .reactions import make_builtin
from .scheme import ProblemSpec


@dataclass(frozen=True)
class InitialDatum:
    name: str
    sampler: Callable
    bound: float  # sup |u0|
    lipschitz: float  # sup |u0'|


def _gaussian(x):
    return np.exp(-np.asarray(x, dtype=float) ** 2)


def _cauchy(x):
    x = np.asarray(x, dtype=float)
    return 1.0 / (1.0 + x * x)


INITIAL_DATA = {
    # sup|d/dx exp(-x^2)| = sqrt(2/e) at x = 1/sqrt(2)
    "gaussian": InitialDatum("gaussian", _gaussian, 1.0, math.sqrt(2.0 / math.e)),
    "sine": InitialDatum("sine", np.sin, 1.0, 1.0),
    # sup|d/dx 1/(1+x^2)| = 3*sqrt(3)/8 at x = 1/sqrt(3)
    "cauchy": InitialDatum("cauchy", _cauchy, 1.0, 3.0 * math.sqrt(3.0) / 8.0),
}


def make_initial(name: str, param: float | None = None) -> InitialDatum:
    if name == "constant":
        if param is None:
            raise ValueError("constant initial data needs a value parameter")
        c = float(param)
        return InitialDatum("constant", lambda x: np.full_like(
            np.asarray(x, dtype=float), c), abs(c), 0.0)
    if param is not None:
        raise ValueError(f"initial datum {name!r} takes no parameter")
    try:
        return INITIAL_DATA[name]
    except KeyError:
        raise ValueError(f"unknown initial datum {name!r}") from None


def make_problem(
    initial: str,
    reaction: str,
    initial_param: float | None = None,
    reaction_param: float | None = None,
    diffusion: float = 1.0,
) -> ProblemSpec:
    u0 = make_initial(initial, initial_param)
    return ProblemSpec(
        reaction=make_builtin(reaction, reaction_param),
        initial=u0.sampler,
        init_bound=u0.bound,
        init_lipschitz=u0.lipschitz,
        diffusion=diffusion,
    )


def builtin_problems() -> dict[str, ProblemSpec]:
    """The canonical suite exercised by consistency and bound checks."""
    return {
        "heat-gaussian": make_problem("gaussian", "zero"),
        "sine-sine": make_problem("sine", "sine"),
        "logistic-cauchy": make_problem("cauchy", "clamped_logistic",
                                        reaction_param=2.0),
        "linear-gaussian": make_problem("gaussian", "linear",
                                        reaction_param=1.0),
    }
