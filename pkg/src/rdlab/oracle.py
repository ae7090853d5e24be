"""Independent reference solutions for validating the solver.

The heat kernel oracle is adaptive quadrature against the exact Gaussian
kernel; for Gaussian initial data the convolution has a closed form, and
for a linear reaction f(u) = lam*u the solution is an exponential factor
times the pure-heat solution.  None of these share code with the
finite-difference path they are used to check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from scipy.integrate import dblquad, quad

# 12 kernel standard deviations: tail mass below exp(-72), negligible
# against the 1e-10 quadrature tolerance
_TAIL_SIGMAS = 12.0
_QUAD_TOL = 1e-10


@dataclass(frozen=True)
class OracleSolution:
    """A reference solution with a pointwise evaluator (x, t) -> value."""

    kind: str
    evaluator: Callable = field(repr=False)
    params: dict = field(default_factory=dict)

    def __call__(self, x: float, t: float) -> float:
        return self.evaluator(x, t)


def heat_exact_gaussian(x: float, t: float, diffusion: float = 1.0) -> float:
    """Heat solution for u0(x) = exp(-x^2): closed-form Gaussian spreading."""
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    w = 1.0 + 4.0 * diffusion * t
    return math.exp(-x * x / w) / math.sqrt(w)


def heat_quadrature(
    u0: Callable, x: float, t: float, diffusion: float = 1.0
) -> float:
    """Heat-kernel convolution of u0 by adaptive quadrature."""
    if t <= 0:
        raise ValueError(f"time must be > 0, got {t}")
    four_dt = 4.0 * diffusion * t
    norm = 1.0 / math.sqrt(math.pi * four_dt)
    half_width = _TAIL_SIGMAS * math.sqrt(2.0 * diffusion * t)

    def integrand(y):
        return norm * math.exp(-((x - y) ** 2) / four_dt) * u0(y)

    val, _ = quad(
        integrand,
        x - half_width,
        x + half_width,
        epsabs=_QUAD_TOL,
        epsrel=_QUAD_TOL,
        limit=200,
    )
    return val


def linear_reaction_exact(
    u0: Callable, lam: float, x: float, t: float, diffusion: float = 1.0
) -> float:
    """Solution for f(u) = lam*u: exp(lam*t) times the heat solution."""
    return math.exp(lam * t) * heat_quadrature(u0, x, t, diffusion)


def gaussian_oracle(diffusion: float = 1.0) -> OracleSolution:
    return OracleSolution(
        kind="gaussian-exact",
        evaluator=lambda x, t: heat_exact_gaussian(x, t, diffusion),
        params={"diffusion": diffusion},
    )


def quadrature_oracle(u0: Callable, diffusion: float = 1.0) -> OracleSolution:
    return OracleSolution(
        kind="quadrature",
        evaluator=lambda x, t: heat_quadrature(u0, x, t, diffusion),
        params={"diffusion": diffusion},
    )


def linear_reaction_oracle(
    u0: Callable, lam: float, diffusion: float = 1.0
) -> OracleSolution:
    return OracleSolution(
        kind="linear-reaction",
        evaluator=lambda x, t: linear_reaction_exact(u0, lam, x, t, diffusion),
        params={"diffusion": diffusion, "lam": lam},
    )


def bump_integral(phi) -> float:
    """Integral of a bump over the plane by adaptive 2-D quadrature."""
    x_lo, x_hi, t_lo, t_hi = phi.support_box
    val, _ = dblquad(
        lambda t, x: phi.value(x, t),
        x_lo,
        x_hi,
        t_lo,
        t_hi,
        epsabs=_QUAD_TOL * 0.01,
        epsrel=_QUAD_TOL * 0.01,
    )
    return val
