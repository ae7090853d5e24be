"""Triangular space-time grid geometry.

The grid is the set of points (m*dx, n*dt) with |m| + n <= N.  Each time
level can be computed from the one below it without boundary conditions,
so the triangle is exactly the domain of dependence of its base row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

STABILITY_LIMIT = 0.5


class StabilityError(ValueError):
    """Raised when the stability ratio alpha = D*dt/dx^2 exceeds 1/2."""


@dataclass(frozen=True)
class GridSpec:
    """Geometry of the triangular grid plus the derived stability ratio."""

    dx: float
    dt: float
    big_n: int
    diffusion: float = 1.0
    alpha: float = 0.0
    allow_unstable: bool = False

    def __post_init__(self):
        if not (self.dx > 0 and self.dt > 0 and self.diffusion > 0):
            raise ValueError(
                f"dx, dt, diffusion must be positive, got "
                f"dx={self.dx}, dt={self.dt}, diffusion={self.diffusion}"
            )
        if self.big_n < 1:
            raise ValueError(f"grid depth must be >= 1, got {self.big_n}")
        expected = self.diffusion * self.dt / (self.dx * self.dx)
        if self.alpha != expected:
            raise ValueError(
                f"recorded alpha {self.alpha!r} differs from "
                f"diffusion*dt/dx^2 = {expected!r}"
            )
        if self.alpha > STABILITY_LIMIT and not self.allow_unstable:
            raise StabilityError(
                f"alpha = {self.alpha!r} exceeds the stability limit 1/2; "
                f"pass allow_unstable to run anyway"
            )

    def contains(self, m: int, n: int) -> bool:
        return n >= 0 and abs(m) + n <= self.big_n

    def x(self, m: int) -> float:
        return m * self.dx

    def t(self, n: int) -> float:
        return n * self.dt


@dataclass(frozen=True)
class GridPoint:
    """Integer grid coordinates: spatial index m, time level n >= 0."""

    m: int
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"time level must be >= 0, got {self.n}")

    def in_grid(self, spec: GridSpec) -> bool:
        return spec.contains(self.m, self.n)


def make_grid(
    dx: float,
    dt: float,
    big_n: int,
    diffusion: float = 1.0,
    allow_unstable: bool = False,
) -> GridSpec:
    """Validate mesh sizes and build a GridSpec with alpha computed.

    Rejects alpha = diffusion*dt/dx^2 > 1/2 with a StabilityError unless
    allow_unstable is set.
    """
    if not (dx > 0 and dt > 0 and diffusion > 0):
        raise ValueError(
            f"dx, dt, diffusion must be positive, got "
            f"dx={dx}, dt={dt}, diffusion={diffusion}"
        )
    if big_n < 1:
        raise ValueError(f"grid depth must be >= 1, got {big_n}")
    alpha = diffusion * dt / (dx * dx)
    return GridSpec(
        dx=dx,
        dt=dt,
        big_n=big_n,
        diffusion=diffusion,
        alpha=alpha,
        allow_unstable=allow_unstable,
    )


def nudged_ceil(v: float) -> int:
    # ceil with a small absolute cushion so quotients like 10/0.1 that land
    # a few ulps above an integer do not get bumped to the next one
    return math.ceil(v - 1e-9)


def required_depth(x_window: float, t_final: float, dx: float, dt: float) -> int:
    """Smallest depth N whose triangle covers [-X, X] x [0, T], at least 1."""
    if x_window < 0 or t_final < 0:
        raise ValueError(
            f"window sizes must be >= 0, got X={x_window}, T={t_final}"
        )
    if not (dx > 0 and dt > 0):
        raise ValueError(f"mesh sizes must be positive, got dx={dx}, dt={dt}")
    depth = nudged_ceil(x_window / dx) + nudged_ceil(t_final / dt)
    return max(1, depth)


def level_width(spec: GridSpec, n: int) -> int:
    """Number of grid points on time level n: 2*(N - n) + 1."""
    if not 0 <= n <= spec.big_n:
        raise ValueError(f"level {n} outside 0..{spec.big_n}")
    return 2 * (spec.big_n - n) + 1
