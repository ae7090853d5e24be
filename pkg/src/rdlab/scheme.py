"""Explicit forward-time centered-space scheme on the triangular grid.

Each level is one row shorter on both ends than the one below it, so no
boundary conditions are ever invented: the update

    U(x, t+dt) = alpha*(U(x-dx,t) + U(x+dx,t)) + (1-2*alpha)*U(x,t)
               + dt*f(U(x,t))

is applied only where all three inputs exist.  The symmetric grouping
alpha*(left+right) makes rows of even initial data exactly palindromic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .grid import GridSpec, level_width
from .reactions import ReactionTerm

# above this magnitude an unstable run is about to overflow; stop stepping
_BLOWUP_CAP = 1e300


@dataclass(frozen=True)
class Field:
    """Approximate solution stored row-per-level with shrinking width."""

    spec: GridSpec
    rows: tuple  # row n: values at x = m*dx for m = -(N-n) .. N-n
    truncated: bool = False

    def __post_init__(self):
        if not self.rows:
            raise ValueError("field needs at least the initial row")
        for n, row in enumerate(self.rows):
            if len(row) != level_width(self.spec, n):
                raise ValueError(
                    f"row {n} has length {len(row)}, "
                    f"expected {level_width(self.spec, n)}"
                )
            if not self.spec.allow_unstable and not np.all(np.isfinite(row)):
                raise ValueError(f"row {n} contains non-finite values")

    @property
    def levels(self) -> int:
        return len(self.rows)

    def half_width(self, n: int) -> int:
        """Largest |m| present on level n."""
        return self.spec.big_n - n

    def x_coords(self, n: int) -> np.ndarray:
        w = self.half_width(n)
        return np.arange(-w, w + 1) * self.spec.dx

    def t(self, n: int) -> float:
        return n * self.spec.dt

    def value(self, m: int, n: int) -> float:
        return float(self.rows[n][m + self.half_width(n)])

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(row))) for row in self.rows)

    def covers(self, x: float, t: float) -> bool:
        """Whether (x, t) lies in the region the stored rows resolve."""
        if t < -1e-12 * self.spec.dt:
            return False
        n = t / self.spec.dt
        m = abs(x) / self.spec.dx
        return (
            n <= self.levels - 1 + 1e-9
            and m + n <= self.spec.big_n + 1e-9
        )


@dataclass(frozen=True)
class ProblemSpec:
    """Initial-value problem data: reaction, initial sampler, declared bounds."""

    reaction: ReactionTerm
    initial: Callable = field(repr=False)
    init_bound: float = 0.0  # M: sup |u0|
    init_lipschitz: float = 0.0  # L: Lipschitz constant of u0
    diffusion: float = 1.0

    def __post_init__(self):
        if self.init_bound < 0 or self.init_lipschitz < 0:
            raise ValueError(
                f"M, L must be >= 0, got M={self.init_bound}, "
                f"L={self.init_lipschitz}"
            )
        if self.diffusion <= 0:
            raise ValueError(f"diffusion must be > 0, got {self.diffusion}")


def sample_initial(problem: ProblemSpec, xs: np.ndarray) -> np.ndarray:
    vals = problem.initial(xs)
    vals = np.asarray(vals, dtype=float)
    if vals.shape != xs.shape:  # scalar-only sampler
        vals = np.array([float(problem.initial(x)) for x in xs])
    return vals


def spot_check_initial(
    problem: ProblemSpec, lo: float, hi: float, samples: int = 2001
) -> tuple[float, float]:
    """Sampled sup and max difference quotient of u0, for validating M, L."""
    xs = np.linspace(lo, hi, samples)
    vals = sample_initial(problem, xs)
    sup = float(np.max(np.abs(vals)))
    quot = float(np.max(np.abs(np.diff(vals) / np.diff(xs))))
    return sup, quot


def step_level(
    row: np.ndarray,
    spec: GridSpec,
    reaction: ReactionTerm,
    t: float = 0.0,
) -> np.ndarray:
    """Advance one level; output is two entries shorter than the input."""
    row = np.asarray(row, dtype=float)
    if len(row) < 3:
        raise ValueError(f"row must have at least 3 values, got {len(row)}")
    mid = row[1:-1]
    new = spec.alpha * (row[:-2] + row[2:]) + (1.0 - 2.0 * spec.alpha) * mid
    return new + spec.dt * reaction.evaluate(mid)


def solve(spec: GridSpec, problem: ProblemSpec) -> Field:
    """March the scheme from the sampled initial row up the triangle.

    Deterministic for fixed inputs.  If a level overflows (possible only
    for specs flagged unstable), stepping stops and the field is truncated
    at the last finite level.
    """
    if spec.diffusion != problem.diffusion:
        raise ValueError(
            f"grid diffusion {spec.diffusion} != problem diffusion "
            f"{problem.diffusion}"
        )
    xs = np.arange(-spec.big_n, spec.big_n + 1) * spec.dx
    first = sample_initial(problem, xs)
    if not np.all(np.isfinite(first)):
        raise ValueError("initial data sampled to non-finite values")

    rows = [first]
    truncated = False
    for n in range(spec.big_n):
        new = step_level(rows[-1], spec, problem.reaction, t=n * spec.dt)
        if not np.all(np.isfinite(new)) or np.max(np.abs(new)) > _BLOWUP_CAP:
            truncated = True
            break
        rows.append(new)
    return Field(spec=spec, rows=tuple(rows), truncated=truncated)


def constant_field(spec: GridSpec, c: float) -> Field:
    """The field identically equal to c (what solve gives for u0 = c, f = 0)."""
    rows = tuple(
        np.full(level_width(spec, n), float(c)) for n in range(spec.big_n + 1)
    )
    return Field(spec=spec, rows=rows)


def discrete_residual_max(field: Field, reaction: ReactionTerm) -> float:
    """Max of |D_t+ U - D*D_x^2 U - f(U)| over interior grid points.

    For any field produced by solve this is at rounding level, since the
    scheme is defined by solving exactly this equation for U(x, t+dt).
    """
    if field.levels < 2:
        raise ValueError("field needs at least 2 levels")
    spec = field.spec
    worst = 0.0
    for n in range(field.levels - 1):
        row = field.rows[n]
        mid = row[1:-1]
        d_t = (field.rows[n + 1] - mid) / spec.dt
        d_xx = (row[2:] - 2.0 * mid + row[:-2]) / (spec.dx * spec.dx)
        res = d_t - spec.diffusion * d_xx - reaction.evaluate(mid)
        if res.size:
            worst = max(worst, float(np.max(np.abs(res))))
    return worst


def forward_diff_x(field: Field) -> list[np.ndarray]:
    """Per-level forward difference quotients V = D_x+ U (one shorter)."""
    return [
        np.diff(row) / field.spec.dx for row in field.rows if len(row) >= 2
    ]


def write_field_csv(field: Field, path) -> None:
    """Dump as CSV `m,n,x,t,u`, level-major, round-trip float formatting."""
    spec = field.spec
    with open(path, "w", newline="") as fh:
        fh.write("m,n,x,t,u\n")
        for n, row in enumerate(field.rows):
            w = field.half_width(n)
            t = n * spec.dt
            for i, u in enumerate(row):
                m = i - w
                fh.write(f"{m},{n},{m * spec.dx!r},{t!r},{float(u)!r}\n")
