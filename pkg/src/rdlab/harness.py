"""Refinement studies and the instability demonstration.

A refinement study halves dx with alpha fixed (so dt quarters), measures
sup-norm errors on a fixed window sampled at shared grid points, and
reports observed orders log2(e_k / e_{k+1}).  Coarse-grid sample points
are a subset of every finer grid, so no interpolation error enters the
order estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import make_grid, required_depth
from .oracle import (
    gaussian_oracle,
    linear_reaction_oracle,
    quadrature_oracle,
)
from .reactions import make_builtin
from .scheme import Field, ProblemSpec, solve, step_level


@dataclass(frozen=True)
class EvalWindow:
    """Error-evaluation window: the segment |x| <= X at time T."""

    x_half_width: float
    t_final: float
    stride: int = 1

    def __post_init__(self):
        if self.x_half_width < 0 or self.t_final <= 0:
            raise ValueError(
                f"need X >= 0 and T > 0, got X={self.x_half_width}, "
                f"T={self.t_final}"
            )
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")


@dataclass(frozen=True)
class StudyResult:
    meshes: tuple  # (dx, dt) pairs, strictly refining
    errors: tuple  # sup-norm error per mesh on the window
    observed_orders: tuple  # log2(e_k / e_{k+1}), length len(meshes)-1
    window: EvalWindow

    def to_json_dict(self) -> dict:
        return {
            "meshes": [{"dx": dx, "dt": dt} for dx, dt in self.meshes],
            "errors": list(self.errors),
            "observed_orders": list(self.observed_orders),
            "window": {
                "x_half_width": self.window.x_half_width,
                "t_final": self.window.t_final,
                "stride": self.window.stride,
            },
        }


def write_study_csv(study: StudyResult, path) -> None:
    """CSV `dx,dt,error,order`; order column empty on the coarsest row."""
    with open(path, "w", newline="") as fh:
        fh.write("dx,dt,error,order\n")
        for k, (dx, dt) in enumerate(study.meshes):
            has_order = 1 <= k <= len(study.observed_orders)
            order = repr(study.observed_orders[k - 1]) if has_order else ""
            fh.write(f"{dx!r},{dt!r},{study.errors[k]!r},{order}\n")


def _top_row_values(field: Field, t_final: float, xs: np.ndarray):
    """Field values nearest to (xs, t_final); exact grid times/columns."""
    spec = field.spec
    n = int(round(t_final / spec.dt))
    n = min(n, field.levels - 1)
    row = field.rows[n]
    off = field.half_width(n)
    ms = np.rint(xs / spec.dx).astype(int)
    return row[ms + off], n * spec.dt


def _make_reference(problem: ProblemSpec):
    name = problem.reaction.name
    if name == "zero":
        return quadrature_oracle(problem.initial, problem.diffusion)
    if name == "linear":
        lam = float(problem.reaction.evaluate(1.0))
        return linear_reaction_oracle(problem.initial, lam, problem.diffusion)
    raise ValueError(
        f"no oracle available for reaction {name!r}; use reference='finest-mesh'"
    )


def refine_study(
    problem: ProblemSpec,
    dx_list,
    alpha: float,
    window: EvalWindow,
    reference: str = "oracle",
    workers: int = 1,
) -> StudyResult:
    """Solve on each mesh and report window errors and observed orders.

    reference='oracle' compares against the exact/quadrature solution
    (zero or linear reactions only); reference='finest-mesh' compares each
    coarser mesh to the finest by nearest grid point.  Meshes are
    independent, so workers > 1 solves them in parallel; results are
    collected in dx_list order either way.
    """
    dx_list = list(dx_list)
    if any(b >= a for a, b in zip(dx_list, dx_list[1:])):
        raise ValueError(f"dx_list must be strictly decreasing, got {dx_list}")
    if alpha > 0.5:
        raise ValueError(f"refinement studies require alpha <= 1/2, got {alpha}")
    if reference in ("finest", "finest-mesh"):
        reference = "finest-mesh"
    elif reference != "oracle":
        raise ValueError(f"unknown reference {reference!r}")

    # sample columns shared by all meshes: multiples of the coarsest dx
    dx0 = dx_list[0]
    j_hi = int(math.floor(window.x_half_width / dx0 + 1e-9))
    xs = np.arange(-j_hi, j_hi + 1)[:: window.stride] * dx0

    meshes = []
    specs = []
    for dx in dx_list:
        dt = alpha * dx * dx / problem.diffusion
        big_n = required_depth(window.x_half_width, window.t_final, dx, dt)
        specs.append(make_grid(dx, dt, big_n, problem.diffusion))
        meshes.append((dx, dt))
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            fields = list(pool.map(lambda s: solve(s, problem), specs))
    else:
        fields = [solve(s, problem) for s in specs]

    errors = []
    if reference == "oracle":
        ref = _make_reference(problem)
        for field in fields:
            vals, t_actual = _top_row_values(field, window.t_final, xs)
            exact = np.array([ref(x, t_actual) for x in xs])
            errors.append(float(np.max(np.abs(vals - exact))))
    else:
        ref_vals, _ = _top_row_values(fields[-1], window.t_final, xs)
        for field in fields[:-1]:
            vals, _ = _top_row_values(field, window.t_final, xs)
            errors.append(float(np.max(np.abs(vals - ref_vals))))
        errors.append(0.0)

    compare = errors[:-1] if reference == "finest-mesh" else errors
    orders = []
    for ek, ek1 in zip(compare, compare[1:]):
        orders.append(math.log2(ek / ek1) if ek > 0 and ek1 > 0 else math.inf)
    return StudyResult(
        meshes=tuple(meshes),
        errors=tuple(errors),
        observed_orders=tuple(orders),
        window=window,
    )


@dataclass(frozen=True)
class InstabilityResult:
    alpha: float
    amplitudes: tuple  # max |U| per level while values stayed finite
    truncated: bool

    @property
    def ratios(self) -> tuple:
        return tuple(
            b / a for a, b in zip(self.amplitudes, self.amplitudes[1:]) if a > 0
        )


def instability_demo(
    alpha: float, steps: int, epsilon: float = 1e-6
) -> InstabilityResult:
    """Feed the alternating mode +-epsilon to the stencil and watch it grow.

    Neighbors of an alternating cell equal its negation, so one step maps
    the mode to (1 - 4*alpha) times itself: growth ratio |1 - 4*alpha| per
    step, which exceeds 1 exactly when alpha > 1/2.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    spec = make_grid(1.0, alpha, steps, diffusion=1.0, allow_unstable=True)
    zero = make_builtin("zero")
    signs = np.where(np.arange(-steps, steps + 1) % 2 == 0, 1.0, -1.0)
    row = epsilon * signs
    amps = [float(np.max(np.abs(row)))]
    truncated = False
    for n in range(steps):
        row = step_level(row, spec, zero, t=n * spec.dt)
        peak = float(np.max(np.abs(row))) if row.size else 0.0
        if not np.isfinite(peak) or peak > 1e300:
            truncated = True
            break
        amps.append(peak)
        if row.size < 3:
            break
    return InstabilityResult(
        alpha=spec.alpha, amplitudes=tuple(amps), truncated=truncated
    )


def write_amplitudes_csv(result: InstabilityResult, path) -> None:
    """CSV `n,max_abs_u` of per-level peak amplitudes."""
    with open(path, "w", newline="") as fh:
        fh.write("n,max_abs_u\n")
        for n, a in enumerate(result.amplitudes):
            fh.write(f"{n},{a!r}\n")
