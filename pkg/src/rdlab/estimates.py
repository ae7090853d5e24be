"""A-priori estimate verification: sup bound, space Lipschitz, time Holder.

Each report compares a measured per-level quantity against the bound the
scheme's stencil structure guarantees, with a relative 1e-9 slack for
rounding in the exponentials.  The Holder constant is assembled from the
parabola-barrier argument: with A0 the sup bound at the horizon,
A = K0 + K1*A0 and Lbar = exp(K1*tbar)*L, the constant is
C = (A+1)*sqrt(tbar) + 2*Lbar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scheme import Field, ProblemSpec, forward_diff_x

PASS_TOLERANCE = 1e-9

# caps for the decimated time-Holder pair sample: <= 1e6 pairs total
_MAX_LEVEL_SAMPLES = 64
_MAX_COLUMN_SAMPLES = 256


@dataclass(frozen=True)
class EstimateReport:
    """Measured vs predicted bound per level, with margins and pass flag."""

    estimate_name: str
    per_level: tuple  # (t, measured, predicted, margin) quadruples
    worst_margin: float
    passed: bool
    tolerance: float = PASS_TOLERANCE

    def to_json_dict(self) -> dict:
        return {
            "estimate_name": self.estimate_name,
            "tolerance": self.tolerance,
            "worst_margin": self.worst_margin,
            "pass": self.passed,
            "per_level": [
                {"t": t, "measured": m, "bound": b}
                for t, m, b, _ in self.per_level
            ],
        }


def _build_report(name: str, per_level: list) -> EstimateReport:
    per_level = [
        (t, meas, pred, pred - meas) for t, meas, pred in per_level
    ]
    # worst level by margin relative to the bound's scale
    scaled = [m / (1.0 + abs(pred)) for _, _, pred, m in per_level]
    worst = int(np.argmin(scaled))
    return EstimateReport(
        estimate_name=name,
        per_level=tuple(per_level),
        worst_margin=per_level[worst][3],
        passed=scaled[worst] >= -PASS_TOLERANCE,
    )


@dataclass(frozen=True)
class HolderConstants:
    """Ingredients of the sqrt-in-time modulus bound."""

    tbar: float
    a0: float  # sup bound at the horizon
    a_bound: float  # A = K0 + K1*A0, bounds |f(U)| up to tbar
    lbar: float  # space Lipschitz constant at the horizon
    c_holder: float  # (A+1)*sqrt(tbar) + 2*Lbar


def gronwall_envelope(w0: float, m: float, t: float) -> float:
    """exp(m*t) * w0: per-level max growth under the stable stencil."""
    if w0 < 0 or m < 0 or t < 0:
        raise ValueError(f"need w0, m, t >= 0, got {w0}, {m}, {t}")
    return math.exp(m * t) * w0


def sup_envelope(m_bound: float, k0: float, k1: float, t: float) -> float:
    """exp(K1*t)*M + (K0/K1)*(exp(K1*t) - 1), with the K1 -> 0 limit."""
    if k1 == 0.0 or k1 * t == 0.0:
        return m_bound + k0 * t
    # expm1(k1*t)/k1 stays ~t for tiny k1 where the naive k0/k1 overflows
    return math.exp(k1 * t) * m_bound + k0 * (math.expm1(k1 * t) / k1)


def sup_bound_report(field: Field, problem: ProblemSpec) -> EstimateReport:
    """Per-level max |U| against the linear-growth envelope."""
    k0, k1 = problem.reaction.k0, problem.reaction.k1
    per_level = []
    for n, row in enumerate(field.rows):
        t = field.t(n)
        measured = float(np.max(np.abs(row)))
        per_level.append((t, measured, sup_envelope(problem.init_bound, k0, k1, t)))
    return _build_report("sup_bound", per_level)


def space_lipschitz_report(field: Field, problem: ProblemSpec) -> EstimateReport:
    """Per-level max |D_x+ U| against L*exp(K1*t)."""
    k1 = problem.reaction.k1
    diffs = forward_diff_x(field)
    per_level = []
    for n, v in enumerate(diffs):
        t = field.t(n)
        measured = float(np.max(np.abs(v))) if v.size else 0.0
        per_level.append(
            (t, measured, problem.init_lipschitz * math.exp(k1 * t))
        )
    return _build_report("space_lipschitz", per_level)


def holder_constant(
    m_bound: float, k0: float, k1: float, lip: float, tbar: float
) -> HolderConstants:
    """Assemble the time-Holder constant from the problem's declared data."""
    if min(m_bound, k0, k1, lip) < 0:
        raise ValueError("M, K0, K1, L must be >= 0")
    if tbar <= 0:
        raise ValueError(f"tbar must be > 0, got {tbar}")
    a0 = sup_envelope(m_bound, k0, k1, tbar)
    a_bound = k0 + k1 * a0
    lbar = math.exp(k1 * tbar) * lip
    c_holder = (a_bound + 1.0) * math.sqrt(tbar) + 2.0 * lbar
    return HolderConstants(
        tbar=tbar, a0=a0, a_bound=a_bound, lbar=lbar, c_holder=c_holder
    )


def time_holder_report(
    field: Field, problem: ProblemSpec, tbar: float
) -> EstimateReport:
    """Max |U(x0,t1) - U(x0,t0)| / sqrt(t1-t0) over a decimated pair sample.

    Pairs are drawn from every level-stride'th level and column-stride'th
    column (capped near 1e6 pairs); the sampled max lower-bounds the true
    max, and the predicted constant must dominate both.
    """
    spec = field.spec
    n_top = int(math.floor(tbar / spec.dt + 1e-9))
    if n_top > field.levels - 1:
        raise ValueError(
            f"tbar={tbar} is beyond the field's top time "
            f"{field.t(field.levels - 1)}"
        )
    c = holder_constant(
        problem.init_bound,
        problem.reaction.k0,
        problem.reaction.k1,
        problem.init_lipschitz,
        tbar,
    ).c_holder

    lev_stride = max(1, -(-(n_top + 1) // _MAX_LEVEL_SAMPLES))
    levels = list(range(0, n_top + 1, lev_stride))
    half = spec.big_n - n_top  # columns present at every sampled level
    cols = np.arange(-half, half + 1)
    col_stride = max(1, -(-len(cols) // _MAX_COLUMN_SAMPLES))
    cols = cols[::col_stride]

    block = np.empty((len(levels), len(cols)))
    for i, n in enumerate(levels):
        off = field.half_width(n)
        block[i] = field.rows[n][cols + off]

    per_level = [(0.0, 0.0, c)]
    for j in range(1, len(levels)):
        t1 = field.t(levels[j])
        best = 0.0
        for i in range(j):
            dt_pair = t1 - field.t(levels[i])
            quot = np.max(np.abs(block[j] - block[i])) / math.sqrt(dt_pair)
            best = max(best, float(quot))
        per_level.append((t1, best, c))
    return _build_report("time_holder", per_level)
