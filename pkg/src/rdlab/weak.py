"""Grid-sum pairings and weak-solution residual checks.

A grid function U induces a distribution through the pairing
sum U*phi*dx*dt.  The weak residual compares the interior pairing of U
against the bump's derivatives with the initial-data pairing; the
summation-by-parts identity moves the difference operators off phi and
onto U exactly, so its gap measures nothing but rounding.

Index conventions, derived once on a toy triangle and frozen here:

  T  = sum over the whole triangle of -U*(D_t+ phi + D*D_x^2 phi)*dx*dt
  B  = sum_m U(m,0)*phi(m,0)*dx
     + sum over {|m|+n <= N-1} of
         [phi(m, n+1)*D_t+ U(m,n) - D*phi(m,n)*D_x^2 U(m,n)]*dx*dt

T == B holds for ANY grid function (discrete Abel summation) provided phi
vanishes on the triangle's flanks and top with a one-cell margin, i.e. on
all (m, n) with |m| + n >= N; phi may be nonzero at t = 0.  Note the time
weight is phi at level n+1 -- the unshifted weight would leave an O(dt)
defect, not an exact identity.

All sums run over the support-intersecting index ranges in a fixed
deterministic order (per-level pairwise sums, then a pairwise sum of the
level totals), so results are reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scheme import Field, ProblemSpec, sample_initial
from .testfn import BumpTestFunction


class CoverageError(ValueError):
    """The bump's support sticks out of the region the field resolves."""


class MarginError(ValueError):
    """The bump violates the one-cell margin needed for exact sbp."""


@dataclass(frozen=True)
class ResidualReport:
    """Interior pairing vs initial-data pairing for one bump and mesh."""

    mode: str  # "exact-derivatives" | "finite-differences"
    dx: float
    dt: float
    lhs: float
    rhs: float
    residual: float

    @property
    def mesh(self) -> tuple[float, float]:
        return (self.dx, self.dt)

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode,
            "dx": self.dx,
            "dt": self.dt,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
        }


@dataclass(frozen=True)
class SbpTerms:
    """Decomposition of the summation-by-parts identity."""

    t_sum: float  # T: pairing of U against -(D_t+ + D*D_x^2) phi
    initial_term: float  # bottom-row boundary term
    interior_term: float  # pairing of phi against the scheme defect
    gap: float  # |T - (initial + interior)|, pure rounding


def _check_coverage(field: Field, phi: BumpTestFunction, clip_t: bool) -> None:
    x_lo, x_hi, t_lo, t_hi = phi.support_box
    if clip_t:
        t_lo = max(t_lo, 0.0)
        t_hi = max(t_hi, 0.0)
    for corner in [(x_lo, t_lo), (x_hi, t_lo), (x_lo, t_hi), (x_hi, t_hi)]:
        if not field.covers(*corner):
            raise CoverageError(
                f"support corner (x={corner[0]}, t={corner[1]}) is outside "
                f"the field's coverage triangle"
            )


def _levels_in(field: Field, t_lo: float, t_hi: float, pad: int):
    dt = field.spec.dt
    n_lo = max(0, int(math.floor(t_lo / dt - 1e-9)) - pad)
    n_hi = min(field.levels - 1, int(math.ceil(t_hi / dt + 1e-9)) + pad)
    return range(n_lo, n_hi + 1)


def _cols_in(field: Field, n: int, x_lo: float, x_hi: float, pad: int,
             shrink: int = 0):
    dx = field.spec.dx
    w = field.half_width(n) - shrink
    m_lo = max(-w, int(math.floor(x_lo / dx - 1e-9)) - pad)
    m_hi = min(w, int(math.ceil(x_hi / dx + 1e-9)) + pad)
    return m_lo, m_hi


def _pairwise_total(level_sums: list[float]) -> float:
    return float(np.sum(np.asarray(level_sums, dtype=float)))


def pair(field: Field, phi: BumpTestFunction) -> float:
    """Distribution pairing sum U*phi*dx*dt over the grid."""
    _check_coverage(field, phi, clip_t=False)
    spec = field.spec
    x_lo, x_hi, t_lo, t_hi = phi.support_box
    level_sums = []
    for n in _levels_in(field, t_lo, t_hi, pad=0):
        m_lo, m_hi = _cols_in(field, n, x_lo, x_hi, pad=0)
        if m_lo > m_hi:
            continue
        off = field.half_width(n)
        vals = field.rows[n][m_lo + off : m_hi + off + 1]
        xs = np.arange(m_lo, m_hi + 1) * spec.dx
        level_sums.append(float(np.sum(vals * phi.value(xs, field.t(n)))))
    return _pairwise_total(level_sums) * spec.dx * spec.dt


def weak_residual(
    field: Field,
    problem: ProblemSpec,
    phi: BumpTestFunction,
    mode: str = "exact-derivatives",
) -> ResidualReport:
    """Interior-minus-initial pairing for the reaction-diffusion weak form.

    lhs = sum over the grid of {U*(-D*phi_xx - phi_t) - f(U)*phi}*dx*dt,
    with phi_xx, phi_t either exact or replaced by D_x^2 phi, D_t+ phi;
    rhs = sum_m u0(m*dx)*phi(m*dx, 0)*dx.  The residual lhs - rhs shrinks
    under mesh refinement when U approximates a weak solution.
    """
    if mode not in ("exact-derivatives", "finite-differences"):
        raise ValueError(f"unknown mode {mode!r}")
    _check_coverage(field, phi, clip_t=True)
    spec = field.spec
    dee = spec.diffusion
    x_lo, x_hi, t_lo, t_hi = phi.support_box

    level_sums = []
    for n in _levels_in(field, max(t_lo, 0.0), t_hi, pad=0):
        m_lo, m_hi = _cols_in(field, n, x_lo, x_hi, pad=0)
        if m_lo > m_hi:
            continue
        off = field.half_width(n)
        u = field.rows[n][m_lo + off : m_hi + off + 1]
        xs = np.arange(m_lo, m_hi + 1) * spec.dx
        t = field.t(n)
        if mode == "exact-derivatives":
            val, d_t, d_xx = phi.evaluate(xs, t)
        else:
            val = phi.value(xs, t)
            d_t = (phi.value(xs, t + spec.dt) - val) / spec.dt
            d_xx = (
                phi.value(xs + spec.dx, t)
                - 2.0 * val
                + phi.value(xs - spec.dx, t)
            ) / (spec.dx * spec.dx)
        term = u * (-dee * d_xx - d_t) - problem.reaction.evaluate(u) * val
        level_sums.append(float(np.sum(term)))
    lhs = _pairwise_total(level_sums) * spec.dx * spec.dt

    m_lo, m_hi = _cols_in(field, 0, x_lo, x_hi, pad=0)
    if m_lo > m_hi:
        rhs = 0.0
    else:
        xs = np.arange(m_lo, m_hi + 1) * spec.dx
        u0_vals = sample_initial(problem, xs)
        rhs = float(np.sum(u0_vals * phi.value(xs, 0.0))) * spec.dx

    return ResidualReport(
        mode=mode,
        dx=spec.dx,
        dt=spec.dt,
        lhs=lhs,
        rhs=rhs,
        residual=lhs - rhs,
    )


def _check_margin(field: Field, phi: BumpTestFunction) -> None:
    spec = field.spec
    x_lo, x_hi, t_lo, t_hi = phi.support_box
    t_hi = max(t_hi, 0.0)
    reach = max(abs(x_lo), abs(x_hi)) / spec.dx + t_hi / spec.dt
    if reach > spec.big_n - 1 + 1e-9:
        raise MarginError(
            f"support reaches |m|+n = {reach:.3f}; the sbp identity needs "
            f"phi to vanish for |m|+n >= {spec.big_n} with a one-cell "
            f"margin (|m|+n <= {spec.big_n - 1})"
        )
    if field.truncated and t_hi / spec.dt > field.levels - 2 + 1e-9:
        raise MarginError(
            "support reaches the truncation level of an unstable run"
        )


def sbp_terms(field: Field, phi: BumpTestFunction) -> SbpTerms:
    """Evaluate both sides of the summation-by-parts identity."""
    _check_margin(field, phi)
    spec = field.spec
    dee = spec.diffusion
    x_lo, x_hi, t_lo, t_hi = phi.support_box

    t_sums = []
    for n in _levels_in(field, max(t_lo, 0.0), t_hi, pad=1):
        m_lo, m_hi = _cols_in(field, n, x_lo, x_hi, pad=1)
        if m_lo > m_hi:
            continue
        off = field.half_width(n)
        u = field.rows[n][m_lo + off : m_hi + off + 1]
        xs = np.arange(m_lo, m_hi + 1) * spec.dx
        t = field.t(n)
        val = phi.value(xs, t)
        d_t = (phi.value(xs, t + spec.dt) - val) / spec.dt
        d_xx = (
            phi.value(xs + spec.dx, t)
            - 2.0 * val
            + phi.value(xs - spec.dx, t)
        ) / (spec.dx * spec.dx)
        t_sums.append(float(np.sum(-u * (d_t + dee * d_xx))))
    t_sum = _pairwise_total(t_sums) * spec.dx * spec.dt

    m_lo, m_hi = _cols_in(field, 0, x_lo, x_hi, pad=1)
    if m_lo > m_hi:
        initial = 0.0
    else:
        off = field.half_width(0)
        u0_row = field.rows[0][m_lo + off : m_hi + off + 1]
        xs = np.arange(m_lo, m_hi + 1) * spec.dx
        initial = float(np.sum(u0_row * phi.value(xs, 0.0))) * spec.dx

    interior_sums = []
    top = min(field.levels - 2, spec.big_n - 1)
    for n in _levels_in(field, max(t_lo, 0.0), t_hi, pad=1):
        if n > top:
            continue
        # quotient points: both (m, n+1) and (m+-1, n) must be in-grid
        m_lo, m_hi = _cols_in(field, n, x_lo, x_hi, pad=1, shrink=1)
        if m_lo > m_hi:
            continue
        off = field.half_width(n)
        row = field.rows[n]
        mid = row[m_lo + off : m_hi + off + 1]
        up = field.rows[n + 1][m_lo + off - 1 : m_hi + off]
        d_t_u = (up - mid) / spec.dt
        d_xx_u = (
            row[m_lo + off + 1 : m_hi + off + 2]
            - 2.0 * mid
            + row[m_lo + off - 1 : m_hi + off]
        ) / (spec.dx * spec.dx)
        xs = np.arange(m_lo, m_hi + 1) * spec.dx
        t = field.t(n)
        phi_up = phi.value(xs, t + spec.dt)
        phi_mid = phi.value(xs, t)
        interior_sums.append(
            float(np.sum(phi_up * d_t_u - dee * phi_mid * d_xx_u))
        )
    interior = _pairwise_total(interior_sums) * spec.dx * spec.dt

    gap = abs(t_sum - (initial + interior))
    return SbpTerms(
        t_sum=t_sum, initial_term=initial, interior_term=interior, gap=gap
    )


def sbp_identity_gap(field: Field, phi: BumpTestFunction) -> float:
    """|T - B| for the summation-by-parts identity; rounding-level always."""
    return sbp_terms(field, phi).gap


def riemann_sum(g, spec, x_extent: float, t_lo: float, t_hi: float) -> float:
    """sum g(m*dx, n*dt)*dx*dt over grid indices in a rectangle.

    Convergence helper for checking that grid sums of continuous
    compactly supported functions approach the integral under refinement.
    """
    m_hi = int(math.ceil(x_extent / spec.dx + 1e-9))
    n_lo = max(0, int(math.floor(t_lo / spec.dt - 1e-9)))
    n_hi = int(math.ceil(t_hi / spec.dt + 1e-9))
    xs = np.arange(-m_hi, m_hi + 1) * spec.dx
    level_sums = [
        float(np.sum(g(xs, n * spec.dt))) for n in range(n_lo, n_hi + 1)
    ]
    return _pairwise_total(level_sums) * spec.dx * spec.dt
