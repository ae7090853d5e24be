"""Smooth compactly supported test functions with exact derivatives.

The bump is a separable product of the classic mollifier profile
psi(s) = exp(-1/(1 - s^2)) on |s| < 1, zero outside.  psi and all its
derivatives vanish at |s| = 1, so the product is C-infinity on the whole
plane and its time derivative and second space derivative have closed
forms; grid pairings can therefore be checked against exact derivatives
with no extra discretization error.  Linear combinations of bumps are
test functions too: evaluate a list and add, as the pairings are linear.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridSpec

# inside this distance (in scaled units) of the support edge the profile
# underflows anyway; returning exact zeros avoids overflow in 1/(1-s^2)
_EDGE = 1e-12


def _psi_chain(s):
    """psi, psi', psi'' of the mollifier profile, vectorized, zero outside."""
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 1.0 - _EDGE
    u = np.where(inside, 1.0 - s * s, 1.0)
    p = np.where(inside, np.exp(-1.0 / u), 0.0)
    d1 = p * (-2.0 * s / (u * u))
    d2 = p * (4.0 * s * s / u**4 - 2.0 / (u * u) - 8.0 * s * s / u**3)
    return p, np.where(inside, d1, 0.0), np.where(inside, d2, 0.0)


@dataclass(frozen=True)
class BumpTestFunction:
    """amplitude * psi((x - x_center)/rx) * psi((t - t_center)/rt)."""

    x_center: float
    t_center: float
    x_radius: float
    t_radius: float
    amplitude: float = 1.0

    def __post_init__(self):
        if not (self.x_radius > 0 and self.t_radius > 0):
            raise ValueError(
                f"radii must be positive, got rx={self.x_radius}, "
                f"rt={self.t_radius}"
            )

    @property
    def support_box(self) -> tuple[float, float, float, float]:
        """(x_lo, x_hi, t_lo, t_hi) of the closed support."""
        return (
            self.x_center - self.x_radius,
            self.x_center + self.x_radius,
            self.t_center - self.t_radius,
            self.t_center + self.t_radius,
        )

    def value(self, x, t):
        sx = (np.asarray(x, dtype=float) - self.x_center) / self.x_radius
        st = (np.asarray(t, dtype=float) - self.t_center) / self.t_radius
        px, _, _ = _psi_chain(sx)
        pt, _, _ = _psi_chain(st)
        out = self.amplitude * px * pt
        return float(out) if out.ndim == 0 else out

    def evaluate(self, x, t):
        """Return (phi, d phi/dt, d^2 phi/dx^2), exact, zero off support."""
        sx = (np.asarray(x, dtype=float) - self.x_center) / self.x_radius
        st = (np.asarray(t, dtype=float) - self.t_center) / self.t_radius
        px, _, pxdd = _psi_chain(sx)
        pt, ptd, _ = _psi_chain(st)
        val = self.amplitude * px * pt
        d_t = self.amplitude * px * ptd / self.t_radius
        d_xx = self.amplitude * pxdd * pt / (self.x_radius * self.x_radius)
        if val.ndim == 0:
            return float(val), float(d_t), float(d_xx)
        return val, d_t, d_xx


def fd_consistency_report(
    phi: BumpTestFunction,
    spec: GridSpec,
    region: tuple[float, float, float, float],
) -> tuple[float, float]:
    """Max |phi_t - D_t+ phi| and |phi_xx - D_x^2 phi| over region grid points.

    region is (x_lo, x_hi, t_lo, t_hi) and must lie within the support box
    extended by one mesh cell; these maxima are the uniform Taylor-error
    bounds that control the gap between exact-derivative and
    finite-difference pairings.
    """
    x_lo, x_hi, t_lo, t_hi = region
    bx_lo, bx_hi, bt_lo, bt_hi = phi.support_box
    if (
        x_lo < bx_lo - spec.dx - 1e-12
        or x_hi > bx_hi + spec.dx + 1e-12
        or t_lo < bt_lo - spec.dt - 1e-12
        or t_hi > bt_hi + spec.dt + 1e-12
    ):
        raise ValueError(
            "region exceeds the support box extended by one mesh cell"
        )
    m_lo = int(np.ceil(x_lo / spec.dx - 1e-9))
    m_hi = int(np.floor(x_hi / spec.dx + 1e-9))
    n_lo = int(np.ceil(t_lo / spec.dt - 1e-9))
    n_hi = int(np.floor(t_hi / spec.dt + 1e-9))
    if m_lo > m_hi or n_lo > n_hi:
        return 0.0, 0.0

    xs = np.arange(m_lo, m_hi + 1) * spec.dx
    eps_t = 0.0
    eps_xx = 0.0
    for n in range(n_lo, n_hi + 1):
        t = n * spec.dt
        val, d_t, d_xx = phi.evaluate(xs, t)
        up = phi.value(xs, t + spec.dt)
        left = phi.value(xs - spec.dx, t)
        right = phi.value(xs + spec.dx, t)
        fd_t = (up - val) / spec.dt
        fd_xx = (right - 2.0 * val + left) / (spec.dx * spec.dx)
        eps_t = max(eps_t, float(np.max(np.abs(d_t - fd_t))))
        eps_xx = max(eps_xx, float(np.max(np.abs(d_xx - fd_xx))))
    return eps_t, eps_xx
