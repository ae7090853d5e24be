"""Registry of reaction terms with declared Lipschitz data.

Every builtin is globally Lipschitz: |f(u) - f(v)| <= k1*|u - v|, which
gives the linear growth bound |f(u)| <= k0 + k1*|u| with k0 = |f(0)|.
The logistic term u - u^2 is not globally Lipschitz, so it is offered in
a clamped form that agrees with u - u^2 on [-R, R] and is continued
constantly outside; on the invariant range [0, 1] of admissible data the
clamp never engages.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class ReactionTerm:
    """A nonlinearity f with its Lipschitz constant k1 and k0 = |f(0)|."""

    name: str
    evaluate: Callable = field(repr=False)
    k0: float = 0.0
    k1: float = 0.0

    def __post_init__(self):
        if self.k0 < 0 or self.k1 < 0:
            raise ValueError(f"k0, k1 must be >= 0, got {self.k0}, {self.k1}")


def _clamped_logistic(u, r):
    v = np.clip(u, -r, r)
    return v - v * v


def make_builtin(name: str, param: float | None = None) -> ReactionTerm:
    """Build a builtin reaction term by name.

    Supported: zero; linear (param = slope); sine; clamped_logistic
    (param = clamp radius R > 0).  k0 is always computed as |f(0)|.
    """
    if name == "zero":
        if param is not None:
            raise ValueError("zero takes no parameter")
        evaluate = lambda u: u * 0.0
    elif name == "linear":
        if param is None:
            raise ValueError("linear needs a slope parameter")
        lam = float(param)
        evaluate = lambda u: lam * u
    elif name == "sine":
        if param is not None:
            raise ValueError("sine takes no parameter")
        evaluate = np.sin
    elif name == "clamped_logistic":
        if param is None or param <= 0:
            raise ValueError("clamped_logistic needs a clamp radius R > 0")
        r = float(param)
        evaluate = lambda u: _clamped_logistic(u, r)
    else:
        raise ValueError(f"unknown reaction {name!r}")

    if name == "zero":
        k1 = 0.0
    elif name == "linear":
        k1 = abs(lam)
    elif name == "sine":
        k1 = 1.0  # sup|cos|
    else:
        k1 = 1.0 + 2.0 * r  # max of |1 - 2u| on [-R, R], at u = -R

    k0 = abs(float(evaluate(0.0)))
    return ReactionTerm(name=name, evaluate=evaluate, k0=k0, k1=k1)


def empirical_lipschitz(
    term: ReactionTerm, lo: float, hi: float, samples: int
) -> float:
    """Max difference quotient of f over adjacent uniform sample pairs."""
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")
    xs = np.linspace(lo, hi, samples)
    fs = np.asarray(term.evaluate(xs), dtype=float)
    return float(np.max(np.abs(np.diff(fs) / np.diff(xs))))
