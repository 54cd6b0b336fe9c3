"""Closed-form flows of the commuting Hamiltonian fields.

The flow of ``tr(x_i^j)`` is ``Ad(exp(t * j * x_i^(j-1))) x`` with the
exponent embedded in the top-left corner.  Its generator is taken to be
the time derivative of that flow, ``[j * embed(x_i^(j-1)), x]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrices import (commutator, cutoff, embed, identity, is_exact,
                       mat_exp, matpow)
from .scalars import DEFAULT_TOL, GaussRat, ToleranceContext, exact

__all__ = ["FlowStep", "vector_field", "flow", "flow_word"]


@dataclass(frozen=True)
class FlowStep:
    """Flow of ``tr(x_i^j)`` for time ``t``."""

    i: int
    j: int
    t: complex = 0.0

    def __post_init__(self):
        if not (1 <= self.j <= self.i):
            raise IndexError(f"need 1 <= j <= i, got i={self.i}, j={self.j}")

    @classmethod
    def parse(cls, text: str) -> "FlowStep":
        """Parse ``"i,j,re[,im]"``; ``re``/``im`` may be ``p/q`` rationals."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) not in (3, 4):
            raise ValueError(f"step must be i,j,re[,im], got {text!r}")
        i, j = int(parts[0]), int(parts[1])
        if any("/" in p for p in parts[2:]):
            t = GaussRat(parts[2], parts[3] if len(parts) == 4 else 0)
        else:
            t = complex(float(parts[2]), float(parts[3]) if len(parts) == 4 else 0.0)
        return cls(i, j, t)


def _check_level(x: np.ndarray, i: int, j: int):
    n = x.shape[0]
    if not (1 <= j <= i <= n - 1):
        raise IndexError(f"flows need 1 <= j <= i <= n-1, got i={i}, j={j}, n={n}")


def _generator(x: np.ndarray, i: int, j: int) -> np.ndarray:
    return embed(matpow(cutoff(x, i), j - 1), x.shape[0]) * j


def vector_field(x: np.ndarray, i: int, j: int) -> np.ndarray:
    """``[j * embed(x_i^(j-1)), x]``, the derivative at ``t = 0`` of :func:`flow`."""
    _check_level(x, i, j)
    return commutator(_generator(x, i, j), x)


def flow(x: np.ndarray, step: FlowStep, ctx: ToleranceContext = DEFAULT_TOL
         ) -> np.ndarray:
    """``Ad(exp(t * j * x_i^(j-1))) x``.

    Exact mode only accepts nilpotent generators (``j >= 2`` on a
    nilpotent cutoff); otherwise :class:`~gzorbits.errors.ModeError`.
    """
    _check_level(x, step.i, step.j)
    n = x.shape[0]
    ex = is_exact(x)
    i = step.i
    gen = matpow(cutoff(x, i), step.j - 1) * step.j
    t = exact(step.t) if ex else complex(step.t)
    if not ex:
        gen = gen.astype(complex)
    fwd = identity(n, ex)
    bwd = identity(n, ex)
    fwd[:i, :i] = mat_exp(gen * t, ctx)
    bwd[:i, :i] = mat_exp(gen * (-t), ctx)
    return fwd @ x @ bwd


def flow_word(x: np.ndarray, steps, ctx: ToleranceContext = DEFAULT_TOL
              ) -> np.ndarray:
    """Apply the steps left to right; the result does not depend on their order."""
    for step in steps:
        x = flow(x, step, ctx)
    return x
