"""Upper Hessenberg matrices with unit subdiagonal: the section of ``phi``.

Every fibre of ``phi`` contains exactly one such matrix, which
:func:`hessenberg_from_spec` builds one column at a time.
"""
from __future__ import annotations

import numpy as np

from .errors import SingularSystemError
from .matrices import charpoly, is_exact, solve, zeros
from .moment import GZSpec
from .scalars import GaussRat

__all__ = ["is_hessenberg", "hessenberg_from_spec"]


def is_hessenberg(x: np.ndarray) -> bool:
    n = x.shape[0]
    for r in range(1, n):
        if x[r, r - 1] != 1:
            return False
        for c in range(r - 1):
            if x[r, c] != 0:
                return False
    return True


def hessenberg_from_spec(c: GZSpec) -> np.ndarray:
    """The unique unit-subdiagonal upper Hessenberg matrix in the fibre over ``c``.

    With the leading ``i x i`` block fixed, the characteristic polynomial
    of the ``(i+1) x (i+1)`` block is affine in its last column, so the
    column follows from one linear solve whose matrix is obtained by
    probing that column with zero and with unit vectors.
    """
    ex = c.exact
    one = GaussRat(1) if ex else 1.0
    n = c.n
    x = zeros(n, ex)
    for i in range(n):
        size = i + 1
        block = x[:size, :size].copy()
        if i > 0:
            block[i, i - 1] = one

        def coeffs(column):
            trial = block.copy()
            trial[:, i] = column
            return np.array(charpoly(trial).coeffs, dtype=object if ex else complex)

        base = coeffs(zeros((size,), ex))
        probes = []
        for k in range(size):
            unit = zeros((size,), ex)
            unit[k] = one
            probes.append(coeffs(unit) - base)
        system = np.stack(probes, axis=1)
        target = np.array(c.level(size).coeffs, dtype=object if ex else complex)
        try:
            column = solve(system, target - base)
        except SingularSystemError:
            raise SingularSystemError(
                f"linearized system at level {size} is singular") from None
        x[:size, :size] = block
        x[:size, i] = column
    return x
