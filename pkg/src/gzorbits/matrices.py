"""Square complex matrices in exact or float mode.

Matrices are plain numpy arrays: ``dtype=object`` holding
:class:`~gzorbits.scalars.GaussRat` entries in exact mode, ``complex128``
in float mode.  Rank decisions use exact pivoting in the first case and
singular values against ``eps_rank`` in the second.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (ModeError, NotRegularError, SchemaError,
                     SingularSystemError, SpectrumMismatchError)
from .scalars import (DEFAULT_TOL, GaussRat, MonicPoly, Spectrum,
                      ToleranceContext, exact, scalar_from_json,
                      scalar_to_json)

__all__ = [
    "is_exact", "to_exact", "to_float", "asmat", "identity", "zeros",
    "scale", "cutoff", "embed", "embed_group", "matpow", "commutator", "charpoly", "rank",
    "nullspace", "solve", "inverse", "centralizer_basis", "is_regular",
    "JordanFrame", "jordan_matrix", "jordanize_regular", "mat_exp",
    "matrix_to_json", "matrix_from_json",
]

_ZERO = GaussRat(0)
_ONE = GaussRat(1)


def is_exact(a: np.ndarray) -> bool:
    return a.dtype == object


def to_exact(a) -> np.ndarray:
    a = np.asarray(a, dtype=object)
    return np.vectorize(exact, otypes=[object])(a) if a.size else a


def to_float(a) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype == object:
        return np.vectorize(complex, otypes=[complex])(a) if a.size else \
            a.astype(complex)
    return a.astype(complex)


def asmat(entries, exact_mode: bool | None = None) -> np.ndarray:
    """Build a matrix; ``exact_mode=None`` picks exact for integer/rational input."""
    arr = np.asarray(entries, dtype=object)
    if exact_mode is None:
        exact_mode = all(isinstance(v, (int, np.integer, GaussRat))
                         or type(v).__name__ == "Fraction" for v in arr.flat)
    return to_exact(arr) if exact_mode else to_float(arr)


def zeros(shape, exact_mode: bool) -> np.ndarray:
    if isinstance(shape, int):
        shape = (shape, shape)
    if exact_mode:
        out = np.empty(shape, dtype=object)
        out.fill(_ZERO)
        return out
    return np.zeros(shape, dtype=complex)


def identity(n: int, exact_mode: bool) -> np.ndarray:
    out = zeros(n, exact_mode)
    for k in range(n):
        out[k, k] = _ONE if exact_mode else 1.0
    return out


def scale(a: np.ndarray) -> float:
    """Largest absolute entry (0 for an empty or zero matrix)."""
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(to_float(a))))


def _check_square(x: np.ndarray):
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise SchemaError(f"expected a square matrix, got shape {x.shape}")


def cutoff(x: np.ndarray, i: int) -> np.ndarray:
    """Top-left ``i x i`` block."""
    _check_square(x)
    if not 1 <= i <= x.shape[0]:
        raise IndexError(f"cutoff index {i} out of range 1..{x.shape[0]}")
    return x[:i, :i].copy()


def embed(y: np.ndarray, n: int) -> np.ndarray:
    """Put ``y`` in the top-left corner of an ``n x n`` zero matrix."""
    _check_square(y)
    i = y.shape[0]
    if i > n:
        raise IndexError(f"cannot embed a {i}x{i} matrix into size {n}")
    out = zeros(n, is_exact(y))
    out[:i, :i] = y
    return out


def embed_group(g: np.ndarray, n: int) -> np.ndarray:
    """``g`` in the top-left corner of the ``n x n`` identity (``GL(i)`` inside ``GL(n)``)."""
    out = identity(n, is_exact(g))
    if not is_exact(g):
        g = g.astype(complex)
    out[:g.shape[0], :g.shape[0]] = g
    return out


def matpow(m: np.ndarray, k: int) -> np.ndarray:
    """``m**k`` for ``k >= 0``, keeping the arithmetic mode (also for ``k = 0``)."""
    out = identity(m.shape[0], is_exact(m))
    for _ in range(k):
        out = out @ m
    return out


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def charpoly(m: np.ndarray) -> MonicPoly:
    """``det(t I - M)`` by the Faddeev-LeVerrier recurrence.

    Only divides by integers, so exact input gives exact output.
    """
    _check_square(m)
    n = m.shape[0]
    ex = is_exact(m)
    eye = identity(n, ex)
    coeffs = [None] * n
    c_prev = _ONE if ex else 1.0 + 0j
    mk = zeros(n, ex)
    for k in range(1, n + 1):
        mk = m @ mk + c_prev * eye
        c_prev = -np.trace(m @ mk) / k
        coeffs[n - k] = c_prev
    if ex:
        coeffs = [exact(c) for c in coeffs]
    else:
        coeffs = [complex(c) for c in coeffs]
    return MonicPoly(tuple(coeffs))


# ---------------------------------------------------------------------------
# rank, nullspace, solving

def _rref(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    r = a.copy()
    rows, cols = r.shape
    pivots = []
    prow = 0
    for c in range(cols):
        if prow == rows:
            break
        hit = next((k for k in range(prow, rows) if r[k, c] != 0), None)
        if hit is None:
            continue
        if hit != prow:
            r[[prow, hit]] = r[[hit, prow]]
        piv = r[prow, c]
        r[prow] = r[prow] / piv
        for k in range(rows):
            if k != prow and r[k, c] != 0:
                r[k] = r[k] - r[k, c] * r[prow]
        pivots.append(c)
        prow += 1
    return r, pivots


def _float_threshold(sv: np.ndarray, ctx: ToleranceContext,
                     ref: float | None) -> float:
    top = float(sv[0]) if sv.size else 0.0
    if ref is not None:
        top = max(top, ref)
    return ctx.eps_rank * top


def rank(a: np.ndarray, ctx: ToleranceContext = DEFAULT_TOL,
         ref: float | None = None) -> int:
    """Matrix rank.

    In float mode singular values at or below ``eps_rank`` times the
    largest one (or ``ref``, if larger) count as zero; ``ref`` keeps an
    all-noise matrix from reporting full rank.
    """
    if a.size == 0:
        return 0
    if is_exact(a):
        return len(_rref(a)[1])
    sv = np.linalg.svd(a, compute_uv=False)
    thr = _float_threshold(sv, ctx, ref)
    return int(np.sum(sv > thr)) if sv[0] > 0 else 0


def nullspace(a: np.ndarray, ctx: ToleranceContext = DEFAULT_TOL,
              ref: float | None = None) -> np.ndarray:
    """Basis of ``{v : a v = 0}`` as the columns of the returned array."""
    rows, cols = a.shape
    if is_exact(a):
        r, pivots = _rref(a)
        free = [c for c in range(cols) if c not in pivots]
        basis = zeros((cols, len(free)), True)
        for k, f in enumerate(free):
            basis[f, k] = _ONE
            for row, p in enumerate(pivots):
                basis[p, k] = -r[row, f]
        return basis
    if rows == 0:
        return np.eye(cols, dtype=complex)
    _, sv, vh = np.linalg.svd(a)
    thr = _float_threshold(sv, ctx, ref)
    nonzero = int(np.sum(sv > thr)) if sv[0] > 0 else 0
    return vh[nonzero:].conj().T


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve the square system ``a x = b``; raises on singular ``a``."""
    _check_square(a)
    if is_exact(a):
        n = a.shape[0]
        rhs = b.reshape(n, -1)
        aug = np.concatenate([a, rhs], axis=1)
        r, pivots = _rref(aug)
        if pivots[:n] != list(range(n)) or len(pivots) > n:
            raise SingularSystemError("singular linear system")
        return r[:, n:].reshape(b.shape)
    try:
        return np.linalg.solve(a.astype(complex), b.astype(complex))
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from None


def inverse(a: np.ndarray) -> np.ndarray:
    return solve(a, identity(a.shape[0], is_exact(a)))


# ---------------------------------------------------------------------------
# centralizers and regularity

def _vec(a: np.ndarray) -> np.ndarray:
    return a.reshape(-1)


def _centralizer_operator(m: np.ndarray) -> np.ndarray:
    """Matrix of ``z -> z m - m z`` acting on row-major ``vec(z)``."""
    n = m.shape[0]
    out = zeros((n * n, n * n), is_exact(m))
    # (z m - m z)[a, b] = sum_d z[a, d] m[d, b] - sum_c m[a, c] z[c, b]
    for a in range(n):
        for b in range(n):
            row = a * n + b
            for d in range(n):
                out[row, a * n + d] = out[row, a * n + d] + m[d, b]
            for c in range(n):
                out[row, c * n + b] = out[row, c * n + b] - m[a, c]
    return out


def _normalized(m: np.ndarray) -> np.ndarray:
    """Scale a float matrix to unit max entry; exact matrices pass through."""
    if is_exact(m):
        return m
    s = scale(m)
    return m / s if s > 0 else m


def centralizer_basis(m: np.ndarray, ctx: ToleranceContext = DEFAULT_TOL
                      ) -> list[np.ndarray]:
    """Basis of ``{z : [z, m] = 0}``."""
    _check_square(m)
    n = m.shape[0]
    ns = nullspace(_centralizer_operator(_normalized(m)), ctx, ref=1.0)
    return [ns[:, k].reshape(n, n) for k in range(ns.shape[1])]


def centralizer_dim(m: np.ndarray, ctx: ToleranceContext = DEFAULT_TOL) -> int:
    n = m.shape[0]
    return n * n - rank(_centralizer_operator(_normalized(m)), ctx, ref=1.0)


def is_regular(m: np.ndarray, ctx: ToleranceContext = DEFAULT_TOL) -> bool:
    """Centralizer of minimal dimension, i.e. one Jordan block per eigenvalue."""
    return centralizer_dim(m, ctx) == m.shape[0]


# ---------------------------------------------------------------------------
# Jordan frames of regular matrices

@dataclass(frozen=True)
class JordanFrame:
    """``g @ M @ inverse(g) == jordan`` for the source matrix ``M``."""

    g: np.ndarray
    jordan: np.ndarray
    spectrum: Spectrum
    g_inv: np.ndarray


def jordan_matrix(s: Spectrum, exact_mode: bool | None = None) -> np.ndarray:
    """Block-diagonal Jordan form, one block per root, in spectrum order."""
    ex = s.exact if exact_mode is None else exact_mode
    out = zeros(s.degree, ex)
    pos = 0
    for lam, m in s.pairs:
        lam = exact(lam) if ex else complex(lam)
        for k in range(m):
            out[pos + k, pos + k] = lam
            if k + 1 < m:
                out[pos + k, pos + k + 1] = _ONE if ex else 1.0
        pos += m
    return out


def _sqnorm(v: np.ndarray):
    if is_exact(v):
        return sum((x.abs2() for x in v), start=0)
    return float(np.vdot(v, v).real)


def jordanize_regular(m: np.ndarray, s: Spectrum,
                      ctx: ToleranceContext = DEFAULT_TOL) -> JordanFrame:
    """Conjugate a regular matrix into Jordan form with blocks in spectrum order.

    For every root ``lam`` of multiplicity ``k`` a generalized eigenvector
    ``v`` is picked from a basis of ``ker (M - lam)^k`` maximizing
    ``|(M - lam)^(k-1) v|`` (first index wins ties); its chain fills the
    columns of ``inverse(g)``.
    """
    _check_square(m)
    n = m.shape[0]
    if s.degree != n:
        raise SpectrumMismatchError(
            f"spectrum degree {s.degree} does not match matrix size {n}")
    ex = is_exact(m)
    if ex and not s.exact:
        raise ModeError("exact matrix needs an exact spectrum")
    if not ex:
        m = m.astype(complex)
    eye = identity(n, ex)
    mscale = max(scale(m), 1.0)
    columns = []
    for lam, mult in s.pairs:
        lam = exact(lam) if ex else complex(lam)
        nil = m - lam * eye
        top = matpow(nil, mult - 1) if mult > 1 else eye
        power = top @ nil
        if ex:
            cand = nullspace(power, ctx)
            if cand.shape[1] != mult:
                raise SpectrumMismatchError(
                    f"generalized eigenspace of {lam} has dimension "
                    f"{cand.shape[1]}, expected {mult}")
        else:
            _, _, vh = np.linalg.svd(power / mscale ** mult)
            cand = vh[n - mult:].conj().T
        norms = [_sqnorm(top @ cand[:, k]) for k in range(cand.shape[1])]
        best = max(range(len(norms)), key=lambda k: (norms[k], -k))
        v = cand[:, best]
        if norms[best] == 0 or (not ex and math.sqrt(norms[best])
                                <= ctx.eps_rank * mscale ** (mult - 1)):
            raise NotRegularError(
                f"eigenvalue {lam} carries more than one Jordan block")
        chain = [v]
        for _ in range(mult - 1):
            chain.append(nil @ chain[-1])
        columns.extend(reversed(chain))
    p = np.stack(columns, axis=1)
    jordan = jordan_matrix(s, ex)
    try:
        g = inverse(p)
    except SingularSystemError:
        raise NotRegularError("Jordan chains are linearly dependent") from None
    if ex:
        if not np.array_equal(g @ m @ p, jordan):
            raise SpectrumMismatchError("Jordan residual check failed")
    else:
        resid = np.max(np.abs(m @ p - p @ jordan))
        if resid > ctx.eps_eq * mscale * np.max(np.abs(p)) * n:
            raise SpectrumMismatchError(
                f"Jordan residual {resid:.3e} exceeds tolerance")
    return JordanFrame(g=g, jordan=jordan, spectrum=s, g_inv=p)


# ---------------------------------------------------------------------------
# exponential

def mat_exp(m: np.ndarray, ctx: ToleranceContext = DEFAULT_TOL) -> np.ndarray:
    """Matrix exponential.

    Float mode uses scaling and squaring with a Pade approximant; exact
    mode only accepts nilpotent input, for which the series terminates.
    """
    _check_square(m)
    n = m.shape[0]
    if not is_exact(m):
        return scipy.linalg.expm(m.astype(complex))
    if n and np.any(matpow(m, n) != 0):
        raise ModeError("exact matrix exponential needs a nilpotent matrix")
    out = identity(n, True)
    term = identity(n, True)
    for k in range(1, n):
        term = (term @ m) / k
        out = out + term
    return out


# ---------------------------------------------------------------------------
# JSON

def matrix_to_json(x: np.ndarray) -> dict:
    _check_square(x)
    return {
        "mode": "exact" if is_exact(x) else "float",
        "n": int(x.shape[0]),
        "entries": [[scalar_to_json(v) for v in row] for row in x],
    }


def matrix_from_json(obj: dict, mode: str | None = None) -> np.ndarray:
    """Parse a matrix document; ``mode`` overrides the document's own mode."""
    try:
        rows = obj["entries"]
    except (KeyError, TypeError):
        raise SchemaError("matrix JSON needs an 'entries' field") from None
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise SchemaError("'entries' must be a list of rows")
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise SchemaError("matrix must be square and non-empty")
    if "n" in obj and obj["n"] != n:
        raise SchemaError(f"'n'={obj['n']} disagrees with {n} rows")
    mode = mode or obj.get("mode")
    if mode not in (None, "exact", "float"):
        raise SchemaError(f"unknown mode {mode!r}")
    exact_mode = None if mode is None else mode == "exact"
    vals = [[scalar_from_json(v, exact_mode) for v in r] for r in rows]
    if exact_mode is None:
        exact_mode = all(isinstance(v, GaussRat) for r in vals for v in r)
    return to_exact(vals) if exact_mode else to_float(vals)
