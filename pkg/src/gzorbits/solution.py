"""Solution varieties: bordered Jordan matrices with a prescribed characteristic polynomial.

A point at level ``i`` is an ``(i+1) x (i+1)`` matrix whose leading
``i x i`` block is a regular Jordan matrix ``J`` (one block per root,
decreasing lexicographic order), with last column ``y``, last row ``z``
and corner ``w``.  The centralizer of ``J`` (a product of invertible
upper-triangular Toeplitz groups, one per block) acts by ``y -> T y``,
``z -> z T^-1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ModeError, SchemaError, SingularSystemError
from .matrices import is_exact, jordan_matrix, rank, scale, zeros
from .scalars import (DEFAULT_TOL, GaussRat, MonicPoly, Spectrum,
                      ToleranceContext, _same_root, exact, linear_power,
                      poly_add, poly_mul, poly_scale, scalar_from_json,
                      scalar_to_json, series_divide, spectrum_from_poly,
                      taylor_at)

__all__ = [
    "Block", "SolutionPoint", "ToeplitzElt", "StabilizerPattern",
    "BlockChoice", "assemble", "xi_charpoly", "xi_solve", "zi_act",
    "stabilizer_pattern", "is_free", "from_matrix", "toeplitz",
    "UPPER", "LOWER",
]

UPPER = "U"
LOWER = "L"


@dataclass(frozen=True)
class Block:
    lam: object
    mult: int
    z: tuple
    y: tuple

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(self.z))
        object.__setattr__(self, "y", tuple(self.y))
        if len(self.z) != self.mult or len(self.y) != self.mult:
            raise ValueError("border vectors must match the block size")


@dataclass(frozen=True)
class SolutionPoint:
    level: int
    blocks: tuple
    w: object

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if sum(b.mult for b in self.blocks) != self.level:
            raise ValueError("block sizes must add up to the level")

    @property
    def spectrum(self) -> Spectrum:
        return Spectrum(tuple((b.lam, b.mult) for b in self.blocks))

    @property
    def exact(self) -> bool:
        return isinstance(self.w, GaussRat)

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "blocks": [{"lambda": scalar_to_json(b.lam), "mult": b.mult,
                        "z": [scalar_to_json(v) for v in b.z],
                        "y": [scalar_to_json(v) for v in b.y]}
                       for b in self.blocks],
            "w": scalar_to_json(self.w),
        }

    @classmethod
    def from_json(cls, obj: dict, mode: str | None = None) -> "SolutionPoint":
        exact_mode = None if mode is None else mode == "exact"
        try:
            blocks = [Block(scalar_from_json(b["lambda"], exact_mode),
                            int(b["mult"]),
                            [scalar_from_json(v, exact_mode) for v in b["z"]],
                            [scalar_from_json(v, exact_mode) for v in b["y"]])
                      for b in obj["blocks"]]
            return cls(int(obj["level"]), tuple(blocks),
                       scalar_from_json(obj["w"], exact_mode))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad solution point: {exc}") from None


@dataclass(frozen=True)
class ToeplitzElt:
    """Per block, coefficients ``a_0 != 0, a_1, ...`` of ``sum a_m N^m``."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(tuple(a) for a in self.coeffs))


@dataclass(frozen=True)
class StabilizerPattern:
    """Per block ``("Full" | "Unipotent" | "Trivial", dim)``."""

    blocks: tuple

    @property
    def total_dim(self) -> int:
        return sum(d for _, d in self.blocks)

    def to_json(self) -> dict:
        return {"blocks": [{"tag": t, "dim": d} for t, d in self.blocks],
                "total_dim": self.total_dim}


@dataclass(frozen=True)
class BlockChoice:
    """An Upper/Lower label for each root shared by two adjacent levels."""

    roots: tuple = ()
    labels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "roots", tuple(self.roots))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.roots) != len(self.labels):
            raise ValueError("one label per common root")
        for lab in self.labels:
            if lab not in (UPPER, LOWER):
                raise ValueError(f"label must be 'U' or 'L', got {lab!r}")

    def __len__(self):
        return len(self.labels)

    def label_for(self, lam, ctx: ToleranceContext = DEFAULT_TOL):
        for r, lab in zip(self.roots, self.labels):
            if _same_root(r, lam, ctx):
                return lab
        return None

    def to_json(self) -> list:
        return [{"root": scalar_to_json(r), "choice": lab}
                for r, lab in zip(self.roots, self.labels)]

    @classmethod
    def from_json(cls, items: list, mode: str | None = None) -> "BlockChoice":
        exact_mode = None if mode is None else mode == "exact"
        try:
            return cls(tuple(scalar_from_json(it["root"], exact_mode) for it in items),
                       tuple(it["choice"] for it in items))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad block choice: {exc}") from None


# ---------------------------------------------------------------------------

def assemble(p: SolutionPoint) -> np.ndarray:
    """The bordered matrix ``[[J, y], [z, w]]``."""
    ex = p.exact
    i = p.level
    out = zeros(i + 1, ex)
    out[:i, :i] = jordan_matrix(p.spectrum, ex)
    pos = 0
    for b in p.blocks:
        for k in range(b.mult):
            out[pos + k, i] = b.y[k]
            out[i, pos + k] = b.z[k]
        pos += b.mult
    out[i, i] = p.w
    return out


def _one(ex):
    return GaussRat(1) if ex else 1.0 + 0j


def _minus_power(lam, m, ex):
    """Coefficients of ``(lam - t)**m``."""
    return poly_scale(linear_power(lam, m, ex), _one(ex) * (-1) ** m)


def xi_charpoly(p: SolutionPoint) -> MonicPoly:
    """Characteristic polynomial of :func:`assemble` ``(p)`` from the closed formula.

    Evaluates ``det(X - t)`` as a sum over Jordan blocks of border
    convolutions ``s_l = sum_j z_j y_(j+l)`` and normalizes to monic.
    """
    ex = p.exact
    one = _one(ex)
    total = poly_mul([p.w, -one], _prod_minus(p.blocks, None, ex))
    for k, b in enumerate(p.blocks):
        n = b.mult
        inner = [one * 0]
        for l in range(n):
            s = sum((b.z[j] * b.y[j + l] for j in range(n - l)), start=one * 0)
            inner = poly_add(inner, poly_scale(linear_power(b.lam, n - 1 - l, ex), s))
        term = poly_mul(_prod_minus(p.blocks, k, ex), inner)
        total = poly_add(total, poly_scale(term, one * (-1) ** n))
    return MonicPoly.from_full(total)


def _prod_minus(blocks, skip, ex):
    out = [_one(ex)]
    for k, b in enumerate(blocks):
        if k != skip:
            out = poly_mul(out, _minus_power(b.lam, b.mult, ex))
    return out


def _is_root(target: MonicPoly, lam, target_spec, ctx) -> bool:
    if target.exact:
        return target(exact(lam)) == 0
    return any(_same_root(lam, r, ctx) for r in target_spec.roots)


def xi_solve(spec_i: Spectrum, target: MonicPoly, choice: BlockChoice | None = None,
             params: dict | None = None, ctx: ToleranceContext = DEFAULT_TOL,
             target_spec: Spectrum | None = None) -> SolutionPoint:
    """A point of the solution variety with characteristic polynomial ``target``.

    Each Jordan block is solved on its own by matching Taylor
    coefficients at its eigenvalue.  For a Lower block (and for blocks at
    roots the two polynomials do not share) ``z`` is given, defaulting to
    ``e_1``, and ``y`` follows by back substitution; for an Upper block
    ``y`` is given, defaulting to ``e_n``, and ``z`` follows.

    Parameters
    ----------
    spec_i : Spectrum
        Roots of the level-``i`` polynomial (the Jordan cutoff).
    target : MonicPoly
        Degree ``i + 1`` characteristic polynomial to reach.
    choice : BlockChoice, optional
        Labels for exactly the roots shared with ``target``; ``None``
        labels them all Lower.
    params : dict, optional
        Block index -> the given border vector (``z`` for Lower and
        unshared blocks, ``y`` for Upper blocks).
    target_spec : Spectrum, optional
        Known roots of ``target``; in float mode this avoids extracting
        (possibly repeated) roots numerically.
    """
    i = spec_i.degree
    if target.degree != i + 1:
        raise ValueError(f"target degree {target.degree} != {i + 1}")
    ex = spec_i.exact
    if ex != target.exact:
        raise ModeError("spectrum and target polynomial must share a mode")
    params = params or {}
    one = _one(ex)
    if target_spec is None and not ex:
        target_spec = spectrum_from_poly(target, ctx)
    shared = [_is_root(target, lam, target_spec, ctx) for lam in spec_i.roots]
    if choice is None:
        choice = BlockChoice(tuple(l for l, s in zip(spec_i.roots, shared) if s),
                             tuple(LOWER for s in shared if s))
    for r in choice.roots:
        hit = [k for k, lam in enumerate(spec_i.roots) if _same_root(r, lam, ctx)]
        if not hit or not shared[hit[0]]:
            raise ValueError(f"choice given for {r}, which is not a common root")
    blocks = []
    for k, (lam, n) in enumerate(spec_i.pairs):
        lam = exact(lam) if ex else complex(lam)
        tay = taylor_at(target, lam, n - 1)
        # monic form: det(t - X) = (t - w) prod (t - lam)^n - sum_k Q_k S_k
        others = [one]
        for kk, (mu, m) in enumerate(spec_i.pairs):
            if kk != k:
                others = poly_mul(others, linear_power(mu, m, ex))
        q = taylor_at(others + [one * 0] * n, lam, n - 1)
        series = series_divide([-c for c in tay], q, n - 1)
        s = [series[n - 1 - l] for l in range(n)]
        if shared[k]:
            s[n - 1] = one * 0
            label = choice.label_for(lam, ctx)
            if label is None:
                raise ValueError(f"no choice given for common root {lam}")
        else:
            label = LOWER
        given = params.get(k)
        if label == LOWER:
            z = [exact(v) if ex else complex(v) for v in given] if given is not None \
                else [one] + [one * 0] * (n - 1)
            if len(z) != n or z[0] == 0:
                raise ValueError(f"block {k}: Lower needs z of length {n} with z_1 != 0")
            y = [one * 0] * n
            for l in range(n - 1, -1, -1):
                acc = s[l] - sum((z[q] * y[q + l] for q in range(1, n - l)),
                                 start=one * 0)
                y[l] = acc / z[0]
        else:
            y = [exact(v) if ex else complex(v) for v in given] if given is not None \
                else [one * 0] * (n - 1) + [one]
            if len(y) != n or y[n - 1] == 0:
                raise ValueError(f"block {k}: Upper needs y of length {n} with y_n != 0")
            z = [one * 0] * n
            for pidx in range(n):
                l = n - 1 - pidx
                acc = s[l] - sum((z[q] * y[q + l] for q in range(pidx)), start=one * 0)
                z[pidx] = acc / y[n - 1]
        blocks.append(Block(lam, n, tuple(z), tuple(y)))
    trace_j = sum((b.lam * b.mult for b in blocks), start=one * 0)
    w = -target.coeffs[i] - trace_j
    return SolutionPoint(i, tuple(blocks), w)


def toeplitz(a, exact_mode: bool) -> np.ndarray:
    """Upper-triangular Toeplitz matrix with first row ``a``."""
    n = len(a)
    out = zeros(n, exact_mode)
    for r in range(n):
        for c in range(r, n):
            out[r, c] = a[c - r]
    return out


def zi_act(k: ToeplitzElt, p: SolutionPoint) -> SolutionPoint:
    """``y -> T y`` and ``z -> z T^-1`` block by block."""
    if len(k.coeffs) != len(p.blocks):
        raise ValueError("one Toeplitz factor per Jordan block")
    ex = p.exact
    one = _one(ex)
    blocks = []
    for a, b in zip(k.coeffs, p.blocks):
        if len(a) != b.mult:
            raise ValueError("Toeplitz factor size does not match the block")
        a = [exact(v) if ex else complex(v) for v in a]
        if a[0] == 0:
            raise SingularSystemError("Toeplitz factor with a_0 = 0 is singular")
        inv = series_divide([one] + [one * 0] * (b.mult - 1), a, b.mult - 1)
        t, tinv = toeplitz(a, ex), toeplitz(inv, ex)
        y = t @ np.array(b.y, dtype=object if ex else complex)
        z = np.array(b.z, dtype=object if ex else complex) @ tinv
        blocks.append(Block(b.lam, b.mult, tuple(z), tuple(y)))
    return SolutionPoint(p.level, tuple(blocks), p.w)


def _block_stabilizer(b: Block, ex: bool, ctx: ToleranceContext):
    """Linear part of ``{a : T(a) y = y, z T(a) = z}``, columns indexed by ``a_m``."""
    n = b.mult
    y = np.array(b.y, dtype=object if ex else complex)
    z = np.array(b.z, dtype=object if ex else complex)
    cols = []
    for m in range(n):
        # N^m y shifts y up by m, z N^m shifts z right by m
        ny = np.concatenate([y[m:], zeros((m,), ex)])
        zn = np.concatenate([zeros((m,), ex), z[:n - m]])
        cols.append(np.concatenate([ny, zn]))
    return np.stack(cols, axis=1)


def stabilizer_pattern(p: SolutionPoint, ctx: ToleranceContext = DEFAULT_TOL
                       ) -> StabilizerPattern:
    """Isotropy of ``p`` in the Toeplitz group, block by block.

    A block with vanishing borders is fixed by its whole Toeplitz factor.
    Otherwise the fixing equations force ``a_0 = 1`` and leave a
    (possibly trivial) unipotent solution space whose dimension is
    reported.
    """
    ex = p.exact
    ref = max(scale(np.array([v for b in p.blocks for v in b.z + b.y],
                             dtype=object if ex else complex)), 0.0) if p.blocks else 0.0
    out = []
    for b in p.blocks:
        values = b.z + b.y
        if all(v == 0 for v in values) or (
                not ex and max(abs(complex(v)) for v in values) <= ctx.eps_eq * max(ref, 1.0)):
            out.append(("Full", b.mult))
            continue
        dim = b.mult - rank(_block_stabilizer(b, ex, ctx), ctx, ref=ref or None)
        out.append(("Trivial" if dim == 0 else "Unipotent", dim))
    return StabilizerPattern(tuple(out))


def is_free(p: SolutionPoint, ctx: ToleranceContext = DEFAULT_TOL) -> bool:
    return stabilizer_pattern(p, ctx).total_dim == 0


def from_matrix(m: np.ndarray, spectrum: Spectrum) -> SolutionPoint:
    """Read border coordinates off a bordered matrix with Jordan cutoff."""
    i = m.shape[0] - 1
    if spectrum.degree != i:
        raise ValueError("spectrum degree must be one less than the matrix size")
    blocks = []
    pos = 0
    for lam, n in spectrum.pairs:
        blocks.append(Block(lam, n, tuple(m[i, pos:pos + n]),
                            tuple(m[pos:pos + n, i])))
        pos += n
    return SolutionPoint(i, tuple(blocks), m[i, i])
