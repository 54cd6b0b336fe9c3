"""Strongly regular orbits of the flow group inside a single fibre.

A fibre over ``c`` splits into ``2**sum(j_i)`` such orbits, where
``j_i`` counts the distinct roots shared by levels ``i`` and ``i+1``.
Each orbit is labelled by an Upper/Lower choice per shared root.  This
module counts the orbits, builds one representative per label by
gluing solution-variety points level by level, and reads the label back
off an arbitrary strongly regular matrix.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (ClassificationError, NotStronglyRegularError,
                     SchemaError)
from .matrices import (JordanFrame, asmat, cutoff, embed_group, is_exact,
                       jordanize_regular, scale)
from .moment import GZSpec, phi, strong_regularity
from .scalars import (DEFAULT_TOL, Spectrum, ToleranceContext, _same_root,
                      common_roots)
from .solution import (LOWER, UPPER, BlockChoice, SolutionPoint, assemble,
                       from_matrix, is_free, xi_solve)

__all__ = [
    "ChoiceVector", "FiberClass", "Permutation", "fiber_class", "orbit_count",
    "orbit_representative", "classify", "level_choice",
    "solution_coordinates", "nil_pattern", "nil_permutation", "lower_pattern",
    "enumerate_orbits",
]


@dataclass(frozen=True)
class ChoiceVector:
    """One :class:`BlockChoice` per level ``i = 1 .. n-1``."""

    levels: tuple

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))

    @property
    def labels(self) -> tuple:
        return tuple(lab for lev in self.levels for lab in lev.labels)

    def __len__(self):
        return len(self.labels)

    def to_json(self) -> dict:
        return {"levels": [lev.to_json() for lev in self.levels]}

    @classmethod
    def from_json(cls, obj, mode: str | None = None) -> "ChoiceVector":
        if isinstance(obj, dict):
            obj = obj.get("levels")
        if not isinstance(obj, list):
            raise SchemaError("choice vector needs a 'levels' list")
        return cls(tuple(BlockChoice.from_json(lev, mode) for lev in obj))


@dataclass(frozen=True)
class FiberClass:
    j: tuple
    tag: str

    def to_json(self) -> dict:
        return {"j": list(self.j), "class": self.tag}


@dataclass(frozen=True)
class Permutation:
    """Bijection of ``{1..n}`` in one-line notation."""

    one_line: tuple

    def __post_init__(self):
        object.__setattr__(self, "one_line", tuple(int(v) for v in self.one_line))
        if sorted(self.one_line) != list(range(1, len(self.one_line) + 1)):
            raise ValueError(f"not a permutation: {self.one_line}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    def __call__(self, k: int) -> int:
        return self.one_line[k - 1]

    def __matmul__(self, other: "Permutation") -> "Permutation":
        """Composition ``self o other`` (apply ``other`` first)."""
        return Permutation(tuple(self(other(k)) for k in range(1, len(self.one_line) + 1)))

    def cycles(self) -> list[tuple]:
        seen, out = set(), []
        for start in range(1, len(self.one_line) + 1):
            if start in seen or self(start) == start:
                continue
            cyc, k = [], start
            while k not in seen:
                seen.add(k)
                cyc.append(k)
                k = self(k)
            out.append(tuple(cyc))
        return out

    def conjugate_positions(self, positions) -> frozenset:
        return frozenset((self(r), self(c)) for r, c in positions)


# ---------------------------------------------------------------------------

def _shared(spectra, ctx):
    return [common_roots(spectra[i], spectra[i + 1], ctx)
            for i in range(len(spectra) - 1)]


def fiber_class(c: GZSpec, ctx: ToleranceContext = DEFAULT_TOL) -> FiberClass:
    spectra = c.spectra(ctx)
    j = tuple(len(r) for r in _shared(spectra, ctx))
    if any(j):
        tag = "Degenerate"
    elif all(m == 1 for s in spectra for m in s.mults):
        tag = "Omega"
    else:
        tag = "ThetaOnly"
    return FiberClass(j, tag)


def orbit_count(c: GZSpec, ctx: ToleranceContext = DEFAULT_TOL) -> int:
    return 2 ** sum(fiber_class(c, ctx).j)


def _check_choice(shared, v: ChoiceVector, ctx):
    if len(v.levels) != len(shared):
        raise SchemaError(f"choice vector needs {len(shared)} levels, "
                          f"got {len(v.levels)}")
    for i, (roots, lev) in enumerate(zip(shared, v.levels), start=1):
        ok = len(roots) == len(lev.roots) and all(
            _same_root(a, b, ctx) for a, b in zip(roots, lev.roots))
        if not ok:
            raise SchemaError(f"level {i}: choices must cover exactly the "
                              f"common roots {[str(r) for r in roots]}")


def orbit_representative(c: GZSpec, v: ChoiceVector,
                         ctx: ToleranceContext = DEFAULT_TOL) -> np.ndarray:
    """A strongly regular matrix over ``c`` in the orbit labelled ``v``.

    Level ``i`` contributes the canonical solution ``A_i`` of size
    ``i+1`` whose Jordan cutoff has the roots of level ``i`` and whose
    characteristic polynomial is level ``i+1``.  Conjugating ``A_i`` into
    Jordan form ``J_(i+1)`` gives ``g_i``, and
    ``Ad(g_1^-1 ... g_(n-2)^-1) A_(n-1)`` has every cutoff in place.
    """
    n = c.n
    spectra = c.spectra(ctx)
    _check_choice(_shared(spectra, ctx), v, ctx)
    if n == 1:
        return asmat([[-c.level(1).coeffs[0]]], c.exact)
    points = []
    for i in range(1, n):
        p = xi_solve(spectra[i - 1], c.level(i + 1), v.levels[i - 1], None, ctx,
                     target_spec=spectra[i])
        if not is_free(p, ctx):
            raise NotStronglyRegularError(
                f"level {i} solution point is not free")
        points.append(p)
    x = assemble(points[-1])
    for i in range(n - 2, 0, -1):
        frame = jordanize_regular(assemble(points[i - 1]), spectra[i], ctx)
        x = embed_group(frame.g_inv, n) @ x @ embed_group(frame.g, n)
    return x


def solution_coordinates(x: np.ndarray, i: int, frame: JordanFrame) -> SolutionPoint:
    """Coordinates of ``x_(i+1)`` after conjugating ``x_i`` into Jordan form by ``frame``."""
    big = (embed_group(frame.g, i + 1) @ cutoff(x, i + 1)
           @ embed_group(frame.g_inv, i + 1))
    return from_matrix(big, frame.spectrum)


def level_choice(x: np.ndarray, i: int, frame: JordanFrame, next_spec: Spectrum,
                 ctx: ToleranceContext = DEFAULT_TOL) -> BlockChoice:
    """Upper/Lower label of every root shared by levels ``i`` and ``i+1``.

    Lower when the first border-row entry of the block survives, Upper
    when the last border-column entry does.  Float entries count as zero
    at or below ``eps_eq`` times the scale of the coordinate matrix.
    """
    p = solution_coordinates(x, i, frame)
    ex = is_exact(x)
    ref = max(scale(assemble(p)), 1.0)

    def zero(val):
        return val == 0 if ex else abs(complex(val)) <= ctx.eps_eq * ref

    roots, labels = [], []
    for b in p.blocks:
        if not any(_same_root(b.lam, r, ctx) for r in next_spec.roots):
            continue
        z0, yn = zero(b.z[0]), zero(b.y[-1])
        if z0 == yn:
            what = "both vanish" if z0 else "neither vanishes"
            raise ClassificationError(
                f"level {i}, root {b.lam}: first z and last y coordinates {what}")
        roots.append(b.lam)
        labels.append(UPPER if z0 else LOWER)
    return BlockChoice(tuple(roots), tuple(labels))


def classify(x: np.ndarray, ctx: ToleranceContext = DEFAULT_TOL,
             spec: GZSpec | None = None) -> ChoiceVector:
    """Orbit label of a strongly regular matrix.

    ``spec`` supplies the fibre label (and ideally its roots); when
    omitted it is computed from ``x``.  Float matrices whose levels have
    repeated roots should pass it, since Jordan frames built from
    numerically extracted multiple roots are unreliable.
    """
    if not strong_regularity(x, ctx).strongly_regular:
        raise NotStronglyRegularError("matrix is not strongly regular")
    c = phi(x) if spec is None else spec
    if c.n != x.shape[0]:
        raise SchemaError("fibre label size does not match the matrix")
    spectra = c.spectra(ctx)
    levels = []
    for i in range(1, c.n):
        frame = jordanize_regular(cutoff(x, i), spectra[i - 1], ctx)
        levels.append(level_choice(x, i, frame, spectra[i], ctx))
    return ChoiceVector(tuple(levels))


# ---------------------------------------------------------------------------
# the nilpotent fibre

def _labels(v) -> tuple:
    v = tuple(v)
    for a in v:
        if a not in (UPPER, LOWER):
            raise ValueError(f"nilfibre labels must be 'U' or 'L', got {a!r}")
    return v


def nil_pattern(v) -> frozenset:
    """1-based positions spanned by the nilradical attached to ``v``.

    Level ``i`` adds the new column above the diagonal (``U``) or the new
    row left of it (``L``).
    """
    out = set()
    for i, a in enumerate(_labels(v), start=1):
        for k in range(1, i + 1):
            out.add((k, i + 1) if a == UPPER else (i + 1, k))
    return frozenset(out)


def _long_element(m: int, n: int) -> Permutation:
    return Permutation(tuple(range(m, 0, -1)) + tuple(range(m + 1, n + 1)))


def nil_permutation(v) -> Permutation:
    """``sigma`` with ``sigma(lower triangle) = nil_pattern(v)``.

    With ``a_n = L``, ``tau_i`` reverses ``1..i+1`` when ``a_i != a_(i+1)``
    and ``sigma = tau_1 tau_2 ... tau_(n-1)``.
    """
    a = _labels(v) + (LOWER,)
    n = len(a)
    sigma = Permutation.identity(n)
    for i in range(1, n):
        if a[i - 1] != a[i]:
            sigma = sigma @ _long_element(i + 1, n)
    return sigma


def lower_pattern(n: int) -> frozenset:
    return frozenset((r, c) for r in range(1, n + 1) for c in range(1, r))


def enumerate_orbits(c: GZSpec, ctx: ToleranceContext = DEFAULT_TOL
                     ) -> list[tuple[ChoiceVector, np.ndarray]]:
    """Every orbit label with its representative (``U`` before ``L``, levels ascending)."""
    shared = _shared(c.spectra(ctx), ctx)
    out = []
    for flat in itertools.product((UPPER, LOWER), repeat=sum(map(len, shared))):
        levels, pos = [], 0
        for roots in shared:
            levels.append(BlockChoice(tuple(roots), flat[pos:pos + len(roots)]))
            pos += len(roots)
        v = ChoiceVector(tuple(levels))
        out.append((v, orbit_representative(c, v, ctx)))
    return out
