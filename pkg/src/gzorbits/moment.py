"""The cutoff characteristic-polynomial map and strong regularity.

``phi`` sends ``x`` to the characteristic polynomials of its cutoffs
``x_1, ..., x_n``.  Strong regularity is decided three independent
ways (independence of the differentials of ``tr(x_i^j)``, the
cutoff-centralizer criterion, and the dimension of the span of the
Hamiltonian vector fields) and :func:`strong_regularity` insists that
they agree.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotSplittingError, SchemaError, ToleranceError
from .matrices import (centralizer_dim, charpoly, commutator, cutoff, embed,
                       identity, is_exact, matpow, rank, scale, zeros)
from .scalars import (DEFAULT_TOL, GaussRat, MonicPoly, Spectrum,
                      ToleranceContext, poly_from_spectrum, scalar_from_json,
                      scalar_to_json, spectrum_from_poly)

__all__ = [
    "GZSpec", "SregReport", "phi", "trace_invariant", "gradient_basis",
    "sreg_differentials", "sreg_centralizers", "CentralizerReport",
    "tangent_space_dim", "strong_regularity", "poisson_bracket_residual",
    "poisson_residuals",
]


@dataclass(frozen=True)
class GZSpec:
    """Fibre label: one monic polynomial of degree ``i`` per level ``i``.

    ``known_spectra`` optionally caches the roots of each level, which is
    how exact fibres with non-Gaussian-rational polynomials or float
    fibres with repeated roots are best described.
    """

    levels: tuple
    known_spectra: tuple = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        for i, p in enumerate(self.levels, start=1):
            if p.degree != i:
                raise SchemaError(f"level {i} polynomial has degree {p.degree}")
        if self.known_spectra is None:
            object.__setattr__(self, "known_spectra", (None,) * self.n)
        else:
            object.__setattr__(self, "known_spectra", tuple(self.known_spectra))
            if len(self.known_spectra) != self.n:
                raise SchemaError("one spectrum slot per level required")

    @property
    def n(self) -> int:
        return len(self.levels)

    @property
    def exact(self) -> bool:
        return all(p.exact for p in self.levels)

    @classmethod
    def from_spectra(cls, spectra) -> "GZSpec":
        spectra = tuple(spectra)
        return cls(tuple(poly_from_spectrum(s) for s in spectra), spectra)

    def level(self, i: int) -> MonicPoly:
        return self.levels[i - 1]

    def spectrum(self, i: int, ctx: ToleranceContext = DEFAULT_TOL) -> Spectrum:
        """Roots of level ``i`` (1-based), from the cache when available."""
        known = self.known_spectra[i - 1]
        if known is not None:
            return known
        return spectrum_from_poly(self.levels[i - 1], ctx)

    def spectra(self, ctx: ToleranceContext = DEFAULT_TOL) -> list[Spectrum]:
        return [self.spectrum(i, ctx) for i in range(1, self.n + 1)]

    def to_float(self) -> "GZSpec":
        spectra = tuple(
            None if s is None else
            Spectrum(tuple((complex(r), m) for r, m in s.pairs))
            for s in self.known_spectra)
        return GZSpec(tuple(p.to_float() for p in self.levels), spectra)

    def max_coeff_error(self, other: "GZSpec") -> float:
        """Largest coefficient difference, relative to ``max(1, |coeff|)`` per level."""
        if other.n != self.n:
            raise ValueError("fibre labels of different sizes")
        worst = 0.0
        for p, q in zip(self.levels, other.levels):
            denom = max(1.0, p.max_abs())
            diff = max(abs(complex(a) - complex(b))
                       for a, b in zip(p.coeffs, q.coeffs))
            worst = max(worst, diff / denom)
        return worst

    def to_json(self, ctx: ToleranceContext = DEFAULT_TOL) -> dict:
        levels = []
        for i, p in enumerate(self.levels, start=1):
            entry = {"coeffs": [scalar_to_json(c) for c in p.coeffs]}
            if p.exact:
                try:
                    s = self.spectrum(i, ctx)
                except NotSplittingError:
                    s = None
                if s is not None:
                    entry["roots"] = [{"value": scalar_to_json(r), "mult": m}
                                      for r, m in s.pairs]
            levels.append(entry)
        return {"n": self.n, "levels": levels}

    @classmethod
    def from_json(cls, obj: dict, mode: str | None = None) -> "GZSpec":
        try:
            levels = obj["levels"]
        except (KeyError, TypeError):
            raise SchemaError("GZSpec JSON needs a 'levels' field") from None
        if "n" in obj and obj["n"] != len(levels):
            raise SchemaError("'n' disagrees with the number of levels")
        exact_mode = None if mode is None else mode == "exact"
        polys, spectra = [], []
        for i, lev in enumerate(levels, start=1):
            if not isinstance(lev, dict) or not ({"coeffs", "roots"} & set(lev)):
                raise SchemaError(f"level {i} needs 'coeffs' or 'roots'")
            s = None
            if "roots" in lev:
                try:
                    pairs = [(scalar_from_json(r["value"], exact_mode),
                              int(r.get("mult", 1))) for r in lev["roots"]]
                except (KeyError, TypeError):
                    raise SchemaError(f"bad roots at level {i}") from None
                s = Spectrum.from_roots(pairs)
                if s.degree != i:
                    raise SchemaError(f"level {i} roots have total multiplicity "
                                      f"{s.degree}")
            if "coeffs" in lev:
                coeffs = [scalar_from_json(c, exact_mode) for c in lev["coeffs"]]
                if len(coeffs) != i:
                    raise SchemaError(f"level {i} needs {i} coefficients")
                p = MonicPoly(tuple(coeffs))
            else:
                p = poly_from_spectrum(s)
            polys.append(p)
            spectra.append(s)
        if exact_mode is None:
            exact_mode = all(p.exact for p in polys)
        if exact_mode:
            polys = [p.to_exact() for p in polys]
        else:
            polys = [p.to_float() for p in polys]
            spectra = [None if s is None else
                       Spectrum(tuple((complex(r), m) for r, m in s.pairs))
                       for s in spectra]
        return cls(tuple(polys), tuple(spectra))


def phi(x: np.ndarray) -> GZSpec:
    """Characteristic polynomials of all cutoffs of ``x``."""
    return GZSpec(tuple(charpoly(cutoff(x, i))
                        for i in range(1, x.shape[0] + 1)))


def trace_invariant(x: np.ndarray, i: int, j: int):
    """``tr(x_i ** j)``."""
    n = x.shape[0]
    if not (1 <= j <= i <= n):
        raise IndexError(f"need 1 <= j <= i <= n, got i={i}, j={j}")
    return np.trace(matpow(cutoff(x, i), j))


def _powers(x: np.ndarray, max_level: int) -> list[tuple[int, int, np.ndarray]]:
    """``(i, j, embed(x_i^(j-1)))`` for ``1 <= j <= i <= max_level``."""
    n = x.shape[0]
    ex = is_exact(x)
    out = []
    for i in range(1, max_level + 1):
        xi = cutoff(x, i)
        p = identity(i, ex)
        for j in range(1, i + 1):
            out.append((i, j, embed(p, n)))
            p = p @ xi
    return out


def _level_bases(x: np.ndarray, max_level: int, ctx: ToleranceContext
                 ) -> list[np.ndarray]:
    """Per level, a basis of ``span(x_i^0, ..., x_i^(i-1))``, embedded.

    Exact mode returns the powers themselves.  Float mode runs Arnoldi in
    the Frobenius inner product (``q_k`` is ``x_i q_(k-1)`` orthogonalized
    twice against the earlier ``q``), which keeps the basis well
    conditioned even when raw powers of a non-normal cutoff collapse in
    size.  A level stops early when the new direction drops below
    ``eps_rank`` of its source, i.e. when the minimal polynomial of
    ``x_i`` has degree below ``i``.
    """
    if is_exact(x):
        return [m for _, _, m in _powers(x, max_level)]
    n = x.shape[0]
    out = []
    for i in range(1, max_level + 1):
        xi = cutoff(x, i)
        basis = [np.eye(i, dtype=complex) / np.sqrt(i)]
        for _ in range(1, i):
            v = xi @ basis[-1]
            size = np.linalg.norm(v)
            for _pass in range(2):
                for q in basis:
                    v = v - np.vdot(q, v) * q
            rest = np.linalg.norm(v)
            if rest <= ctx.eps_rank * max(size, 1e-300):
                break
            basis.append(v / rest)
        out.extend(embed(q, n) for q in basis)
    return out


def gradient_basis(x: np.ndarray) -> list[np.ndarray]:
    """``embed(x_i^(j-1))`` in ``(i, j)`` order: gradients of ``tr(x_i^j)`` up to ``j``."""
    return [m for _, _, m in _powers(x, x.shape[0])]


def _unit(x: np.ndarray) -> np.ndarray:
    # rescaling x by a nonzero constant rescales every power family member
    # by a nonzero constant, which leaves every span below unchanged
    if is_exact(x):
        return x
    s = scale(x)
    return x / s if s > 0 else x


def _stack(mats, ctx: ToleranceContext = DEFAULT_TOL) -> np.ndarray:
    out = np.stack([m.reshape(-1) for m in mats], axis=0)
    return out if is_exact(out) else _equilibrate(out, 1, ctx)


def _equilibrate(a: np.ndarray, axis: int, ctx: ToleranceContext) -> np.ndarray:
    """Scale rows (``axis=1``) or columns (``axis=0``) to unit norm.

    The rank is unchanged, but the conditioning improves a lot when the
    vectors span several orders of magnitude.  Vectors already at
    noise level relative to the largest one are zeroed rather than
    blown up.
    """
    norms = np.linalg.norm(a, axis=axis, keepdims=True)
    floor = ctx.eps_rank * max(float(norms.max(initial=0.0)), 1.0)
    keep = norms > floor
    return np.where(keep, a / np.where(keep, norms, 1.0), 0.0)


def sreg_differentials(x: np.ndarray, ctx: ToleranceContext = DEFAULT_TOL) -> bool:
    n = x.shape[0]
    grads = _level_bases(_unit(x), n, ctx)
    return rank(_stack(grads, ctx), ctx, ref=1.0) == n * (n + 1) // 2


@dataclass(frozen=True)
class CentralizerReport:
    regular: tuple
    intersection_dims: tuple

    @property
    def passes(self) -> bool:
        return all(self.regular) and not any(self.intersection_dims)


def _intersection_dim(x: np.ndarray, i: int, ctx: ToleranceContext) -> int:
    """dim of z_{gl(i-1)}(x_{i-1}) cap z_{gl(i)}(x_i), as one stacked system."""
    ex = is_exact(x)
    lo, hi = cutoff(x, i - 1), cutoff(x, i)
    cols = []
    for a in range(i - 1):
        for b in range(i - 1):
            e = zeros(i - 1, ex)
            e[a, b] = GaussRat(1) if ex else 1.0
            cols.append(np.concatenate([commutator(e, lo).reshape(-1),
                                        commutator(embed(e, i), hi).reshape(-1)]))
    system = np.stack(cols, axis=1)
    if not ex:
        system = _equilibrate(system, 0, ctx)
    return (i - 1) ** 2 - rank(system, ctx, ref=1.0)


def sreg_centralizers(x: np.ndarray, ctx: ToleranceContext = DEFAULT_TOL
                      ) -> CentralizerReport:
    """(a) every cutoff regular; (b) consecutive cutoff centralizers meet in 0.

    ``intersection_dims[k]`` belongs to level ``k + 2``.
    """
    xu = _unit(x)
    n = x.shape[0]
    regular = tuple(centralizer_dim(cutoff(xu, i), ctx) == i
                    for i in range(1, n + 1))
    inter = tuple(_intersection_dim(xu, i, ctx) for i in range(2, n + 1))
    return CentralizerReport(regular, inter)


def tangent_vectors(x: np.ndarray) -> list[np.ndarray]:
    """``[embed(x_i^(j-1)), x]`` for levels ``i <= n-1``.

    Level ``n`` is left out on purpose: its powers commute with ``x``.
    """
    return [commutator(m, x) for _, _, m in _powers(x, x.shape[0] - 1)]


def tangent_space_dim(x: np.ndarray, ctx: ToleranceContext = DEFAULT_TOL) -> int:
    """Rank of the tangent vectors; the same span is built from :func:`_level_bases`."""
    xu = _unit(x)
    vecs = [commutator(m, xu) for m in _level_bases(xu, x.shape[0] - 1, ctx)]
    if not vecs:
        return 0
    return rank(_stack(vecs, ctx), ctx, ref=1.0)


@dataclass(frozen=True)
class SregReport:
    via_differentials: bool
    via_centralizers: bool
    regular: tuple
    intersection_dims: tuple
    tangent_dim: int

    @property
    def strongly_regular(self) -> bool:
        return self.via_differentials

    def to_json(self) -> dict:
        return {
            "strongly_regular": self.strongly_regular,
            "via_differentials": self.via_differentials,
            "via_centralizers": self.via_centralizers,
            "cutoff_regular": list(self.regular),
            "intersection_dims": list(self.intersection_dims),
            "tangent_dim": self.tangent_dim,
        }


def strong_regularity(x: np.ndarray, ctx: ToleranceContext = DEFAULT_TOL
                      ) -> SregReport:
    """Run all three tests; raise :class:`ToleranceError` if they disagree."""
    n = x.shape[0]
    diff = sreg_differentials(x, ctx)
    cent = sreg_centralizers(x, ctx)
    tdim = tangent_space_dim(x, ctx)
    report = SregReport(diff, cent.passes, cent.regular,
                        cent.intersection_dims, tdim)
    if not (diff == cent.passes == (tdim == n * (n - 1) // 2)):
        raise ToleranceError(
            "strong-regularity tests disagree "
            f"(differentials={diff}, centralizers={cent.passes}, "
            f"tangent_dim={tdim}); adjust eps_rank")
    return report


def _pairing(a: np.ndarray, b: np.ndarray):
    """``tr(a @ b.T)`` without forming the product."""
    return np.sum(a * b.T)


def poisson_bracket_residual(x: np.ndarray, first: tuple[int, int],
                             second: tuple[int, int]):
    """Lie-Poisson bracket ``{tr(x_i^j), tr(x_k^l)}`` at ``x`` (always zero).

    With gradients ``A`` and ``B`` this is ``tr(x [A, B]) = tr([x, A] B)``.
    """
    n = x.shape[0]
    (i, j), (k, l) = first, second
    for a, b in (first, second):
        if not (1 <= b <= a <= n):
            raise IndexError(f"bad index pair ({a}, {b})")
    ga = embed(matpow(cutoff(x, i), j - 1), n) * j
    gb = embed(matpow(cutoff(x, k), l - 1), n) * l
    return _pairing(commutator(x, ga), gb)


def poisson_residuals(x: np.ndarray) -> dict:
    """:func:`poisson_bracket_residual` for every ordered pair of index pairs."""
    grads = {(i, j): m * j for i, j, m in _powers(x, x.shape[0])}
    moved = {key: commutator(x, g) for key, g in grads.items()}
    return {(a, b): _pairing(moved[a], grads[b]) for a in grads for b in grads}
