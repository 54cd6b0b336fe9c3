"""Scalars, monic polynomials and spectra.

Two arithmetic modes share one contract:

* exact mode uses :class:`GaussRat`, complex numbers whose real and
  imaginary parts are :class:`fractions.Fraction`;
* float mode uses Python/numpy ``complex`` values, and every zero or
  equality decision goes through a :class:`ToleranceContext`.

Polynomials are stored as ascending coefficient lists.  A monic
polynomial of degree ``d`` keeps only ``c_0 .. c_{d-1}``; the leading
one is implicit.
"""
from __future__ import annotations

import functools
import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import ModeError, NotSplittingError, SchemaError

__all__ = [
    "GaussRat",
    "ToleranceContext",
    "DEFAULT_TOL",
    "MonicPoly",
    "Spectrum",
    "exact",
    "is_exact_scalar",
    "lex_greater",
    "lex_sorted",
    "poly_from_spectrum",
    "spectrum_from_poly",
    "common_roots",
    "taylor_at",
    "series_divide",
    "scalar_to_json",
    "scalar_from_json",
]


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, (float, np.floating)):
        return Fraction(float(v))
    raise TypeError(f"cannot build a rational from {v!r}")


class GaussRat:
    """Gaussian rational ``re + i*im`` with exact arithmetic."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRat is immutable")

    @staticmethod
    def _coerce(other):
        if type(other) is GaussRat:
            return other
        if isinstance(other, (int, Fraction, np.integer)):
            return GaussRat(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not o.re and not o.im:
            return self
        if not self.re and not self.im:
            return o
        return _raw(self.re + o.re, self.im + o.im if o.im or self.im else _FZERO)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _raw(self.re - o.re, self.im - o.im if o.im or self.im else _FZERO)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not self.im and not o.im:
            if not self.re or not o.re:
                return _raw(_FZERO, _FZERO)
            return _raw(self.re * o.re, _FZERO)
        return _raw(self.re * o.re - self.im * o.im,
                    self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        d = o.abs2()
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        if not self.im and not o.im:
            return _raw(self.re / o.re, _FZERO)
        return _raw((self.re * o.re + self.im * o.im) / d,
                    (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, k):
        if not isinstance(k, (int, np.integer)):
            return NotImplemented
        k = int(k)
        if k < 0:
            return (GaussRat(1) / self) ** (-k)
        out, base = GaussRat(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __neg__(self):
        return _raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def conjugate(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __repr__(self):
        return f"GaussRat({str(self.re)!r}, {str(self.im)!r})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


_FZERO = Fraction(0)
_setattr = object.__setattr__


def _raw(re: Fraction, im: Fraction) -> GaussRat:
    # skips argument conversion; both parts must already be Fractions
    out = object.__new__(GaussRat)
    _setattr(out, "re", re)
    _setattr(out, "im", im)
    return out


def is_exact_scalar(v) -> bool:
    return isinstance(v, GaussRat)


def exact(v) -> GaussRat:
    """Convert ``v`` to a :class:`GaussRat` (floats convert exactly)."""
    if isinstance(v, GaussRat):
        return v
    if isinstance(v, (complex, np.complexfloating)):
        return GaussRat(Fraction(float(v.real)), Fraction(float(v.imag)))
    return GaussRat(_frac(v))


@dataclass(frozen=True)
class ToleranceContext:
    """Thresholds for float-mode decisions; ignored in exact mode.

    All three are relative: ``eps_rank`` to the largest singular value,
    ``eps_root`` and ``eps_eq`` to the scale of the data being compared.
    """

    eps_rank: float = 1e-9
    eps_root: float = 1e-8
    eps_eq: float = 1e-9

    def __post_init__(self):
        for name in ("eps_rank", "eps_root", "eps_eq"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_TOL = ToleranceContext()


def _mode_of(values: Iterable) -> bool | None:
    """True for exact, False for float, None for no information."""
    mode = None
    for v in values:
        if isinstance(v, (int, np.integer)):
            continue
        e = isinstance(v, (GaussRat, Fraction))
        if mode is None:
            mode = e
        elif mode != e:
            raise ModeError("mixed exact and float scalars")
    return mode


def _is_zero(v, ctx: ToleranceContext, scale: float = 1.0) -> bool:
    if isinstance(v, (GaussRat, Fraction, int)):
        return v == 0
    return abs(v) <= ctx.eps_eq * max(scale, 1.0)


# ---------------------------------------------------------------------------
# lexicographic order on C

def lex_greater(a, b, ctx: ToleranceContext = DEFAULT_TOL) -> bool:
    """Lexicographic order: real parts first, imaginary parts break ties."""
    ea, eb = isinstance(a, GaussRat), isinstance(b, GaussRat)
    if ea != eb and not (isinstance(a, int) or isinstance(b, int)):
        raise ModeError("lex_greater needs both scalars in the same mode")
    if ea or eb:
        a, b = exact(a), exact(b)
        if a.re != b.re:
            return a.re > b.re
        return a.im > b.im
    a, b = complex(a), complex(b)
    scale = max(abs(a), abs(b), 1.0)
    if abs(a.real - b.real) > ctx.eps_eq * scale:
        return a.real > b.real
    if abs(a.imag - b.imag) > ctx.eps_eq * scale:
        return a.imag > b.imag
    return False


def lex_sorted(values: Iterable, ctx: ToleranceContext = DEFAULT_TOL,
               key=None) -> list:
    """Sort in decreasing lexicographic order."""
    key = key or (lambda v: v)

    def cmp(u, v):
        ku, kv = key(u), key(v)
        if lex_greater(ku, kv, ctx):
            return -1
        if lex_greater(kv, ku, ctx):
            return 1
        return 0

    return sorted(values, key=functools.cmp_to_key(cmp))


# ---------------------------------------------------------------------------
# dense polynomial helpers (ascending coefficient lists)

def _one(exact_mode: bool):
    return GaussRat(1) if exact_mode else 1.0 + 0j


def _zero(exact_mode: bool):
    return GaussRat(0) if exact_mode else 0j


def poly_mul(a: Sequence, b: Sequence) -> list:
    out = [a[0] * 0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] = out[i + j] + ai * bj
    return out


def poly_add(a: Sequence, b: Sequence) -> list:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, bi in enumerate(b):
        out[i] = out[i] + bi
    return out


def poly_scale(a: Sequence, s) -> list:
    return [s * ai for ai in a]


def linear_power(lam, m: int, exact_mode: bool) -> list:
    """Coefficients of ``(t - lam)**m``."""
    out = [_one(exact_mode)]
    for _ in range(m):
        out = poly_mul(out, [-lam, _one(exact_mode)])
    return out


def poly_eval(a: Sequence, x):
    acc = a[-1] * 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def poly_divmod(num: Sequence, den: Sequence) -> tuple[list, list]:
    """Long division; ``den`` must have a nonzero leading coefficient."""
    num = list(num)
    dl = len(den) - 1
    lead = den[-1]
    if len(num) <= dl:
        return [num[0] * 0], num
    quot = [num[0] * 0] * (len(num) - dl)
    for k in range(len(num) - 1, dl - 1, -1):
        q = num[k] / lead
        quot[k - dl] = q
        if q == 0:
            continue
        for j in range(dl + 1):
            num[k - dl + j] = num[k - dl + j] - q * den[j]
    rem = num[:dl] if dl > 0 else [num[0] * 0]
    return quot, rem


def _trim(a: list) -> list:
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _poly_gcd_exact(a: Sequence, b: Sequence) -> list:
    a, b = _trim(a), _trim(b)
    while not (len(b) == 1 and b[0] == 0):
        _, r = poly_divmod(a, b)
        a, b = b, _trim(r)
    lead = a[-1]
    return [c / lead for c in a]


def series_divide(num: Sequence, den: Sequence, order: int) -> list:
    """Power series ``num / den`` truncated to ``order + 1`` terms.

    ``den[0]`` must be invertible.
    """
    num = list(num) + [num[0] * 0] * (order + 1)
    den = list(den) + [den[0] * 0] * (order + 1)
    out = []
    for k in range(order + 1):
        acc = num[k]
        for j in range(k):
            acc = acc - out[j] * den[k - j]
        out.append(acc / den[0])
    return out


# ---------------------------------------------------------------------------
# monic polynomials and spectra

@dataclass(frozen=True)
class MonicPoly:
    """``t**d + c_{d-1} t**(d-1) + ... + c_0`` stored as ``(c_0, ..., c_{d-1})``."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if len(self.coeffs) < 1:
            raise ValueError("a monic polynomial must have degree >= 1")
        _mode_of(self.coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @property
    def exact(self) -> bool:
        return _mode_of(self.coeffs) is not False

    def full(self) -> list:
        """Ascending coefficients including the leading one."""
        return list(self.coeffs) + [_one(self.exact)]

    @classmethod
    def from_full(cls, coeffs: Sequence) -> "MonicPoly":
        lead = coeffs[-1]
        if lead == 0:
            raise ValueError("leading coefficient vanishes")
        if lead != 1:
            coeffs = [c / lead for c in coeffs]
        return cls(tuple(coeffs[:-1]))

    def __call__(self, x):
        return poly_eval(self.full(), x)

    def to_exact(self) -> "MonicPoly":
        return MonicPoly(tuple(exact(c) for c in self.coeffs))

    def to_float(self) -> "MonicPoly":
        return MonicPoly(tuple(complex(c) for c in self.coeffs))

    def max_abs(self) -> float:
        return max(abs(complex(c)) for c in self.coeffs)

    def __str__(self):
        terms = []
        for k, c in reversed(list(enumerate(self.full()))):
            if c == 0:
                continue
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            if c == 1 and k:
                terms.append(mono)
            else:
                terms.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(terms) or "0"


@dataclass(frozen=True)
class Spectrum:
    """Distinct roots with multiplicities, decreasing in lexicographic order."""

    pairs: tuple

    def __post_init__(self):
        pairs = tuple((r, int(m)) for r, m in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if not pairs:
            raise ValueError("empty spectrum")
        for _, m in pairs:
            if m < 1:
                raise ValueError("multiplicities must be positive")
        roots = [r for r, _ in pairs]
        _mode_of(roots)
        for a, b in zip(roots, roots[1:]):
            if not lex_greater(a, b):
                raise ValueError("spectrum roots must be strictly decreasing")

    @classmethod
    def from_roots(cls, pairs: Iterable, ctx: ToleranceContext = DEFAULT_TOL
                   ) -> "Spectrum":
        """Sort and merge ``(root, mult)`` pairs (or bare roots)."""
        merged: list[list] = []
        for item in pairs:
            r, m = item if isinstance(item, tuple) else (item, 1)
            for entry in merged:
                if _same_root(entry[0], r, ctx):
                    entry[1] += m
                    break
            else:
                merged.append([r, m])
        return cls(tuple((r, m) for r, m in
                         lex_sorted(merged, ctx, key=lambda e: e[0])))

    @property
    def roots(self) -> list:
        return [r for r, _ in self.pairs]

    @property
    def mults(self) -> list[int]:
        return [m for _, m in self.pairs]

    @property
    def degree(self) -> int:
        return sum(self.mults)

    @property
    def exact(self) -> bool:
        return _mode_of(self.roots) is not False

    def __len__(self):
        return len(self.pairs)


def _same_root(a, b, ctx: ToleranceContext) -> bool:
    if isinstance(a, GaussRat) or isinstance(b, GaussRat):
        return exact(a) == exact(b)
    a, b = complex(a), complex(b)
    return abs(a - b) <= ctx.eps_root * max(abs(a), abs(b), 1.0)


def poly_from_spectrum(s: Spectrum) -> MonicPoly:
    """Expand ``prod (t - lam)**mult``."""
    exact_mode = s.exact
    out = [_one(exact_mode)]
    for lam, m in s.pairs:
        out = poly_mul(out, linear_power(lam if exact_mode else complex(lam),
                                         m, exact_mode))
    return MonicPoly.from_full(out)


def _rationalize(z: complex, max_den: int) -> GaussRat:
    return GaussRat(Fraction(z.real).limit_denominator(max_den),
                    Fraction(z.imag).limit_denominator(max_den))


def spectrum_from_poly(p: MonicPoly, ctx: ToleranceContext = DEFAULT_TOL
                       ) -> Spectrum:
    """Roots of ``p`` with multiplicities.

    Float mode clusters the companion-matrix eigenvalues (single linkage
    at radius ``eps_root``) and represents each cluster by its mean.
    Exact mode extracts Gaussian-rational linear factors from the
    square-free part and raises :class:`NotSplittingError` when some
    root is not Gaussian rational.
    """
    if p.exact:
        return _exact_spectrum(p.to_exact())
    return _float_spectrum(p, ctx)


def _float_spectrum(p: MonicPoly, ctx: ToleranceContext) -> Spectrum:
    roots = np.roots(np.array(p.full()[::-1], dtype=complex))
    if len(roots) < p.degree:
        # np.roots strips trailing zero coefficients, i.e. roots at zero
        roots = np.concatenate([roots, np.zeros(p.degree - len(roots))])
    scale = max(1.0, float(np.max(np.abs(roots))))
    radius = ctx.eps_root * scale
    parent = list(range(len(roots)))

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    for a in range(len(roots)):
        for b in range(a + 1, len(roots)):
            if abs(roots[a] - roots[b]) <= radius:
                parent[find(a)] = find(b)
    clusters: dict[int, list] = {}
    for k, r in enumerate(roots):
        clusters.setdefault(find(k), []).append(r)
    pairs = [(complex(np.mean(v)), len(v)) for v in clusters.values()]
    return Spectrum(tuple(lex_sorted(pairs, ctx, key=lambda e: e[0])))


def _exact_spectrum(p: MonicPoly) -> Spectrum:
    full = p.full()
    deriv = [k * c for k, c in enumerate(full)][1:]
    g = _poly_gcd_exact(full, deriv)
    squarefree, _ = poly_divmod(full, g)
    lead = squarefree[-1]
    squarefree = [c / lead for c in squarefree]
    approx = np.roots(np.array([complex(c) for c in squarefree[::-1]]))
    if len(approx) < len(squarefree) - 1:
        approx = np.concatenate(
            [approx, np.zeros(len(squarefree) - 1 - len(approx))])
    found = []
    for z in approx:
        for max_den in (1, 10**3, 10**6, 10**9):
            cand = _rationalize(complex(z), max_den)
            if poly_eval(squarefree, cand) == 0:
                break
        else:
            raise NotSplittingError(
                f"{p} does not split over the Gaussian rationals; "
                "supply the spectrum directly")
        if cand not in found:
            found.append(cand)
    pairs = []
    for r in found:
        m, rest = 0, full
        while True:
            q, rem = poly_divmod(rest, [-r, GaussRat(1)])
            if rem[0] != 0:
                break
            m, rest = m + 1, q
        pairs.append((r, m))
    if sum(m for _, m in pairs) != p.degree:
        raise NotSplittingError(f"could not factor {p} into linear factors")
    return Spectrum(tuple(lex_sorted(pairs, key=lambda e: e[0])))


def common_roots(s1: Spectrum, s2: Spectrum,
                 ctx: ToleranceContext = DEFAULT_TOL) -> list:
    """Distinct roots shared by two spectra, decreasing lexicographically."""
    return [r for r in s1.roots if any(_same_root(r, q, ctx) for q in s2.roots)]


def taylor_at(p: MonicPoly | Sequence, lam, m: int) -> list:
    """Coefficients of ``(t - lam)**k`` for ``k = 0..m`` in the expansion of ``p``.

    Repeated synthetic division, so coefficient ``k`` equals
    ``p^{(k)}(lam) / k!`` exactly in exact mode.
    """
    coeffs = p.full() if isinstance(p, MonicPoly) else list(p)
    if m > len(coeffs) - 1:
        raise ValueError("order exceeds the degree")
    if isinstance(coeffs[0], GaussRat):
        lam = exact(lam)
    work = list(coeffs)
    out = []
    for _ in range(m + 1):
        # Horner: quotient and remainder of division by (t - lam)
        acc = work[-1] * 0
        quot = []
        for c in reversed(work):
            acc = acc * lam + c
            quot.append(acc)
        out.append(quot[-1])
        work = quot[:-1][::-1] or [work[0] * 0]
    return out


# ---------------------------------------------------------------------------
# JSON

def scalar_to_json(v):
    if isinstance(v, GaussRat):
        return [str(v.re), str(v.im)]
    if isinstance(v, Fraction):
        return [str(v), "0"]
    if isinstance(v, (int, np.integer)):
        return [str(int(v)), "0"]
    z = complex(v)
    return [z.real, z.imag]


def scalar_from_json(obj, exact_mode: bool | None = None):
    """Parse ``[re, im]`` (numbers or ``"p/q"`` strings) or a bare number."""
    if isinstance(obj, (list, tuple)):
        if len(obj) != 2:
            raise SchemaError(f"scalar must be a [re, im] pair, got {obj!r}")
        re, im = obj
    else:
        re, im = obj, 0
    for part in (re, im):
        if isinstance(part, bool) or not isinstance(part, (str, numbers.Real)):
            raise SchemaError(f"bad scalar component {part!r}")
    if exact_mode is None:
        exact_mode = all(isinstance(p, (str, int)) for p in (re, im))
    try:
        if exact_mode:
            return GaussRat(_frac(re), _frac(im))
        return complex(float(Fraction(re) if isinstance(re, str) else re),
                       float(Fraction(im) if isinstance(im, str) else im))
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"bad scalar {obj!r}: {exc}") from None
