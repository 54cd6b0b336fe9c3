from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from gzorbits import GaussRat, MonicPoly, Spectrum, ToleranceContext, exact
from gzorbits.errors import NotSplittingError, SchemaError
from gzorbits.scalars import (common_roots, lex_greater, lex_sorted,
                              poly_from_spectrum, scalar_from_json,
                              scalar_to_json, series_divide,
                              spectrum_from_poly, taylor_at)

fracs = st.fractions(min_value=-20, max_value=20, max_denominator=12)
gauss = st.builds(GaussRat, fracs, fracs)


def ep(*coeffs):
    return MonicPoly(tuple(exact(c) for c in coeffs))


def spec(*pairs):
    return Spectrum(tuple((exact(r), m) for r, m in pairs))


# --- GaussRat -------------------------------------------------------------

@given(gauss, gauss, gauss)
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert (a - b) + b == a
    if b:
        assert (a / b) * b == a


@given(gauss, gauss)
def test_matches_python_complex(a, b):
    prod = complex(a) * complex(b)
    assert abs(complex(a * b) - prod) <= 1e-9 * max(1.0, abs(prod))


def test_mixed_with_int_and_fraction():
    assert GaussRat(1, 2) * 2 == GaussRat(2, 4)
    assert 3 - GaussRat(1) == 2
    assert GaussRat(1) / Fraction(1, 3) == 3
    assert GaussRat(0, 1) ** 2 == -1
    assert GaussRat(0, 1) ** -1 == GaussRat(0, -1)


def test_zero_division():
    with pytest.raises(ZeroDivisionError):
        GaussRat(1) / GaussRat(0)


def test_hash_consistent_with_int():
    assert hash(GaussRat(3)) == hash(3)
    assert len({GaussRat(1, 1), GaussRat(1, 1), GaussRat(1)}) == 2


def test_exact_from_float_is_exact():
    assert exact(0.5) == GaussRat(Fraction(1, 2))
    assert exact(1 + 2j) == GaussRat(1, 2)


def test_tolerance_context_positive():
    with pytest.raises(ValueError):
        ToleranceContext(eps_rank=0)
    with pytest.raises(ValueError):
        ToleranceContext(eps_eq=-1e-9)


# --- lexicographic order ----------------------------------------------------

def test_lex_greater_examples():
    assert lex_greater(exact(2), exact(1))
    assert lex_greater(GaussRat(1, 2), GaussRat(1, 1))
    z = GaussRat(3, -1)
    assert not lex_greater(z, z)


def test_lex_greater_float_ties_on_real_part():
    assert lex_greater(1 + 2j, 1 + 1e-13 + 1j)


@given(st.lists(gauss, min_size=2, max_size=8, unique=True))
def test_lex_is_strict_total_order(values):
    ordered = lex_sorted(values)
    for a, b in zip(ordered, ordered[1:]):
        assert lex_greater(a, b) and not lex_greater(b, a)


def test_mixed_mode_rejected():
    with pytest.raises(TypeError):
        lex_greater(exact(1), 1.0)


# --- polynomials and spectra -----------------------------------------------

def test_poly_from_spectrum_examples():
    assert poly_from_spectrum(spec((1, 1))) == ep(-1)
    assert poly_from_spectrum(spec((2, 1), (-1, 1))) == ep(-2, -1)
    assert poly_from_spectrum(spec((0, 3))) == ep(0, 0, 0)


def test_spectrum_from_poly_examples():
    assert spectrum_from_poly(ep(-2, -1)) == spec((2, 1), (-1, 1))
    assert spectrum_from_poly(ep(0, 0, 0)) == spec((0, 3))
    assert spectrum_from_poly(ep(-18, -9, 2)) == spec((3, 1), (-2, 1), (-3, 1))


def test_spectrum_from_poly_gaussian_and_repeated():
    # (t - i)^2 (t + 1/2)
    s = Spectrum(((GaussRat(0, 1), 2), (exact(Fraction(-1, 2)), 1)))
    assert spectrum_from_poly(poly_from_spectrum(s)) == s


def test_spectrum_from_poly_float_clusters():
    p = MonicPoly(tuple(complex(c) for c in poly_from_spectrum(spec((1, 2), (-1, 1))).coeffs))
    s = spectrum_from_poly(p, ToleranceContext(eps_root=1e-6))
    assert s.mults == [2, 1]
    assert abs(s.roots[0] - 1) < 1e-6 and abs(s.roots[1] + 1) < 1e-9


def test_not_splitting():
    with pytest.raises(NotSplittingError):
        spectrum_from_poly(ep(-2, 0))


def test_spectrum_rejects_unsorted():
    with pytest.raises(ValueError):
        Spectrum(((exact(1), 1), (exact(2), 1)))


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=5, unique=True),
       st.data())
def test_roundtrip_exact(roots, data):
    mults = [data.draw(st.integers(1, 3)) for _ in roots]
    s = Spectrum.from_roots([(exact(r), m) for r, m in zip(roots, mults)])
    assert spectrum_from_poly(poly_from_spectrum(s)) == s


def test_common_roots_examples():
    assert common_roots(spec((1, 1)), spec((2, 1), (-1, 1))) == []
    assert common_roots(spec((0, 1)), spec((1, 1), (0, 1))) == [exact(0)]
    assert common_roots(spec((1, 1), (0, 1)), spec((2, 1), (1, 1), (0, 1))) == [exact(1), exact(0)]


def test_taylor_examples():
    assert taylor_at(ep(-1), exact(1), 1) == [0, 1]
    assert taylor_at(ep(-2, -1), exact(2), 2) == [0, 3, 1]
    assert taylor_at(ep(0, 0, 0), exact(0), 2) == [0, 0, 0]


@given(st.lists(fracs, min_size=1, max_size=6))
def test_taylor_at_zero_returns_coefficients(coeffs):
    p = MonicPoly(tuple(exact(c) for c in coeffs))
    assert taylor_at(p, exact(0), p.degree - 1) == list(p.coeffs)


@settings(max_examples=50)
@given(st.lists(fracs, min_size=1, max_size=5), fracs)
def test_taylor_matches_derivatives(coeffs, lam):
    # oracle: k-th derivative by repeated differentiation of the coefficient list
    p = MonicPoly(tuple(exact(c) for c in coeffs))
    full = list(p.full())
    out = taylor_at(p, exact(lam), p.degree)
    fact = 1
    for k in range(p.degree + 1):
        value = sum((c * exact(lam) ** e for e, c in enumerate(full)), start=exact(0))
        assert out[k] * fact == value
        full = [c * e for e, c in enumerate(full)][1:] or [exact(0)]
        fact *= k + 1


def test_series_divide():
    # 1 / (1 - u) = 1 + u + u^2 + ...
    assert series_divide([exact(1)], [exact(1), exact(-1)], 3) == [1, 1, 1, 1]


def test_scalar_json():
    assert scalar_to_json(GaussRat(Fraction(1, 2), -3)) == ["1/2", "-3"]
    assert scalar_to_json(1.5 + 2j) == [1.5, 2.0]
    assert scalar_from_json(["1/2", "-3"]) == GaussRat(Fraction(1, 2), -3)
    assert scalar_from_json([1.5, 2.0]) == 1.5 + 2j
    assert scalar_from_json(["1/2", "0"], exact_mode=False) == 0.5
    with pytest.raises(SchemaError):
        scalar_from_json([1, 2, 3])
    with pytest.raises(SchemaError):
        scalar_from_json(["x", "0"])


@settings(max_examples=50)
@given(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=5))
def test_roundtrip_float_well_separated(roots):
    assume(all(abs(a - b) > 0.1 for k, a in enumerate(roots) for b in roots[k + 1:]))
    p = poly_from_spectrum(Spectrum.from_roots([(complex(r), 1) for r in roots]))
    back = poly_from_spectrum(spectrum_from_poly(p))
    scale = max(1.0, p.max_abs())
    assert max(abs(a - b) for a, b in zip(p.coeffs, back.coeffs)) <= 1e-9 * scale


def test_common_roots_bounded():
    a, b = spec((1, 2), (0, 1)), spec((3, 1), (1, 1), (0, 2))
    assert len(common_roots(a, b)) <= min(len(a.roots), len(b.roots))
