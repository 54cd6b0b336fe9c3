import itertools

import numpy as np
import pytest

from builders import (degenerate_spec, gauss, omega_x, spec_from_roots,
                      staircase, theta_spec, zero_spec)
from gzorbits import (FlowStep, GaussRat, GZSpec, MonicPoly, asmat, classify,
                      exact, flow_word, hessenberg_from_spec, phi,
                      strong_regularity, tangent_space_dim)
from gzorbits.census import (ChoiceVector, FiberClass, Permutation,
                             enumerate_orbits, fiber_class, level_choice,
                             lower_pattern, nil_pattern, nil_permutation,
                             orbit_count, orbit_representative)
from gzorbits.errors import (ClassificationError, NotStronglyRegularError,
                             SchemaError)
from gzorbits.matrices import (JordanFrame, centralizer_basis, cutoff,
                               inverse, jordanize_regular, rank)
from gzorbits.solution import LOWER, UPPER, BlockChoice

Z = exact(0)


def nil_choice(labels):
    return ChoiceVector(tuple(BlockChoice((Z,), (a,)) for a in labels))


def test_fiber_class_examples():
    assert fiber_class(phi(omega_x())) == FiberClass((0, 0), "Omega")
    assert fiber_class(zero_spec(4)) == FiberClass((1, 1, 1), "Degenerate")
    assert fiber_class(staircase()) == FiberClass((1, 2), "Degenerate")
    theta = spec_from_roots([[(1, 1)], [(0, 2)]])
    assert fiber_class(theta).tag == "ThetaOnly"
    assert fiber_class(theta).to_json() == {"j": [0], "class": "ThetaOnly"}


def test_j_counts_distinct_shared_roots():
    c = spec_from_roots([[(0, 1)], [(0, 2)], [(0, 2), (1, 1)]])
    assert fiber_class(c).j == (1, 1)


def test_orbit_count_examples():
    assert orbit_count(phi(omega_x())) == 1
    assert orbit_count(zero_spec(4)) == 8
    assert orbit_count(staircase()) == 8
    assert orbit_count(zero_spec(1)) == 1


def test_representative_nil4_example():
    x = orbit_representative(zero_spec(4), nil_choice("LLU"))
    assert x.tolist() == [[0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0]]
    assert classify(x) == nil_choice("LLU")


def test_representative_small_cases():
    assert orbit_representative(zero_spec(2), nil_choice("L")).tolist() == [[0, 0], [1, 0]]
    assert orbit_representative(zero_spec(2), nil_choice("U")).tolist() == [[0, 1], [0, 0]]
    c = GZSpec((MonicPoly((exact(-5),)),))
    assert orbit_representative(c, ChoiceVector(())).tolist() == [[5]]


def test_representative_omega_contract():
    c = phi(omega_x())
    v = ChoiceVector((BlockChoice(), BlockChoice()))
    x = orbit_representative(c, v)
    assert phi(x) == c
    assert strong_regularity(x).strongly_regular
    assert classify(x) == v
    assert classify(omega_x()) == v


def test_representative_rejects_bad_choice():
    with pytest.raises(SchemaError):
        orbit_representative(zero_spec(3), nil_choice("L"))
    bad = ChoiceVector((BlockChoice((exact(1),), (LOWER,)), BlockChoice((Z,), (LOWER,))))
    with pytest.raises(SchemaError):
        orbit_representative(zero_spec(3), bad)


def test_classify_rejects_non_strongly_regular():
    with pytest.raises(NotStronglyRegularError):
        classify(asmat([[0] * 3] * 3, True))


def test_level_choice_diagnoses_inconsistent_borders():
    # both border coordinates nonzero at a shared root cannot occur on the fibre
    x = asmat([[0, 1], [1, 0]], True)
    frame = jordanize_regular(cutoff(x, 1), phi(x).spectra()[0])
    with pytest.raises(ClassificationError):
        level_choice(x, 1, frame, phi(x).spectra()[0])
    with pytest.raises(ClassificationError):
        level_choice(asmat([[0, 0], [0, 0]], True), 1, frame, phi(x).spectra()[0])


def test_lower_triangular_nil_rep_is_all_lower():
    for n in range(2, 6):
        x = orbit_representative(zero_spec(n), nil_choice(LOWER * (n - 1)))
        assert {(r + 1, c + 1) for r in range(n) for c in range(n) if x[r, c] != 0} \
            <= lower_pattern(n)
        assert classify(x) == nil_choice(LOWER * (n - 1))


def test_nil_pattern_examples():
    assert nil_pattern("LLL") == lower_pattern(4)
    assert nil_pattern("LLU") == {(1, 4), (2, 1), (2, 4), (3, 1), (3, 2), (3, 4)}
    assert nil_pattern("UUU") == {(r, c) for c in range(1, 5) for r in range(1, c)}
    with pytest.raises(ValueError):
        nil_pattern("LX")


def test_nil_permutation_examples():
    p = nil_permutation("LLU")
    assert p.one_line == (4, 1, 2, 3)
    assert p.cycles() == [(1, 4, 3, 2)]
    assert nil_permutation("LLL") == Permutation.identity(4)
    assert nil_permutation("UU").cycles() == [(1, 3)]


def test_permutation_basics():
    with pytest.raises(ValueError):
        Permutation((1, 1, 2))
    p, q = Permutation((2, 3, 1)), Permutation((1, 3, 2))
    assert (p @ q).one_line == (2, 1, 3)
    assert (p @ Permutation.identity(3)) == p


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_nil_permutation_conjugates_lower_pattern(n):
    for labels in itertools.product("UL", repeat=n - 1):
        sigma = nil_permutation(labels)
        assert sigma.conjugate_positions(lower_pattern(n)) == nil_pattern(labels)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_nil_representatives_lie_in_pattern(n):
    for labels in itertools.product("UL", repeat=n - 1):
        x = orbit_representative(zero_spec(n), nil_choice(labels))
        support = {(r + 1, c + 1) for r in range(n) for c in range(n) if x[r, c] != 0}
        assert support <= nil_pattern(labels)
        assert classify(x) == nil_choice(labels)


def test_enumerate_examples():
    out = enumerate_orbits(zero_spec(3))
    assert [v.labels for v, _ in out] == [("U", "U"), ("U", "L"), ("L", "U"), ("L", "L")]
    assert len(enumerate_orbits(phi(omega_x()))) == 1
    stair = enumerate_orbits(staircase())
    assert len(stair) == 8
    assert len({classify(x) for _, x in stair}) == 8
    for v, x in stair:
        assert classify(x) == v


def _corpus():
    rng = np.random.default_rng(21)
    return [degenerate_spec(rng, n) for n in (2, 3, 3, 4, 4, 5)]


@pytest.mark.parametrize("c", _corpus(), ids=lambda c: f"n{c.n}")
def test_degenerate_round_trip(c):
    n = c.n
    for v, x in enumerate_orbits(c):
        assert phi(x) == c
        assert strong_regularity(x).strongly_regular
        assert tangent_space_dim(x) == n * (n - 1) // 2
        assert classify(x) == v


def test_classify_independent_of_jordanizer():
    rng = np.random.default_rng(22)
    c = staircase()
    spectra = c.spectra()
    for v, x in enumerate_orbits(c):
        for i in range(1, c.n):
            frame = jordanize_regular(cutoff(x, i), spectra[i - 1])
            # compose with an invertible centralizer element of the Jordan form
            basis = centralizer_basis(frame.jordan)
            while True:
                k = sum((gauss(rng) * b for b in basis), start=basis[0] * 0)
                if rank(k) == i:
                    break
            g = k @ frame.g
            other = JordanFrame(g, frame.jordan, frame.spectrum, inverse(g))
            assert level_choice(x, i, other, spectra[i]) == v.levels[i - 1]


def test_classify_constant_along_flows():
    rng = np.random.default_rng(23)
    c = degenerate_spec(rng, 4)
    spec_f = c.to_float()
    for v, x in enumerate_orbits(c):
        xf = x.astype(complex)
        size = max(1.0, float(np.max(np.abs(xf))))
        steps = []
        for _ in range(4):
            i = int(rng.integers(1, 4))
            j = int(rng.integers(1, i + 1))
            # keep the generator x_i^(j-1) from blowing the matrix up
            t = complex(*rng.uniform(-0.3, 0.3, 2)) / size ** (j - 1)
            steps.append(FlowStep(i, j, t))
        y = flow_word(xf, steps)
        assert classify(y, spec=spec_f) == classify(xf, spec=spec_f) == \
            ChoiceVector.from_json(v.to_json(), "float")


def test_exact_nilpotent_flows_preserve_classification():
    c = zero_spec(4)
    for v, x in enumerate_orbits(c):
        y = flow_word(x, [FlowStep(2, 2, GaussRat(1, 1)), FlowStep(3, 2, exact(2)),
                          FlowStep(3, 3, exact(-1))])
        assert phi(y) == c
        assert classify(y) == v


def test_theta_fibres_are_single_orbits():
    rng = np.random.default_rng(24)
    for n in (2, 3, 4):
        c = theta_spec(rng, n)
        assert fiber_class(c).tag == "ThetaOnly" and orbit_count(c) == 1
        h = hessenberg_from_spec(c)
        y = flow_word(h.astype(complex), [FlowStep(n - 1, 1, 0.2 + 0.1j)])
        v = classify(y, spec=c.to_float())
        assert all(len(lev) == 0 for lev in v.levels)


def test_choice_vector_json():
    v = nil_choice("LU")
    doc = v.to_json()
    assert doc == {"levels": [[{"root": ["0", "0"], "choice": "L"}],
                              [{"root": ["0", "0"], "choice": "U"}]]}
    assert ChoiceVector.from_json(doc) == v
    assert ChoiceVector.from_json(doc["levels"]) == v
    with pytest.raises(SchemaError):
        ChoiceVector.from_json({"levels": 3})
