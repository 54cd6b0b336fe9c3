import itertools

import numpy as np
import pytest

from builders import exact_matrix, float_matrix, nsreg, omega_x
from gzorbits import (GZSpec, MonicPoly, Spectrum, ToleranceContext, asmat,
                      exact, phi, poisson_bracket_residual, poisson_residuals,
                      sreg_centralizers, sreg_differentials,
                      strong_regularity, tangent_space_dim)
from gzorbits.errors import SchemaError, ToleranceError
from gzorbits.matrices import (commutator, embed, inverse, matpow, rank,
                               zeros)
from gzorbits.moment import (gradient_basis, tangent_vectors,
                             trace_invariant)
from oracles import rank_sympy


def ep(*coeffs):
    return MonicPoly(tuple(exact(c) for c in coeffs))


def test_phi_examples():
    assert phi(zeros(3, True)).levels == (ep(0), ep(0, 0), ep(0, 0, 0))
    assert phi(omega_x()).levels == (ep(-1), ep(-2, -1), ep(-18, -9, 2))
    assert phi(asmat([[1, 0], [0, 2]], True)).levels == (ep(-1), ep(2, -3))


def test_phi_spectra_of_example():
    spectra = phi(omega_x()).spectra()
    assert [[r for r in s.roots] for s in spectra] == [[1], [2, -1], [3, -2, -3]]


def test_trace_invariant_examples():
    x = omega_x()
    assert trace_invariant(x, 1, 1) == 1
    assert trace_invariant(x, 2, 1) == 1
    assert trace_invariant(zeros(3, True), 3, 2) == 0
    with pytest.raises(IndexError):
        trace_invariant(x, 2, 3)


def test_gradient_basis_examples():
    g = gradient_basis(zeros(2, True))
    assert len(g) == 3
    assert g[0].tolist() == [[1, 0], [0, 0]]
    assert g[1].tolist() == [[1, 0], [0, 1]]
    assert g[2].tolist() == [[0, 0], [0, 0]]
    # diag(1, 2) = 2 I - E_11, so its three gradients only span a plane
    d = asmat([[1, 0], [0, 2]], True)
    assert rank_sympy(np.stack([m.ravel() for m in gradient_basis(d)]).tolist()) == 2
    h = asmat([[1, 1], [1, 2]], True)
    assert rank_sympy(np.stack([m.ravel() for m in gradient_basis(h)]).tolist()) == 3
    x = exact_matrix(np.random.default_rng(0), 4)
    order = [(i, j) for i in range(1, 5) for j in range(1, i + 1)]
    for (i, j), m in zip(order, gradient_basis(x)):
        if j == 1:
            assert np.array_equal(m, embed(matpow(x[:i, :i], 0), 4))


def test_sreg_examples():
    x = omega_x()
    assert sreg_differentials(x)
    cent = sreg_centralizers(x)
    assert cent.passes and all(cent.regular)
    assert tangent_space_dim(x) == 3
    z = zeros(3, True)
    assert not sreg_differentials(z)
    assert not sreg_centralizers(z).regular[1]
    assert tangent_space_dim(z) == 0


def test_nsreg_example_fails_condition_b_at_level_4():
    for mode in (True, False):
        x = nsreg(exact_mode=mode)
        assert not sreg_differentials(x)
        cent = sreg_centralizers(x)
        assert all(cent.regular)
        assert cent.intersection_dims[:2] == (0, 0) and cent.intersection_dims[2] > 0
        assert tangent_space_dim(x) < 6


def test_tangent_dim_matches_rank_oracle():
    x = nsreg(2, 3, 5)
    vecs = [v.ravel() for v in tangent_vectors(x)]
    assert tangent_space_dim(x) == rank_sympy(np.stack(vecs).tolist())


def test_top_level_brackets_vanish():
    # the level-n summand of the centralizer sum contributes nothing to the tangent space
    x = exact_matrix(np.random.default_rng(1), 4)
    for j in range(1, 5):
        assert not np.any(commutator(matpow(x, j - 1), x) != 0)


def test_report_agreement_and_json():
    rep = strong_regularity(omega_x())
    assert rep.strongly_regular
    doc = rep.to_json()
    assert doc["tangent_dim"] == 3 and doc["intersection_dims"] == [0, 0]


def test_disagreement_raises(monkeypatch):
    import gzorbits.moment as moment
    monkeypatch.setattr(moment, "tangent_space_dim", lambda x, ctx=None: 0)
    with pytest.raises(ToleranceError):
        strong_regularity(omega_x(False))


@pytest.mark.parametrize("seed", range(5))
def test_three_way_agreement_random(seed):
    rng = np.random.default_rng(seed)
    for n in range(1, 5):
        for x in (exact_matrix(rng, n, lo=-1, hi=1), float_matrix(rng, n)):
            d = sreg_differentials(x)
            c = sreg_centralizers(x).passes
            t = tangent_space_dim(x) == n * (n - 1) // 2
            assert d == c == t


def test_dropping_a_level_reduces_rank_by_its_size():
    x = omega_x()
    grads = gradient_basis(x)
    order = [(i, j) for i in range(1, 4) for j in range(1, i + 1)]
    for level in range(1, 4):
        kept = [g.ravel() for (i, _), g in zip(order, grads) if i != level]
        assert rank(np.stack(kept)) == 6 - level


def test_phi_only_top_level_conjugation_invariant():
    x = omega_x()
    g = asmat([[1, 0, 1], [0, 1, 0], [1, 0, 2]], True)
    y = g @ x @ inverse(g)
    assert phi(y).level(3) == phi(x).level(3)
    assert phi(y).levels != phi(x).levels


def test_poisson_residual_zero_exact():
    rng = np.random.default_rng(2)
    x = exact_matrix(rng, 4)
    pairs = [(i, j) for i in range(1, 5) for j in range(1, i + 1)]
    for a, b in itertools.product(pairs, repeat=2):
        assert poisson_bracket_residual(x, a, b) == 0
    assert poisson_bracket_residual(zeros(3, True), (2, 2), (3, 1)) == 0
    batch = poisson_residuals(x)
    assert set(batch) == set(itertools.product(pairs, repeat=2))
    assert all(v == 0 for v in batch.values())
    with pytest.raises(IndexError):
        poisson_bracket_residual(x, (2, 3), (1, 1))


def test_poisson_residual_matches_direct_trace():
    # off the identity the pairing must equal tr(x [A, B]) computed naively
    rng = np.random.default_rng(3)
    x = exact_matrix(rng, 3)
    a = embed(matpow(x[:2, :2], 1), 3) * 2
    b = embed(matpow(x, 2), 3) * 3
    direct = np.trace(x @ commutator(a, b))
    assert direct == 0 and poisson_bracket_residual(x, (2, 2), (3, 3)) == direct
    y = exact_matrix(rng, 3)
    from gzorbits.moment import _pairing
    assert _pairing(commutator(y, a), b) == np.trace(y @ commutator(a, b))


def test_gzspec_json_roundtrip():
    c = phi(omega_x())
    doc = c.to_json()
    assert doc["levels"][1]["roots"] == [{"value": ["2", "0"], "mult": 1},
                                         {"value": ["-1", "0"], "mult": 1}]
    assert GZSpec.from_json(doc) == c
    only_roots = {"levels": [{"roots": lev["roots"]} for lev in doc["levels"]]}
    assert GZSpec.from_json(only_roots) == c
    f = GZSpec.from_json(doc, "float")
    assert not f.exact and f.max_coeff_error(c.to_float()) == 0
    assert "roots" not in c.to_float().to_json()["levels"][0]


def test_gzspec_schema_errors():
    for bad in ({}, {"levels": [{"coeffs": [1, 2]}]}, {"levels": [{}]},
                {"n": 2, "levels": [{"coeffs": [["1", "0"]]}]},
                {"levels": [{"roots": [{"value": 1, "mult": 2}]}]}):
        with pytest.raises(SchemaError):
            GZSpec.from_json(bad)


def test_gzspec_from_spectra_keeps_roots():
    s = [Spectrum(((exact(0), 1),)), Spectrum(((exact(0), 2),))]
    c = GZSpec.from_spectra(s)
    assert c.spectra() == s and c.level(2) == ep(0, 0)


def test_float_level_bases_span_the_power_family():
    from gzorbits.moment import _level_bases
    rng = np.random.default_rng(7)
    x = float_matrix(rng, 4)
    bases = _level_bases(x, 4, ToleranceContext())
    powers = gradient_basis(x)
    assert len(bases) == 10
    assert rank(np.stack([b.ravel() for b in bases])) == 10
    both = np.stack([m.ravel() for m in bases + powers])
    assert rank(both) == 10


def test_float_derogatory_cutoff_detected():
    x = asmat([[1, 0, 0], [0, 1, 0], [1, 1, 2]], False)
    assert not sreg_differentials(x)
    assert not sreg_centralizers(x).regular[1]
    assert tangent_space_dim(x) < 3
    assert not strong_regularity(x).strongly_regular


def test_float_verdicts_match_exact_on_nonnormal_matrices():
    # large-entry Hessenberg matrices with small spectra are badly non-normal
    from builders import theta_spec
    from gzorbits import hessenberg_from_spec
    rng = np.random.default_rng(8)
    for n in (3, 4, 5):
        h = hessenberg_from_spec(theta_spec(rng, n))
        assert strong_regularity(h).strongly_regular
        assert strong_regularity(h.astype(complex)).strongly_regular
    x = nsreg(7, 11, 13)
    assert not strong_regularity(x.astype(complex)).strongly_regular
