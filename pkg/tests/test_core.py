import math

import numpy as np
import pytest

from sketchlab.core import (
    check_semimetric,
    chords,
    euclidean,
    normalized_chords,
    normalized_vectors,
    psi2_norm_estimate,
)


def as_row_set(arr):
    return {tuple(row) for row in np.round(arr, 12)}


def test_chords_collinear_pair():
    P = np.array([[1.0, 0.0], [2.0, 0.0]])
    assert as_row_set(chords(P)) == {(1.0, 0.0), (-1.0, 0.0)}


def test_chords_value_dedupe_and_zero_skip():
    # Duplicate points produce zero chords, which are skipped; repeated
    # differences collapse to one element.
    P = np.array([[0.0], [1.0], [2.0], [1.0]])
    assert as_row_set(chords(P)) == {(1.0,), (-1.0,), (2.0,), (-2.0,)}


def test_chords_negation_symmetry():
    rng = np.random.default_rng(5)
    for _ in range(20):
        P = rng.standard_normal((rng.integers(2, 12), rng.integers(1, 6)))
        C = chords(P)
        assert as_row_set(C) == as_row_set(-C)


def test_chords_singleton_raises():
    with pytest.raises(ValueError):
        chords(np.array([[1.0, 2.0]]))


def test_chords_all_identical_raises():
    with pytest.raises(ValueError, match="identical"):
        chords(np.array([[1.0, 2.0], [1.0, 2.0], [1.0, 2.0]]))


def test_normalized_chords_collapse_directions():
    P = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    assert as_row_set(normalized_chords(P)) == {(1.0, 0.0), (-1.0, 0.0)}


def test_normalized_chords_unit_norm():
    rng = np.random.default_rng(6)
    P = rng.standard_normal((15, 4))
    NC = normalized_chords(P)
    assert np.max(np.abs(np.linalg.norm(NC, axis=1) - 1.0)) <= 1e-12


def test_normalized_vectors_drops_zero_and_dedupes():
    P = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [0.0, 3.0]])
    assert as_row_set(normalized_vectors(P)) == {(1.0, 0.0), (0.0, 1.0)}


def test_normalized_vectors_all_zero_raises():
    with pytest.raises(ValueError, match="zero"):
        normalized_vectors(np.zeros((3, 2)))


def test_psi2_constant_magnitude_exact():
    # All samples of magnitude c: mean exp(c^2/C^2) = 2 at C = c / sqrt(ln 2).
    x = np.array([1.0, -1.0, 1.0, -1.0])
    assert psi2_norm_estimate(x) == pytest.approx(1.0 / math.sqrt(math.log(2.0)), rel=1e-10)
    assert psi2_norm_estimate(3.0 * x) == pytest.approx(3.0 / math.sqrt(math.log(2.0)), rel=1e-10)


def test_psi2_all_zero():
    assert psi2_norm_estimate(np.zeros(10)) == 0.0


def test_psi2_gaussian_monte_carlo():
    # Exact value for a standard gaussian solves 1/sqrt(1 - 2/C^2) = 2,
    # i.e. C = sqrt(8/3).
    rng = np.random.default_rng(2024)
    est = psi2_norm_estimate(rng.standard_normal(200000))
    assert est == pytest.approx(math.sqrt(8.0 / 3.0), abs=0.05)


def test_psi2_scale_equivariance():
    rng = np.random.default_rng(7)
    x = rng.standard_normal(400)
    base = psi2_norm_estimate(x)
    for c in (1e-6, 0.37, math.pi, 1e8):
        assert psi2_norm_estimate(c * x) == pytest.approx(c * base, rel=1e-9)


def test_psi2_rejects_non_finite():
    with pytest.raises(ValueError):
        psi2_norm_estimate(np.array([1.0, np.inf]))


def test_check_semimetric_accepts_euclidean():
    rng = np.random.default_rng(8)
    check_semimetric(euclidean, rng.standard_normal((30, 3)), trials=300, seed=1)


def test_check_semimetric_rejects_asymmetric():
    def bad(x, y):
        return float(np.sum(np.maximum(x - y, 0.0)))

    rng = np.random.default_rng(9)
    with pytest.raises(ValueError):
        check_semimetric(bad, rng.standard_normal((20, 3)), trials=300, seed=1)
