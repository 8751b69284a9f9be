import json
import math

import numpy as np
import pytest

import latticeforge as lf


def test_catalog_invariants():
    e8 = lf.catalog("E8")
    minima, kissing = lf.successive_minima(e8)
    assert e8.volume == pytest.approx(1.0)
    assert minima[0] == pytest.approx(2.0)
    assert kissing == 240
    assert lf.is_well_rounded(lf.catalog("A2"))
    assert not lf.is_well_rounded(lf.Lattice(np.diag([1.0, 2.0])))
    assert lf.count_points(lf.catalog("A2"), 1.0) == 7


def test_lattice_from_numpy_and_cvp():
    z2 = lf.Lattice(np.eye(2))
    coords, vec = lf.closest_vector(z2, np.array([0.4, -0.7]))
    assert list(coords) == [0, -1]
    assert np.allclose(vec, [0.0, -1.0])
    with pytest.raises(lf.ConfigError):
        lf.Lattice(np.zeros((2, 2)))
    with pytest.raises(lf.CapacityError):
        lf.successive_minima(lf.catalog("Z8"), max_points=5)


def test_theta_and_flatness():
    assert lf.theta(lf.catalog("E8"), 0.3) == pytest.approx(lf.theta_closed_form("E8", 0.3), rel=1e-12)
    assert lf.jacobi_theta(3, 0.0) == 1.0
    eps = lf.flatness_factor(lf.catalog("Z1"), 1 / (2 * math.pi))
    assert eps == pytest.approx(2 * math.exp(-math.pi) + 2 * math.exp(-4 * math.pi), rel=1e-9)
    approx = lf.theta_approximation(lf.catalog("Z2"), 0.5)
    assert set(approx) == {"q", "exact", "main", "residual"}
    with pytest.raises(lf.DomainError):
        lf.theta(lf.catalog("Z2"), 1.5)


def test_codebook():
    book = lf.codebook(lf.catalog("A2"), 4 * np.eye(2, dtype=np.int64))
    assert book["index"] == 16
    assert len(book["leaders"]) == 16


def test_space_time_codes():
    assert lf.min_determinant(lf.alamouti_code(), "differences")[0] == pytest.approx(16.0)
    value, rank = lf.min_determinant(lf.golden_code())
    assert value == pytest.approx(0.2)
    assert rank == 2
    fd = lf.fast_decoding(lf.iterated_alamouti())
    assert fd["exponent"] == 5
    assert fd["reduction"] == pytest.approx(0.375)


def test_compute_and_forward():
    h = np.array([1.0, 0.0])
    a = np.array([1, 0], dtype=np.int64)
    assert lf.computation_rate(h, a, 100.0) == pytest.approx(0.5 * math.log2(101.0))
    assert lf.optimal_alpha(h, a, 100.0) == pytest.approx(100.0 / 101.0)
    coeffs, alpha, rate = lf.best_coefficients(np.array([0.3, -0.8]), 1e-12)
    assert list(coeffs) == [1, 0]
    c1 = lf.best_coefficients(np.array([1.2, 0.7]), 10.0, "candidate_sets", 1)[0]
    c2 = lf.best_coefficients(np.array([1.2, 0.7]), 10.0, "candidate_sets", 2)[0]
    assert (c1[0] * c2[1] - c1[1] * c2[0]) % 2 == 1


def test_wiretap_bound():
    b = lf.ecdp_bound(lf.alamouti_code(), 2 * np.eye(4, dtype=np.int64), 10.0)
    assert not b["divergent"]
    assert b["value"] > 1.0
    assert lf.ecdp_bound(lf.alamouti_code(), 2 * np.eye(4, dtype=np.int64), 0.0)["divergent"]


def test_cli_roundtrip():
    code, out, err = lf.cli("lattice", "info", "--name", "D4")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["kissing"] == 24
    assert doc["schema"] == 1
    assert lf.cli("lattice", "info", "--name", "nope")[0] == 2
