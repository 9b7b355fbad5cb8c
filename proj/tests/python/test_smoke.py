import numpy as np
import pytest

import degrootlearn as dl


def test_version():
    assert dl.__version__ == "0.1.0"


def test_expected_adjacency_shape_and_symmetry():
    w = dl.expected_adjacency(20, 80, 2, 0.4, 0.2)
    assert w.shape == (100, 100)
    assert np.array_equal(w, w.T)
    assert w[0, 0] == pytest.approx(0.4)
    assert w[0, 99] == pytest.approx(0.2)


def test_sample_is_deterministic_binary():
    a = dl.sample_adjacency(10, 30, 2, 0.5, 0.2, seed=3)
    b = dl.sample_adjacency(10, 30, 2, 0.5, 0.2, seed=3)
    assert np.array_equal(a, b)
    assert set(np.unique(a)) <= {0.0, 1.0}
    assert not np.array_equal(a, dl.sample_adjacency(10, 30, 2, 0.5, 0.2, seed=4))


def test_learning_matrix_is_row_stochastic():
    w = dl.sample_adjacency(10, 30, 2, 0.5, 0.2, seed=3)
    T = dl.learning_matrix(w, 1.0)
    assert T.shape == w.shape
    assert np.allclose(T.sum(axis=1), 1.0, atol=1e-12)


def test_closed_form_matches_numeric():
    rep = dl.lambda2_closed_form(20, 80, 2, 0.4, 0.2, 0.0)
    w = dl.expected_adjacency(20, 80, 2, 0.4, 0.2)
    assert rep.case_id == 1
    assert rep.lambda2 == pytest.approx(dl.lambda2_numeric(w, 0.0), abs=1e-10)
    assert rep.abs_lambda2 == pytest.approx(abs(rep.lambda2))


def test_regime_classification():
    rc = dl.classify_regime(200, 800, 2, 0.4, 0.2)
    assert rc.case_id == 1
    assert rc.secondary_threshold is None
    assert rc.contains(rc.alpha_threshold + 1.0)
    assert not rc.contains(rc.alpha_threshold - 1.0)
    assert len(rc.decreasing_intervals) == 1


def test_consensus_and_convergence_distance():
    w = dl.expected_adjacency(20, 80, 2, 0.4, 0.2)
    cw = dl.consensus_weights(w, 1.0)
    assert cw.shape == (100,)
    assert cw.sum() == pytest.approx(1.0, abs=1e-12)
    lam = abs(dl.lambda2_numeric(w, 1.0))
    d = dl.convergence_distance(w, 1.0, 5, norm="d_weighted")
    assert d == pytest.approx(lam**5, abs=1e-10)


def test_worst_beliefs_are_unit_eigenvector():
    wb = dl.worst_initial_beliefs(200, 800, 2, 0.4, 0.2, 1.0)
    assert np.linalg.norm(wb.primary) == pytest.approx(1.0, abs=1e-9)
    w = dl.expected_adjacency(200, 800, 2, 0.4, 0.2)
    T = dl.learning_matrix(w, 1.0)
    resid = np.max(np.abs(T @ wb.primary - wb.lambda2 * wb.primary))
    assert resid < 1e-9


def test_iterate_beliefs_preserves_consensus():
    w = dl.expected_adjacency(10, 40, 2, 0.4, 0.2)
    ones = np.ones(50)
    assert np.allclose(dl.iterate_beliefs(w, 1.0, ones, 7), ones)


def test_asymmetric_input_rejected():
    w = dl.expected_adjacency(10, 40, 2, 0.4, 0.2)
    w[0, 1] += 0.1
    with pytest.raises(ValueError):
        dl.learning_matrix(w, 1.0)
