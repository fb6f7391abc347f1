import math

import numpy as np
import pytest

import qelab


def test_graph_and_spectrum():
    g = qelab.random_regular(200, 2, seed=3)
    assert g.n == 200 and g.q == 2 and g.simple
    a = g.adjacency()
    assert a.shape == (200, 200)
    assert np.allclose(a.sum(axis=1), 1.0)
    sd = qelab.eig(g)
    assert np.all(np.diff(sd.eigenvalues) >= 0)
    assert abs(sd.eigenvalues[-1] - 1.0) < 1e-10
    v = sd.eigenvectors
    assert np.allclose(a @ v, v * sd.eigenvalues, atol=1e-10)
    assert 0 < qelab.spectral_gap(sd) < 1
    assert qelab.ks_distance(sd) < 0.1


def test_spherical_recursion():
    q = 3
    for s in np.linspace(0.1, qelab.tau(q) - 0.1, 7):
        lam = qelab.lambda_from_s(s, q)
        assert qelab.spherical(s, 0, q) == pytest.approx(1.0)
        assert qelab.spherical(s, 1, q) == pytest.approx(lam)
        for k in range(1, 10):
            lhs = q * qelab.spherical(s, k + 1, q) + qelab.spherical(s, k - 1, q)
            assert lhs == pytest.approx((q + 1) * lam * qelab.spherical(s, k, q), abs=1e-12)


def test_variance_against_numpy():
    g = qelab.random_regular(300, 2, seed=8)
    sd = qelab.eig(g)
    w = qelab.window(sd, 0.5 * qelab.tau(2), 0.5)
    assert len(w) > 0
    a = qelab.make_observable(g, "rademacher", 4)
    assert a.sum() == 0 and np.max(np.abs(a)) <= 1
    psi = sd.eigenvectors[:, w.indices]
    expected = np.mean(((psi**2).T @ a) ** 2)
    assert qelab.quantum_variance(sd, w, a) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ValueError):
        qelab.quantum_variance(sd, w, a + 0.1)


def test_nonbacktracking_prediction():
    g = qelab.random_regular(40, 2, seed=1)
    sd = qelab.eig(g)
    actual = qelab.msharp_eigenvalues(g)
    predicted = qelab.predicted_msharp_spectrum(sd, g)
    assert len(actual) == len(predicted) == 40 * 3
    assert qelab.multiset_distance(actual, predicted) < 1e-6


def test_walk_counts_row_sums():
    g = qelab.random_regular(50, 3, seed=2)
    for k in range(1, 5):
        c = qelab.walk_counts(g, k)
        assert np.all(c.sum(axis=1) == 4 * 3 ** (k - 1))


def test_suite_round_trip():
    cfg = "[graph]\nq = 2\nn = 60\nseeds = 1, 2\n[window]\ns0 = 0.5\n"
    out = qelab.run_suite(cfg, ["cutoff.policy=eiir_log"])
    assert len(out["rows"]) == 2
    assert all(r["status"] == "ok" for r in out["rows"])
    assert out["csv"] == qelab.run_suite(cfg, ["cutoff.policy=eiir_log"])["csv"]
    assert qelab.run_suite("", ["graph.n="])["rows"] == []
    with pytest.raises(ValueError):
        qelab.run_suite("", ["graph.colour=red"])


def test_errors():
    with pytest.raises(ValueError):
        qelab.random_regular(5, 2, seed=1)
    assert math.isfinite(qelab.plancherel_density(1.0, 2))
