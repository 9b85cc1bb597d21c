import math

import numpy as np
import pytest

import ivpoly


def test_star_scalar_and_diagonal():
    assert ivpoly.star(np.array([[3.0]]), np.array([[2.0]]))[0, 0] == pytest.approx(6.0)
    x = np.array([[2.0, 1.0], [1.0, 2.0]])
    y = np.diag([1.0, 4.0])
    np.testing.assert_allclose(ivpoly.star(x, y), [[2.0, 2.0], [2.0, 8.0]], atol=1e-14)


def test_increment_inverts_star():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(3, 3))
    prev = a @ a.T + np.eye(3)
    b = rng.normal(size=(3, 3))
    x = b @ b.T + np.eye(3)
    np.testing.assert_allclose(ivpoly.increment(prev, ivpoly.star(x, prev)), x, rtol=1e-10)


def test_special_functions():
    assert ivpoly.multigamma_ln(2, 1.0) == pytest.approx(math.log(math.pi))
    assert ivpoly.multidigamma(1, 2.0) == pytest.approx(1.0 - 0.5772156649015329)


def test_samplers_are_seeded():
    a = ivpoly.sample_wishart(2, 3.0, 5)
    b = ivpoly.sample_wishart(2, 3.0, "5")
    np.testing.assert_array_equal(a, b)
    assert np.all(np.linalg.eigvalsh(ivpoly.sample_inv_wishart(3, 2.5, "1:2.3")) > 0)
    with pytest.raises(ivpoly.ParameterError):
        ivpoly.sample_wishart(3, 0.5, 1)


def test_one_step_update_scalar():
    u, v = ivpoly.one_step_update(*(np.array([[t]]) for t in (2.0, 3.0, 0.5, 1.0)))
    assert u[0, 0] == pytest.approx(3.5)
    assert v[0, 0] == pytest.approx(12.0 / 7.0)


def test_identity_disorder_quadrant_counts_paths():
    z = ivpoly.quadrant_delta(1, 2.0, 0.0, 3, 3, 0, identity_disorder=True)
    assert z[3][3][0, 0] == pytest.approx(6.0)


def test_reports():
    reports = ivpoly.algebraic_checks(2, 200, 3)
    assert len(reports) == 5
    assert all(r["passed"] for r in reports)
    assert ivpoly.martingale_check(1, 3.0, 4, 500, 4)["passed"]


def test_cli_round_trip():
    code, text = ivpoly.run_cli(["quadrant", "--boundary", "delta", "--n", "2", "--m", "2",
                                 "--force-identity-disorder"])
    assert code == 0
    assert text.splitlines()[0] == "n,m,x1_1"
    with pytest.raises(ivpoly.ConfigError):
        ivpoly.run_cli(["quadrant", "--d", "0"])
