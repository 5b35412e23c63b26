"""Smoke tests for the python bindings (run against the locally built module)."""

import math

import _qvl as qvl


def test_metric_and_norm():
    u = qvl.QPoint([[0.0], [3.0]])
    v = qvl.QPoint([[1.0], [2.0]])
    assert math.isclose(qvl.metric(u, v), math.sqrt(2.0), rel_tol=1e-12)
    assert math.isclose(qvl.norm(qvl.QPoint([[1.0, 0.0], [-1.0, 0.0]])), math.sqrt(2.0), rel_tol=1e-12)
    assert qvl.metric(u, u) == 0.0


def test_point_operations():
    p = qvl.QPoint([[0.0, 0.0], [2.0, 4.0]])
    assert qvl.barycenter(p) == [1.0, 2.0]
    assert qvl.diameter(p) > 0
    assert math.isinf(qvl.splitting(qvl.QPoint([[1.0], [1.0]])))

    log_beta, beta = qvl.beta(1.0 / 16.0, 2)
    assert math.isclose(log_beta, 9.0 * math.log(1.0 / 48.0), rel_tol=1e-12)
    assert beta > 0

    sep = qvl.separate(qvl.QPoint([[0.0], [1e-40], [1.0]]), 1.0 / 16.0)
    assert math.isfinite(qvl.splitting(sep))

    parts = qvl.split_value(qvl.QPoint([[0.1], [-0.1], [10.2]]), qvl.QPoint([[0.0], [0.0], [10.0]]))
    assert [part.q for part in parts] == [2, 1]


def test_retraction_cases():
    v = qvl.QPoint([[0.0], [10.0]])
    inside = qvl.QPoint([[0.2], [10.1]])
    far = qvl.QPoint([[4.0], [6.0]])
    assert qvl.retraction(v, 1.0, inside) == inside
    assert qvl.retraction(v, 1.0, far) == v


def test_gap_certificate():
    cert = qvl.find_gap(3, 2.0, 0.0, 1.0)
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    assert math.isclose(cert["alpha0"], golden, rel_tol=1e-6)
    assert cert["eta0"] > 0


def test_branch_pair_energy_and_frequency():
    grid = qvl.grid_polar_disc(48, 96)
    pair = qvl.generate("branch-pair", '{"k": 1}', grid)
    assert math.isclose(qvl.energy(pair, 2.0), 2.0 * math.pi, rel_tol=0.05)

    prof = qvl.frequency_profile(pair, [0.0, 0.0], [0.3, 0.4, 0.5, 0.6, 0.7])
    for entry in prof["entries"]:
        assert abs(entry["N"] - 0.5) < 0.05


def test_solver_recovers_harmonic():
    grid = qvl.grid_polar_disc(32, 64)
    exact = qvl.generate("harmonic", '{"degree": 1}', grid)
    solved, info = qvl.solve_dirichlet(grid, exact, '{"max_sweeps": 6000, "relaxation": 1.85}')
    assert info["converged"]
    worst = max(qvl.metric(solved.value(i), exact.value(i)) for i in range(grid.node_count))
    assert worst <= 5e-3
    assert math.isclose(qvl.energy(solved, 2.0), math.pi, rel_tol=0.02)


def test_field_round_trip(tmp_path):
    grid = qvl.grid_polar_disc(8, 16)
    field = qvl.generate("harmonic", '{"degree": 2}', grid)
    path = str(tmp_path / "field.json")
    qvl.save_field(field, path)
    back = qvl.load_field(path)
    assert back.q == field.q
    assert all(back.value(i) == field.value(i) for i in range(grid.node_count))


def test_errors_are_pythonic():
    try:
        qvl.metric(qvl.QPoint([[0.0]]), qvl.QPoint([[0.0], [1.0]]))
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError for a shape mismatch")
