import csv
import math

import numpy as np
import pytest

from qes_singular import closed_form as cf
from qes_singular import scan
from qes_singular import verify as vf
from qes_singular._kernels import sturm_count
from qes_singular.errors import DomainError
from qes_singular.model import (
    AnsatzExponents,
    Channel,
    PotentialParams,
    PrefactorPoly,
    QesSolution,
    SolverConfig,
    WavefunctionSample,
)

P = PotentialParams
GROUND = cf.build_solution(P(1, 1, 1), Channel(3, 0, 0))


@pytest.fixture(scope="module")
def confined_k1():
    return scan.refine_b(1, 2.265309, 1, 3, 0, 1, True, -1)


def test_shoot_ground_state():
    assert vf.shoot_eigenvalue(P(1, 1, 1), 0, 0) == pytest.approx(5.0, rel=1e-6)


def test_shoot_confined_published_value():
    from qes_singular import confined as cn

    params = P(1, 2.265309, 1)
    R2, _ = cn.k1_radius_candidates(params, 0, -1.0)[0]
    assert vf.shoot_eigenvalue(params, 0, 1, math.sqrt(R2)) == pytest.approx(14.265309, abs=1e-4)


def test_shoot_and_fd_agree_without_closed_form():
    params = P(1, 0, 1)
    e_s = vf.shoot_eigenvalue(params, 0, 0)
    e_f = vf.fd_eigenvalue(params, 0, 0, None)
    assert e_s > 0
    assert abs(e_s - e_f) <= 1e-5


def test_fd_ground_state():
    assert vf.fd_eigenvalue(P(1, 1, 1), 0, 0, None) == pytest.approx(5.0, abs=1e-5)


def test_sturm_count_positive_operator():
    # confined, all-positive potential on the grid: nothing below zero
    params = P(1, 1, 1)
    q = np.linspace(0.2, 2.0, 502)
    h = q[1] - q[0]
    inner = q[1:-1]
    assert np.all(params.potential(inner) > 0)
    diag = 2.0 / h**2 + params.potential(inner)
    off2 = np.full(inner.size - 1, 1.0 / h**4)
    assert sturm_count(diag, off2, 0.0) == 0
    ev = np.linalg.eigvalsh(np.diag(diag) - np.diag(np.full(inner.size - 1, 1 / h**2), 1) - np.diag(np.full(inner.size - 1, 1 / h**2), -1))
    x = 0.5 * (ev[3] + ev[4])
    assert sturm_count(diag, off2, x) == 4
    assert vf.tridiagonal_eigenvalue(diag, -np.full(inner.size - 1, 1 / h**2), 2) == pytest.approx(ev[2], rel=1e-12)


def test_residual_exact_and_perturbed():
    assert vf.ode_residual_norm(GROUND) <= 1e-8
    assert vf.ode_residual_norm(GROUND, energy=5.1) >= 1e-3


def test_residual_confined_k1(confined_k1):
    assert vf.ode_residual_norm(confined_k1) <= 1e-8


def test_count_nodes():
    samples = vf.sample_wavefunction(GROUND, 200)
    assert vf.count_nodes(samples[1:-1]) == 0
    exp = AnsatzExponents(-1.0, -1.0, 2.0)
    k1 = QesSolution(P(1, 1, 1), Channel(3, 0, 1), exp, PrefactorPoly(1, (-4.0,)), 9.0)
    qs = np.linspace(1.5, 2.5, 11)
    assert vf.count_nodes([WavefunctionSample(q, v) for q, v in zip(qs, cf.eval_wavefunction(k1, qs))]) == 1
    assert vf.count_nodes([WavefunctionSample(q, 1.0) for q in (1, 2, 3)]) == 0
    assert vf.count_nodes([]) == 0


def test_verify_solution_reports():
    for method in ("shooting", "fd_matrix"):
        rep = vf.verify_solution(GROUND, method=method)
        assert rep.status == "pass" and rep.node_count == 0 and rep.method == method
        assert rep.rel_error == abs(rep.e_closed - rep.e_numeric) / (1 + abs(rep.e_closed))


def test_verify_confined(confined_k1):
    rep = vf.verify_solution(confined_k1)
    assert rep.status == "pass" and rep.node_count == 1


def test_numeric_report_skipped():
    rep = vf.numeric_report(P(1, 0, 1), Channel(3, 0, 0))
    assert rep.status == "skipped" and rep.e_numeric > 0


@pytest.mark.parametrize("dim", [3, 2])
def test_degeneracy(dim):
    rep = vf.degeneracy_check(P(1, 1, 1), dim, 1, 0)
    assert rep.status == "pass" and rep.rel_error <= 1e-6


def test_degeneracy_needs_l():
    with pytest.raises(DomainError):
        vf.degeneracy_check(P(1, 1, 1), 3, 0, 0)


def test_dirichlet_monotone():
    params = P(1, 0.5, 1)
    energies = [vf.shoot_eigenvalue(params, 0, 0, R) for R in (0.8, 1.0, 1.5, 3.0, 7.0)]
    assert all(e2 <= e1 for e1, e2 in zip(energies, energies[1:]))
    assert energies[-1] == pytest.approx(vf.shoot_eigenvalue(params, 0, 0), rel=1e-6)


def test_samples_csv(tmp_path):
    path = tmp_path / "s.csv"
    vf.write_samples_csv(vf.sample_wavefunction(GROUND, 5), path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["q", "value"] and len(rows) == 6


def test_config_grid_validation():
    with pytest.raises(DomainError):
        vf.shoot_eigenvalue(P(1, 1, 1), 0, 0, box=-1.0)
    with pytest.raises(DomainError):
        SolverConfig(grid_points=10)
