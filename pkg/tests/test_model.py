import json
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qes_singular.errors import DomainError
from qes_singular.model import (
    AnsatzExponents,
    Channel,
    PotentialParams,
    PrefactorPoly,
    QesSolution,
    SolverConfig,
    WavefunctionSample,
    centrifugal,
    dumps,
    effective_L,
)


@pytest.mark.parametrize("dim,l,expected", [(3, 0, 0), (2, 1, Fraction(1, 2)), (5, 2, 3)])
def test_effective_l_examples(dim, l, expected):
    assert effective_L(dim, l) == expected


@pytest.mark.parametrize("dim,l", [(1, 0), (3, -1)])
def test_effective_l_domain(dim, l):
    with pytest.raises(DomainError):
        effective_L(dim, l)


@given(st.integers(2, 40), st.integers(1, 40))
def test_effective_l_interdimensional(dim, l):
    assert effective_L(dim, l) == effective_L(dim + 2, l - 1)


def test_centrifugal_half_integer():
    assert centrifugal(Fraction(-1, 2)) == -0.25
    assert centrifugal(Fraction(1, 2)) == 0.75


@pytest.mark.parametrize("a,c", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0), (math.nan, 1.0)])
def test_params_require_positive(a, c):
    with pytest.raises(DomainError):
        PotentialParams(a, 1.0, c)


def test_potential_value():
    assert PotentialParams(1.0, 1.0, 1.0).potential(1.0) == 3.0


def test_exponents_need_negative_beta():
    with pytest.raises(DomainError):
        AnsatzExponents(-1.0, 0.5, 2.0)


def test_prefactor_k2_identity_enforced():
    with pytest.raises(DomainError):
        PrefactorPoly(2, (1.0, 2.0), 3.0)
    p = PrefactorPoly(2, (6.0, 2.0), 3.0)
    assert p(1.0) == 1.0 + 2.0 + 6.0


def test_prefactor_nodes():
    p = PrefactorPoly(1, (-4.0,))
    assert p(2.0) == 0.0
    assert p.positive_nodes() == [2.0]
    assert p.positive_nodes(upper=1.5) == []
    assert PrefactorPoly(1, (4.0,)).positive_nodes() == []


def test_solution_energy_checked():
    params = PotentialParams(1.0, 1.0, 1.0)
    exp = AnsatzExponents(-1.0, -1.0, 2.0)
    QesSolution(params, Channel(3, 0, 0), exp, PrefactorPoly(0), 5.0)
    with pytest.raises(DomainError):
        QesSolution(params, Channel(3, 0, 0), exp, PrefactorPoly(0), 5.1)
    with pytest.raises(DomainError):
        QesSolution(params, Channel(3, 0, 1), exp, PrefactorPoly(0), 9.0)
    with pytest.raises(DomainError):
        QesSolution(params, Channel(3, 0, 0), exp, PrefactorPoly(0), 9.0, box_radius=-1.0)


def test_sample_requires_positive_q():
    with pytest.raises(DomainError):
        WavefunctionSample(0.0, 1.0)


def test_config_validation():
    SolverConfig()
    with pytest.raises(DomainError):
        SolverConfig(grid_points=99)
    with pytest.raises(DomainError):
        SolverConfig(energy_tol=1.0)
    with pytest.raises(DomainError):
        SolverConfig.from_dict({"grid_pts": 200})


def test_json_round_trips():
    params = PotentialParams(1.0, 2.5, 3.0)
    assert PotentialParams.from_dict(json.loads(dumps(params))) == params
    ch = Channel(2, 3, 1)
    d = json.loads(dumps(ch))
    assert d["effective_l"] == 2.5
    assert Channel.from_dict(d) == ch
    cfg = SolverConfig(grid_points=5000, energy_tol=1e-7)
    assert SolverConfig.from_dict(json.loads(dumps(cfg))) == cfg
    p = PrefactorPoly(2, (6.0, 2.0), 3.0)
    assert PrefactorPoly.from_dict(json.loads(dumps(p))) == p


def test_dumps_deterministic_15_digits():
    text = dumps({"x": 1.0 / 3.0, "y": math.inf})
    assert text == dumps({"x": 1.0 / 3.0, "y": math.inf})
    d = json.loads(text)
    assert d["x"] == float(f"{1.0 / 3.0:.15g}")
    assert d["y"] is None
