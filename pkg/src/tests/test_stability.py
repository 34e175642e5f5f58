"""
稳定性证书测试
"""

import pytest
from sympy import QQ

from src.core.chow import Polarization
from src.core.stability import (LINE_BOUND, SEMISTABLE_CERTIFIED, VIOLATION, certify, region,
                                region_matches_displayed, window_bound, window_limit)
from src.utils.errors import PreconditionError


def test_prototype_region():
    semistable = region(Polarization.default(5), -15)
    assert (semistable.A, semistable.B) == (16, 15)
    assert semistable.coefficients() == (QQ(-16, 15), QQ(-1))
    assert semistable.contains(0, 0)
    assert not semistable.contains(0, -1)
    assert semistable.on_boundary(0, -1)
    assert semistable.frontier(0) == 0
    assert semistable.frontier(-1) == 1
    assert region(Polarization.default(5), -15, strict=False).contains(0, -1)


@pytest.mark.parametrize('n', [3, 4, 5, 7, 9])
def test_region_matches_closed_form(n):
    assert region_matches_displayed(n)


def test_region_rejects_mismatched_dimension():
    with pytest.raises(PreconditionError):
        region(Polarization.default(5), -15, n=7)


def test_window_bound():
    assert window_bound(5) == 15
    assert window_bound(7) == QQ(665, 64)
    with pytest.raises(PreconditionError):
        window_bound(4)


def test_window_limit_differs_from_closed_form():
    result = window_limit()
    assert not result['agrees']
    assert result['limit_value'] == pytest.approx(6.389, abs=1e-3)


@pytest.fixture(scope='module')
def prototype_certificate(prototype, prototype_solver):
    return certify(prototype.registry, prototype.E, prototype.L, prototype_solver)


def test_prototype_certificate(prototype_certificate):
    certificate = prototype_certificate
    assert certificate.verdict == SEMISTABLE_CERTIFIED
    assert len(certificate.cases) == 17
    assert all(case.zero for case in certificate.cases)
    assert certificate.witness is None


def test_prototype_boundary_blocks_stability(prototype_certificate):
    boundary = {(case.p, case.q): case for case in prototype_certificate.boundary}
    assert boundary[(0, -1)].h0.value == 1
    assert prototype_certificate.stable is False


def test_prototype_coverage(prototype_certificate):
    coverage = prototype_certificate.check_coverage(sample_size=300, window=60, seed=3)
    assert coverage['ok'], coverage['uncovered']
    certificate = prototype_certificate
    p = certificate.column_threshold + 4
    assert certificate.covers(p, certificate.region.frontier(p))[0] == LINE_BOUND
    assert certificate.covers(0, -5) is None


def test_certificate_serializes(prototype_certificate):
    data = prototype_certificate.to_dict()
    assert data['verdict'] == SEMISTABLE_CERTIFIED
    assert data['stable'] is False
    assert len(data['cases']) == 17
    assert data['region']['A'] == 16


def test_even_example_violation(even_example):
    certificate = certify(even_example.registry, even_example.E, even_example.L, even_example.solver())
    assert certificate.verdict == VIOLATION
    assert (certificate.witness.p, certificate.witness.q) == (-1, 1)
    assert certificate.witness.h0.lo >= 1
    assert certificate.stable is False
