import logging
import math

import numpy as np
import pytest

from reachplan import soft as S
from reachplan.errors import DimensionMismatch, ValidationError

from conftest import matched_tips


def const_params(N, eps=0.1, mu=1.0, omega=2.0):
    one = lambda s: np.ones_like(s)
    return S.SoftArmParams.from_profiles(N, lambda s: eps * one(s), lambda s: mu * one(s), lambda s: omega * one(s))


def test_tapered_profile_bound_simplifies():
    p = S.table_params()
    s = p.nodes
    assert p.N == 100 and p.ds == pytest.approx(0.01)
    assert np.allclose(S.effective_curvature_bound(p), 2 * np.pi / 1.1 * (2 + s ** 2), rtol=1e-14)


def test_bound_limits():
    s = np.linspace(0, 1, 11)
    p = S.SoftArmParams(np.full(11, 0.1), np.zeros(11), np.full(11, 3.0))
    assert np.all(S.effective_curvature_bound(p) == 0)
    p = S.SoftArmParams(np.full(11, 1e-12), np.ones(11), 2 + s)
    assert np.allclose(S.effective_curvature_bound(p), 2 + s)


def test_straight_arm():
    p = S.table_params()
    c = S.forward_curve(p, np.zeros(101))
    assert np.allclose(c.points, np.column_stack([np.zeros(101), -p.nodes]))
    assert np.all(c.curvature == 0)
    assert c.points.shape == (101, 2)


def test_constant_curvature_arc():
    p = const_params(100)
    u = np.full(101, 0.5)
    c = 0.5 * 2.0 / 1.1
    tip = S.forward_curve(p, u).tip
    exact = np.array([(1 - math.cos(c)) / c, -math.sin(c) / c])
    assert np.linalg.norm(tip - exact) <= 10 * p.ds


def test_unit_speed(rng):
    p = S.table_params()
    u = rng.uniform(-1, 1, 101)
    pts = S.forward_curve(p, u).points
    assert np.allclose(np.linalg.norm(np.diff(pts, axis=0), axis=1), p.ds, rtol=1e-12)
    assert np.all(pts[0] == 0)


def test_mirror_symmetry(rng):
    p = S.table_params()
    u = rng.uniform(-1, 1, 101)
    a = S.forward_curve(p, u).points
    b = S.forward_curve(p, -u).points
    assert np.allclose(a[:, 0], -b[:, 0]) and np.allclose(a[:, 1], b[:, 1])


def test_curvature_band(rng):
    p = S.table_params()
    for u in (np.ones(101), -np.ones(101), rng.uniform(-1, 1, 101)):
        kappa, up, lo = S.curvature_profile(S.forward_curve(p, u), p)
        assert np.all(np.abs(kappa) <= up) and np.all(lo == -up)
        assert np.all(up <= p.omega)
    kappa, up, _ = S.curvature_profile(S.forward_curve(p, np.ones(101)), p)
    assert np.array_equal(kappa, up)


def test_quadrature_refinement():
    u_fn = lambda s: 0.6 * np.sin(3 * s)
    tips = []
    for N in (50, 100, 200, 400):
        p = S.SoftArmParams.from_profiles(N, lambda s: 0.1 * (1 - 0.9 * s), lambda s: 1 - 0.9 * s,
                                          lambda s: 2 * np.pi * (2 + s ** 2))
        tips.append(S.forward_curve(p, u_fn(p.nodes)).tip)
    diffs = [np.linalg.norm(tips[i + 1] - tips[i]) for i in range(3)]
    # first order: halving the step roughly halves the change
    for d, N in zip(diffs, (50, 100, 200)):
        assert d <= 5.0 / N
    assert diffs[2] / diffs[1] == pytest.approx(0.5, abs=0.1)


def test_discrete_same_grid_offset_is_one_node():
    # on the same grid the discrete arm turns one node earlier than the soft
    # left-endpoint rule, so N |tip difference| -> 2 |sin(theta(1) / 2)|
    for u0 in (0.05, 0.1, -0.08):
        N = 256
        tip_d, tip_s, theta1 = matched_tips(N, np.full(N, u0), refine=1)
        scaled = N * np.linalg.norm(tip_d - tip_s)
        assert scaled == pytest.approx(2 * abs(math.sin(theta1 / 2)), rel=0.02)


def test_discrete_converges_to_continuum():
    u = lambda N: np.where(np.arange(N) < N // 2, 0.5, -0.5)
    diffs = []
    for N in (8, 32, 128):
        tip_d, tip_s, _ = matched_tips(N, u(N))
        diffs.append(np.linalg.norm(tip_d - tip_s))
    assert diffs[0] > diffs[1] > diffs[2]
    assert diffs[2] * 128 <= 0.5


def test_mu_at_tip_is_logged(caplog):
    with caplog.at_level(logging.INFO, logger="reachplan.soft"):
        S.table_params(10)
    assert any("mu(1)" in r.getMessage() for r in caplog.records)


def test_validation():
    with pytest.raises(ValidationError):
        S.SoftArmParams(np.ones(3), np.ones(3), np.ones(4))
    with pytest.raises(ValidationError):
        S.SoftArmParams(np.zeros(3), np.ones(3), np.ones(3))
    with pytest.raises(DimensionMismatch):
        S.forward_curve(S.table_params(10), np.zeros(10))
