import math
import warnings

import numpy as np
import pytest

from reachplan import discrete as D
from reachplan.errors import DimensionMismatch, ValidationError


def random_params(rng, N=None):
    N = N or int(rng.integers(2, 12))
    w = rng.uniform(0.5, 1.5, N)
    return D.DiscreteArmParams(
        lengths=w / w.sum(),
        alpha=rng.uniform(0, math.pi / 2, N),
        eps=rng.uniform(0.01, 1, N),
        mu=rng.uniform(0, 1, N),
        nu=rng.uniform(0, 2, N),
        ell0=rng.uniform(0.05, 0.3),
    )


def test_straight_arm():
    p = D.table_params(8, alpha_mode="curvature")
    chain = D.forward_joints(p, np.zeros(8))
    assert np.allclose(chain.joints[:, 0], 0)
    assert np.allclose(chain.joints[:, 1], -np.arange(9) / 8)
    assert chain.tip == pytest.approx((0.0, -1.0))


def test_link_lengths_preserved(rng):
    for _ in range(20):
        p = random_params(rng)
        chain = D.forward_joints(p, rng.uniform(-1, 1, p.N))
        assert np.allclose(np.linalg.norm(np.diff(chain.joints, axis=0), axis=1), p.lengths)


def test_effective_angle_formula():
    p = D.DiscreteArmParams([0.5, 0.5], [1.0, 1.2], [0.1, 0.3], [1.0, 0.5])
    u = np.array([0.4, -0.7])
    expected = np.arcsin(np.array([1 / 1.1, 0.5 / 0.8]) * np.sin(u * np.array([1.0, 1.2])))
    assert np.allclose(D.effective_angles(p, u), expected)


def test_effective_angle_derivative_fd(rng):
    p = random_params(rng, 6)
    u = rng.uniform(-0.9, 0.9, 6)
    h = 1e-6
    fd = (D.effective_angles(p, u + h) - D.effective_angles(p, u - h)) / (2 * h)
    assert np.allclose(D.effective_angles_derivative(p, u), fd, atol=1e-8)


def test_mu_zero_disables_joint():
    p = D.DiscreteArmParams([0.5, 0.5], [1.0, 1.0], [0.1, 0.1], [0.0, 1.0])
    assert D.effective_angles(p, np.array([1.0, 0.0]))[0] == 0.0


def test_mirror_symmetry(rng):
    p = random_params(rng, 7)
    u = rng.uniform(-1, 1, 7)
    a = D.forward_joints(p, u).joints
    b = D.forward_joints(p, -u).joints
    assert np.allclose(a[:, 0], -b[:, 0])
    assert np.allclose(a[:, 1], b[:, 1])


def test_positive_control_turns_towards_plus_x():
    p = D.table_params(8, alpha_mode="curvature")
    assert D.forward_joints(p, np.full(8, 0.2)).tip[0] > 0


def test_ghost_joints():
    p = D.table_params(4, alpha_mode="curvature")
    chain = D.forward_joints(p, np.array([0.3, -0.2, 0.1, 0.4]))
    assert chain.ghost_pre == pytest.approx((0.0, p.ell0))
    assert chain.ghost_post == pytest.approx(2 * chain.joints[-1] - chain.joints[-2])
    assert chain.with_ghosts().shape == (7, 2)


def test_sample_chain_interpolates_links():
    p = D.table_params(8, alpha_mode="curvature")
    chain = D.forward_joints(p, np.linspace(-0.5, 0.5, 8))
    pts = D.sample_chain(chain, 13)
    assert pts.shape == (105, 2)
    assert np.allclose(pts[::13], chain.joints)
    step = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    assert np.allclose(step, 1 / 104)


def test_equilibrium_residual_vanishes(rng):
    for _ in range(50):
        p = random_params(rng)
        u = rng.uniform(-1, 1, p.N)
        chain = D.forward_joints(p, u)
        assert D.equilibrium_residual(p, u, chain, relative=True) <= 1e-8


def test_equilibrium_residual_detects_perturbation(rng):
    p = random_params(rng, 6)
    p = D.DiscreteArmParams(p.lengths, p.alpha, p.eps, np.maximum(p.mu, 0.3), p.nu, p.ell0)
    u = rng.uniform(-0.8, 0.8, 6)
    theta = D.headings(p, u) + 0.05 * rng.standard_normal(6)
    bent = D.chain_from_headings(p.lengths, theta, p.ell0)
    assert D.equilibrium_residual(p, u, bent, relative=True) > 1e-4


def test_potential_gradient_fd(rng):
    p = random_params(rng, 5)
    u = rng.uniform(-1, 1, 5)
    chain = D.forward_joints(p, u)
    # move joints off the constraint manifold to exercise every term
    joints = chain.joints + 0.01 * rng.standard_normal(chain.joints.shape)
    joints[0] = 0
    base = D.JointChain(joints, chain.ghost_pre, 2 * joints[-1] - joints[-2], chain.arclengths)
    g = D.potential_gradient(p, u, base)
    h = 1e-7
    for k in range(1, 5):  # the tip also moves the right ghost, so skip it
        for c in range(2):
            jp, jm = joints.copy(), joints.copy()
            jp[k, c] += h
            jm[k, c] -= h
            cp = D.JointChain(jp, chain.ghost_pre, base.ghost_post, chain.arclengths)
            cm = D.JointChain(jm, chain.ghost_pre, base.ghost_post, chain.arclengths)
            fd = (D.potential(p, u, cp) - D.potential(p, u, cm)) / (2 * h)
            assert g[k - 1, c] == pytest.approx(fd, rel=1e-5, abs=1e-8)


def test_table_params_profiles():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", D.AngleBoundWarning)
        p = D.table_params()
    s = np.arange(8) / 8
    assert p.N == 8
    assert np.allclose(p.lengths, 1 / 8)
    assert np.allclose(p.eps, 0.1 * (1 - 0.9 * s))
    assert np.allclose(p.mu, 1 - 0.9 * s)
    assert np.allclose(p.alpha, 2 * np.pi * (2 + s ** 2))
    c = D.table_params(alpha_mode="curvature")
    assert np.allclose(c.alpha, 2 * np.pi * (2 + s ** 2) / 8)


def test_angle_bound_warning():
    with pytest.warns(D.AngleBoundWarning):
        D.table_params()


def test_validation():
    with pytest.raises(ValidationError):
        D.DiscreteArmParams([0.5, 0.4], 1.0, 0.1, 1.0)
    with pytest.raises(ValidationError):
        D.DiscreteArmParams([0.5, 0.5], 1.0, 0.0, 1.0)
    with pytest.raises(ValidationError):
        D.DiscreteArmParams([0.5, 0.5], -1.0, 0.1, 1.0)
    with pytest.raises(ValueError):
        D.table_params(alpha_mode="degrees")
    p = D.table_params(4, alpha_mode="curvature")
    with pytest.raises(DimensionMismatch):
        D.forward_joints(p, np.zeros(3))


def test_params_are_read_only_and_comparable():
    p = D.table_params(4, alpha_mode="curvature")
    with pytest.raises(ValueError):
        p.eps[0] = 1.0
    assert p == D.table_params(4, alpha_mode="curvature")
    assert p != D.table_params(5, alpha_mode="curvature")
