import math

import numpy as np
import pytest

from reachplan import geometry as G

cw = G.clockwise_degrees

# Obstacle settings of the six tests
OBSTACLES = {
    1: G.EMPTY,
    2: G.Circle((0.1, -0.35), 0.08),
    3: G.Union((G.Circle((0.1, -0.35), 0.08), G.Circle((0.3, -0.35), 0.05))),
    4: G.Square((0.2, -0.35), 0.2, cw(25)),
    5: G.Ellipse((0.2, -0.35), 0.18, 0.08, cw(25)),
    6: G.Union((G.Square((0.1, -0.35), 0.16, cw(45)), G.Ellipse((0.3, -0.35), 0.09, 0.06, cw(45)))),
}


def boundary_samples(ob, n=20000):
    """Dense points on the boundary of a primitive obstacle (brute-force oracle)."""
    t = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
    if isinstance(ob, G.Circle):
        pts = ob.radius * np.column_stack([np.cos(t), np.sin(t)])
        rot = 0.0
    elif isinstance(ob, G.Ellipse):
        pts = np.column_stack([ob.a * np.cos(t), ob.b * np.sin(t)])
        rot = ob.rotation
    elif isinstance(ob, G.Square):
        h = ob.side / 2
        s = np.linspace(-h, h, n // 4, endpoint=False)
        pts = np.vstack([np.column_stack([s, -h + 0 * s]), np.column_stack([h + 0 * s, s]),
                         np.column_stack([-s, h + 0 * s]), np.column_stack([-h + 0 * s, -s])])
        rot = ob.rotation
    else:
        raise TypeError(ob)
    c, s_ = math.cos(rot), math.sin(rot)
    R = np.array([[c, -s_], [s_, c]])
    return pts @ R.T + np.asarray(ob.center)


def brute_depth(q, ob):
    """Penetration from boundary samples and an independent inside test."""
    q = np.atleast_2d(q)
    out = np.zeros(len(q))
    for m in G.members(ob):
        bd = boundary_samples(m)
        d = np.min(np.hypot(q[:, None, 0] - bd[None, :, 0], q[:, None, 1] - bd[None, :, 1]), axis=1)
        out = np.maximum(out, np.where(G.contains(q, m), d, 0.0))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# ---------------------------------------------------------------- discrete vs soft

def _eps(s):
    return 0.1 * (1 - 0.9 * s)


def _mu(s):
    return 1 - 0.9 * s


def _omega(s):
    return 2 * np.pi * (2 + s ** 2)


def matched_tips(N, u_links, refine=None):
    """Tips of a discrete N-link arm and of the soft arm driven by the same
    piecewise-constant control (one value per link).

    Matching: alpha_k = omega(s_k) ell_k and the same eps, mu profiles.  The
    soft arm uses ``refine`` nodes per link (default: enough for a continuum
    reference, 8192 nodes in total).
    """
    from reachplan import discrete, soft

    s = np.arange(N) / N
    ell = np.full(N, 1.0 / N)
    arm = discrete.DiscreteArmParams(ell, _omega(s) * ell, _eps(s), _mu(s))
    u = np.asarray(u_links, dtype=float)
    tip_d = discrete.forward_joints(arm, u).tip
    M = refine or max(1, 8192 // N)
    sp = soft.SoftArmParams.from_profiles(N * M, _eps, _mu, _omega)
    us = np.append(np.repeat(u, M), u[-1])
    curve = soft.forward_curve(sp, us)
    return tip_d, curve.tip, curve.heading[-1]


# ---------------------------------------------------------------- acceptance summary

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
