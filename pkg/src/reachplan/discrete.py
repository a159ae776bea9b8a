"""Equilibrium kinematics of the N-link hyper-redundant manipulator.

The arm hangs from the anchor ``q_0 = (0, 0)``; a heading of 0 points straight
down, along ``(0, -1)``, and positive headings turn towards ``+x``.  A ghost
joint above the anchor fixes the reference direction of the first link.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ValidationError



class AngleBoundWarning(UserWarning):
    """An angle bound lies outside [0, pi/2], where the closed-form
    equilibrium was derived."""


@dataclass(frozen=True, eq=False)
class DiscreteArmParams:
    """Link lengths and per-joint weights, joint k = 0..N-1.

    ``alpha[k]`` bounds the relative angle at joint k, ``eps`` is the bending
    stiffness, ``mu`` the control weight (0 disables the joint), ``nu`` the
    angle-constraint weight and ``ell0`` the length of the ghost link above the
    anchor.
    """

    lengths: np.ndarray
    alpha: np.ndarray
    eps: np.ndarray
    mu: np.ndarray
    nu: np.ndarray = None
    ell0: float = None

    def __post_init__(self):
        lengths = np.asarray(self.lengths, dtype=float).ravel()
        n = lengths.size
        if n < 1:
            raise ValidationError("arm needs at least one link")
        arrays = {"lengths": lengths}
        for name in ("alpha", "eps", "mu", "nu"):
            raw = getattr(self, name)
            if raw is None and name == "nu":
                raw = np.ones(n)
            arr = np.broadcast_to(np.asarray(raw, dtype=float), (n,)).copy()
            arrays[name] = arr
        if np.any(lengths <= 0):
            raise ValidationError("link lengths must be positive")
        if not math.isclose(lengths.sum(), 1.0, rel_tol=0, abs_tol=1e-9):
            raise ValidationError(f"link lengths must sum to 1, got {lengths.sum():.12g}")
        if np.any(arrays["eps"] <= 0):
            raise ValidationError("bending weights eps must be positive")
        if np.any(arrays["mu"] < 0) or np.any(arrays["nu"] < 0):
            raise ValidationError("weights mu and nu must be non-negative")
        if np.any(arrays["alpha"] < 0):
            raise ValidationError("angle bounds alpha must be non-negative")
        ell0 = float(lengths[0] if self.ell0 is None else self.ell0)
        if not ell0 > 0:
            raise ValidationError("ghost link length ell0 must be positive")
        for name, arr in arrays.items():
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "ell0", ell0)
        if np.any(arrays["alpha"] > math.pi / 2):
            warnings.warn(
                "angle bound alpha_k > pi/2: the closed-form equilibrium is only "
                "guaranteed for alpha_k in [0, pi/2]",
                AngleBoundWarning,
                stacklevel=3,
            )

    @property
    def N(self) -> int:
        return self.lengths.size

    @property
    def ratio(self) -> np.ndarray:
        """Control authority mu / (eps + mu) per joint."""
        return self.mu / (self.eps + self.mu)

    def joint_arclengths(self) -> np.ndarray:
        """Arclength s_k of joints 0..N."""
        return np.concatenate([[0.0], np.cumsum(self.lengths)])

    def __eq__(self, other):
        if not isinstance(other, DiscreteArmParams):
            return NotImplemented
        return self.ell0 == other.ell0 and all(
            np.array_equal(getattr(self, n), getattr(other, n))
            for n in ("lengths", "alpha", "eps", "mu", "nu")
        )


def table_params(N: int = 8, alpha_mode: str = "table") -> DiscreteArmParams:
    """Uniform arm with the tapered weight profiles used in the experiments.

    ``alpha_mode="table"`` uses alpha_k = 2 pi (2 + s_k^2) verbatim;
    ``"curvature"`` reads that profile as a curvature bound and uses
    alpha_k = 2 pi (2 + s_k^2) * ell_k.
    """
    ell = np.full(N, 1.0 / N)
    s = np.arange(N) / N
    omega = 2 * np.pi * (2 + s ** 2)
    if alpha_mode == "table":
        alpha = omega
    elif alpha_mode == "curvature":
        alpha = omega * ell
    else:
        raise ValueError(f"unknown alpha_mode {alpha_mode!r}")
    return DiscreteArmParams(ell, alpha, 0.1 * (1 - 0.9 * s), 1 - 0.9 * s)


@dataclass(frozen=True, eq=False)
class JointChain:
    joints: np.ndarray  # (N+1, 2), joints[0] is the anchor
    ghost_pre: np.ndarray  # q_{-1}
    ghost_post: np.ndarray  # q_{N+1}
    arclengths: np.ndarray  # (N+1,)

    @property
    def tip(self) -> np.ndarray:
        return self.joints[-1]

    def with_ghosts(self) -> np.ndarray:
        """Joints q_{-1}..q_{N+1} stacked, shape (N+3, 2)."""
        return np.vstack([self.ghost_pre, self.joints, self.ghost_post])


def _check_controls(params: DiscreteArmParams, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (params.N,):
        raise DimensionMismatch(f"expected {params.N} controls, got shape {u.shape}")
    return u


def effective_angles(params: DiscreteArmParams, u) -> np.ndarray:
    """Equilibrium relative angle at each joint: arcsin(mu/(eps+mu) sin(u alpha))."""
    u = _check_controls(params, u)
    arg = params.ratio * np.sin(u * params.alpha)
    return np.arcsin(np.clip(arg, -1.0, 1.0))


def effective_angles_derivative(params: DiscreteArmParams, u) -> np.ndarray:
    """d(alpha_bar_k)/d(u_k)."""
    u = _check_controls(params, u)
    r = params.ratio
    arg = r * np.sin(u * params.alpha)
    denom = np.sqrt(np.maximum(1.0 - arg * arg, np.finfo(float).tiny))
    return r * params.alpha * np.cos(u * params.alpha) / denom


def headings(params: DiscreteArmParams, u) -> np.ndarray:
    """Heading theta_j of link j = 1..N (cumulative effective angles)."""
    return np.cumsum(effective_angles(params, u))


def chain_from_headings(lengths: np.ndarray, theta: np.ndarray, ell0: float) -> JointChain:
    steps = lengths[:, None] * np.column_stack([np.sin(theta), -np.cos(theta)])
    joints = np.vstack([[0.0, 0.0], np.cumsum(steps, axis=0)])
    ghost_pre = np.array([0.0, ell0])
    ghost_post = 2.0 * joints[-1] - joints[-2]
    s = np.concatenate([[0.0], np.cumsum(lengths)])
    return JointChain(joints, ghost_pre, ghost_post, s)


def forward_joints(params: DiscreteArmParams, u) -> JointChain:
    """Joint positions at equilibrium for controls ``u``."""
    return chain_from_headings(params.lengths, headings(params, u), params.ell0)


def sample_chain(chain: JointChain, m: int) -> np.ndarray:
    """``m`` evenly spaced samples per link plus the tip: shape (m N + 1, 2)."""
    if m < 1:
        raise ValueError("need at least one sample per link")
    q = chain.joints
    lam = np.arange(m) / m
    start = q[:-1, None, :]
    end = q[1:, None, :]
    pts = ((1 - lam)[None, :, None] * start + lam[None, :, None] * end).reshape(-1, 2)
    return np.vstack([pts, q[-1]])


def _cross(v, w):
    return v[..., 0] * w[..., 1] - v[..., 1] * w[..., 0]


def potential(params: DiscreteArmParams, u, chain: JointChain) -> float:
    """Total elastic potential sum_k G_k + B_k/2 + H_k/2 over joints k = 0..N-1."""
    u = _check_controls(params, u)
    q = chain.with_ghosts()
    v = q[1:-2] - q[:-3]  # link entering joint k (k = 0..N-1)
    w = q[2:-1] - q[1:-2]  # link leaving joint k
    lens = np.concatenate([[params.ell0], params.lengths])
    ll = lens[1:] * lens[:-1]
    b = _cross(v, w)
    g = np.maximum(np.cos(params.alpha) - np.sum(v * w, axis=1) / ll, 0.0)
    G = params.nu * g * g
    B = params.eps * b * b
    H = params.mu * (ll * np.sin(params.alpha * u) - b) ** 2
    return float(np.sum(G + 0.5 * B + 0.5 * H))


def potential_gradient(params: DiscreteArmParams, u, chain: JointChain) -> np.ndarray:
    """Gradient of :func:`potential` with respect to joints q_1..q_N, shape (N, 2)."""
    u = _check_controls(params, u)
    q = chain.with_ghosts()
    N = params.N
    v = q[1:-2] - q[:-3]
    w = q[2:-1] - q[1:-2]
    lens = np.concatenate([[params.ell0], params.lengths])
    ll = lens[1:] * lens[:-1]
    b = _cross(v, w)
    g = np.maximum(np.cos(params.alpha) - np.sum(v * w, axis=1) / ll, 0.0)

    # dPhi/db and dPhi/d(dot) per joint
    dphi_db = params.eps * b - params.mu * (ll * np.sin(params.alpha * u) - b)
    dphi_ddot = -2.0 * params.nu * g / ll

    # d b / d v = (w_y, -w_x), d b / d w = (-v_y, v_x); d dot/dv = w, d dot/dw = v
    dv = dphi_db[:, None] * np.column_stack([w[:, 1], -w[:, 0]]) + dphi_ddot[:, None] * w
    dw = dphi_db[:, None] * np.column_stack([-v[:, 1], v[:, 0]]) + dphi_ddot[:, None] * v

    # joint k term: v = q_k - q_{k-1}, w = q_{k+1} - q_k, rows indexed by
    # position in q_{-1}..q_{N+1}
    full = np.zeros((N + 3, 2))
    k = np.arange(N)
    np.add.at(full, k, -dv)  # q_{k-1}
    np.add.at(full, k + 1, dv - dw)  # q_k
    np.add.at(full, k + 2, dw)  # q_{k+1}
    return full[2:N + 2]


def equilibrium_residual(params: DiscreteArmParams, u, chain: JointChain, relative: bool = False) -> float:
    """Norm of the potential gradient projected onto the tangent space of the
    link-length constraints.

    Projecting out the constraint normals removes the inextensibility
    multipliers, so the residual vanishes exactly at constrained equilibria.
    With ``relative=True`` the norm is divided by ``1 + |unprojected gradient|``.
    """
    grad = potential_gradient(params, u, chain).ravel()
    q = chain.joints
    N = params.N
    # rows: d/dq (|q_k - q_{k-1}|^2), k = 1..N, columns q_1..q_N
    jac = np.zeros((N, 2 * N))
    d = q[1:] - q[:-1]
    for k in range(N):
        jac[k, 2 * k:2 * k + 2] = 2.0 * d[k]
        if k > 0:
            jac[k, 2 * k - 2:2 * k] = -2.0 * d[k]
    coef, *_ = np.linalg.lstsq(jac.T, grad, rcond=None)
    resid = float(np.linalg.norm(grad - jac.T @ coef))
    if relative:
        return resid / (1.0 + float(np.linalg.norm(grad)))
    return resid
