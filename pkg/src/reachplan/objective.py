"""Penalised reachability cost and its gradient with respect to the controls.

    J(u) = control cost + |tip - target|^2 / (2 delta)
           + (1 / (2 tau)) * sum_i depth(q_i)^2 * ds

The obstacle integral uses the left rectangle rule over the configuration
samples (the tip sample is dropped).  ``depth`` is the penetration depth by
default; scenarios may switch to the raw boundary distance for comparison.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import discrete, geometry, soft
from .errors import DimensionMismatch, ValidationError


@dataclass(frozen=True, eq=False)
class Scenario:
    arm: object  # DiscreteArmParams or SoftArmParams
    obstacle: object = geometry.EMPTY
    target: tuple = (0.0, -1.0)
    delta: float = 1e-8
    tau: float = 1e-10
    samples_per_link: int = 13
    distance: str = "penetration"
    name: str = ""

    def __post_init__(self):
        if not isinstance(self.arm, (discrete.DiscreteArmParams, soft.SoftArmParams)):
            raise ValidationError(f"unsupported arm type {type(self.arm).__name__}")
        tgt = np.asarray(self.target, dtype=float)
        if tgt.shape != (2,) or not np.all(np.isfinite(tgt)):
            raise ValidationError(f"target must be a finite 2-vector, got {self.target!r}")
        object.__setattr__(self, "target", (float(tgt[0]), float(tgt[1])))
        if not (self.delta > 0 and self.tau > 0):
            raise ValidationError("penalties delta and tau must be positive")
        if int(self.samples_per_link) < 1:
            raise ValidationError("samples_per_link must be >= 1")
        object.__setattr__(self, "samples_per_link", int(self.samples_per_link))
        if self.distance not in ("penetration", "boundary"):
            raise ValidationError(f"distance must be 'penetration' or 'boundary', got {self.distance!r}")

    @property
    def model(self) -> str:
        return "discrete" if isinstance(self.arm, discrete.DiscreteArmParams) else "soft"

    @property
    def n_controls(self) -> int:
        return self.arm.N if self.model == "discrete" else self.arm.N + 1

    @property
    def ds(self) -> float:
        if self.model == "discrete":
            return 1.0 / (self.arm.N * self.samples_per_link)
        return self.arm.ds

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return (type(self.arm) is type(other.arm) and self.arm == other.arm
                and self.obstacle == other.obstacle and self.target == other.target
                and self.delta == other.delta and self.tau == other.tau
                and self.samples_per_link == other.samples_per_link
                and self.distance == other.distance and self.name == other.name)

    __hash__ = None

    def with_tau(self, tau: float) -> "Scenario":
        return Scenario(self.arm, self.obstacle, self.target, self.delta, tau,
                        self.samples_per_link, self.distance, self.name)


@dataclass(frozen=True)
class CostBreakdown:
    control_cost: float
    tip_cost: float
    obstacle_cost: float

    @property
    def total(self) -> float:
        return self.control_cost + self.tip_cost + self.obstacle_cost


def _controls(scenario: Scenario, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (scenario.n_controls,):
        raise DimensionMismatch(
            f"{scenario.model} arm expects {scenario.n_controls} controls, got shape {u.shape}"
        )
    return u


def configuration(scenario: Scenario, u) -> np.ndarray:
    """Sample points of the equilibrium configuration, tip last."""
    u = _controls(scenario, u)
    if scenario.model == "discrete":
        chain = discrete.forward_joints(scenario.arm, u)
        return discrete.sample_chain(chain, scenario.samples_per_link)
    return soft.forward_curve(scenario.arm, u).points


def _depths(scenario: Scenario, pts: np.ndarray):
    return geometry.distance_and_grad(pts, scenario.obstacle, scenario.distance)


def cost(scenario: Scenario, u, tau: float | None = None) -> CostBreakdown:
    """Cost terms at ``u``; ``tau`` overrides the scenario's obstacle penalty."""
    u = _controls(scenario, u)
    tau = scenario.tau if tau is None else tau
    pts = configuration(scenario, u)
    ds = scenario.ds
    if scenario.model == "discrete":
        control = 0.5 * float(u @ u)
    else:
        control = 0.5 * float(u[:-1] @ u[:-1]) * ds
    err = pts[-1] - np.asarray(scenario.target)
    tip = float(err @ err) / (2.0 * scenario.delta)
    d, _ = _depths(scenario, pts[:-1])
    obstacle = float(d @ d) * ds / (2.0 * tau)
    return CostBreakdown(control, tip, obstacle)


def total_cost(scenario: Scenario, u, tau: float | None = None) -> float:
    return cost(scenario, u, tau).total


def _point_gradients(scenario: Scenario, pts: np.ndarray, tau: float) -> np.ndarray:
    """dJ/d(sample point) for every sample, shape (M+1, 2)."""
    ds = scenario.ds
    G = np.zeros_like(pts)
    _, g = _depths(scenario, pts[:-1])
    G[:-1] = g * ds / (2.0 * tau)
    G[-1] += (pts[-1] - np.asarray(scenario.target)) / scenario.delta
    return G


def grad_cost(scenario: Scenario, u, tau: float | None = None) -> np.ndarray:
    """Analytic gradient dJ/du by reverse accumulation through the input-to-state map."""
    u = _controls(scenario, u)
    tau = scenario.tau if tau is None else tau
    if scenario.model == "discrete":
        return _grad_discrete(scenario, u, tau)
    return _grad_soft(scenario, u, tau)


def _grad_discrete(scenario: Scenario, u: np.ndarray, tau: float) -> np.ndarray:
    arm = scenario.arm
    m = scenario.samples_per_link
    N = arm.N
    theta = discrete.headings(arm, u)
    chain = discrete.chain_from_headings(arm.lengths, theta, arm.ell0)
    pts = discrete.sample_chain(chain, m)
    G = _point_gradients(scenario, pts, tau)

    # sample k*m + j = (1 - j/m) q_k + (j/m) q_{k+1}
    lam = np.arange(m) / m
    body = G[:-1].reshape(N, m, 2)
    Gq = np.zeros((N + 1, 2))
    Gq[:-1] += np.einsum("j,kjc->kc", 1 - lam, body)
    Gq[1:] += np.einsum("j,kjc->kc", lam, body)
    Gq[-1] += G[-1]

    # q_k = sum_{j<=k} ell_j e(theta_j): dJ/dtheta_j = ell_j e'(theta_j) . sum_{k>=j} dJ/dq_k
    tail = np.cumsum(Gq[:0:-1], axis=0)[::-1]  # rows j = 1..N
    de = np.column_stack([np.cos(theta), np.sin(theta)])
    dtheta = arm.lengths * np.einsum("jc,jc->j", de, tail)
    # theta_j = sum_{h<j} alpha_bar_h: dJ/dalpha_bar_h = sum_{j>h} dJ/dtheta_j
    dabar = np.cumsum(dtheta[::-1])[::-1]
    return u + dabar * discrete.effective_angles_derivative(arm, u)


def _grad_soft(scenario: Scenario, u: np.ndarray, tau: float) -> np.ndarray:
    arm = scenario.arm
    ds = arm.ds
    curve = soft.forward_curve(arm, u)
    G = _point_gradients(scenario, curve.points, tau)

    # q_i = sum_{j<i} ds e(theta_j): dJ/dtheta_j = ds e'(theta_j) . sum_{i>j} dJ/dq_i
    tail = np.cumsum(G[:0:-1], axis=0)[::-1]  # rows j = 0..N-1
    th = curve.heading[:-1]
    de = np.column_stack([np.cos(th), np.sin(th)])
    dtheta = ds * np.einsum("jc,jc->j", de, tail)
    # theta_i = ds sum_{j<i} wbar_j u_j
    wbar = soft.effective_curvature_bound(arm)
    after = np.concatenate([np.cumsum(dtheta[::-1])[::-1][1:], [0.0]])  # sum_{i>j}
    grad = np.zeros_like(u)
    grad[:-1] = wbar[:-1] * ds * after + u[:-1] * ds
    return grad


def fd_gradient(target, u, step: float = 1e-6, tau: float | None = None) -> np.ndarray:
    """Central finite-difference gradient.

    ``target`` is either a :class:`Scenario` (its total cost is differentiated)
    or any callable of ``u``.
    """
    if isinstance(target, Scenario):
        fun: Callable = lambda v: total_cost(target, v, tau)
    else:
        fun = target
    if not step > 0:
        raise ValueError("step must be positive")
    u = np.asarray(u, dtype=float)
    g = np.empty_like(u)
    for k in range(u.size):
        e = np.zeros_like(u)
        e[k] = step
        g[k] = (fun(u + e) - fun(u - e)) / (2.0 * step)
    return g


def gradient_error(scenario: Scenario, u, step: float = 1e-6, tau: float | None = None) -> float:
    """|analytic - finite difference| / (1 + |finite difference|)."""
    fd = fd_gradient(scenario, u, step, tau)
    g = grad_cost(scenario, u, tau)
    return float(np.linalg.norm(g - fd) / (1.0 + np.linalg.norm(fd)))


@dataclass
class GradCheck:
    max_error: float
    errors: list = field(default_factory=list)
    rejected: int = 0


def check_gradient(scenario: Scenario, trials: int = 100, seed: int = 0, step: float = 1e-6,
                   kink_margin: float = 1e-4, tau: float | None = None) -> GradCheck:
    """Compare grad_cost with central differences at random controls.

    Controls that put a sample point within ``kink_margin`` of a kink of the
    depth function are redrawn, since finite differences are meaningless there.
    """
    rng = np.random.default_rng(seed)
    errors = []
    rejected = 0
    while len(errors) < trials:
        u = rng.uniform(-1.0, 1.0, scenario.n_controls)
        pts = configuration(scenario, u)[:-1]
        if geometry.near_kink(pts, scenario.obstacle, kink_margin).any():
            rejected += 1
            if rejected > 100 * trials:
                raise RuntimeError("could not draw smooth-branch controls")
            continue
        errors.append(gradient_error(scenario, u, step, tau))
    return GradCheck(max(errors) if errors else 0.0, errors, rejected)


def max_penetration(scenario: Scenario, u) -> float:
    """Deepest penetration over all configuration samples (tip included)."""
    pts = configuration(scenario, u)
    d = geometry.penetration(pts, scenario.obstacle)
    return float(np.max(d)) if d.size else 0.0


def tip_error(scenario: Scenario, u) -> float:
    pts = configuration(scenario, u)
    return float(np.linalg.norm(pts[-1] - np.asarray(scenario.target)))
