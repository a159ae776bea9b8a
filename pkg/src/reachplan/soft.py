"""Equilibrium shape of the soft (continuum) manipulator.

The arm is an inextensible unit-length curve sampled on nodes s_i = i/N.  Its
curvature at equilibrium is omega_bar(s) u(s), where the effective bound
omega_bar = mu omega / (mu + eps) already accounts for the bending stiffness.
Both nested integrals of the input-to-state map use the left-endpoint rule, so
consecutive samples are exactly ds apart.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SoftArmParams:
    """Weight profiles sampled on the N+1 nodes s_i = i/N."""

    eps: np.ndarray
    mu: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        arrays = [np.asarray(getattr(self, n), dtype=float).ravel().copy() for n in ("eps", "mu", "omega")]
        n1 = arrays[0].size
        if n1 < 2 or any(a.size != n1 for a in arrays):
            raise ValidationError("eps, mu and omega need the same length N+1 >= 2")
        eps, mu, omega = arrays
        if np.any(eps <= 0) or np.any(omega <= 0) or np.any(mu < 0):
            raise ValidationError("profiles must satisfy eps > 0, mu >= 0, omega > 0")
        for name, arr in zip(("eps", "mu", "omega"), arrays):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if mu[-1] != 0:
            logger.info("soft arm profile has mu(1) = %g != 0; using the reduced equilibrium anyway", mu[-1])

    @classmethod
    def from_profiles(cls, N: int, eps: Callable, mu: Callable, omega: Callable) -> "SoftArmParams":
        s = np.arange(N + 1) / N
        return cls(eps(s) * np.ones_like(s), mu(s) * np.ones_like(s), omega(s) * np.ones_like(s))

    @property
    def N(self) -> int:
        return self.eps.size - 1

    @property
    def ds(self) -> float:
        return 1.0 / self.N

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.N + 1) / self.N

    def __eq__(self, other):
        if not isinstance(other, SoftArmParams):
            return NotImplemented
        return all(np.array_equal(getattr(self, n), getattr(other, n)) for n in ("eps", "mu", "omega"))


def table_params(N: int = 100) -> SoftArmParams:
    """Tapered profiles eps = 0.1 (1 - 0.9 s), mu = 1 - 0.9 s, omega = 2 pi (2 + s^2)."""
    return SoftArmParams.from_profiles(
        N,
        lambda s: 0.1 * (1 - 0.9 * s),
        lambda s: 1 - 0.9 * s,
        lambda s: 2 * np.pi * (2 + s ** 2),
    )


@dataclass(frozen=True, eq=False)
class SoftCurve:
    points: np.ndarray  # (N+1, 2)
    heading: np.ndarray  # (N+1,)
    curvature: np.ndarray  # (N+1,)
    s: np.ndarray  # (N+1,)

    @property
    def tip(self) -> np.ndarray:
        return self.points[-1]


def effective_curvature_bound(params: SoftArmParams) -> np.ndarray:
    return params.mu * params.omega / (params.mu + params.eps)


def _check_controls(params: SoftArmParams, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (params.N + 1,):
        raise DimensionMismatch(f"expected {params.N + 1} nodal controls, got shape {u.shape}")
    return u


def forward_curve(params: SoftArmParams, u) -> SoftCurve:
    """Equilibrium curve for nodal curvature controls ``u``."""
    u = _check_controls(params, u)
    ds = params.ds
    kappa = effective_curvature_bound(params) * u
    theta = np.concatenate([[0.0], np.cumsum(kappa[:-1]) * ds])
    steps = ds * np.column_stack([np.sin(theta[:-1]), -np.cos(theta[:-1])])
    points = np.vstack([[0.0, 0.0], np.cumsum(steps, axis=0)])
    return SoftCurve(points, theta, kappa, params.nodes)


def curvature_profile(curve: SoftCurve, params: SoftArmParams):
    """Signed curvature with its admissible band: ``(kappa, +omega_bar, -omega_bar)``."""
    wbar = effective_curvature_bound(params)
    return curve.curvature.copy(), wbar, -wbar
