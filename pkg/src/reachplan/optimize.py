"""Projected gradient descent with obstacle-penalty continuation.

The outer loop halves tau, starting from ``tau0 / 2``, until it drops below
``tol_tau``; every round runs projected gradient steps on the box [-1, 1]^n
until the cost changes by less than ``tol`` and warm-starts the next round.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import objective
from .errors import DimensionMismatch, ValidationError
from .objective import CostBreakdown, Scenario


@dataclass(frozen=True)
class GdSettings:
    step: float = 0.1
    tol: float = 1e-12
    tol_mode: str = "relative"  # relative to the first cost of each round, or "absolute"
    tol_tau: float | None = None  # None: use the scenario's tau
    tau0: float = 1e-2
    max_inner: int = 100_000
    max_outer: int = 64
    line_search: str = "none"  # or "backtracking"
    verbose: bool = False

    def __post_init__(self):
        if not 0 < self.step < 1 and self.line_search == "none":
            raise ValidationError(f"fixed step must lie in (0, 1), got {self.step}")
        if not self.step > 0:
            raise ValidationError("step must be positive")
        if not self.tol > 0:
            raise ValidationError("tol must be positive")
        if self.tol_tau is not None and not self.tol_tau > 0:
            raise ValidationError("tol_tau must be positive")
        if not self.tau0 > 0:
            raise ValidationError("tau0 must be positive")
        if self.tol_mode not in ("relative", "absolute"):
            raise ValidationError(f"tol_mode must be 'relative' or 'absolute', got {self.tol_mode!r}")
        if self.line_search not in ("none", "backtracking"):
            raise ValidationError(f"line_search must be 'none' or 'backtracking', got {self.line_search!r}")
        if self.max_inner < 1 or self.max_outer < 1:
            raise ValidationError("iteration limits must be positive")


class RoundSummary(NamedTuple):
    round: int
    tau: float
    inner_iterations: int
    cost: float
    max_penetration: float
    converged: bool


@dataclass
class OptimizationReport:
    u_star: np.ndarray
    cost_history: list  # (tau, iteration, total cost)
    tau_schedule: list
    final_breakdown: CostBreakdown
    tip_error: float
    max_penetration: float
    inner_iterations: list
    rounds: list = field(default_factory=list)
    did_not_converge: bool = False
    # first iterate of every round, kept to audit warm starts
    round_starts: list = field(default_factory=list)


def project_box(u) -> np.ndarray:
    return np.clip(np.asarray(u, dtype=float), -1.0, 1.0)


def _inner(scenario: Scenario, settings: GdSettings, u: np.ndarray, tau: float, history: list):
    """One continuation round.  Returns (u, iterations, converged)."""
    J = objective.total_cost(scenario, u, tau)
    tol = settings.tol
    if settings.tol_mode == "relative" and J != 0.0:
        tol *= abs(J)
    gamma = settings.step
    for n in range(1, settings.max_inner + 1):
        J_tmp = J
        g = objective.grad_cost(scenario, u, tau)
        if settings.line_search == "none":
            u = project_box(u - gamma * g)
            J = objective.total_cost(scenario, u, tau)
        else:
            # sufficient decrease against the quadratic upper model of J
            while True:
                cand = project_box(u - gamma * g)
                d = cand - u
                J_new = objective.total_cost(scenario, cand, tau)
                if J_new <= J_tmp + g @ d + (d @ d) / (2.0 * gamma) or gamma < 1e-300:
                    break
                gamma *= 0.5
            u, J = cand, J_new
            gamma *= 2.0
        history.append((tau, n, J))
        if abs(J - J_tmp) < tol:
            return u, n, True
    return u, settings.max_inner, False


def descend(scenario: Scenario, settings: GdSettings | None = None, u0=None) -> OptimizationReport:
    """Minimise the penalised cost by projected gradient descent with tau halving."""
    settings = settings or GdSettings()
    n = scenario.n_controls
    u = np.zeros(n) if u0 is None else np.asarray(u0, dtype=float).copy()
    if u.shape != (n,):
        raise DimensionMismatch(f"initial guess needs {n} entries, got shape {u.shape}")
    if np.any(np.abs(u) > 1):
        raise ValidationError("initial guess must lie in [-1, 1]")
    tol_tau = scenario.tau if settings.tol_tau is None else settings.tol_tau

    history: list = []
    schedule: list = []
    inner_counts: list = []
    rounds: list = []
    starts: list = []
    stalled = False
    tau = settings.tau0
    for r in range(1, settings.max_outer + 1):
        tau = settings.tau0 * 2.0 ** (-r)
        schedule.append(tau)
        starts.append(u.copy())
        u, iters, ok = _inner(scenario, settings, u, tau, history)
        stalled |= not ok
        inner_counts.append(iters)
        J = objective.total_cost(scenario, u, tau)
        pen = objective.max_penetration(scenario, u)
        rounds.append(RoundSummary(r, tau, iters, J, pen, ok))
        if settings.verbose:
            print(f"round {r:3d}  tau {tau:.3e}  iters {iters:6d}  J {J:.6e}  max pen {pen:.3e}",
                  file=sys.stderr)
        if tau < tol_tau:
            break
    else:
        stalled = True

    return OptimizationReport(
        u_star=u,
        cost_history=history,
        tau_schedule=schedule,
        final_breakdown=objective.cost(scenario, u, tau),
        tip_error=objective.tip_error(scenario, u),
        max_penetration=objective.max_penetration(scenario, u),
        inner_iterations=inner_counts,
        rounds=rounds,
        did_not_converge=stalled,
        round_starts=starts,
    )


def continuation_trace(report: OptimizationReport) -> list:
    """One row per outer round: (round, tau, inner iterations, final J, max penetration)."""
    return [(r.round, r.tau, r.inner_iterations, r.cost, r.max_penetration) for r in report.rounds]


def expected_rounds(tau0: float, tol_tau: float) -> int:
    """Number of halvings before tau0 * 2^-r drops below tol_tau."""
    return max(1, math.floor(math.log2(tau0 / tol_tau)) + 1)
