"""Follower, virtual-follower and leader models, plus numerical PPD audits."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expr import Expression, ExprEvalError

CPL_FOLLOWER = "cpl_follower"
TL_FOLLOWER = "tl_follower"


class PlantError(ArithmeticError):
    pass


def _as_expression(e) -> Expression:
    return e if isinstance(e, Expression) else Expression(e)


@dataclass(frozen=True)
class AgentModel:
    """One-step map ``y(k+1) = f(y(k), u(k))``."""

    dynamics: Expression
    role: str = CPL_FOLLOWER

    def __post_init__(self):
        object.__setattr__(self, "dynamics", _as_expression(self.dynamics))
        if self.role not in (CPL_FOLLOWER, TL_FOLLOWER):
            raise ValueError(f"unknown agent role {self.role!r}")

    def __call__(self, y, u):
        return follower_step(self, y, u)


@dataclass(frozen=True)
class LeaderModel:
    trajectory: Expression

    def __post_init__(self):
        object.__setattr__(self, "trajectory", _as_expression(self.trajectory))

    def __call__(self, k):
        return leader_output(self, k)


def leader_output(model: LeaderModel, k: int) -> float:
    if k < 0:
        raise ValueError(f"step index must be non-negative, got {k}")
    try:
        return model.trajectory(0.0, 0.0, k)
    except ExprEvalError as exc:
        raise PlantError(f"leader output at k={k}: {exc}") from None


def follower_step(model: AgentModel, y: float, u: float) -> float:
    try:
        return model.dynamics(y, u, 0)
    except ExprEvalError as exc:
        raise PlantError(f"{model.role} step at y={y!r}, u={u!r}: {exc}") from None


def leader_increment_bound(model: LeaderModel, horizon: int) -> float:
    """Omega: max |y0(k+1) - y0(k)| over k = 0..horizon-1, by exhaustive scan."""
    if horizon < 1:
        return 0.0
    y0 = np.array([leader_output(model, k) for k in range(horizon + 1)])
    return float(np.max(np.abs(np.diff(y0))))


@dataclass(frozen=True)
class PPDAudit:
    bound: float
    sign_positive: bool


def audit_ppd_bound(model: AgentModel, y_range=(-2.0, 2.0), u_range=(-2.0, 2.0),
                    grid: int = 41) -> PPDAudit:
    """Empirical bound on |f(y, u2) - f(y, u1)| / |u2 - u1| over a grid.

    Pairs share the same ``y`` so that only the input sensitivity is measured.
    ``sign_positive`` is True when every such difference quotient is positive.
    """
    if grid < 2:
        raise ValueError("grid needs at least 2 points per axis")
    ys = np.linspace(y_range[0], y_range[1], grid)
    us = np.linspace(u_range[0], u_range[1], grid)
    bound = 0.0
    positive = True
    for y in ys:
        vals = np.array([follower_step(model, float(y), float(u)) for u in us])
        dv = vals[None, :] - vals[:, None]
        du = us[None, :] - us[:, None]
        mask = du != 0
        q = dv[mask] / du[mask]
        bound = max(bound, float(np.max(np.abs(q))))
        positive = positive and bool(np.all(q > 0))
    return PPDAudit(bound=bound, sign_positive=positive)
