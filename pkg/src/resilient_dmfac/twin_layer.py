"""Twin-layer (virtual follower) MFAC controller with DoS-aware switching."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .topology import LaplacianPair


class GainError(ValueError):
    pass


@dataclass(frozen=True)
class MfacGains:
    """Estimator step/penalty (eta, mu), control step/penalty (gamma, lam),
    reset floor ``epsilon`` and initial PPD estimate ``phi0``."""

    eta: float = 1.0
    mu: float = 1.0
    gamma: float = 0.6
    lam: float = 1.0
    epsilon: float = 1e-5
    phi0: float = 1.0

    def __post_init__(self):
        if not 0 < self.eta <= 1:
            raise GainError(f"eta must lie in (0, 1], got {self.eta}")
        if not self.mu > 0:
            raise GainError(f"mu must be positive, got {self.mu}")
        if not 0 < self.gamma < 1:
            raise GainError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not self.lam > 0:
            raise GainError(f"lambda must be positive, got {self.lam}")
        if not 0 < self.epsilon < abs(self.phi0):
            raise GainError(f"need 0 < epsilon < |phi0|, got epsilon={self.epsilon}, phi0={self.phi0}")

    def control_gain(self, phi_hat: float) -> float:
        """gamma*phi/(lam + phi^2); bounded by gamma/(2*sqrt(lam)) for phi > 0."""
        return self.gamma * phi_hat / (self.lam + phi_hat * phi_hat)

    @property
    def gain_cap(self) -> float:
        return self.gamma / (2.0 * math.sqrt(self.lam))


def ppd_step(phi_prev: float, du: float, dy: float, gains: MfacGains) -> float:
    """Projection-type PPD update followed by the reset rule."""
    cand = phi_prev + gains.eta * du / (gains.mu + du * du) * (dy - phi_prev * du)
    return reset_ppd(cand, gains)


def reset_ppd(phi: float, gains: MfacGains) -> float:
    # reset when too small or the sign departs from the initial estimate's
    if abs(phi) < gains.epsilon or np.sign(phi) != np.sign(gains.phi0):
        return gains.phi0
    return phi


@dataclass
class TLState:
    phi_hat: float
    u_prev: float = 0.0
    du_prev: float = 0.0
    y_prev: float = 0.0


def tl_update_ppd(state: TLState, gains: MfacGains, dy: float) -> float:
    state.phi_hat = ppd_step(state.phi_hat, state.du_prev, dy, gains)
    return state.phi_hat


def tl_local_error(lap: LaplacianPair, y_tilde, y0: float) -> np.ndarray:
    y_tilde = np.asarray(y_tilde, dtype=float)
    n = lap.laplacian.shape[0]
    if y_tilde.shape != (n,):
        raise ValueError(f"expected {n} virtual outputs, got shape {y_tilde.shape}")
    return lap.gain_matrix @ (y0 - y_tilde)


def tl_control(state: TLState, gains: MfacGains, psi: int, xi: float) -> float:
    """Switching law: hold the input while psi == 0, MFAC increment otherwise."""
    if psi == 0:
        return state.u_prev
    return state.u_prev + gains.control_gain(state.phi_hat) * xi
