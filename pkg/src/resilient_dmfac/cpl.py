"""Cyber-physical-layer controller with actuation-attack compensation."""
from __future__ import annotations

from dataclasses import dataclass

from .twin_layer import GainError, MfacGains, ppd_step


@dataclass(frozen=True)
class CompensatorParams:
    gamma_r: float
    d_bar: float

    def validate(self, cpl_gains: MfacGains):
        if not 0 < self.gamma_r < cpl_gains.gamma:
            raise GainError(
                f"compensator gamma_r must lie in (0, gamma_c={cpl_gains.gamma}), got {self.gamma_r}")
        if not self.d_bar > 0:
            raise GainError(f"d_bar must be positive, got {self.d_bar}")


@dataclass
class CPLState:
    phi_hat: float
    u_prev: float = 0.0
    du_prev: float = 0.0
    dchi_hat_prev: float = 0.0
    y_prev: float = 0.0


def sigma(y_tilde_i: float, y_i: float) -> float:
    return y_tilde_i - y_i


def aa_estimate(prev: float, phi_hat: float, params: CompensatorParams, lambda_c: float,
                sigma_k: float, k: int) -> float:
    """Saturated estimate of the attack increment; always strictly inside (-d_bar, d_bar)."""
    if k == 0:
        return 0.0
    r = params.gamma_r * phi_hat / (lambda_c + abs(phi_hat) ** 2)
    x = prev - r * sigma_k
    return params.d_bar * x / (params.d_bar + abs(x))


def cpl_update_ppd(state: CPLState, gains: MfacGains, dy: float) -> float:
    g = state.du_prev + state.dchi_hat_prev
    state.phi_hat = ppd_step(state.phi_hat, g, dy, gains)
    return state.phi_hat


def cpl_control(state: CPLState, gains: MfacGains, y_tilde_next: float, y_k: float,
                dchi_hat_k: float) -> float:
    return state.u_prev + gains.control_gain(state.phi_hat) * (y_tilde_next - y_k) - dchi_hat_k
