import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resilient_dmfac.cpl import (CPLState, CompensatorParams, aa_estimate, cpl_control,
                                 cpl_update_ppd, sigma)
from resilient_dmfac.twin_layer import GainError, MfacGains

CG = MfacGains(eta=1, mu=1, gamma=0.8, lam=1)
COMP = CompensatorParams(gamma_r=0.4, d_bar=0.03)


def test_sigma():
    assert sigma(1.0, 1.0) == 0
    assert sigma(0.5, 0.3) == pytest.approx(0.2, abs=1e-16)
    assert sigma(0.5, 0.7) < 0


def test_aa_estimate_examples():
    assert aa_estimate(0.02, 1.0, COMP, 1.0, 5.0, 0) == 0.0
    # r = 0.6 * 1 / (1 + 1) = 0.3 gives x = 0 - 0.3 * (-0.1) = 0.03
    p = CompensatorParams(gamma_r=0.6, d_bar=0.03)
    assert aa_estimate(0.0, 1.0, p, 1.0, -0.1, 3) == pytest.approx(0.015, abs=1e-17)


def test_compensator_validation():
    with pytest.raises(GainError):
        CompensatorParams(gamma_r=0.8, d_bar=0.03).validate(CG)
    with pytest.raises(GainError):
        CompensatorParams(gamma_r=0.0, d_bar=0.03).validate(CG)
    with pytest.raises(GainError):
        CompensatorParams(gamma_r=0.4, d_bar=0.0).validate(CG)
    COMP.validate(CG)


def test_cpl_ppd_update():
    s = CPLState(phi_hat=0.5, du_prev=0.0, dchi_hat_prev=0.0)
    assert cpl_update_ppd(s, CG, 2.0) == 0.5
    s = CPLState(phi_hat=0.5, du_prev=0.75, dchi_hat_prev=0.25)
    assert cpl_update_ppd(s, CG, 1.0) == 0.75
    s = CPLState(phi_hat=0.5, du_prev=1.0)
    assert cpl_update_ppd(s, CG, -5.0) == CG.phi0


def test_cpl_control_examples():
    s = CPLState(phi_hat=1.0, u_prev=0.1)
    assert cpl_control(s, CG, 1.0, 0.0, 0.01) == pytest.approx(0.1 + 0.39, abs=1e-16)
    assert cpl_control(s, CG, 0.4, 0.4, 0.0) == 0.1


def test_perfect_compensation_on_linear_plant():
    # y(k+1) = y(k) + b*ubar(k); subtracting the exact attack increment leaves the
    # actuated increment equal to the nominal one
    b, chi = 0.7, [0.0, 0.02, 0.04, 0.06]
    s_att = CPLState(phi_hat=1.0, u_prev=0.0)
    s_nom = CPLState(phi_hat=1.0, u_prev=0.0)
    ubar_prev = 0.0
    for k in range(1, 4):
        dchi = chi[k] - chi[k - 1]
        u_att = cpl_control(s_att, CG, 1.0, 0.2, dchi)
        u_nom = cpl_control(s_nom, CG, 1.0, 0.2, 0.0)
        ubar = u_att + chi[k]
        assert b * (ubar - ubar_prev) == pytest.approx(b * (u_nom - s_nom.u_prev), abs=1e-15)
        s_att.u_prev, s_nom.u_prev, ubar_prev = u_att, u_nom, ubar


def _saturation_check(rng, n):
    prev = rng.uniform(-0.03, 0.03, n) * (1 - 1e-12)
    phi = rng.uniform(1e-5, 50, n)
    sig = rng.normal(scale=rng.choice([1e-3, 1, 1e3]), size=n)
    dbar = rng.uniform(1e-4, 1, n)
    for i in range(n):
        p = CompensatorParams(gamma_r=0.4, d_bar=dbar[i])
        out = aa_estimate(prev[i], phi[i], p, 1.0, sig[i], 1)
        assert abs(out) < dbar[i]


def test_saturation_random_inputs():
    _saturation_check(np.random.default_rng(11), 2000)


@settings(max_examples=300)
@given(st.floats(-1, 1), st.floats(1e-5, 100), st.floats(-1e6, 1e6), st.floats(1e-6, 10))
def test_saturation_property(prev, phi, sig, dbar):
    out = aa_estimate(prev, phi, CompensatorParams(0.4, dbar), 1.0, sig, 5)
    assert abs(out) < dbar
