from __future__ import annotations

import math

import numpy as np
import pytest

from nopanet import (
    NopaParams,
    ResonanceWarning,
    ResonantFrequency,
    SqueezingReport,
    build_state_space,
    cfb_network,
    selectors,
    squeezing_v0,
    sweep_spectrum,
    transfer_matrix,
    two_mode_squeezing,
)
from nopanet.network import GAMMA_REF_HZ, StateSpace

from conftest import feasible_unitaries
from reference import S_LM, v_oracle


def test_cfb_matches_loop_oracle(params):
    assert squeezing_v0(cfb_network(), params) == pytest.approx(v_oracle(cfb_network().entries), rel=1e-12)


@pytest.mark.parametrize("kappa, w", [(0.0, 0.0), (0.2, 0.0), (0.0, 0.4), (0.3, 1.7)])
def test_random_networks_match_loop_oracle(rng, kappa, w):
    params = NopaParams.relative(1.0, kappa, 0.4)
    for u in feasible_unitaries(rng, 5, params):
        rep = two_mode_squeezing(build_state_space(u, params), w * GAMMA_REF_HZ)
        assert rep.v_total == pytest.approx(v_oracle(u, 1.0, kappa, 0.4, w), rel=1e-9)


def test_selectors_at_zero_angles():
    sel = selectors()
    assert np.array_equal(sel.e1, [1, 0, 1, 0])
    assert np.array_equal(sel.e2, [0, 1, 0, -1])


def test_selector_rotation_is_orthonormal():
    sel = selectors(0.3, -1.1)
    assert np.linalg.norm(sel.e1) == pytest.approx(math.sqrt(2))
    assert sel.e1 @ sel.e2 == pytest.approx(0.0, abs=1e-15)


def test_v_plus_equals_v_minus_at_cfb(params):
    rep = two_mode_squeezing(build_state_space(cfb_network(), params))
    assert rep.v_plus == pytest.approx(rep.v_minus, rel=1e-12)
    assert rep.entangled


def test_full_rotation_is_identity(params):
    ss = build_state_space(S_LM.astype(complex), params)
    a = two_mode_squeezing(ss)
    b = two_mode_squeezing(ss, psi1=2 * math.pi, psi2=-2 * math.pi)
    assert b.v_total == pytest.approx(a.v_total, rel=1e-6)


def test_transfer_matrix_real_at_dc(params):
    h = transfer_matrix(build_state_space(cfb_network(), params), 0.0)
    assert h.dtype == np.float64 and h.shape == (4, 12)


def test_no_pump_gives_vacuum(rng):
    p = NopaParams.relative(1.0, 0.2, 0.0)
    for u in feasible_unitaries(rng, 5, p):
        rep = two_mode_squeezing(build_state_space(u, p), 0.37 * GAMMA_REF_HZ)
        assert rep.v_total == pytest.approx(4.0, abs=1e-9)
        assert not rep.entangled


def test_resonance_raises():
    a = np.diag([0.0, -1.0])
    ss = StateSpace(A=a, B=np.eye(2), C=np.eye(2), D=np.zeros((2, 2)), R=a, X=np.eye(2), rate_unit=1.0)
    with pytest.raises(ResonantFrequency) as exc:
        transfer_matrix(ss, 0.0)
    assert exc.value.omega == 0.0


def test_sweep_skips_resonances():
    a = np.array([[0.0, 1.0], [-1.0, 0.0]])  # eigenvalues +-i
    b = np.zeros((2, 12))
    ss = StateSpace(A=a, B=b, C=np.zeros((4, 2)), D=np.zeros((4, 12)), R=a, X=np.eye(2), rate_unit=1.0)
    with pytest.warns(ResonanceWarning):
        reps = sweep_spectrum(ss, 2.0, 3)
    assert [r.omega for r in reps] == [0.0, 2.0]


def test_sweep_grid_and_symmetry(params):
    ss = build_state_space(cfb_network(), params)
    reps = sweep_spectrum(ss, 2 * GAMMA_REF_HZ, 9)
    assert len(reps) == 9 and reps[0].omega == 0.0 and reps[-1].omega == 2 * GAMMA_REF_HZ
    for r in reps:
        assert two_mode_squeezing(ss, -r.omega).v_total == pytest.approx(r.v_total, abs=1e-12)


@pytest.mark.parametrize("omega_max, points", [(1.0, 1), (0.0, 5), (-1.0, 5)])
def test_sweep_validation(params, omega_max, points):
    with pytest.raises(ValueError):
        sweep_spectrum(build_state_space(cfb_network(), params), omega_max, points)


def test_report_dict_round_trip(params):
    rep = two_mode_squeezing(build_state_space(cfb_network(), params), 1e6, 0.1, 0.2)
    assert SqueezingReport.from_dict(rep.to_dict()) == rep
