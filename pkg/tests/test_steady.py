import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import ringcav as rc

# Frozen high-precision values at delta = 0.965 * omega_m, baseline.
DELTA_965 = 5741920.308892601
AMP_965 = 9104.4906359922015 - 38698.531582114666j
PHOTONS_965 = 1580468096.3527959
Q_STATIC_965 = -9864.0493292855387


def test_amplitude_at_reference_detuning(baseline):
    p, d = baseline
    s = rc.steady_state_at_detuning(p, d, DELTA_965)
    assert s.detuning == DELTA_965
    assert s.amplitude.real == pytest.approx(AMP_965.real, rel=1e-12)
    assert s.amplitude.imag == pytest.approx(AMP_965.imag, rel=1e-12)
    assert s.photon_number == pytest.approx(PHOTONS_965, rel=1e-12)
    assert s.q_minus_s == pytest.approx(Q_STATIC_965, rel=1e-12)
    assert s.p_minus_s == 0.0
    assert not s.tangent


def test_amplitude_reconstruction(baseline):
    # |c_s|^2 (kappa^2 + delta^2) = eps^2 ties the three stored fields
    p, d = baseline
    for delta in (-2e6, 0.0, 3e6, DELTA_965, 9e6):
        s = rc.steady_state_at_detuning(p, d, delta)
        lhs = s.photon_number * (p.cavity_decay ** 2 + delta ** 2)
        assert lhs == pytest.approx(d.drive_eps ** 2, rel=1e-12)


def test_displacement_sign_tracks_geometry(baseline):
    p, d = baseline
    p4 = rc.baseline_params(geometry=rc.Geometry.FOUR_MIRROR_TOTAL)
    d4 = rc.derive_params(p4)
    s3 = rc.steady_state_at_detuning(p, d, DELTA_965)
    s4 = rc.steady_state_at_detuning(p4, d4, DELTA_965)
    assert s3.q_minus_s < 0.0 < s4.q_minus_s
    assert abs(s3.q_minus_s) == pytest.approx(abs(s4.q_minus_s), rel=1e-15)
    assert s3.amplitude == s4.amplitude


def test_branch_counts_across_multistable_window(baseline):
    # independent dense scanning located the three-branch window of the
    # baseline drive at bare detunings of roughly [0.513, 0.609] omega_m
    p, d = baseline
    wm = p.mech_freq
    for bare, expected in ((0.30, 1), (0.45, 1), (0.55, 3), (0.58, 3),
                           (0.65, 1), (1.00, 1), (1.50, 1)):
        branches = rc.find_steady_branches(p, d, bare * wm)
        assert len(branches) == expected, bare


def test_branches_sorted_and_self_consistent(baseline):
    p, d = baseline
    wm = p.mech_freq
    for bare in (0.3, 0.55, 0.65, 1.0):
        branches = rc.find_steady_branches(p, d, bare * wm)
        dets = [b.detuning for b in branches]
        assert dets == sorted(dets)
        for b in branches:
            # the effective detuning must map back to the bare one
            implied = (b.detuning + 2.0 * (d.coupling_g * d.chi) ** 2
                       * b.photon_number / wm)
            assert implied == pytest.approx(bare * wm, rel=1e-9)


def test_zero_power_collapses_to_bare_detuning(baseline):
    p0 = rc.baseline_params(laser_power=0.0)
    d0 = rc.derive_params(p0)
    branches = rc.find_steady_branches(p0, d0, 0.7 * p0.mech_freq)
    assert len(branches) == 1
    assert branches[0].detuning == pytest.approx(0.7 * p0.mech_freq,
                                                 rel=1e-12)
    assert branches[0].amplitude == 0.0
    assert branches[0].photon_number == 0.0
    assert branches[0].q_minus_s == 0.0


def test_fold_branches_are_flagged_tangent(baseline):
    # scan for the fold: the first bare detuning where the count jumps
    p, d = baseline
    wm = p.mech_freq
    lo, hi = 0.45 * wm, 0.55 * wm
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if len(rc.find_steady_branches(p, d, mid)) >= 2:
            hi = mid
        else:
            lo = mid
    near_fold = rc.find_steady_branches(p, d, hi)
    assert any(b.tangent for b in near_fold) or len(near_fold) == 3


@settings(deadline=None, max_examples=60)
@given(bare=st.floats(min_value=-2.0, max_value=2.0),
       logp=st.floats(min_value=-4.0, max_value=-1.5))
def test_branches_random_self_consistency(bare, logp):
    p = rc.baseline_params(laser_power=10.0 ** logp)
    d = rc.derive_params(p)
    wm = p.mech_freq
    branches = rc.find_steady_branches(p, d, bare * wm)
    assert 1 <= len(branches) <= 3
    for b in branches:
        implied = (b.detuning + 2.0 * (d.coupling_g * d.chi) ** 2
                   * b.photon_number / wm)
        assert implied == pytest.approx(bare * wm,
                                        rel=1e-7, abs=1e-4 * wm)
