import numpy as np
import pytest

from magnomech.errors import ConfigError
from magnomech.spectrum import (
    ALL_CHANNELS,
    NoiseParams,
    closed_form_response,
    linear_system_response,
    psd,
    psd_map,
)

from conftest import build_config, random_config


def worst_channel_error(cfg, omega):
    direct = linear_system_response(omega, cfg)
    closed = closed_form_response(omega, cfg)
    worst = 0.0
    for ch, value in direct.items():
        scale = max(abs(value), 1e-30)
        worst = max(worst, abs(closed[ch] - value) / scale)
    return worst


def test_closed_form_matches_direct_solve(rng):
    """Channel-matched agreement between the elimination and the 6x6 solve."""
    worst = 0.0
    for _ in range(200):
        cfg = random_config(rng)
        w = rng.uniform(0.3e9, 2.2e9)
        worst = max(worst, worst_channel_error(cfg, w))
    assert worst < 1e-10


def test_closed_form_matches_at_negative_and_zero_adjacent_frequencies(rng):
    for _ in range(20):
        cfg = random_config(rng)
        for w in (-1.1e9, -3e8, 1e5, 2e9):
            assert worst_channel_error(cfg, w) < 1e-10


def test_lumped_variant_deviates_from_oracle():
    """The compact legacy form is kept as a diagnostic, not an equivalent route."""
    cfg = build_config(delta_te=-1e7, delta_tm=-3e6)
    w = 1.0e9
    direct = linear_system_response(w, cfg)
    lumped = closed_form_response(w, cfg, variant="lumped")
    rel = abs(lumped["r+"] - direct["r+"]) / abs(direct["r+"])
    assert rel > 1e-3  # structurally different at generic parameters
    assert set(lumped) == {"r+", "m+"}


def test_closed_form_rejects_unknown_variant():
    with pytest.raises(ConfigError):
        closed_form_response(1e9, build_config(), variant="fast")


def test_zero_drive_transfer_is_zero():
    cfg = build_config(strength_tm=0.0, strength_te=0.0)
    coeffs = linear_system_response(1.0e9, cfg)
    assert all(v == 0 for v in coeffs.values())
    grid = np.linspace(0.5e9, 1.5e9, 7)
    assert np.all(psd(grid, cfg) == 0)


def test_psd_nonnegative_and_channel_additive(rng):
    cfg = random_config(rng)
    grid = np.linspace(0.4e9, 2.0e9, 31)
    total = psd(grid, cfg, NoiseParams())
    assert np.all(total >= 0)
    parts = sum(psd(grid, cfg, NoiseParams(channels=frozenset((ch,))))
                for ch in ALL_CHANNELS)
    assert np.allclose(parts, total, rtol=1e-12, atol=0)


def test_psd_unit_scaling():
    cfg = build_config()
    grid = np.linspace(0.8e9, 1.2e9, 5)
    one = psd(grid, cfg, NoiseParams(unit_psd=1.0))
    three = psd(grid, cfg, NoiseParams(unit_psd=3.0))
    assert np.allclose(three, 3 * one, rtol=1e-14)


def test_noise_params_validation():
    with pytest.raises(ConfigError):
        NoiseParams(unit_psd=-1.0)
    with pytest.raises(ConfigError):
        NoiseParams(channels=frozenset(("r+", "q-")))


def test_linear_response_single_frequency_only():
    cfg = build_config()
    with pytest.raises(ConfigError):
        linear_system_response(np.array([1e9, 2e9]), cfg)


def test_psd_map_ordering_and_sweep_axis():
    cfg = build_config(delta_tm=-3e6)
    omega = np.linspace(0.8e9, 1.0e9, 3)
    dets = np.array([-1e7, 0.0])
    pts = psd_map(cfg, omega, dets, swept="TE")
    assert len(pts) == 6
    # detuning outer, omega inner
    assert [p.detuning for p in pts[:3]] == [-1e7] * 3
    assert [p.omega for p in pts[:3]] == list(omega)
    # each cell reproducible by a single-config psd call
    direct = psd(omega[1], cfg.with_drive_detunings(te=-1e7))
    assert pts[1].psd == direct

    tm_pts = psd_map(cfg, omega, dets, swept="TM")
    direct_tm = psd(omega[0], cfg.with_drive_detunings(tm=0.0))
    assert tm_pts[3].psd == direct_tm
    assert tm_pts != pts


def test_psd_map_validates_inputs():
    cfg = build_config()
    with pytest.raises(ConfigError):
        psd_map(cfg, [1e9, 0.5e9, 2e9], [0.0], swept="TE")  # not monotone
    with pytest.raises(ConfigError):
        psd_map(cfg, [1e9], [0.0], swept="sideways")


def test_weak_drive_two_band_structure():
    """At the weak working point an omega cut shows exactly the two polariton bands."""
    from scipy.signal import find_peaks

    cfg = build_config(omega_m=8.5e8, omega_r=1.15e9,
                       strength_tm=0.6e12, strength_te=0.6e12, delta_te=-1e7)
    grid = np.linspace(0.4e9, 2.0e9, 1201)
    curve = np.log10(psd(grid, cfg))
    peaks, _ = find_peaks(curve, prominence=0.2)
    assert len(peaks) == 2
    centers = grid[peaks]
    assert centers[0] == pytest.approx(8.7e8, abs=5e6)
    assert centers[1] == pytest.approx(1.15e9, abs=5e6)
