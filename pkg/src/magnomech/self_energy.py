"""Optically induced self-energies and the light-mediated magnon-phonon coupling.

Eliminating the driven optical field dresses the mechanical and magnetic
modes: each acquires a complex self-energy (real part shifts the resonance,
imaginary part shifts the damping) and the two modes acquire an effective
mutual coupling carried by the shared optical response.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .errors import ConfigError
from .model import SystemConfig, effective_couplings, te_susceptibility


@dataclass(frozen=True)
class SelfEnergyPoint:
    delta_tm: float
    delta_te: float
    sigma: complex

    @property
    def freq_shift(self):
        return self.sigma.real

    @property
    def damping_shift(self):
        return self.sigma.imag


def sigma_rr(omega, config: SystemConfig) -> complex:
    """Self-energy of the mechanical mode from the driven optical response.

    Vanishes identically when the drive sits exactly on the optical
    resonance (zero detuning), because the two optical sidebands then
    cancel; it is antisymmetric under flipping that detuning.
    """
    g = effective_couplings(config)
    chi_p = te_susceptibility(config, omega)
    chi_m = np.conj(te_susceptibility(config, -np.asarray(omega)))
    out = -1j * abs(g.g_b) ** 2 * (chi_p - chi_m)
    return complex(out) if np.ndim(out) == 0 else out


def sigma_mm(omega, config: SystemConfig) -> complex:
    """Self-energy of the magnon mode.

    Single-sideband structure: only the co-rotating optical response enters,
    so both signs of frequency shift and of damping shift are reachable.
    The conjugation_convention switch selects whether the coupling enters
    as a complex square or as a magnitude square (the two coincide whenever
    the coupling is real, i.e. at zero pump detuning on the other branch).
    """
    g = effective_couplings(config)
    factor = g.g_a**2 if config.conjugation_convention == "complex_squared" else abs(g.g_a) ** 2
    out = -1j * factor * te_susceptibility(config, omega)
    return complex(out) if np.ndim(out) == 0 else out


def sigma_mr(omega, config: SystemConfig) -> complex:
    """Mediated coupling acting on the magnon from the mechanical side."""
    g = effective_couplings(config)
    out = -1j * g.g_a * g.g_b * te_susceptibility(config, omega)
    return complex(out) if np.ndim(out) == 0 else out


def sigma_rm(omega, config: SystemConfig) -> complex:
    """Mediated coupling acting on the mechanical mode from the magnon side.

    Same magnitude as sigma_mr for every input; the relative phase between
    the two directions is twice the phase of the optical-branch coupling.
    That non-reciprocal phase is a control knob of the hybrid system.
    """
    g = effective_couplings(config)
    out = -1j * g.g_a * np.conj(g.g_b) * te_susceptibility(config, omega)
    return complex(out) if np.ndim(out) == 0 else out


_SIGMA_FUNCS = {"rr": sigma_rr, "mm": sigma_mm, "mr": sigma_mr, "rm": sigma_rm}


def _eval_frequency(config, which, eval_omega):
    if eval_omega is not None:
        return float(eval_omega)
    # each quantity is frozen at its own mode's resonance by default
    return config.phonon.omega if which == "rr" else config.magnon.omega


def sweep_self_energy(config_template: SystemConfig, tm_detuning_grid, te_detuning_grid,
                      which: str, eval_omega=None, diagonal: bool = False):
    """Evaluate one self-energy component over a detuning grid.

    Cross-product sweep by default, TM detuning as the outer axis, row
    major. With diagonal=True the two grids are zipped instead: cell i is
    (tm_grid[i], te_grid[i]), the single-pump-frequency (monochromatic)
    cut. Each component is evaluated at its own mode's resonance unless
    eval_omega overrides that.
    """
    if which not in _SIGMA_FUNCS:
        raise ConfigError(f"unknown self-energy component {which!r}; expected one of {sorted(_SIGMA_FUNCS)}")
    tm_grid = np.asarray(tm_detuning_grid, dtype=float)
    te_grid = np.asarray(te_detuning_grid, dtype=float)
    for name, grid in (("tm_detuning_grid", tm_grid), ("te_detuning_grid", te_grid)):
        if grid.ndim != 1 or grid.size == 0:
            raise ConfigError(f"{name} must be a non-empty 1-D grid")
        if grid.size > 1 and not (np.all(np.diff(grid) > 0) or np.all(np.diff(grid) < 0)):
            raise ConfigError(f"{name} must be strictly monotone")
    if diagonal and tm_grid.size != te_grid.size:
        raise ConfigError("diagonal sweep needs equally sized detuning grids")
    func = _SIGMA_FUNCS[which]
    cells = (zip(tm_grid, te_grid) if diagonal
             else ((d_tm, d_te) for d_tm in tm_grid for d_te in te_grid))
    points = []
    for d_tm, d_te in cells:
        cfg = config_template.with_drive_detunings(tm=d_tm, te=d_te)
        omega = _eval_frequency(cfg, which, eval_omega)
        points.append(SelfEnergyPoint(delta_tm=float(d_tm), delta_te=float(d_te),
                                      sigma=func(omega, cfg)))
    return points
