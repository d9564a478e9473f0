"""Core parameter bundle and the quantities derived directly from it.

Unit convention used across the whole package: every frequency, detuning,
damping and coupling strength is a rate in Hz-as-labeled (a 20 MHz linewidth
is stored as 2e7, a 0.87 THz drive as 8.7e11) with hbar = 1. The model
equations are homogeneous in frequency units, so a single consistent
convention needs no 2*pi bookkeeping.

All frequency-domain evaluation happens in the frame rotating at the
respective pump tone. In that frame the driven optical mode responds with
an effective resonance at minus its pump detuning.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
import numpy as np

from .errors import ConfigError, NumericsError

TM_PHOTON = "tm_photon"
TE_PHOTON = "te_photon"
MAGNON = "magnon"
PHONON = "phonon"

MODE_LABELS = (TM_PHOTON, TE_PHOTON, MAGNON, PHONON)

# magnon self-term convention: complex square of the coupling vs magnitude square
CONJUGATION_CONVENTIONS = ("complex_squared", "magnitude_squared")

# frequency at which the reduced 2x2 operator freezes its optical corrections
SIGMA_EVAL_CHOICES = ("at_omega_m", "at_omega_r", "at_midpoint")


@dataclass(frozen=True)
class OscillatorMode:
    """One resonant degree of freedom: label, resonance, total and external damping."""

    label: str
    omega: float
    gamma: float
    gamma_ext: float = 0.0

    def __post_init__(self):
        if self.label not in MODE_LABELS:
            raise ConfigError(f"OscillatorMode.label must be one of {MODE_LABELS}, got {self.label!r}")
        for name in ("omega", "gamma", "gamma_ext"):
            if not np.isfinite(getattr(self, name)):
                raise ConfigError(f"OscillatorMode.{name} must be finite")
        if not self.gamma > 0:
            raise ConfigError(f"OscillatorMode.gamma must be positive, got {self.gamma!r}")
        if not 0 <= self.gamma_ext <= self.gamma:
            raise ConfigError(
                f"OscillatorMode.gamma_ext must lie in [0, gamma], got {self.gamma_ext!r} with gamma {self.gamma!r}"
            )


def critical_mode(label, omega, gamma):
    # external coupling at half the total damping maximizes pump transfer
    return OscillatorMode(label=label, omega=omega, gamma=gamma, gamma_ext=gamma / 2)


@dataclass(frozen=True)
class PumpDrive:
    """A pump tone on one optical mode.

    effective_strength bundles the pump amplitude and the single-particle
    coupling into one non-negative knob; the model never needs the factors
    separately. detuning is pump frequency minus mode frequency.
    """

    target: str
    detuning: float
    effective_strength: float

    def __post_init__(self):
        if self.target not in (TM_PHOTON, TE_PHOTON):
            raise ConfigError(f"PumpDrive.target must be an optical mode, got {self.target!r}")
        if not (np.isfinite(self.detuning) and np.isfinite(self.effective_strength)):
            raise ConfigError("PumpDrive fields must be finite")
        if not self.effective_strength >= 0:
            raise ConfigError(f"PumpDrive.effective_strength must be >= 0, got {self.effective_strength!r}")

    @classmethod
    def from_pair(cls, target, detuning, amplitude, single_coupling):
        """Convenience constructor taking the pump amplitude and the bare coupling separately."""
        return cls(target=target, detuning=detuning, effective_strength=amplitude * single_coupling)


@dataclass(frozen=True)
class SystemConfig:
    """Full parameter bundle: four modes, two drives, convention switches."""

    tm_photon: OscillatorMode
    te_photon: OscillatorMode
    magnon: OscillatorMode
    phonon: OscillatorMode
    drive_tm: PumpDrive
    drive_te: PumpDrive
    conjugation_convention: str = "complex_squared"
    sigma_eval_frequency: str = "at_omega_m"

    def __post_init__(self):
        for attr in MODE_LABELS:
            mode = getattr(self, attr)
            if mode.label != attr:
                raise ConfigError(f"SystemConfig.{attr} holds a mode labeled {mode.label!r}")
        if self.drive_tm.target != TM_PHOTON:
            raise ConfigError("SystemConfig.drive_tm must target the tm_photon mode")
        if self.drive_te.target != TE_PHOTON:
            raise ConfigError("SystemConfig.drive_te must target the te_photon mode")
        if self.conjugation_convention not in CONJUGATION_CONVENTIONS:
            raise ConfigError(
                f"conjugation_convention must be one of {CONJUGATION_CONVENTIONS}, got {self.conjugation_convention!r}"
            )
        if self.sigma_eval_frequency not in SIGMA_EVAL_CHOICES:
            raise ConfigError(
                f"sigma_eval_frequency must be one of {SIGMA_EVAL_CHOICES}, got {self.sigma_eval_frequency!r}"
            )

    # sweep helpers; frozen dataclasses so these return fresh bundles
    def with_drive_detunings(self, tm=None, te=None):
        cfg = self
        if tm is not None:
            cfg = replace(cfg, drive_tm=replace(cfg.drive_tm, detuning=float(tm)))
        if te is not None:
            cfg = replace(cfg, drive_te=replace(cfg.drive_te, detuning=float(te)))
        return cfg

    def with_strengths(self, tm=None, te=None):
        cfg = self
        if tm is not None:
            cfg = replace(cfg, drive_tm=replace(cfg.drive_tm, effective_strength=float(tm)))
        if te is not None:
            cfg = replace(cfg, drive_te=replace(cfg.drive_te, effective_strength=float(te)))
        return cfg

    def to_dict(self):
        def mode_dict(m):
            return {"omega": m.omega, "gamma": m.gamma, "gamma_ext": m.gamma_ext}

        return {
            "modes": {attr: mode_dict(getattr(self, attr)) for attr in MODE_LABELS},
            "drives": {
                "tm": {"detuning": self.drive_tm.detuning, "effective_strength": self.drive_tm.effective_strength},
                "te": {"detuning": self.drive_te.detuning, "effective_strength": self.drive_te.effective_strength},
            },
            "conjugation_convention": self.conjugation_convention,
            "sigma_eval_frequency": self.sigma_eval_frequency,
        }

    @classmethod
    def from_dict(cls, data):
        try:
            modes = {
                attr: OscillatorMode(label=attr, **{k: float(v) for k, v in data["modes"][attr].items()})
                for attr in MODE_LABELS
            }
            drives = {
                "drive_tm": PumpDrive(target=TM_PHOTON, **{k: float(v) for k, v in data["drives"]["tm"].items()}),
                "drive_te": PumpDrive(target=TE_PHOTON, **{k: float(v) for k, v in data["drives"]["te"].items()}),
            }
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed config mapping: {exc}") from exc
        extra = {}
        for key in ("conjugation_convention", "sigma_eval_frequency"):
            if key in data:
                extra[key] = data[key]
        unknown = set(data) - {"modes", "drives", "conjugation_convention", "sigma_eval_frequency"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**modes, **drives, **extra)


@dataclass(frozen=True)
class EffectiveCoupling:
    """Pump-enhanced complex coupling rates: g_a bridges photon and magnon, g_b photon and phonon."""

    g_a: complex
    g_b: complex


def susceptibility(gamma, omega_res, omega):
    """Linear response 1/(gamma/2 - i(omega - omega_res)) of a damped mode.

    Vectorized over omega. Pole-free for any gamma > 0.
    """
    if not gamma > 0:
        raise ConfigError(f"susceptibility requires gamma > 0, got {gamma!r}")
    out = 1.0 / (gamma / 2 - 1j * (np.asarray(omega) - omega_res))
    return complex(out) if np.ndim(out) == 0 else out


def te_susceptibility(config: SystemConfig, omega):
    # pump rotating frame: the driven optical mode responds around -detuning
    return susceptibility(config.te_photon.gamma, -config.drive_te.detuning, omega)


def steady_tm_amplitude(drive: PumpDrive, mode: OscillatorMode) -> complex:
    """Steady pump-built intracavity amplitude, scaled by the bundled bare coupling.

    Because the drive knob carries amplitude*coupling as one factor, the
    returned value is already the effective coupling rate for that branch.
    """
    if mode.label != TM_PHOTON:
        raise ConfigError(f"steady_tm_amplitude expects the tm_photon mode, got {mode.label!r}")
    return _pump_amplitude(drive, mode)


def _pump_amplitude(drive, mode):
    return drive.effective_strength * np.sqrt(2 * mode.gamma_ext) / (-1j * drive.detuning + mode.gamma)


def effective_couplings(config: SystemConfig) -> EffectiveCoupling:
    """Both pump-enhanced coupling rates for the configured drives."""
    g_a = _pump_amplitude(config.drive_tm, config.tm_photon)
    g_b = _pump_amplitude(config.drive_te, config.te_photon)
    if not (np.isfinite(g_a) and np.isfinite(g_b)):
        raise NumericsError("effective coupling evaluated non-finite; check drive and damping values")
    return EffectiveCoupling(g_a=complex(g_a), g_b=complex(g_b))
