"""Physical constants, atomic/drive configuration, and unit policy.

User-facing configuration is gamma-scaled: every rate, detuning and Rabi
frequency is expressed in units of the scale ``gamma_unit`` (1e8 1/s by
default), matching how such level schemes are usually quoted.  All
computation downstream happens in SI, so the conversion lives here and
nowhere else.

The spontaneous-emission estimate for the transition dipole moments is
dimensionally incomplete as commonly quoted (sqrt(3*hbar*Gamma*lambda^3 /
8*pi^2)); the default "si" mode restores SI consistency by inserting
eps0 for the electric moment and 1/mu0 for the magnetic one, which is
what the standard decay-rate relations Gamma_e = d^2 w^3/(3 pi eps0 hbar
c^3) and Gamma_m = mu0 m^2 w^3/(3 pi hbar c^3) give when solved for the
moment.  The uncorrected variant is kept as "paper" mode.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .errors import ConfigError

DIPOLE_SI = "si"
DIPOLE_PAPER = "paper"
DIPOLE_MODES = (DIPOLE_SI, DIPOLE_PAPER)

#: the three (pump rate, coherent Rabi frequency) groups used by the
#: default sweeps, in units of gamma_unit
PAPER_GROUPS = ((5.0, 20.0), (50.0, 10.0), (25.0, 5.0))


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants in SI. eps0 is derived so c^2*eps0*mu0 == 1."""

    hbar: float = 1.054571817e-34   # J s
    c: float = 299792458.0          # m/s
    mu0: float = 1.25663706212e-6   # H/m
    eps0: float = field(default=0.0)  # F/m, filled in __post_init__

    def __post_init__(self):
        if self.eps0 == 0.0:
            object.__setattr__(self, "eps0", 1.0 / (self.mu0 * self.c**2))


CODATA = PhysicalConstants()


@dataclass(frozen=True)
class DecayRates:
    """Spontaneous-emission rates and the incoherent pump rate, SI (1/s)."""

    gamma_unit: float
    Gamma21: float
    Gamma31: float
    Gamma32: float
    Gamma41: float
    Gamma42: float
    Gamma43: float
    pump_Gamma: float


@dataclass(frozen=True)
class Dephasings:
    """Coherence decay rates, SI (1/s)."""

    gamma21: float
    gamma31: float
    gamma32: float
    gamma41: float
    gamma42: float
    gamma43: float


@dataclass(frozen=True)
class DriveConfig:
    """Field parameters in SI.

    Detunings follow the convention Delta = (transition frequency) minus
    (field frequency); ``delta`` is the two-photon mismatch between the
    electric and magnetic probe couplings.  ``probe_E``/``probe_B`` are
    the probe amplitudes (V/m, T); zero for the closed-form pipeline.
    """

    Omega_c: float
    Delta_p: float
    Delta_c: float
    delta: float
    probe_E: float = 0.0
    probe_B: float = 0.0


@dataclass(frozen=True)
class MediumConfig:
    """Ensemble parameters in SI."""

    N: float           # atoms / m^3
    wavelength: float  # m
    d12: float         # C m, electric dipole moment of the 2-1 transition
    mu34: float        # J/T, magnetic dipole moment of the 4-3 transition


@dataclass(frozen=True)
class AtomicConfig:
    """Gamma-scaled user configuration; defaults are the reference set.

    Rates, detunings and Rabi frequencies are in units of ``gamma_unit``.
    ``d12_override``/``mu34_override`` are SI values (C m, J/T) and take
    precedence over the dipole estimate when given.
    """

    gamma_unit: float = 1e8
    Gamma21: float = 1.0
    Gamma31: float = 0.3
    Gamma32: float = 0.2
    Gamma41: float = 0.1
    Gamma42: float = 0.9
    Gamma43: float = (1.0 / 137.0) ** 2
    pump_Gamma: float = 5.0
    Omega_c: float = 20.0
    Delta_c: float = -5e-3
    delta: float = -1e-3
    N: float = 5e22
    wavelength: float = 600e-9
    dipole_mode: str = DIPOLE_SI
    d12_override: Optional[float] = None
    mu34_override: Optional[float] = None


# JSON key -> dataclass attribute ("lambda" is a Python keyword)
_CONFIG_KEYS = {
    "gamma_unit": "gamma_unit",
    "Gamma21": "Gamma21",
    "Gamma31": "Gamma31",
    "Gamma32": "Gamma32",
    "Gamma41": "Gamma41",
    "Gamma42": "Gamma42",
    "Gamma43": "Gamma43",
    "pump_Gamma": "pump_Gamma",
    "Omega_c": "Omega_c",
    "Delta_c": "Delta_c",
    "delta": "delta",
    "N": "N",
    "lambda": "wavelength",
    "dipole_mode": "dipole_mode",
    "d12_override": "d12_override",
    "mu34_override": "mu34_override",
}

_RATE_FIELDS = ("Gamma21", "Gamma31", "Gamma32", "Gamma41", "Gamma42",
                "Gamma43", "pump_Gamma")


def check_constants(constants: PhysicalConstants = CODATA, tol: float = 1e-12) -> float:
    """Return |c^2 eps0 mu0 - 1|; raise if the constants are inconsistent."""
    defect = abs(constants.c**2 * constants.eps0 * constants.mu0 - 1.0)
    if defect > tol:
        raise ConfigError(f"inconsistent electromagnetic constants: defect {defect:.3e}")
    return defect


def validate_config(cfg: AtomicConfig) -> AtomicConfig:
    """Reject non-finite values, negative rates, and bad medium parameters."""
    for name in ("gamma_unit",) + _RATE_FIELDS + ("Omega_c", "Delta_c", "delta",
                                                  "N", "wavelength"):
        value = getattr(cfg, name)
        if not math.isfinite(value):
            raise ConfigError(f"config value {name!r} is not finite: {value!r}")
    if cfg.gamma_unit <= 0:
        raise ConfigError(f"gamma_unit must be positive, got {cfg.gamma_unit!r}")
    for name in _RATE_FIELDS + ("Omega_c",):
        if getattr(cfg, name) < 0:
            raise ConfigError(f"rate {name!r} must be >= 0, got {getattr(cfg, name)!r}")
    # N == 0 is allowed: it is the vacuum limit used by diagnostics.
    if cfg.N < 0:
        raise ConfigError(f"density N must be >= 0, got {cfg.N!r}")
    if cfg.wavelength <= 0:
        raise ConfigError(f"lambda must be > 0, got {cfg.wavelength!r}")
    if cfg.dipole_mode not in DIPOLE_MODES:
        raise ConfigError(f"dipole_mode must be one of {DIPOLE_MODES}, got {cfg.dipole_mode!r}")
    for name in ("d12_override", "mu34_override"):
        value = getattr(cfg, name)
        if value is not None and (not math.isfinite(value) or value < 0):
            raise ConfigError(f"{name} must be a finite value >= 0, got {value!r}")
    return cfg


def config_from_dict(data: dict) -> AtomicConfig:
    """Build a config from a JSON-style dict. Unknown keys are a hard error."""
    unknown = sorted(set(data) - set(_CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    kwargs = {}
    for key, value in data.items():
        attr = _CONFIG_KEYS[key]
        if key == "dipole_mode":
            kwargs[attr] = value
        elif value is None:
            kwargs[attr] = None
        else:
            try:
                kwargs[attr] = float(value)
            except (TypeError, ValueError):
                raise ConfigError(f"config key {key!r} must be a number, got {value!r}")
    return validate_config(AtomicConfig(**kwargs))


def config_to_dict(cfg: AtomicConfig) -> dict:
    """Inverse of config_from_dict, with the canonical JSON key names."""
    out = {}
    for key, attr in _CONFIG_KEYS.items():
        value = getattr(cfg, attr)
        if value is None and key in ("d12_override", "mu34_override"):
            continue
        out[key] = value
    return out


def load_config(path) -> AtomicConfig:
    """Read and validate a JSON config file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must contain a JSON object")
    return config_from_dict(data)


def dephasing_rates(decays: DecayRates) -> Dephasings:
    """Half-sum dephasing rates of the six coherences.

    Each coherence decays at half the total population decay feeding it:

        gamma21 = Gamma21/2
        gamma31 = (Gamma31 + Gamma32)/2
        gamma41 = (Gamma43 + Gamma42)/2
        gamma42 = (Gamma43 + Gamma31 + Gamma21)/2
        gamma43 = (Gamma43 + Gamma42 + Gamma31 + Gamma32)/2
        gamma32 = (Gamma32 + Gamma31 + Gamma21)/2
    """
    return Dephasings(
        gamma21=decays.Gamma21 / 2,
        gamma31=(decays.Gamma31 + decays.Gamma32) / 2,
        gamma41=(decays.Gamma43 + decays.Gamma42) / 2,
        gamma42=(decays.Gamma43 + decays.Gamma31 + decays.Gamma21) / 2,
        gamma43=(decays.Gamma43 + decays.Gamma42 + decays.Gamma31 + decays.Gamma32) / 2,
        gamma32=(decays.Gamma32 + decays.Gamma31 + decays.Gamma21) / 2,
    )


def electric_dipole_moment(Gamma21: float, wavelength: float,
                           constants: PhysicalConstants = CODATA,
                           mode: str = DIPOLE_SI) -> float:
    """Dipole moment (C m) implied by the decay rate of the 2-1 transition.

    "si" mode:    sqrt(3 eps0 hbar lambda^3 Gamma / 8 pi^2)
    "paper" mode: sqrt(3 hbar lambda^3 Gamma / 8 pi^2)   (no eps0)
    """
    if Gamma21 < 0 or wavelength <= 0:
        raise ConfigError("electric_dipole_moment needs Gamma21 >= 0 and wavelength > 0")
    base = 3.0 * constants.hbar * wavelength**3 * Gamma21 / (8.0 * math.pi**2)
    if mode == DIPOLE_SI:
        return math.sqrt(constants.eps0 * base)
    if mode == DIPOLE_PAPER:
        return math.sqrt(base)
    raise ConfigError(f"unknown dipole mode {mode!r}")


def magnetic_dipole_moment(Gamma43: float, wavelength: float,
                           constants: PhysicalConstants = CODATA,
                           mode: str = DIPOLE_SI) -> float:
    """Magnetic moment (J/T) implied by the decay rate of the 4-3 transition.

    "si" mode divides by mu0 under the root; "paper" mode applies the same
    expression as the electric estimate.  With Gamma43 = Gamma21/137^2 the
    "si" values satisfy mu34 = c*d12/137 exactly.
    """
    if Gamma43 < 0 or wavelength <= 0:
        raise ConfigError("magnetic_dipole_moment needs Gamma43 >= 0 and wavelength > 0")
    base = 3.0 * constants.hbar * wavelength**3 * Gamma43 / (8.0 * math.pi**2)
    if mode == DIPOLE_SI:
        return math.sqrt(base / constants.mu0)
    if mode == DIPOLE_PAPER:
        return math.sqrt(base)
    raise ConfigError(f"unknown dipole mode {mode!r}")


def to_internal(cfg: AtomicConfig, delta_p: float = 0.0,
                pump_Gamma: Optional[float] = None,
                Omega_c: Optional[float] = None,
                constants: PhysicalConstants = CODATA):
    """Convert a gamma-scaled config to SI parameter objects.

    ``delta_p`` is the probe detuning in units of gamma_unit.  ``pump_Gamma``
    and ``Omega_c`` (also gamma-scaled) override the config's base values;
    sweeps use them to select a parameter group.
    """
    validate_config(cfg)
    if not math.isfinite(delta_p):
        raise ConfigError(f"delta_p is not finite: {delta_p!r}")
    g = cfg.gamma_unit
    pump = cfg.pump_Gamma if pump_Gamma is None else pump_Gamma
    omc = cfg.Omega_c if Omega_c is None else Omega_c
    if pump < 0 or omc < 0:
        raise ConfigError("group values pump_Gamma and Omega_c must be >= 0")
    decays = DecayRates(
        gamma_unit=g,
        Gamma21=cfg.Gamma21 * g,
        Gamma31=cfg.Gamma31 * g,
        Gamma32=cfg.Gamma32 * g,
        Gamma41=cfg.Gamma41 * g,
        Gamma42=cfg.Gamma42 * g,
        Gamma43=cfg.Gamma43 * g,
        pump_Gamma=pump * g,
    )
    drive = DriveConfig(
        Omega_c=omc * g,
        Delta_p=delta_p * g,
        Delta_c=cfg.Delta_c * g,
        delta=cfg.delta * g,
    )
    d12 = cfg.d12_override if cfg.d12_override is not None else electric_dipole_moment(
        decays.Gamma21, cfg.wavelength, constants, cfg.dipole_mode)
    mu34 = cfg.mu34_override if cfg.mu34_override is not None else magnetic_dipole_moment(
        decays.Gamma43, cfg.wavelength, constants, cfg.dipole_mode)
    medium = MediumConfig(N=cfg.N, wavelength=cfg.wavelength, d12=d12, mu34=mu34)
    return decays, drive, medium


def from_internal(decays: DecayRates, drive: DriveConfig, medium: MediumConfig,
                  dipole_mode: str = DIPOLE_SI,
                  constants: PhysicalConstants = CODATA) -> AtomicConfig:
    """Invert to_internal (drive.Delta_p is not part of the config).

    Dipole values that do not match the estimate for the given rates are
    preserved as explicit overrides.
    """
    g = decays.gamma_unit
    cfg = AtomicConfig(
        gamma_unit=g,
        Gamma21=decays.Gamma21 / g,
        Gamma31=decays.Gamma31 / g,
        Gamma32=decays.Gamma32 / g,
        Gamma41=decays.Gamma41 / g,
        Gamma42=decays.Gamma42 / g,
        Gamma43=decays.Gamma43 / g,
        pump_Gamma=decays.pump_Gamma / g,
        Omega_c=drive.Omega_c / g,
        Delta_c=drive.Delta_c / g,
        delta=drive.delta / g,
        N=medium.N,
        wavelength=medium.wavelength,
        dipole_mode=dipole_mode,
    )
    d12_expected = electric_dipole_moment(decays.Gamma21, medium.wavelength,
                                          constants, dipole_mode)
    mu34_expected = magnetic_dipole_moment(decays.Gamma43, medium.wavelength,
                                           constants, dipole_mode)
    if not math.isclose(medium.d12, d12_expected, rel_tol=1e-12, abs_tol=0.0):
        cfg = replace(cfg, d12_override=medium.d12)
    if not math.isclose(medium.mu34, mu34_expected, rel_tol=1e-12, abs_tol=0.0):
        cfg = replace(cfg, mu34_override=medium.mu34)
    return cfg
