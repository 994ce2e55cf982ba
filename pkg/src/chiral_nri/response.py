"""Closed-form weak-probe linear response of the four-level medium.

The steady-state probe-transition coherences are written as

    rho43 = a1 * E + a2 * B        rho21 = a3 * E + a4 * B

with E in V/m and B in T.  The coefficients are rational functions of the
resonance denominators D1..D9 and the composite Z below; they are
evaluated exactly as printed, including the dimensionally odd D8 (a rate
plus a triple product of rates) and the D6 mixing.  Correctness is
arbitrated by the numeric steady-state oracle, not by tidying the
algebra.

Two formula modes ship because the printed forms disagree about the sign
of i*Delta_p multiplying D4 in the shared denominator of a3/a4 versus a1:

    paper-literal  a3, a4 use (gamma21 - i*Delta_p) * D4 + Omega_c^2
    adjudicated    a3, a4 use (gamma21 + i*Delta_p) * D4 + Omega_c^2

The "+" variant is the one that reproduces the exact two-level limit
(Omega_c = 0, pump off), where the coherence is i*d12/((gamma21 +
i*Delta_p)*hbar) per unit field; the oracle confirms it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DegenerateDenominator
from .model import (CODATA, DecayRates, Dephasings, DriveConfig, MediumConfig,
                    PhysicalConstants)

FORMULA_PAPER = "paper-literal"
FORMULA_ADJUDICATED = "adjudicated"
FORMULA_MODES = (FORMULA_PAPER, FORMULA_ADJUDICATED)

#: below this gamma-scaled magnitude a denominator factor counts as a pole
DEGENERACY_THRESHOLD = 1e-12


@dataclass(frozen=True)
class DenominatorSet:
    """The nine resonance denominators and the composite Z, in SI powers."""

    D1: complex
    D2: complex
    D3: complex
    D4: complex
    D5: complex
    D6: complex
    D7: complex
    D8: complex
    D9: complex
    Z: complex

    def as_dict(self) -> dict:
        return {name: getattr(self, name)
                for name in ("D1", "D2", "D3", "D4", "D5", "D6", "D7", "D8", "D9", "Z")}


@dataclass(frozen=True)
class ResponseCoefficients:
    """a1, a3 per (V/m); a2, a4 per tesla. ``formula_mode`` records the variant."""

    a1: complex
    a2: complex
    a3: complex
    a4: complex
    formula_mode: str


@dataclass(frozen=True)
class Polarizabilities:
    """P = alpha_EE E + alpha_EB B,  M = alpha_BE E + alpha_BB B (SI)."""

    alpha_EE: complex
    alpha_EB: complex
    alpha_BE: complex
    alpha_BB: complex


def denominators(deph: Dephasings, drive: DriveConfig,
                 decays: DecayRates) -> DenominatorSet:
    """Evaluate D1..D9 and Z exactly as printed.

    Note the mixed conventions: D1, D4, D5 are (rate + i*detuning) while
    D2, D3, D7 are rotated by +-i, and D6/D8 mix polynomial degrees.
    Construction is total; zeros are handled by the consumers.
    """
    Dp, Dc, dl = drive.Delta_p, drive.Delta_c, drive.delta
    Oc = drive.Omega_c
    Gm, G21 = decays.pump_Gamma, decays.Gamma21
    D1 = deph.gamma42 + 1j * Dc
    D2 = -1j * deph.gamma32 + dl + Dc - Dp
    D3 = 1j * deph.gamma43 + dl - Dp
    D4 = deph.gamma41 + 1j * (Dc + Dp)
    D5 = deph.gamma42 + 1j * (Dc - Dp)
    D6 = 1j * deph.gamma41 * Dp + 1j * deph.gamma42 * Dp - dl * Dp - 3 * Dc * Dp + Oc**2
    D7 = -1j * deph.gamma31 + dl + Dc
    D8 = deph.gamma32 + deph.gamma41 + 1j * (dl + 2 * Dc) * (Dc - 1j * deph.gamma42) * (dl + Dc)
    D9 = Gm + G21
    Z = (D1 * D2 * G21 + 1j * Gm * (D6 + D8 - deph.gamma32 * D5)) * Oc**2
    return DenominatorSet(D1=D1, D2=D2, D3=D3, D4=D4, D5=D5, D6=D6, D7=D7,
                          D8=D8, D9=D9, Z=Z)


def _check_degeneracy(factors: dict, gamma_unit: float) -> None:
    """Raise DegenerateDenominator naming the first vanishing scaled factor.

    ``factors`` maps a printable name to (value, gamma power); magnitudes
    are compared in gamma-scaled units so the test is detuning-window
    independent.
    """
    for name, (value, power) in factors.items():
        scaled = abs(value) / gamma_unit**power
        if scaled < DEGENERACY_THRESHOLD:
            raise DegenerateDenominator(name, scaled)


def response_coefficients(dens: DenominatorSet, drive: DriveConfig,
                          deph: Dephasings, decays: DecayRates,
                          medium: MediumConfig,
                          constants: PhysicalConstants = CODATA,
                          formula_mode: str = FORMULA_PAPER) -> ResponseCoefficients:
    """Evaluate a1..a4 from the denominator set.

    Raises DegenerateDenominator when any denominator product sits on a
    resonance pole (gamma-scaled magnitude below 1e-12).
    """
    if formula_mode not in FORMULA_MODES:
        raise ValueError(f"formula_mode must be one of {FORMULA_MODES}, got {formula_mode!r}")
    Dp, Oc = drive.Delta_p, drive.Omega_c
    Gm = decays.pump_Gamma
    g21 = deph.gamma21
    hbar = constants.hbar
    d12, mu34 = medium.d12, medium.mu34
    g = decays.gamma_unit

    bracket_a1 = (1j * Dp + g21) * dens.D4 + Oc**2
    if formula_mode == FORMULA_ADJUDICATED:
        bracket_a34 = (g21 + 1j * Dp) * dens.D4 + Oc**2
    else:
        bracket_a34 = (g21 - 1j * Dp) * dens.D4 + Oc**2

    _check_degeneracy({
        "D1": (dens.D1, 1), "D2": (dens.D2, 1), "D3": (dens.D3, 1),
        "D7": (dens.D7, 1), "D9": (dens.D9, 1),
        "(i*Delta_p+gamma21)*D4+Omega_c^2": (bracket_a1, 2),
        "(gamma21-+i*Delta_p)*D4+Omega_c^2": (bracket_a34, 2),
    }, g)

    a1 = -d12 * dens.Z / (dens.D1 * dens.D2**2 * dens.D3 * dens.D7 * dens.D9
                          * bracket_a1 * hbar)
    a2 = 1j * Gm * mu34 * Oc**2 / (dens.D1 * dens.D2 * dens.D3 * dens.D9 * hbar)
    a3 = 1j * (dens.D4 + Gm * Oc**2 / (dens.D1 * dens.D9)) * d12 / (bracket_a34 * hbar)
    a4 = -mu34 * dens.Z / (dens.D1 * dens.D2 * dens.D7 * dens.D9 * bracket_a34 * hbar)
    return ResponseCoefficients(a1=a1, a2=a2, a3=a3, a4=a4, formula_mode=formula_mode)


def polarizabilities(coeffs: ResponseCoefficients,
                     medium: MediumConfig) -> Polarizabilities:
    """Ensemble polarizabilities: alpha_EE = N d12 a3, alpha_EB = N d12 a4,
    alpha_BE = N mu34 a1, alpha_BB = N mu34 a2."""
    N = medium.N
    return Polarizabilities(
        alpha_EE=N * medium.d12 * coeffs.a3,
        alpha_EB=N * medium.d12 * coeffs.a4,
        alpha_BE=N * medium.mu34 * coeffs.a1,
        alpha_BB=N * medium.mu34 * coeffs.a2,
    )
