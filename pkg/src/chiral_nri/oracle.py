"""Steady-state density-matrix solver and numeric linear-response extraction.

This is the brute-force arbiter for the closed forms in ``response``: it
assembles the full 16x16 steady-state linear system from the evolution
equations (time derivatives set to zero), solves it by dense LU with
partial pivoting, and extracts response coefficients by central
differences in the probe amplitudes.

Equation set, with Op = E*d12/hbar and OB = B*mu34/hbar:

    rho11' = G(rho33-rho11) + G21 rho22 + G31 rho33 + G41 rho44 + i Op (rho21-rho12)
    rho21' = -(g21 + i Dp) rho21 - i Op (rho22-rho11) + i Oc rho41
    rho22' = -G21 rho22 + G32 X + G42 rho44 + i Op (rho12-rho21) + i Oc (rho42-rho24)
    rho31' = -(g31 + i(Dc+dl)) rho31 + i Op rho32 + i OB rho41
    rho32' = -(g32 + i(Dc-Dp+dl)) rho32 - i Oc rho34 - i Op rho31 + i OB rho42
    rho33' = -G(rho33-rho11) - (G31+G32) rho33 + G43 rho44 + i OB (rho43-rho34)
    rho41' = -(g41 + i(Dp+Dc)) rho41 + i Oc rho21 - i Op rho42 + i OB rho31
    rho42' = -(g42 + i Dc) rho42 + i Oc (rho22-rho44) - i Op rho41 + i OB rho32
    rho43' = -(g43 + i(Dp-dl)) rho43 + i Oc rho23 + i OB (rho33-rho44)
    rho44' = -(G41+G42+G43) rho44 + i Oc (rho24-rho42) + i OB (rho34-rho43)

X is rho33 in "trace-preserving" mode and rho32 in "paper-literal" mode:
the printed rho22 equation couples a population to a coherence, which has
no matching inflow anywhere and silently breaks trace conservation; the
population-balance reading (rho33) is the default.  The rho44 row is the
unique closure under which the trace-preserving population rows sum to
zero.  Upper-triangle coherences get the conjugate equations, and the
trace row replaces the (redundant) rho11 row.

The system is assembled in units of gamma_unit so the matrix is well
scaled; the steady-state condition is invariant under that rescaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from .errors import ConfigError, NonlinearRegime, SingularSystem
from .model import (CODATA, DecayRates, DriveConfig, MediumConfig,
                    PhysicalConstants, dephasing_rates)

EQ_TRACE = "trace-preserving"
EQ_PAPER = "paper-literal"
EQUATION_MODES = (EQ_TRACE, EQ_PAPER)

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
RESIDUAL_TOL = 1e-10
RICHARDSON_TOL = 1e-6

#: default probe strength: Omega_probe = 1e-4 * gamma_unit
DEFAULT_PROBE_SCALE = 1e-4

_IDX = {(i, j): 4 * (i - 1) + (j - 1) for i in range(1, 5) for j in range(1, 5)}
_LOWER = ((2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3))


@dataclass(frozen=True)
class DensityMatrix:
    """4x4 steady-state density matrix with its solution diagnostics."""

    rho: np.ndarray
    residual: float

    def trace_defect(self) -> float:
        return abs(np.trace(self.rho) - 1.0)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))

    def validate(self, trace_tol: float = TRACE_TOL,
                 hermiticity_tol: Optional[float] = HERMITICITY_TOL) -> "DensityMatrix":
        if self.trace_defect() > trace_tol:
            raise SingularSystem(f"steady state trace defect {self.trace_defect():.3e}")
        if hermiticity_tol is not None and self.hermiticity_defect() > hermiticity_tol:
            raise SingularSystem(
                f"steady state hermiticity defect {self.hermiticity_defect():.3e}")
        return self


@dataclass(frozen=True)
class SteadySystem:
    """16x16 coefficient matrix over (rho11, rho12, ..., rho44), row-major.

    Rows are gamma-scaled evolution equations; one row is the trace
    constraint (ones on the populations, rhs 1).
    """

    matrix: np.ndarray
    rhs: np.ndarray
    equation_mode: str
    gamma_unit: float


@dataclass(frozen=True)
class NumericResponse:
    """Finite-difference linear-response coefficients (same units as the
    closed forms: a1/a3 per V/m, a2/a4 per tesla)."""

    a1_num: complex
    a2_num: complex
    a3_num: complex
    a4_num: complex
    step_E: float
    step_B: float
    residual: float
    richardson: Tuple[float, float, float, float]
    condition: float


def build_system(decays: DecayRates, drive: DriveConfig, medium: MediumConfig,
                 constants: PhysicalConstants = CODATA,
                 equation_mode: str = EQ_TRACE,
                 trace_row: bool = True) -> SteadySystem:
    """Assemble the steady-state system at the drive's probe amplitudes.

    With ``trace_row=False`` the raw rho11 evolution row is kept instead of
    the trace constraint; the resulting system is singular and exists for
    inspecting the population-row balance.
    """
    if equation_mode not in EQUATION_MODES:
        raise ConfigError(f"equation_mode must be one of {EQUATION_MODES}")
    # Negative amplitudes are allowed: the sign encodes the field phase,
    # which the central-difference extraction relies on.
    if not (math.isfinite(drive.probe_E) and math.isfinite(drive.probe_B)):
        raise ConfigError("probe amplitudes must be finite")
    g = decays.gamma_unit
    deph = dephasing_rates(decays)
    Gm = decays.pump_Gamma / g
    G21, G31, G32 = decays.Gamma21 / g, decays.Gamma31 / g, decays.Gamma32 / g
    G41, G42, G43 = decays.Gamma41 / g, decays.Gamma42 / g, decays.Gamma43 / g
    g21, g31, g32 = deph.gamma21 / g, deph.gamma31 / g, deph.gamma32 / g
    g41, g42, g43 = deph.gamma41 / g, deph.gamma42 / g, deph.gamma43 / g
    Dp, Dc, dl = drive.Delta_p / g, drive.Delta_c / g, drive.delta / g
    Oc = drive.Omega_c / g
    Op = drive.probe_E * medium.d12 / (constants.hbar * g)
    OB = drive.probe_B * medium.mu34 / (constants.hbar * g)

    A = np.zeros((16, 16), dtype=complex)
    b = np.zeros(16, dtype=complex)

    def add(row, ij, coef):
        A[_IDX[row], _IDX[ij]] += coef

    add((1, 1), (3, 3), Gm); add((1, 1), (1, 1), -Gm)
    add((1, 1), (2, 2), G21); add((1, 1), (3, 3), G31); add((1, 1), (4, 4), G41)
    add((1, 1), (2, 1), 1j * Op); add((1, 1), (1, 2), -1j * Op)

    add((2, 1), (2, 1), -(g21 + 1j * Dp))
    add((2, 1), (2, 2), -1j * Op); add((2, 1), (1, 1), 1j * Op)
    add((2, 1), (4, 1), 1j * Oc)

    add((2, 2), (2, 2), -G21)
    add((2, 2), (3, 2) if equation_mode == EQ_PAPER else (3, 3), G32)
    add((2, 2), (4, 4), G42)
    add((2, 2), (1, 2), 1j * Op); add((2, 2), (2, 1), -1j * Op)
    add((2, 2), (4, 2), 1j * Oc); add((2, 2), (2, 4), -1j * Oc)

    add((3, 1), (3, 1), -(g31 + 1j * (Dc + dl)))
    add((3, 1), (3, 2), 1j * Op); add((3, 1), (4, 1), 1j * OB)

    add((3, 2), (3, 2), -(g32 + 1j * (Dc - Dp + dl)))
    add((3, 2), (3, 4), -1j * Oc); add((3, 2), (3, 1), -1j * Op)
    add((3, 2), (4, 2), 1j * OB)

    add((3, 3), (3, 3), -Gm); add((3, 3), (1, 1), Gm)
    add((3, 3), (3, 3), -(G31 + G32)); add((3, 3), (4, 4), G43)
    add((3, 3), (4, 3), 1j * OB); add((3, 3), (3, 4), -1j * OB)

    add((4, 1), (4, 1), -(g41 + 1j * (Dp + Dc)))
    add((4, 1), (2, 1), 1j * Oc); add((4, 1), (4, 2), -1j * Op)
    add((4, 1), (3, 1), 1j * OB)

    add((4, 2), (4, 2), -(g42 + 1j * Dc))
    add((4, 2), (2, 2), 1j * Oc); add((4, 2), (4, 4), -1j * Oc)
    add((4, 2), (4, 1), -1j * Op); add((4, 2), (3, 2), 1j * OB)

    add((4, 3), (4, 3), -(g43 + 1j * (Dp - dl)))
    add((4, 3), (2, 3), 1j * Oc)
    add((4, 3), (3, 3), 1j * OB); add((4, 3), (4, 4), -1j * OB)

    add((4, 4), (4, 4), -(G41 + G42 + G43))
    add((4, 4), (2, 4), 1j * Oc); add((4, 4), (4, 2), -1j * Oc)
    add((4, 4), (3, 4), 1j * OB); add((4, 4), (4, 3), -1j * OB)

    # conjugate-pair equations close the upper triangle
    for (i, j) in _LOWER:
        src = _IDX[(i, j)]
        dst = _IDX[(j, i)]
        for (k, l), col in _IDX.items():
            A[dst, _IDX[(l, k)]] += np.conj(A[src, col])

    if trace_row:
        A[_IDX[(1, 1)], :] = 0.0
        for i in range(1, 5):
            A[_IDX[(1, 1)], _IDX[(i, i)]] = 1.0
        b[_IDX[(1, 1)]] = 1.0
    return SteadySystem(matrix=A, rhs=b, equation_mode=equation_mode, gamma_unit=g)


def population_row_defect(system_no_trace: SteadySystem) -> float:
    """Max |coefficient| of the sum over the four population rows.

    Zero (to rounding) in trace-preserving mode; the paper-literal rho22
    coupling G32*rho32 leaves an unmatched flow of the same size.
    """
    rows = [system_no_trace.matrix[_IDX[(i, i)], :] for i in range(1, 5)]
    return float(np.max(np.abs(np.sum(rows, axis=0))))


def solve_steady(system: SteadySystem) -> DensityMatrix:
    """Direct dense solve; validates Hermiticity, trace, and residual."""
    A, b = system.matrix, system.rhs
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"steady-state system is singular: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise SingularSystem("steady-state solve produced non-finite values")
    scale = float(np.linalg.norm(A) * np.linalg.norm(x)) or 1.0
    residual = float(np.linalg.norm(A @ x - b)) / scale
    if residual > RESIDUAL_TOL:
        raise SingularSystem(f"solver residual {residual:.3e} exceeds {RESIDUAL_TOL}")
    # Hermiticity is structural only when the population rows are
    # conjugation-closed; the paper-literal rho22 coupling breaks that, so
    # in that mode the defect is reported by the matrix, not raised on.
    herm_tol = HERMITICITY_TOL if system.equation_mode == EQ_TRACE else None
    return DensityMatrix(rho=x.reshape(4, 4), residual=residual).validate(
        hermiticity_tol=herm_tol)


def _probe_bound(drive: DriveConfig, decays: DecayRates) -> float:
    gamma21 = decays.Gamma21 / 2
    return 1e-3 * max(drive.Omega_c, gamma21)


def _rel_change(full: complex, half: complex) -> float:
    if half == 0 and full == 0:
        return 0.0
    return abs(half - full) / max(abs(half), abs(full))


def extract_linear_response(decays: DecayRates, drive: DriveConfig,
                            medium: MediumConfig,
                            constants: PhysicalConstants = CODATA,
                            step_E: Optional[float] = None,
                            step_B: Optional[float] = None,
                            equation_mode: str = EQ_TRACE) -> NumericResponse:
    """Central-difference linear response about the probe-free steady state.

        a3 = [rho21(+E) - rho21(-E)] / (2 step_E)   at B = 0
        a1 = [rho43(+E) - rho43(-E)] / (2 step_E)   at B = 0
        a4 = [rho21(+B) - rho21(-B)] / (2 step_B)   at E = 0
        a2 = [rho43(+B) - rho43(-B)] / (2 step_B)   at E = 0

    Each difference is repeated at half step; the relative change must stay
    under 1e-6 (else NonlinearRegime) and the two estimates are Richardson
    combined, which cancels the quadratic probe-saturation bias and leaves
    the extraction accurate to ~1e-14 relative at the default steps.
    """
    if medium.d12 <= 0 or medium.mu34 <= 0:
        raise ConfigError("extraction requires positive dipole moments")
    g = decays.gamma_unit
    if step_E is None:
        step_E = DEFAULT_PROBE_SCALE * g * constants.hbar / medium.d12
    if step_B is None:
        step_B = DEFAULT_PROBE_SCALE * g * constants.hbar / medium.mu34
    if step_E <= 0 or step_B <= 0 or not (math.isfinite(step_E) and math.isfinite(step_B)):
        raise ConfigError("probe steps must be positive and finite")
    Op = step_E * medium.d12 / constants.hbar
    OB = step_B * medium.mu34 / constants.hbar
    bound = _probe_bound(drive, decays)
    if Op > bound or OB > bound:
        raise NonlinearRegime(
            f"probe Rabi frequencies (Op={Op:.3e}, OB={OB:.3e} 1/s) exceed "
            f"1e-3*max(Omega_c, gamma21) = {bound:.3e} 1/s")

    def solve_at(probe_E, probe_B):
        d = replace(drive, probe_E=probe_E, probe_B=probe_B)
        system = build_system(decays, d, medium, constants, equation_mode)
        return solve_steady(system)

    residual = 0.0
    estimates = {}
    for label, factor in (("full", 1.0), ("half", 0.5)):
        sE, sB = step_E * factor, step_B * factor
        rho_pE = solve_at(+sE, 0.0)
        rho_mE = solve_at(-sE, 0.0)
        rho_pB = solve_at(0.0, +sB)
        rho_mB = solve_at(0.0, -sB)
        residual = max(residual, rho_pE.residual, rho_mE.residual,
                       rho_pB.residual, rho_mB.residual)
        a3 = complex(rho_pE.rho[1, 0] - rho_mE.rho[1, 0]) / (2 * sE)
        a1 = complex(rho_pE.rho[3, 2] - rho_mE.rho[3, 2]) / (2 * sE)
        a4 = complex(rho_pB.rho[1, 0] - rho_mB.rho[1, 0]) / (2 * sB)
        a2 = complex(rho_pB.rho[3, 2] - rho_mB.rho[3, 2]) / (2 * sB)
        estimates[label] = (a1, a2, a3, a4)

    full, half = estimates["full"], estimates["half"]
    changes = tuple(float(_rel_change(f, h)) for f, h in zip(full, half))
    if max(changes) >= RICHARDSON_TOL:
        raise NonlinearRegime(
            f"step-halving changed an extracted coefficient by {max(changes):.3e} "
            f"(>= {RICHARDSON_TOL}); probe is outside the linear regime")
    a1, a2, a3, a4 = ((4 * h - f) / 3 for f, h in zip(full, half))

    ref_system = build_system(decays, drive, medium, constants, equation_mode)
    condition = float(np.linalg.cond(ref_system.matrix))
    return NumericResponse(a1_num=a1, a2_num=a2, a3_num=a3, a4_num=a4,
                           step_E=step_E, step_B=step_B, residual=residual,
                           richardson=changes, condition=condition)
