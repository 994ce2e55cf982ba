"""Constitutive parameters and the branch-resolved complex refractive index.

The microscopic polarizabilities are promoted to macroscopic eps, mu and
the two chirality cross-couplings through the local-field-corrected
closed forms (fields acting on each atom are E + P/3eps0 and
mu0*(H + M/3)).  All four share one denominator; a vanishing denominator
is a Clausius-Mossotti-type pole and is reported as such rather than
returning infinities.

For one circular polarization the refractive index is

    n = sqrt(eps*mu - (xi_EH + xi_HE)^2 / 4) + (i/2)(xi_EH - xi_HE)

The complex square root is double valued; the branch rule used here picks
the negated principal root exactly when the radicand lies in the open
second quadrant (negative real part, positive imaginary part), which
places the root in the third quadrant.  Boundary rays (negative real
axis, positive imaginary axis) take the principal root.  Only the parity
of the branch survives observation, so the choice is exposed as a binary
branch_k.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Tuple

from .errors import DegenerateDenominator
from .model import CODATA, PhysicalConstants
from .response import Polarizabilities

POLICY_PAPER = "paper-rule"
POLICY_PRINCIPAL = "always-principal"
POLICY_NEGATED = "always-negated"
BRANCH_POLICIES = (POLICY_PAPER, POLICY_PRINCIPAL, POLICY_NEGATED)

#: |denominator| below this fraction of 9*eps0 counts as degenerate
DEN_THRESHOLD = 1e-12


@dataclass(frozen=True)
class ConstitutiveParams:
    """Relative permittivity/permeability and dimensionless chirality terms."""

    eps: complex
    mu: complex
    xi_EH: complex
    xi_HE: complex


@dataclass(frozen=True)
class IndexResult:
    """Branch-resolved refractive index for one circular polarization."""

    radicand: complex
    sqrt_value: complex
    branch_k: int
    n: complex
    negative_re: bool


def _denominator(alpha: Polarizabilities, k: PhysicalConstants) -> complex:
    aEE, aEB, aBE, aBB = alpha.alpha_EE, alpha.alpha_EB, alpha.alpha_BE, alpha.alpha_BB
    return -3 * aEE + k.mu0 * (-aBE * aEB + aBB * (aEE - 3 * k.eps0)) + 9 * k.eps0


def _check_denominator(den: complex, k: PhysicalConstants) -> complex:
    if abs(den) < DEN_THRESHOLD * 9 * k.eps0:
        raise DegenerateDenominator("-3a_EE + mu0[-a_BE a_EB + a_BB(a_EE - 3eps0)] + 9eps0",
                                    abs(den) / (9 * k.eps0))
    return den


def constitutive_params(alpha: Polarizabilities,
                        constants: PhysicalConstants = CODATA) -> ConstitutiveParams:
    """Evaluate the four closed forms verbatim.

    All-zero polarizabilities give exactly (1, 1, 0, 0).
    """
    k = constants
    aEE, aEB, aBE, aBB = alpha.alpha_EE, alpha.alpha_EB, alpha.alpha_BE, alpha.alpha_BB
    den = _check_denominator(_denominator(alpha, k), k)
    eps = (6 * aEE + 9 * k.eps0 + k.mu0 * (2 * aBE * aEB - aBB * (2 * aEE + 3 * k.eps0))) / den
    mu = (-3 * aEE + 2 * k.mu0 * (aBE * aEB - aBB * (aEE - 3 * k.eps0)) + 9 * k.eps0) / den
    xi_EH = 9 * k.c * k.mu0 * k.eps0 * aEB / den
    xi_HE = 9 * k.c * k.mu0 * k.eps0 * aBE / den
    return ConstitutiveParams(eps=eps, mu=mu, xi_EH=xi_EH, xi_HE=xi_HE)


def susceptibilities(alpha: Polarizabilities,
                     constants: PhysicalConstants = CODATA) -> Tuple[complex, complex]:
    """(eps - 1, mu - 1) evaluated without the cancellation of subtracting 1.

    These are exact rearrangements of the constitutive quotients; for
    near-vacuum media the direct quotient loses the susceptibility below
    the rounding floor of 1.
    """
    k = constants
    aEE, aEB, aBE, aBB = alpha.alpha_EE, alpha.alpha_EB, alpha.alpha_BE, alpha.alpha_BB
    den = _check_denominator(_denominator(alpha, k), k)
    chi_e = 3 * (3 * aEE + k.mu0 * (aBE * aEB - aBB * aEE)) / den
    chi_m = 3 * k.mu0 * (aBE * aEB - aBB * aEE + 3 * k.eps0 * aBB) / den
    return chi_e, chi_m


def constitutive_consistency(alpha: Polarizabilities,
                             constants: PhysicalConstants = CODATA) -> Tuple[float, float]:
    """Cross-check the solved local-field relations against eps and mu.

    The E-coefficient of the polarization relation must equal
    eps0*(eps - 1) and the H-coefficient of the magnetization relation
    must equal (mu - 1).  Returns the two relative residuals; they are
    rounding-level when the closed forms are internally consistent.
    """
    k = constants
    aEE, aEB, aBE, aBB = alpha.alpha_EE, alpha.alpha_EB, alpha.alpha_BE, alpha.alpha_BB
    chi_e, chi_m = susceptibilities(alpha, constants)
    den_p = (k.mu0 * aBE * aEB + 3 * aEE - k.mu0 * aBB * aEE
             - 9 * k.eps0 + 3 * k.mu0 * k.eps0 * aBB)
    p_coeff_E = 3 * k.eps0 * (k.mu0 * aBB * aEE - k.mu0 * aBE * aEB - 3 * aEE) / den_p
    den_m = (k.mu0 * aBB * aEE + 9 * k.eps0 - k.mu0 * aBE * aEB
             - 3 * aEE - 3 * k.eps0 * k.mu0 * aBB)
    m_coeff_H = 3 * (k.mu0 * aBE * aEB - k.mu0 * aBB * aEE
                     + 3 * k.eps0 * k.mu0 * aBB) / den_m
    # zero susceptibility (vacuum) must give residual zero, not 0/0
    if chi_e == 0 and p_coeff_E == 0:
        res_E = 0.0
    else:
        res_E = abs(p_coeff_E - k.eps0 * chi_e) / abs(k.eps0 * chi_e)
    if chi_m == 0 and m_coeff_H == 0:
        res_H = 0.0
    else:
        res_H = abs(m_coeff_H - chi_m) / abs(chi_m)
    return res_E, res_H


def branched_sqrt(z: complex, policy: str = POLICY_PAPER) -> Tuple[complex, int]:
    """Square root with an explicit branch decision.

    The principal value is normalized to have its argument in
    (-pi/2, pi/2].  Policy "paper-rule" negates it (branch_k = 1) exactly
    when Re z < 0 and Im z > 0, so a second-quadrant radicand maps to a
    third-quadrant root; the other policies force the branch.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"branched_sqrt needs a finite argument, got {z!r}")
    w = cmath.sqrt(z)
    if w.real == 0.0 and w.imag < 0.0:
        # signed-zero imaginary parts land on the branch cut; fold the
        # argument onto (-pi/2, pi/2]
        w = -w
    if policy == POLICY_PRINCIPAL:
        return w, 0
    if policy == POLICY_NEGATED:
        return -w, 1
    if policy == POLICY_PAPER:
        if z.real < 0.0 and z.imag > 0.0:
            return -w, 1
        return w, 0
    raise ValueError(f"unknown branch policy {policy!r}")


def refractive_index(cp: ConstitutiveParams, policy: str = POLICY_PAPER,
                     opposite_polarization: bool = False) -> IndexResult:
    """Compose the index from the constitutive parameters.

    ``opposite_polarization`` flips the sign of the (i/2)(xi_EH - xi_HE)
    term.  That handedness is an extrapolation (the closed form above
    covers one polarization only) and is off by default.
    """
    radicand = cp.eps * cp.mu - (cp.xi_EH + cp.xi_HE) ** 2 / 4
    sqrt_value, branch_k = branched_sqrt(radicand, policy)
    chiral = 0.5j * (cp.xi_EH - cp.xi_HE)
    n = sqrt_value + (-chiral if opposite_polarization else chiral)
    return IndexResult(radicand=radicand, sqrt_value=sqrt_value,
                       branch_k=branch_k, n=n, negative_re=(n.real < 0.0))
