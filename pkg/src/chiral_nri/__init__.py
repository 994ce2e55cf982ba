"""Electromagnetic response of a coherently driven, incoherently pumped
four-level atomic medium.

The package computes the weak-probe constitutive parameters (relative
permittivity and permeability plus the two magneto-electric chirality
coefficients) from closed-form response coefficients, resolves the
complex refractive index with an explicit square-root branch rule, and
ships an independent steady-state density-matrix solver that extracts
the same response coefficients by finite differences for validation.
"""

__version__ = "0.1.0"

from .electrodynamics import (BRANCH_POLICIES, POLICY_NEGATED, POLICY_PAPER,
                              POLICY_PRINCIPAL, ConstitutiveParams, IndexResult,
                              branched_sqrt, constitutive_consistency,
                              constitutive_params, refractive_index,
                              susceptibilities)
from .errors import (ConfigError, DegenerateDenominator, NonlinearRegime,
                     SingularSystem)
from .model import (CODATA, DIPOLE_MODES, DIPOLE_PAPER, DIPOLE_SI, PAPER_GROUPS,
                    AtomicConfig, DecayRates, Dephasings, DriveConfig,
                    MediumConfig, PhysicalConstants, check_constants,
                    config_from_dict, config_to_dict, dephasing_rates,
                    electric_dipole_moment, from_internal, load_config,
                    magnetic_dipole_moment, to_internal, validate_config)
from .oracle import (EQ_PAPER, EQ_TRACE, EQUATION_MODES, DensityMatrix,
                     NumericResponse, SteadySystem, build_system,
                     extract_linear_response, population_row_defect,
                     solve_steady)
from .response import (FORMULA_ADJUDICATED, FORMULA_MODES, FORMULA_PAPER,
                       DenominatorSet, Polarizabilities, ResponseCoefficients,
                       denominators, polarizabilities, response_coefficients)
from .sweep import (CSV_COLUMNS, NegativeBand, SweepRecord, SweepSpec,
                    band_report, detect_branch_flips, evaluate_point,
                    find_negative_bands, read_csv, records_to_csv, run_report,
                    run_sweep, write_csv)

__all__ = [name for name in dir() if not name.startswith("_")]
