"""Steady-state solver and finite-difference response extraction."""

from dataclasses import replace

import numpy as np
import pytest

from chiral_nri import (CODATA, AtomicConfig, NonlinearRegime, SingularSystem,
                        build_system, dephasing_rates, denominators,
                        extract_linear_response, population_row_defect,
                        response_coefficients, solve_steady, to_internal)
from conftest import si_params

GAMMA = 1e8
HBAR = CODATA.hbar


def solve_at(delta_p=0.0, pump=5.0, omc=20.0, probe_E=0.0, probe_B=0.0,
             equation_mode="trace-preserving", cfg=None):
    decays, drive, medium, _ = si_params(delta_p, pump, omc, cfg)
    drive = replace(drive, probe_E=probe_E, probe_B=probe_B)
    system = build_system(decays, drive, medium, equation_mode=equation_mode)
    return solve_steady(system)


class TestBuildSystem:
    def test_zero_drive_ground_state(self):
        dm = solve_at(pump=0.0, omc=0.0)
        assert np.allclose(dm.rho, np.diag([1.0, 0, 0, 0]), atol=1e-14)

    def test_population_rows_sum_to_zero_trace_preserving(self):
        decays, drive, medium, _ = si_params(0.3, 5.0, 20.0)
        drive = replace(drive, probe_E=0.03, probe_B=1e-8)
        system = build_system(decays, drive, medium, equation_mode="trace-preserving",
                              trace_row=False)
        assert population_row_defect(system) <= 1e-15

    def test_population_rows_unbalanced_paper_literal(self):
        decays, drive, medium, _ = si_params(0.3, 5.0, 20.0)
        system = build_system(decays, drive, medium, equation_mode="paper-literal",
                              trace_row=False)
        # the unmatched flow is exactly the Gamma32 coherence coupling
        assert population_row_defect(system) == pytest.approx(
            decays.Gamma32 / decays.gamma_unit, rel=1e-12)

    def test_trace_row_present(self):
        decays, drive, medium, _ = si_params()
        system = build_system(decays, drive, medium)
        row = system.matrix[0]
        expected = np.zeros(16)
        expected[[0, 5, 10, 15]] = 1.0
        assert np.array_equal(row, expected.astype(complex))
        assert system.rhs[0] == 1.0


class TestSolveSteady:
    def test_trace_and_hermiticity(self):
        dm = solve_at(0.2, 5.0, 20.0, probe_E=0.02, probe_B=1e-8)
        assert dm.trace_defect() <= 1e-12
        assert dm.hermiticity_defect() <= 1e-12
        assert dm.residual <= 1e-10

    def test_paper_literal_mode_breaks_hermiticity(self):
        # the printed rho22 equation couples the population to the 3-2
        # coherence, which has no conjugate partner: the steady state of
        # the literal equations is measurably non-Hermitian under probes
        dm = solve_at(0.2, 5.0, 20.0, probe_E=0.02, probe_B=1e-8,
                      equation_mode="paper-literal")
        assert dm.trace_defect() <= 1e-12  # trace row still enforced
        assert dm.hermiticity_defect() > 1e-12

    def test_zero_probe_baseline_no_probe_coherences(self):
        # without the probe every coherence except 4-2 is strictly zero
        dm = solve_at(0.0, 5.0, 20.0)
        for i, j in ((1, 0), (3, 2), (2, 0), (3, 0), (2, 1)):
            assert abs(dm.rho[i, j]) <= 1e-16, (i, j)
        # while the coherent drive keeps the 4-2 coherence populated
        assert abs(dm.rho[3, 1]) > 1e-3

    def test_pump_redistributes_population(self):
        dm = solve_at(0.0, 5.0, 20.0)
        pops = np.diag(dm.rho).real
        assert pops[0] < 0.6  # strong pump empties the ground state
        assert pops[2] > 0.2
        assert pops.sum() == pytest.approx(1.0, abs=1e-12)

    def test_singular_system_detected(self):
        cfg = AtomicConfig(Gamma21=0, Gamma31=0, Gamma32=0, Gamma41=0,
                           Gamma42=0, Gamma43=0, Delta_c=0, delta=0)
        with pytest.raises(SingularSystem):
            solve_at(0.0, pump=0.0, omc=0.0, cfg=cfg)

    def test_equation_modes_differ_with_pump(self):
        tp = solve_at(0.0, 5.0, 20.0, probe_E=0.03, equation_mode="trace-preserving")
        pl = solve_at(0.0, 5.0, 20.0, probe_E=0.03, equation_mode="paper-literal")
        assert abs(tp.rho[1, 0] - pl.rho[1, 0]) > 0
        assert pl.trace_defect() <= 1e-12  # trace row holds either way


class TestExtraction:
    def test_two_level_closed_form(self):
        # Omega_c = 0, pump = 0: a3 = i d12 / ((gamma21 + i Dp) hbar)
        for dp in (-1.0, -0.4, 0.0, 0.7):
            decays, drive, medium, _ = si_params(dp, 0.0, 0.0)
            num = extract_linear_response(decays, drive, medium)
            ref = 1j * medium.d12 / ((0.5 * GAMMA + 1j * dp * GAMMA) * HBAR)
            assert abs(num.a3_num - ref) / abs(ref) <= 1e-10
            scale_E = abs(ref)
            scale_B = scale_E * medium.mu34 / medium.d12
            assert abs(num.a1_num) <= 1e-15 * scale_E
            assert abs(num.a4_num) <= 1e-15 * scale_B
            assert abs(num.a2_num) <= 1e-15 * scale_B

    def test_cross_responses_vanish_at_finite_pump(self):
        # the E-probe and B-probe coherence sectors decouple at first order,
        # so the numeric cross coefficients are zero at any pump strength
        decays, drive, medium, _ = si_params(0.0, 5.0, 20.0)
        num = extract_linear_response(decays, drive, medium)
        assert abs(num.a1_num) <= 1e-12 * abs(num.a3_num)
        assert abs(num.a4_num) <= 1e-12 * abs(num.a2_num)

    def test_pinned_baseline_group_5_20(self):
        decays, drive, medium, _ = si_params(0.0, 5.0, 20.0)
        num = extract_linear_response(decays, drive, medium)
        assert num.a3_num == pytest.approx(
            complex(1.0353978429771178e-08, 1.3419699938670927e-06), rel=1e-9)
        assert num.a2_num == pytest.approx(
            complex(-0.03261442217699219, 3.044158346233955), rel=1e-9)
        assert max(num.richardson) < 1e-6
        assert num.residual <= 1e-10

    def test_step_independence_across_decade(self):
        # quadratic convergence: the extracted a3 moves by < 1e-6 relative
        # across a decade of probe steps
        decays, drive, medium, _ = si_params(0.1, 5.0, 20.0)
        base_E = 1e-4 * GAMMA * HBAR / medium.d12
        base_B = 1e-4 * GAMMA * HBAR / medium.mu34
        values = []
        for s in (1.0, 0.5, 0.2, 0.1):
            num = extract_linear_response(decays, drive, medium,
                                          step_E=base_E * s, step_B=base_B * s)
            values.append(num.a3_num)
        ref = values[-1]
        for v in values:
            assert abs(v - ref) / abs(ref) < 1e-6

    def test_probe_weakness_enforced(self):
        decays, drive, medium, _ = si_params(0.0, 5.0, 20.0)
        big = 1.0 * GAMMA * HBAR / medium.d12  # Omega_p = gamma >> bound
        with pytest.raises(NonlinearRegime):
            extract_linear_response(decays, drive, medium, step_E=big)

    def test_condition_recorded(self):
        decays, drive, medium, _ = si_params(0.0, 5.0, 20.0)
        num = extract_linear_response(decays, drive, medium)
        assert 1.0 < num.condition < 1e8


class TestAnalyticComparison:
    def test_error_shrinks_with_pump(self):
        # the closed-form a3 approaches the numeric response as the pump
        # rate goes to zero (its printed pump term overshoots at finite pump)
        errors = []
        for pump in (1.0, 0.3, 0.1, 0.03):
            decays, drive, medium, deph = si_params(0.0, pump, 20.0)
            num = extract_linear_response(decays, drive, medium)
            dens = denominators(deph, drive, decays)
            co = response_coefficients(dens, drive, deph, decays, medium,
                                       formula_mode="adjudicated")
            errors.append(abs(co.a3 - num.a3_num) / abs(num.a3_num))
        assert errors == sorted(errors, reverse=True)
        assert errors[-1] < errors[0] / 10
