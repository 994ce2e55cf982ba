"""Detuning sweeps over parameter groups, band detection, CSV/report output.

A sweep evaluates the closed-form pipeline (denominators -> response
coefficients -> polarizabilities -> constitutive parameters -> index) on
a probe-detuning grid for each (pump rate, coherent Rabi frequency)
group.  Points sitting on a resonance pole become flagged gap records
instead of aborting the run.

Output contract: records are ordered group-major with ascending detuning,
the CSV uses RFC-4180 quoting with a fixed header and full round-trip
precision scientific notation, and two runs of the same spec are
byte-identical regardless of thread count.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .electrodynamics import (BRANCH_POLICIES, POLICY_PAPER, constitutive_params,
                              refractive_index, susceptibilities)
from .errors import ConfigError, DegenerateDenominator
from .model import (CODATA, AtomicConfig, PAPER_GROUPS, PhysicalConstants,
                    dephasing_rates, to_internal)
from .oracle import EQ_TRACE, EQUATION_MODES
from .response import (FORMULA_MODES, FORMULA_PAPER, denominators,
                       polarizabilities, response_coefficients)

CSV_COLUMNS = [
    "group_Gamma", "group_Omega_c", "delta_p_over_gamma",
    "re_eps", "im_eps", "re_mu", "im_mu",
    "re_xi_eh", "im_xi_eh", "re_xi_he", "im_xi_he",
    "re_radicand", "im_radicand", "re_n", "im_n",
    "branch_k", "negative_re", "degenerate",
]


@dataclass(frozen=True)
class SweepSpec:
    """Grid definition: gamma-scaled detuning window, groups, mode flags."""

    delta_p_start: float = -1.0
    delta_p_end: float = 1.0
    points: int = 2001
    groups: Tuple[Tuple[float, float], ...] = PAPER_GROUPS
    base: AtomicConfig = field(default_factory=AtomicConfig)
    policy: str = POLICY_PAPER
    formula_mode: str = FORMULA_PAPER
    equation_mode: str = EQ_TRACE

    def validate(self) -> "SweepSpec":
        if self.points < 2:
            raise ConfigError(f"sweep needs points >= 2, got {self.points}")
        if not self.delta_p_start < self.delta_p_end:
            raise ConfigError("sweep needs delta_p_start < delta_p_end")
        if not self.groups:
            raise ConfigError("sweep needs at least one (pump_Gamma, Omega_c) group")
        if self.policy not in BRANCH_POLICIES:
            raise ConfigError(f"unknown branch policy {self.policy!r}")
        if self.formula_mode not in FORMULA_MODES:
            raise ConfigError(f"unknown formula mode {self.formula_mode!r}")
        if self.equation_mode not in EQUATION_MODES:
            raise ConfigError(f"unknown equation mode {self.equation_mode!r}")
        return self

    def grid(self) -> List[float]:
        step = (self.delta_p_end - self.delta_p_start) / (self.points - 1)
        return [self.delta_p_start + i * step for i in range(self.points)]


@dataclass(frozen=True)
class SweepRecord:
    """One grid point; a degenerate record carries parameters and flags only."""

    group_Gamma: float
    group_Omega_c: float
    delta_p_over_gamma: float
    eps: Optional[complex] = None
    mu: Optional[complex] = None
    xi_eh: Optional[complex] = None
    xi_he: Optional[complex] = None
    radicand: Optional[complex] = None
    n: Optional[complex] = None
    branch_k: Optional[int] = None
    negative_re: Optional[bool] = None
    degenerate: bool = False
    chi_e: Optional[complex] = None
    chi_m: Optional[complex] = None


@dataclass(frozen=True)
class NegativeBand:
    """Maximal run of consecutive grid points with Re n < 0."""

    group: Tuple[float, float]
    lo: float
    hi: float
    min_re_n: float
    argmin_delta_p: float


def evaluate_point(cfg: AtomicConfig, delta_p: float, group: Tuple[float, float],
                   policy: str = POLICY_PAPER, formula_mode: str = FORMULA_PAPER,
                   constants: PhysicalConstants = CODATA,
                   opposite_polarization: bool = False) -> SweepRecord:
    """Full closed-form pipeline at one gamma-scaled probe detuning."""
    pump, omc = group
    decays, drive, medium = to_internal(cfg, delta_p=delta_p, pump_Gamma=pump,
                                        Omega_c=omc, constants=constants)
    deph = dephasing_rates(decays)
    try:
        dens = denominators(deph, drive, decays)
        coeffs = response_coefficients(dens, drive, deph, decays, medium,
                                       constants, formula_mode)
        alpha = polarizabilities(coeffs, medium)
        cp = constitutive_params(alpha, constants)
        chi_e, chi_m = susceptibilities(alpha, constants)
    except DegenerateDenominator:
        return SweepRecord(group_Gamma=pump, group_Omega_c=omc,
                           delta_p_over_gamma=delta_p, degenerate=True)
    idx = refractive_index(cp, policy, opposite_polarization)
    return SweepRecord(
        group_Gamma=pump, group_Omega_c=omc, delta_p_over_gamma=delta_p,
        eps=cp.eps, mu=cp.mu, xi_eh=cp.xi_EH, xi_he=cp.xi_HE,
        radicand=idx.radicand, n=idx.n, branch_k=idx.branch_k,
        negative_re=idx.negative_re, degenerate=False,
        chi_e=chi_e, chi_m=chi_m,
    )


def run_sweep(spec: SweepSpec, threads: int = 1,
              constants: PhysicalConstants = CODATA) -> List[SweepRecord]:
    """Evaluate the grid for every group, group-major, ascending detuning.

    ``threads`` > 1 evaluates grid points in a thread pool; the output
    order (and therefore the CSV bytes) is identical to the sequential
    run because results are collected in submission order.
    """
    spec.validate()
    grid = spec.grid()
    tasks = [(group, dp) for group in spec.groups for dp in grid]

    def job(task):
        group, dp = task
        return evaluate_point(spec.base, dp, group, spec.policy,
                              spec.formula_mode, constants)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(job, tasks))
    return [job(t) for t in tasks]


def find_negative_bands(records: Sequence[SweepRecord]) -> List[NegativeBand]:
    """Maximal runs of consecutive non-degenerate records with Re n < 0.

    Records must be in sweep order (group-major, ascending detuning).
    """
    bands: List[NegativeBand] = []
    run: List[SweepRecord] = []

    def close_run():
        if not run:
            return
        worst = min(run, key=lambda r: r.n.real)
        bands.append(NegativeBand(
            group=(run[0].group_Gamma, run[0].group_Omega_c),
            lo=run[0].delta_p_over_gamma,
            hi=run[-1].delta_p_over_gamma,
            min_re_n=worst.n.real,
            argmin_delta_p=worst.delta_p_over_gamma,
        ))
        run.clear()

    prev_group = None
    for rec in records:
        group = (rec.group_Gamma, rec.group_Omega_c)
        if group != prev_group:
            close_run()
            prev_group = group
        if not rec.degenerate and rec.negative_re:
            run.append(rec)
        else:
            close_run()
    close_run()
    return bands


def detect_branch_flips(records: Sequence[SweepRecord]) -> List[int]:
    """Indices (into ``records``) where branch_k changes between adjacent
    non-degenerate records of the same group."""
    flips: List[int] = []
    prev = None
    for i, rec in enumerate(records):
        group = (rec.group_Gamma, rec.group_Omega_c)
        if rec.degenerate:
            continue
        if prev is not None and prev[0] == group and rec.branch_k != prev[1]:
            flips.append(i)
        prev = (group, rec.branch_k)
    return flips


def _fmt(x: float) -> str:
    return format(x, ".17e")


def _record_row(rec: SweepRecord) -> List[str]:
    row = [_fmt(rec.group_Gamma), _fmt(rec.group_Omega_c), _fmt(rec.delta_p_over_gamma)]
    if rec.degenerate:
        row += [""] * 12 + ["", "", "true"]
        return row
    for z in (rec.eps, rec.mu, rec.xi_eh, rec.xi_he, rec.radicand, rec.n):
        row += [_fmt(z.real), _fmt(z.imag)]
    row += [str(rec.branch_k), "true" if rec.negative_re else "false", "false"]
    return row


def records_to_csv(records: Sequence[SweepRecord]) -> str:
    """Render records as an RFC-4180 CSV document (CRLF line endings)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow(_record_row(rec))
    return buf.getvalue()


def write_csv(records: Sequence[SweepRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(records_to_csv(records))


def read_csv(path) -> List[SweepRecord]:
    """Parse a sweep CSV back into records (inverse of write_csv)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, strict=True)
        header = next(reader)
        if header != CSV_COLUMNS:
            raise ConfigError(f"unexpected CSV header: {header}")
        records = []
        for row in reader:
            if len(row) != len(CSV_COLUMNS):
                raise ConfigError(f"CSV row has {len(row)} fields, expected {len(CSV_COLUMNS)}")
            named = dict(zip(CSV_COLUMNS, row))
            degenerate = named["degenerate"] == "true"
            base = dict(
                group_Gamma=float(named["group_Gamma"]),
                group_Omega_c=float(named["group_Omega_c"]),
                delta_p_over_gamma=float(named["delta_p_over_gamma"]),
                degenerate=degenerate,
            )
            if not degenerate:
                base.update(
                    eps=complex(float(named["re_eps"]), float(named["im_eps"])),
                    mu=complex(float(named["re_mu"]), float(named["im_mu"])),
                    xi_eh=complex(float(named["re_xi_eh"]), float(named["im_xi_eh"])),
                    xi_he=complex(float(named["re_xi_he"]), float(named["im_xi_he"])),
                    radicand=complex(float(named["re_radicand"]), float(named["im_radicand"])),
                    n=complex(float(named["re_n"]), float(named["im_n"])),
                    branch_k=int(named["branch_k"]),
                    negative_re=named["negative_re"] == "true",
                )
            records.append(SweepRecord(**base))
        return records


def _cplx(z: Optional[complex]):
    if z is None:
        return None
    return {"re": z.real, "im": z.imag}


def band_report(records: Sequence[SweepRecord]) -> dict:
    """Bands, branch flips and background summary for a record list."""
    bands = find_negative_bands(records)
    flips = detect_branch_flips(records)
    ok = [r for r in records if not r.degenerate]
    summary = {}
    if ok:
        summary = {
            "max_abs_re_eps_minus_1": max(abs(r.chi_e.real) if r.chi_e is not None
                                          else abs(r.eps.real - 1.0) for r in ok),
            "max_abs_re_mu_minus_1": max(abs(r.chi_m.real) if r.chi_m is not None
                                         else abs(r.mu.real - 1.0) for r in ok),
            "negative_re_points": sum(1 for r in ok if r.negative_re),
            "second_quadrant_radicand_points": sum(
                1 for r in ok if r.radicand.real < 0 and r.radicand.imag > 0),
            "degenerate_points": sum(1 for r in records if r.degenerate),
        }
    return {
        "bands": [{"group": {"pump_Gamma": b.group[0], "Omega_c": b.group[1]},
                   "lo": b.lo, "hi": b.hi, "min_re_n": b.min_re_n,
                   "argmin_delta_p": b.argmin_delta_p} for b in bands],
        "branch_flips": flips,
        "summary": summary,
    }


def run_report(spec: SweepSpec, records: Sequence[SweepRecord], manifest: dict) -> dict:
    """Full JSON run report: manifest, spec echo, bands, flips, summary."""
    report = {
        "manifest": manifest,
        "spec": {
            "delta_p_start": spec.delta_p_start,
            "delta_p_end": spec.delta_p_end,
            "points": spec.points,
            "groups": [{"pump_Gamma": g, "Omega_c": o} for g, o in spec.groups],
            "policy": spec.policy,
            "formula_mode": spec.formula_mode,
            "equation_mode": spec.equation_mode,
        },
    }
    report.update(band_report(records))
    # reference magnitudes quoted for the near-vacuum background claim;
    # recorded for comparison, never gated
    report["background_reference"] = {"abs_re_eps_minus_1": 1e-13,
                                      "abs_re_mu_minus_1": 1e-24}
    return report
