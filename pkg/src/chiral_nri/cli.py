"""Command-line surface: point, sweep, oracle, bands.

Exit codes partition outcomes:

    0  success
    2  configuration error (bad file, unknown key, bad flag value)
    3  degenerate point (closed-form denominator on a resonance pole)
    4  output I/O failure
    5  oracle regime failure (nonlinear probe or singular steady state)

Every emitted data file embeds or is accompanied by a run manifest
(resolved SI parameters, mode flags, tool version) sufficient to
reproduce the run bit-exactly.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import os
import sys
from dataclasses import replace
from typing import Optional, Sequence, Tuple

from . import __version__
from .electrodynamics import (BRANCH_POLICIES, POLICY_PAPER, constitutive_params,
                              refractive_index, susceptibilities)
from .errors import (ConfigError, DegenerateDenominator, NonlinearRegime,
                     SingularSystem)
from .model import (CODATA, AtomicConfig, PAPER_GROUPS, config_to_dict,
                    dephasing_rates, load_config, to_internal, validate_config)
from .oracle import EQ_TRACE, EQUATION_MODES, extract_linear_response
from .response import (FORMULA_ADJUDICATED, FORMULA_MODES, FORMULA_PAPER,
                       denominators, polarizabilities, response_coefficients)
from .sweep import (SweepSpec, band_report, evaluate_point, read_csv,
                    run_report, run_sweep, write_csv)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3
EXIT_IO = 4
EXIT_ORACLE = 5

DEFAULT_LADDER = (1.0, 0.3, 0.1, 0.03)


def _cplx(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def _threads_from_env() -> int:
    raw = os.environ.get("NRI_THREADS")
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"NRI_THREADS must be an integer, got {raw!r}")
    if value < 0:
        raise ConfigError("NRI_THREADS must be >= 0")
    return value or (os.cpu_count() or 1)


def _parse_group(text: str) -> Tuple[float, float]:
    try:
        pump, omc = (float(part) for part in text.split(","))
    except ValueError:
        raise ConfigError(f"group must look like '5,20', got {text!r}")
    return pump, omc


def _parse_groups(text: str) -> Tuple[Tuple[float, float], ...]:
    return tuple(_parse_group(chunk) for chunk in text.split(";") if chunk)


def _load(args) -> AtomicConfig:
    if getattr(args, "config", None):
        return load_config(args.config)
    return validate_config(AtomicConfig())


def build_manifest(cfg: AtomicConfig, config_path: Optional[str],
                   group: Tuple[float, float], delta_p: Optional[float],
                   formula_mode: str, equation_mode: str, policy: str) -> dict:
    """Resolved parameters + mode flags; enough to reproduce the run."""
    decays, drive, medium = to_internal(
        cfg, delta_p=delta_p or 0.0, pump_Gamma=group[0], Omega_c=group[1])
    deph = dephasing_rates(decays)
    return {
        "tool": "chiral-nri",
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "config_path": config_path,
        "config": config_to_dict(cfg),
        "group": {"pump_Gamma": group[0], "Omega_c": group[1]},
        "modes": {
            "dipole_mode": cfg.dipole_mode,
            "formula_mode": formula_mode,
            "equation_mode": equation_mode,
            "branch_policy": policy,
        },
        "resolved_si": {
            "gamma_unit": decays.gamma_unit,
            "Gamma21": decays.Gamma21, "Gamma31": decays.Gamma31,
            "Gamma32": decays.Gamma32, "Gamma41": decays.Gamma41,
            "Gamma42": decays.Gamma42, "Gamma43": decays.Gamma43,
            "pump_Gamma": decays.pump_Gamma,
            "Omega_c": drive.Omega_c, "Delta_c": drive.Delta_c,
            "delta": drive.delta,
            "gamma21": deph.gamma21, "gamma31": deph.gamma31,
            "gamma32": deph.gamma32, "gamma41": deph.gamma41,
            "gamma42": deph.gamma42, "gamma43": deph.gamma43,
            "N": medium.N, "lambda": medium.wavelength,
            "d12": medium.d12, "mu34": medium.mu34,
            "hbar": CODATA.hbar, "eps0": CODATA.eps0,
            "mu0": CODATA.mu0, "c": CODATA.c,
        },
    }


def _emit(payload: dict, out: Optional[str]) -> None:
    text = json.dumps(payload, indent=2, allow_nan=False)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def cmd_point(args) -> int:
    cfg = _load(args)
    group = _parse_group(args.group) if args.group else (cfg.pump_Gamma, cfg.Omega_c)
    manifest = build_manifest(cfg, args.config, group, args.delta_p,
                              args.formula_mode, EQ_TRACE, args.policy)
    decays, drive, medium = to_internal(cfg, delta_p=args.delta_p,
                                        pump_Gamma=group[0], Omega_c=group[1])
    deph = dephasing_rates(decays)
    dens = denominators(deph, drive, decays)
    coeffs = response_coefficients(dens, drive, deph, decays, medium,
                                   CODATA, args.formula_mode)
    alpha = polarizabilities(coeffs, medium)
    cp = constitutive_params(alpha, CODATA)
    chi_e, chi_m = susceptibilities(alpha, CODATA)
    idx = refractive_index(cp, args.policy, args.opposite_polarization)
    payload = {
        "manifest": manifest,
        "delta_p_over_gamma": args.delta_p,
        "response": {k: _cplx(v) for k, v in
                     (("a1", coeffs.a1), ("a2", coeffs.a2),
                      ("a3", coeffs.a3), ("a4", coeffs.a4))},
        "polarizabilities": {k: _cplx(v) for k, v in
                             (("alpha_EE", alpha.alpha_EE), ("alpha_EB", alpha.alpha_EB),
                              ("alpha_BE", alpha.alpha_BE), ("alpha_BB", alpha.alpha_BB))},
        "constitutive": {"eps": _cplx(cp.eps), "mu": _cplx(cp.mu),
                         "xi_EH": _cplx(cp.xi_EH), "xi_HE": _cplx(cp.xi_HE),
                         "chi_e": _cplx(chi_e), "chi_m": _cplx(chi_m)},
        "index": {"radicand": _cplx(idx.radicand),
                  "sqrt_value": _cplx(idx.sqrt_value),
                  "branch_k": idx.branch_k, "n": _cplx(idx.n),
                  "negative_re": idx.negative_re},
    }
    if args.dump_denominators:
        payload["denominators"] = {k: _cplx(v) for k, v in dens.as_dict().items()}
    _emit(payload, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args)
    groups = _parse_groups(args.groups) if args.groups else PAPER_GROUPS
    spec = SweepSpec(delta_p_start=args.from_, delta_p_end=args.to,
                     points=args.points, groups=groups, base=cfg,
                     policy=args.policy, formula_mode=args.formula_mode,
                     equation_mode=args.equation_mode).validate()
    records = run_sweep(spec, threads=_threads_from_env())
    manifest = build_manifest(cfg, args.config, groups[0], None,
                              args.formula_mode, args.equation_mode, args.policy)
    report = run_report(spec, records, manifest)
    write_csv(records, args.out)
    report_path = args.report or (os.path.splitext(args.out)[0] + ".report.json")
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, allow_nan=False)
        fh.write("\n")
    sys.stdout.write(json.dumps({"csv": args.out, "report": report_path,
                                 "records": len(records)}) + "\n")
    return EXIT_OK


def _relative_errors(analytic, numeric) -> dict:
    out = {}
    for name, an, num in zip(("a1", "a2", "a3", "a4"), analytic, numeric):
        if num == 0:
            out[name] = 0.0 if an == 0 else None
        else:
            out[name] = abs(an - num) / abs(num)
    return out


def cmd_oracle(args) -> int:
    cfg = _load(args)
    group = _parse_group(args.group) if args.group else (cfg.pump_Gamma, cfg.Omega_c)
    ladder = tuple(float(x) for x in args.gamma_ladder.split(",")) \
        if args.gamma_ladder else DEFAULT_LADDER
    manifest = build_manifest(cfg, args.config, group, args.delta_p,
                              FORMULA_PAPER, args.equation_mode, POLICY_PAPER)
    rows = []
    for pump in ladder:
        decays, drive, medium = to_internal(cfg, delta_p=args.delta_p,
                                            pump_Gamma=pump, Omega_c=group[1])
        deph = dephasing_rates(decays)
        numeric = extract_linear_response(decays, drive, medium, CODATA,
                                          equation_mode=args.equation_mode)
        num = (numeric.a1_num, numeric.a2_num, numeric.a3_num, numeric.a4_num)
        dens = denominators(deph, drive, decays)
        row = {
            "pump_Gamma": pump,
            "numeric": {k: _cplx(v) for k, v in zip(("a1", "a2", "a3", "a4"), num)},
            "probe_steps": {"step_E": numeric.step_E, "step_B": numeric.step_B},
            "residual": numeric.residual,
            "condition": numeric.condition,
            "richardson_ok": max(numeric.richardson) < 1e-6,
            "analytic": {},
            "relative_error": {},
        }
        for mode in (FORMULA_PAPER, FORMULA_ADJUDICATED):
            coeffs = response_coefficients(dens, drive, deph, decays, medium,
                                           CODATA, mode)
            an = (coeffs.a1, coeffs.a2, coeffs.a3, coeffs.a4)
            row["analytic"][mode] = {k: _cplx(v)
                                     for k, v in zip(("a1", "a2", "a3", "a4"), an)}
            row["relative_error"][mode] = _relative_errors(an, num)
        rows.append(row)
    payload = {"manifest": manifest, "delta_p_over_gamma": args.delta_p,
               "Omega_c": group[1], "ladder": rows}
    _emit(payload, args.out)
    return EXIT_OK


def cmd_bands(args) -> int:
    records = read_csv(args.infile)
    payload = band_report(records)
    payload["source"] = args.infile
    _emit(payload, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nri",
        description="Electromagnetic response of a driven four-level atomic "
                    "medium: chirality coefficients and complex refractive index.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file (defaults built in)")
        p.add_argument("--out", help="write JSON output here instead of stdout")

    p = sub.add_parser("point", help="evaluate the pipeline at one detuning")
    common(p)
    p.add_argument("--delta-p", type=float, default=0.0,
                   help="probe detuning in units of gamma_unit")
    p.add_argument("--group", help="pump_Gamma,Omega_c in gamma units, e.g. '5,20'")
    p.add_argument("--policy", default=POLICY_PAPER, choices=BRANCH_POLICIES)
    p.add_argument("--formula-mode", default=FORMULA_PAPER, choices=FORMULA_MODES)
    p.add_argument("--opposite-polarization", action="store_true",
                   help="flip the chirality term sign (extrapolated handedness)")
    p.add_argument("--dump-denominators", action="store_true")
    p.set_defaults(func=cmd_point)

    p = sub.add_parser("sweep", help="evaluate a detuning grid, write CSV + report")
    common(p)
    p.add_argument("--from", dest="from_", type=float, default=-1.0,
                   help="grid start, gamma units")
    p.add_argument("--to", type=float, default=1.0, help="grid end, gamma units")
    p.add_argument("--points", type=int, default=2001)
    p.add_argument("--groups", help="semicolon-separated groups, e.g. '5,20;50,10;25,5'")
    p.add_argument("--policy", default=POLICY_PAPER, choices=BRANCH_POLICIES)
    p.add_argument("--formula-mode", default=FORMULA_PAPER, choices=FORMULA_MODES)
    p.add_argument("--equation-mode", default=EQ_TRACE, choices=EQUATION_MODES)
    p.add_argument("--report", help="report path (default: <out>.report.json)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="compare closed forms against the "
                                      "steady-state finite-difference oracle")
    common(p)
    p.add_argument("--delta-p", type=float, default=0.0)
    p.add_argument("--group", help="pump_Gamma,Omega_c (pump replaced by the ladder)")
    p.add_argument("--gamma-ladder", help="comma-separated pump values, gamma units")
    p.add_argument("--equation-mode", default=EQ_TRACE, choices=EQUATION_MODES)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bands", help="re-read a sweep CSV and emit the band report")
    p.add_argument("--in", dest="infile", required=True, help="sweep CSV path")
    p.add_argument("--out", help="write JSON output here instead of stdout")
    p.set_defaults(func=cmd_bands)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "sweep" and not args.out:
        sys.stderr.write("error: sweep requires --out CSVPATH\n")
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except DegenerateDenominator as exc:
        sys.stderr.write(f"degenerate point: {exc}\n")
        return EXIT_DEGENERATE
    except (NonlinearRegime, SingularSystem) as exc:
        sys.stderr.write(f"oracle failure: {exc}\n")
        return EXIT_ORACLE
    except OSError as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
