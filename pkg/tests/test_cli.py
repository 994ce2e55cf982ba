"""CLI subcommands, JSON/CSV output contracts, exit-code discipline."""

import json

import pytest

from chiral_nri import read_csv
from chiral_nri.cli import main

DEGENERATE_CFG = {"Gamma21": 0.0, "Gamma31": 0.0, "Gamma43": 0.0, "Delta_c": 0.0}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write_cfg(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


class TestPoint:
    def test_default_point_json(self, capsys):
        code, out, _ = run(capsys, "point", "--delta-p", "0", "--group", "5,20")
        assert code == 0
        data = json.loads(out)
        assert data["manifest"]["modes"]["formula_mode"] == "paper-literal"
        assert data["manifest"]["resolved_si"]["pump_Gamma"] == 5e8
        assert data["index"]["n"]["re"] == pytest.approx(75.3247273911149, rel=1e-12)
        assert data["index"]["negative_re"] is False
        assert "denominators" not in data

    def test_dump_denominators(self, capsys):
        code, out, _ = run(capsys, "point", "--dump-denominators")
        data = json.loads(out)
        assert code == 0
        assert set(data["denominators"]) == {"D1", "D2", "D3", "D4", "D5",
                                             "D6", "D7", "D8", "D9", "Z"}
        assert data["denominators"]["D9"]["re"] == 6e8

    def test_vacuum_density_gives_unity_index(self, capsys, tmp_path):
        cfg = write_cfg(tmp_path, {"N": 0.0})
        code, out, _ = run(capsys, "point", "--config", cfg)
        data = json.loads(out)
        assert code == 0
        assert data["index"]["n"] == {"re": 1.0, "im": 0.0}
        assert data["constitutive"]["eps"] == {"re": 1.0, "im": 0.0}

    def test_unknown_key_exit_2_names_key(self, capsys, tmp_path):
        cfg = write_cfg(tmp_path, {"Omega_q": 1.0})
        code, _, err = run(capsys, "point", "--config", cfg)
        assert code == 2
        assert "Omega_q" in err

    def test_degenerate_point_exit_3(self, capsys, tmp_path):
        cfg = write_cfg(tmp_path, DEGENERATE_CFG)
        code, _, err = run(capsys, "point", "--config", cfg)
        assert code == 3
        assert "D1" in err

    def test_matches_library_pipeline(self, capsys):
        from chiral_nri import (constitutive_params, dephasing_rates,
                                denominators, polarizabilities,
                                refractive_index, response_coefficients,
                                to_internal, AtomicConfig)
        code, out, _ = run(capsys, "point", "--delta-p", "0.25", "--group", "50,10")
        data = json.loads(out)
        decays, drive, medium = to_internal(AtomicConfig(), delta_p=0.25,
                                            pump_Gamma=50.0, Omega_c=10.0)
        deph = dephasing_rates(decays)
        dens = denominators(deph, drive, decays)
        co = response_coefficients(dens, drive, deph, decays, medium)
        cp = constitutive_params(polarizabilities(co, medium))
        idx = refractive_index(cp)
        assert data["index"]["n"] == {"re": idx.n.real, "im": idx.n.imag}
        assert data["constitutive"]["eps"] == {"re": cp.eps.real, "im": cp.eps.imag}


class TestSweep:
    def test_two_point_sweep(self, capsys, tmp_path):
        out_csv = tmp_path / "s.csv"
        code, out, _ = run(capsys, "sweep", "--points", "2",
                           "--groups", "5,20;50,10", "--out", str(out_csv))
        assert code == 0
        records = read_csv(out_csv)
        assert len(records) == 4  # 2 per group
        report = json.loads((tmp_path / "s.report.json").read_text())
        assert report["spec"]["points"] == 2
        assert report["manifest"]["version"]

    def test_missing_out_is_config_error(self, capsys):
        code, _, err = run(capsys, "sweep", "--points", "2")
        assert code == 2

    def test_unwritable_out_exit_4(self, capsys, tmp_path):
        target = tmp_path / "no" / "such" / "dir" / "s.csv"
        code, _, err = run(capsys, "sweep", "--points", "2", "--out", str(target))
        assert code == 4

    def test_env_thread_cap(self, capsys, tmp_path, monkeypatch):
        ref = tmp_path / "seq.csv"
        par = tmp_path / "par.csv"
        run(capsys, "sweep", "--points", "11", "--out", str(ref))
        monkeypatch.setenv("NRI_THREADS", "3")
        run(capsys, "sweep", "--points", "11", "--out", str(par))
        assert ref.read_bytes() == par.read_bytes()

    def test_bad_thread_env_is_config_error(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("NRI_THREADS", "many")
        code, _, _ = run(capsys, "sweep", "--points", "2",
                         "--out", str(tmp_path / "x.csv"))
        assert code == 2


class TestOracle:
    def test_two_level_report(self, capsys):
        code, out, _ = run(capsys, "oracle", "--group", "0,0",
                           "--gamma-ladder", "0", "--delta-p", "0.4")
        assert code == 0
        data = json.loads(out)
        row = data["ladder"][0]
        assert row["richardson_ok"] is True
        adj = row["relative_error"]["adjudicated"]
        assert all(adj[k] <= 1e-10 for k in ("a1", "a2", "a3", "a4"))
        # the printed sign variant is visibly wrong off resonance, and is
        # reported rather than failed
        lit = row["relative_error"]["paper-literal"]
        assert lit["a3"] > 1e-3

    def test_default_ladder_monotone(self, capsys):
        code, out, _ = run(capsys, "oracle", "--group", "5,20")
        assert code == 0
        data = json.loads(out)
        assert [row["pump_Gamma"] for row in data["ladder"]] == [1.0, 0.3, 0.1, 0.03]
        errs = [row["relative_error"]["adjudicated"]["a3"] for row in data["ladder"]]
        assert errs == sorted(errs, reverse=True)

    def test_nonlinear_regime_exit_5(self, capsys, tmp_path):
        # Gamma21 = Omega_c = 0 makes the probe bound 1e-3*max(Omega_c,
        # gamma21) vanish; overrides keep the dipoles finite
        cfg = write_cfg(tmp_path, {"Gamma21": 0.0, "Gamma31": 0.0, "Gamma32": 0.0,
                                   "Gamma41": 0.0, "Gamma42": 0.0, "Gamma43": 0.0,
                                   "d12_override": 1e-29, "mu34_override": 1e-22})
        code, _, err = run(capsys, "oracle", "--config", cfg, "--group", "0,0",
                           "--gamma-ladder", "0")
        assert code == 5


class TestBands:
    def test_band_report_round_trip(self, capsys, tmp_path):
        out_csv = tmp_path / "s.csv"
        run(capsys, "sweep", "--points", "41", "--groups", "5,20",
            "--out", str(out_csv))
        code, out, _ = run(capsys, "bands", "--in", str(out_csv))
        assert code == 0
        data = json.loads(out)
        report = json.loads((tmp_path / "s.report.json").read_text())
        assert data["bands"] == report["bands"]
        assert data["branch_flips"] == report["branch_flips"]
        assert data["source"] == str(out_csv)

    def test_missing_file_exit_4(self, capsys, tmp_path):
        code, _, _ = run(capsys, "bands", "--in", str(tmp_path / "nope.csv"))
        assert code == 4
