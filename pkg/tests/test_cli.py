import json

import pytest

from caseq.cli import main


def run(args):
    return main(args)


class TestFactorize:
    def test_table_row_with_min_csd(self, capsys):
        assert run(["factorize", "--n", "288", "--kappa", "5",
                    "--min-csd", "24"]) == 0
        out = capsys.readouterr().out
        assert "size=255" in out and "csd=16" in out and "=120" in out

    def test_kappa_zero_prime_row(self, capsys):
        assert run(["factorize", "--n", "48", "--kappa", "0"]) == 0
        out = capsys.readouterr().out
        assert "{2,2,2,2,3}" in out and "size=2" in out

    def test_invalid_kappa_usage_error(self, capsys):
        assert run(["factorize", "--n", "7", "--kappa", "1"]) == 2

    def test_json_mode(self, capsys):
        assert run(["factorize", "--n", "48", "--kappa", "3", "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["factor_set"] == [6, 8]
        assert data["family_size"] == 35

    def test_near_mode(self, capsys):
        assert run(["factorize", "--n", "288", "--kappa", "4",
                    "--mode", "near"]) == 0
        assert "size=168" in capsys.readouterr().out


class TestBuild:
    def test_adpma_139(self, tmp_path, capsys):
        decomp = tmp_path / "decomp.json"
        decomp.write_text('{"parts": [50, 45, 44]}')
        out = tmp_path / "fam.json"
        assert run(["build", "--n", "139", "--kind", "adpma", "--kappa", "1",
                    "--decomp", str(decomp), "--out", str(out)]) == 0
        assert "size=60" in capsys.readouterr().out
        data = json.loads(out.read_text())
        assert data["size"] == 60
        assert (tmp_path / "fam.json.manifest.json").exists()

    def test_hat_dpma_839(self, tmp_path, capsys):
        decomp = tmp_path / "decomp.json"
        decomp.write_text('{"parts": [396, 243, 200]}')
        out = tmp_path / "fam839.json"
        assert run(["build", "--n", "839", "--kind", "hat_dpma", "--kappa", "2",
                    "--decomp", str(decomp), "--out", str(out)]) == 0
        assert json.loads(out.read_text())["size"] == 112

    def test_infeasible_augmentation_exit_3(self, tmp_path):
        out = tmp_path / "nope.json"
        assert run(["build", "--n", "48", "--kind", "apma", "--alpha", "1/2",
                    "--gamma", "2", "--out", str(out)]) == 3

    def test_rebuild_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for out in (a, b):
            assert run(["build", "--n", "48", "--kind", "dpma", "--kappa", "2",
                        "--alpha", "1/2", "--gamma", "2", "--values",
                        "--out", str(out)]) == 0
        assert a.read_bytes() == b.read_bytes()


@pytest.fixture
def family48(tmp_path):
    out = tmp_path / "fam48.json"
    assert run(["build", "--n", "48", "--kind", "dpma", "--kappa", "3",
                "--alpha", "1/2", "--gamma", "2", "--out", str(out)]) == 0
    return out


class TestVerify:
    def test_verify_family(self, family48, capsys):
        assert run(["verify", "--family", str(family48), "--beta-cap", "4"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["size"] == 35
        assert data["gram_max_offdiag"] <= 1e-9

    def test_missing_file_usage_error(self):
        assert run(["verify", "--family", "/nonexistent.json"]) == 2


class TestSpectrum:
    def test_slope_command(self, family48, capsys, tmp_path):
        out = tmp_path / "spec.csv"
        assert run(["--threads", "2", "spectrum", "--family", str(family48),
                    "--slope", "--span", "32", "--points", str(2 ** 16),
                    "--fit-lo", "2", "--fit-hi", "12", "--out", str(out)]) == 0
        msg = capsys.readouterr().out
        assert "fitted_slope=" in msg
        slope = float(msg.split("fitted_slope=")[1].split()[0])
        assert slope < -4.0
        header = out.read_text().splitlines()[0]
        assert header == "normalized_freq,power_db"

    def test_eta_command(self, family48, capsys, tmp_path):
        out = tmp_path / "eta.csv"
        assert run(["spectrum", "--family", str(family48), "--eta",
                    "--span", "16", "--points", str(2 ** 14),
                    "--bandwidths", "0.5,1,2", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "normalized_bandwidth,eta_db,family_kind"
        assert len(lines) == 4


class TestSimulate:
    def test_simulate_writes_csv_and_manifest(self, family48, tmp_path, capsys):
        out = tmp_path / "sim.csv"
        assert run(["simulate", "--family", str(family48), "--profile", "ff",
                    "--snr", "0", "--trials", "4000", "--seed", "3",
                    "--p-fa", "1e-2", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "snr_db,metric,mc_value,ci_halfwidth,closed_form"
        assert (tmp_path / "sim.csv.manifest.json").exists()

    def test_simulate_rerun_identical(self, family48, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert run(["simulate", "--family", str(family48), "--profile",
                        "umi", "--snr=-4,4", "--trials", "3000",
                        "--seed", "17", "--p-fa", "1e-2", "--out", str(out)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_profile_path(self, family48, tmp_path):
        prof = tmp_path / "prof.json"
        prof.write_text(json.dumps({
            "name": "custom",
            "taps": [{"delay_ns": 0, "power_db": 0},
                     {"delay_ns": 50, "power_db": -3}],
        }))
        assert run(["simulate", "--family", str(family48), "--profile",
                    str(prof), "--snr", "0", "--trials", "2000",
                    "--seed", "1", "--p-fa", "1e-2"]) == 0

    def test_malformed_family_errors(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{""}")
        assert run(["simulate", "--family", str(bad), "--snr", "0",
                    "--trials", "10", "--seed", "1"]) == 2
