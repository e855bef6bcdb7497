"""Tests for the command-line interface: synthesize/invert round trips,
exit codes, error surfaces, the verify subcommand (including the
corrupted-kernel fault injection), reproduce cases, and determinism of the
written artifacts.
"""
from __future__ import annotations

import shutil
import subprocess
import sys

import numpy as np
import pytest

import bhsource.specfun
from bhsource import cli, verify

SINGLE3D_CFG = """
[experiment]
name = roundtrip
dimension = 3
algorithm = single3d
noise_level = 0.10
seed = 22222

[sensors]
layout = explicit
points =
    1 0 0
    0 1 0
    0 0 1
    -1 -1 -1

[frequency]
kind = triple
k0 = 1.0

[grid]
lower = 1 1 1
upper = 3 3 3
spacing = 0.1

[source.1]
position = 2 2 2
strength = 1 1
"""

PRONY_CFG = """
[experiment]
name = moments
dimension = 3
algorithm = prony3d
noise_level = 0
seed = 0

[sensors]
layout = explicit
points =
    4 0 0
    0 4 0
    0 0 4
    -3 -3 -3
    2 3 1

[frequency]
kind = harmonic
k0 = 0.2
count = 12

[prony]
m_bound = 2
grid_free = true

[source.1]
position = 1 0.5 0.2
strength = 1 0.5

[source.2]
position = -0.8 0.3 1.1
strength = 0.9 -0.4
"""


def write_cfg(tmp_path, text, name="case.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestSynthesizeInvertRoundTrip:
    def test_invert_from_file_matches_in_memory_run(self, tmp_path):
        cfg = write_cfg(tmp_path, SINGLE3D_CFG)
        out = str(tmp_path)
        assert cli.main(["synthesize", cfg, "--output-dir", out]) == 0
        data = tmp_path / "roundtrip.measurements.csv"
        assert data.exists()

        direct_dir = tmp_path / "direct"
        loaded_dir = tmp_path / "loaded"
        direct_dir.mkdir()
        loaded_dir.mkdir()
        assert cli.main(["invert", cfg, "--output-dir", str(direct_dir)]) == 0
        assert cli.main(["invert", cfg, "--data", str(data),
                         "--output-dir", str(loaded_dir)]) == 0
        direct = (direct_dir / "roundtrip.report.txt").read_bytes()
        loaded = (loaded_dir / "roundtrip.report.txt").read_bytes()
        assert direct == loaded

    def test_report_echoes_resolved_config(self, tmp_path):
        cfg = write_cfg(tmp_path, SINGLE3D_CFG)
        assert cli.main(["invert", cfg, "--output-dir", str(tmp_path)]) == 0
        text = (tmp_path / "roundtrip.report.txt").read_text()
        assert "experiment.seed = 22222" in text
        assert "experiment.algorithm = single3d" in text

    def test_reruns_byte_identical(self, tmp_path):
        cfg = write_cfg(tmp_path, SINGLE3D_CFG)
        first_dir = tmp_path / "a"
        second_dir = tmp_path / "b"
        first_dir.mkdir()
        second_dir.mkdir()
        assert cli.main(["invert", cfg, "--output-dir", str(first_dir)]) == 0
        assert cli.main(["invert", cfg, "--output-dir", str(second_dir)]) == 0
        for name in ("roundtrip.report.txt", "roundtrip.field.csv"):
            assert (first_dir / name).read_bytes() == \
                (second_dir / name).read_bytes()

    def test_override_changes_output(self, tmp_path):
        cfg = write_cfg(tmp_path, SINGLE3D_CFG)
        base_dir = tmp_path / "base"
        alt_dir = tmp_path / "alt"
        base_dir.mkdir()
        alt_dir.mkdir()
        assert cli.main(["invert", cfg, "--output-dir", str(base_dir)]) == 0
        assert cli.main(["invert", cfg, "--set", "experiment.seed=7",
                         "--output-dir", str(alt_dir)]) == 0
        base = (base_dir / "roundtrip.report.txt").read_text()
        alt = (alt_dir / "roundtrip.report.txt").read_text()
        assert base != alt
        assert "experiment.seed = 7" in alt


class TestExitCodes:
    def test_malformed_config_exits_2_naming_field(self, tmp_path, capsys):
        broken = SINGLE3D_CFG.replace("spacing = 0.1", "")
        cfg = write_cfg(tmp_path, broken)
        code = cli.main(["invert", cfg, "--output-dir", str(tmp_path)])
        assert code == 2
        err = capsys.readouterr().err
        assert "grid.spacing" in err

    def test_precondition_failure_exits_1_verbatim(self, tmp_path, capsys):
        # All four sensors on the plane x + y + z = 1.
        coplanar = SINGLE3D_CFG.replace("-1 -1 -1", "0.5 0.5 0")
        cfg = write_cfg(tmp_path, coplanar)
        code = cli.main(["invert", cfg, "--output-dir", str(tmp_path)])
        assert code == 1
        assert "coplanar" in capsys.readouterr().err

    def test_unknown_reproduce_case_exits_2(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            cli.main(["reproduce", "table9", "--output-dir", str(tmp_path)])
        assert exc.value.code == 2


class TestMeasurementCsv:
    def run_invert(self, tmp_path, data_text, capsys):
        cfg = write_cfg(tmp_path, SINGLE3D_CFG)
        data = tmp_path / "data.csv"
        data.write_text(data_text)
        code = cli.main(["invert", cfg, "--data", str(data),
                         "--output-dir", str(tmp_path)])
        return code, capsys.readouterr().err

    def synthesized_lines(self, tmp_path):
        cfg = write_cfg(tmp_path, SINGLE3D_CFG, name="synth.cfg")
        assert cli.main(["synthesize", cfg, "--output-dir",
                         str(tmp_path)]) == 0
        path = tmp_path / "roundtrip.measurements.csv"
        return path.read_text().splitlines()

    def test_bad_header_rejected(self, tmp_path, capsys):
        code, err = self.run_invert(tmp_path, "sensor,k,re,im\n", capsys)
        assert code == 2
        assert "header" in err

    def test_non_numeric_entry_rejected(self, tmp_path, capsys):
        lines = self.synthesized_lines(tmp_path)
        lines[1] = lines[1].rsplit(",", 1)[0] + ",oops"
        code, err = self.run_invert(tmp_path, "\n".join(lines) + "\n", capsys)
        assert code == 2
        assert ":2: non-numeric" in err

    def test_unknown_frequency_rejected(self, tmp_path, capsys):
        lines = self.synthesized_lines(tmp_path)
        parts = lines[1].split(",")
        parts[1] = "3.14159"
        lines[1] = ",".join(parts)
        code, err = self.run_invert(tmp_path, "\n".join(lines) + "\n", capsys)
        assert code == 2
        assert "frequency" in err

    def test_missing_entry_rejected(self, tmp_path, capsys):
        lines = self.synthesized_lines(tmp_path)
        code, err = self.run_invert(tmp_path, "\n".join(lines[:-1]) + "\n",
                                    capsys)
        assert code == 2
        assert "missing" in err

    def test_duplicate_entry_rejected(self, tmp_path, capsys):
        lines = self.synthesized_lines(tmp_path)
        code, err = self.run_invert(
            tmp_path, "\n".join(lines + [lines[1]]) + "\n", capsys)
        assert code == 2
        assert "duplicate" in err

    def test_sensor_index_out_of_range_rejected(self, tmp_path, capsys):
        lines = self.synthesized_lines(tmp_path)
        parts = lines[1].split(",")
        parts[0] = "7"
        lines[1] = ",".join(parts)
        code, err = self.run_invert(tmp_path, "\n".join(lines) + "\n", capsys)
        assert code == 2
        assert "sensor" in err


class TestVerify:
    def test_fresh_build_all_checks_pass(self, capsys):
        assert cli.main(["verify"]) == 0
        out = capsys.readouterr().out
        lines = out.strip().splitlines()
        assert lines[-1].endswith("checks passed")
        check_lines = lines[:-1]
        assert len(check_lines) == 6
        for line in check_lines:
            assert line.startswith("PASS ")
            assert ": " in line

    def test_verify_idempotent(self, capsys):
        assert cli.main(["verify"]) == 0
        first = capsys.readouterr().out
        assert cli.main(["verify"]) == 0
        second = capsys.readouterr().out
        assert first == second

    def test_corrupted_kernel_fails_exactly_dependent_checks(
            self, capsys, monkeypatch):
        # Additive corruption of the exponentially-decaying kernel: the
        # perturbed function no longer solves the underlying equation, so
        # the differential-residual and closed-form-integral checks must
        # fail while every check not involving that kernel stays green.
        original = bhsource.specfun.macdonald_k0

        def corrupted(x):
            return original(x) + 0.01 * np.asarray(x) ** 2

        monkeypatch.setattr(bhsource.specfun, "macdonald_k0", corrupted)
        assert cli.main(["verify"]) == 1
        out = capsys.readouterr().out
        status = {}
        for line in out.strip().splitlines()[:-1]:
            tag, rest = line.split(None, 1)
            status[rest.split(":")[0].strip()] = tag
        assert status["pde_residual_order"] == "FAIL"
        assert status["band_integral_closed_form"] == "FAIL"
        for name, tag in status.items():
            if name not in ("pde_residual_order", "band_integral_closed_form"):
                assert tag == "PASS", f"{name} unexpectedly {tag}"

    def test_run_checks_structure(self):
        results = verify.run_checks()
        names = [r.name for r in results]
        assert names == [
            "profile_monotone",
            "slope_bound_negative",
            "distance_identity",
            "pde_residual_order",
            "band_integral_closed_form",
            "circle_counts",
        ]
        assert all(r.passed for r in results)
        assert all(r.detail for r in results)


class TestReproduce:
    def test_prony_demo_case(self, tmp_path):
        assert cli.main(["reproduce", "prony-demo",
                         "--output-dir", str(tmp_path)]) == 0
        report = (tmp_path / "prony_demo.report.txt").read_text()
        assert "prony3d" in report
        nodes = (tmp_path / "prony_demo.nodes.csv").read_text().splitlines()
        assert nodes[0] == "sensor_index,node_type,value_re,value_im,distance"
        assert len(nodes) > 1

    def test_reproduce_rerun_byte_identical(self, tmp_path):
        first_dir = tmp_path / "a"
        second_dir = tmp_path / "b"
        first_dir.mkdir()
        second_dir.mkdir()
        assert cli.main(["reproduce", "prony-demo",
                         "--output-dir", str(first_dir)]) == 0
        assert cli.main(["reproduce", "prony-demo",
                         "--output-dir", str(second_dir)]) == 0
        for path in first_dir.iterdir():
            twin = second_dir / path.name
            assert twin.exists()
            assert path.read_bytes() == twin.read_bytes()


class TestEntryPoint:
    def test_console_script_help(self):
        exe = shutil.which("bhsource")
        if exe is None:
            pytest.skip("console script not installed")
        result = subprocess.run([exe, "--help"], capture_output=True,
                                text=True, timeout=60)
        assert result.returncode == 0
        for sub in ("synthesize", "invert", "verify", "reproduce"):
            assert sub in result.stdout

    def test_module_main_matches_package(self):
        result = subprocess.run(
            [sys.executable, "-c",
             "import bhsource.cli as c; raise SystemExit(c.main(['--help']))"],
            capture_output=True, text=True, timeout=60)
        assert result.returncode == 0
