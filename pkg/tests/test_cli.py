"""Tests for the batch driver: config handling, artifacts, exit codes."""

import json

import pytest

from circren.cli import main


def run_cli(*args):
    return main(list(args))


class TestConfig:
    def test_missing_config_file(self, tmp_path):
        assert run_cli("rotnum", "--config", str(tmp_path / "nope.ini"),
                       "--out", str(tmp_path)) == 2

    def test_unknown_key(self, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("walrus = 3\n")
        assert run_cli("rotnum", "--config", str(cfg),
                       "--out", str(tmp_path)) == 2

    def test_bad_value_type(self, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("degree = fast\n")
        assert run_cli("rotnum", "--config", str(cfg),
                       "--out", str(tmp_path)) == 2

    def test_degree_floor(self, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("degree = 4\n")
        assert run_cli("rotnum", "--config", str(cfg),
                       "--out", str(tmp_path)) == 2

    def test_degree_override_flag(self, tmp_path):
        assert run_cli("rotnum", "--out", str(tmp_path),
                       "--degree", "4") == 2

    def test_section_header_optional(self, tmp_path):
        plain = tmp_path / "plain.ini"
        plain.write_text("depth = 6\n")
        headed = tmp_path / "headed.ini"
        headed.write_text("[run]\ndepth = 6\n")
        for cfg, sub in ((plain, "a"), (headed, "b")):
            out = tmp_path / sub
            assert run_cli("rotnum", "--config", str(cfg),
                           "--out", str(out)) == 0
        assert ((tmp_path / "a" / "rotnum.csv").read_text()
                == (tmp_path / "b" / "rotnum.csv").read_text())


class TestNoOp:
    def test_manifest_only(self, tmp_path):
        assert run_cli("--out", str(tmp_path)) == 0
        names = {p.name for p in tmp_path.iterdir()}
        assert names == {"manifest.json"}

    def test_manifest_schema(self, tmp_path):
        run_cli("--out", str(tmp_path), "--seed", "17")
        man = json.loads((tmp_path / "manifest.json").read_text())
        assert man["config"]["seed"] == 17
        assert man["artifacts"] == []
        assert man["wall_time_s"] >= 0
        assert "tolerances" in man and "version" in man


class TestFastSubcommands:
    def test_rotnum_golden_digit_row(self, tmp_path):
        assert run_cli("rotnum", "--out", str(tmp_path)) == 0
        lines = (tmp_path / "rotnum.csv").read_text().splitlines()
        assert len(lines) == 2
        assert lines[1].split(",") == ["1"] * 12

    def test_cocycle_golden_fixed_point(self, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("digits = 1\ndelta = 0.3819660113\nsteps = 100\n")
        assert run_cli("cocycle", "--config", str(cfg),
                       "--out", str(tmp_path)) == 0
        lines = (tmp_path / "cocycle.csv").read_text().splitlines()
        assert len(lines) == 101
        for line in lines[1:]:
            _, d = line.split(",")
            assert abs(float(d) - 0.3819660113) < 1e-9
        man = json.loads((tmp_path / "manifest.json").read_text())
        assert man["config"]["results"]["drift"] < 1e-9

    def test_cocycle_fixed_point_tight(self, tmp_path):
        # at the exact golden fixed point the orbit repeats to 1e-12
        cfg = tmp_path / "c.ini"
        cfg.write_text("digits = 1\ndelta = 0.3819660112501051\n"
                       "steps = 100\n")
        run_cli("cocycle", "--config", str(cfg), "--out", str(tmp_path))
        man = json.loads((tmp_path / "manifest.json").read_text())
        assert man["config"]["results"]["drift"] < 1e-12

    def test_partition_schema(self, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("level = 2\n")
        assert run_cli("partition", "--config", str(cfg),
                       "--out", str(tmp_path)) == 0
        lines = (tmp_path / "partition.csv").read_text().splitlines()
        assert lines[0] == "index,lo,hi,label"
        total = 0.0
        for line in lines[1:]:
            _, lo, hi, label = line.split(",")
            assert float(lo) < float(hi)
            assert label in ("I_n", "I_n+1")
            total += float(hi) - float(lo)
        assert abs(total - 1.0) < 1e-9

    def test_extract_writes_validation(self, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("level = 1\ndegree = 16\n")
        assert run_cli("extract", "--config", str(cfg),
                       "--out", str(tmp_path)) == 0
        man = json.loads((tmp_path / "manifest.json").read_text())
        assert man["config"]["results"]["validation"]["commutation"] < 1e-9

    def test_determinism(self, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("level = 2\n")
        for sub in ("x", "y"):
            run_cli("partition", "--config", str(cfg),
                    "--out", str(tmp_path / sub), "--seed", "3")
        assert ((tmp_path / "x" / "partition.csv").read_bytes()
                == (tmp_path / "y" / "partition.csv").read_bytes())

    def test_manifest_lists_artifacts(self, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("level = 2\n")
        run_cli("partition", "--config", str(cfg), "--out", str(tmp_path))
        man = json.loads((tmp_path / "manifest.json").read_text())
        for name in man["artifacts"]:
            assert (tmp_path / name).exists()

    def test_collision_needs_deltas(self, tmp_path):
        assert run_cli("collision", "--out", str(tmp_path)) == 2

    def test_converge_needs_second_map(self, tmp_path):
        assert run_cli("converge", "--out", str(tmp_path)) == 2


@pytest.mark.slow
class TestSlowSubcommands:
    def test_renorm_heights_follow_digits(self, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("n_max = 4\ndegree = 24\n")
        assert run_cli("renorm", "--config", str(cfg),
                       "--out", str(tmp_path)) == 0
        lines = (tmp_path / "renorm.csv").read_text().splitlines()
        heights = [int(line.split(",")[3]) for line in lines[1:]]
        assert heights == [1] * 5

    def test_bounds_schema(self, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("n_max = 4\ndegree = 24\n")
        assert run_cli("bounds", "--config", str(cfg),
                       "--out", str(tmp_path)) == 0
        lines = (tmp_path / "bounds.csv").read_text().splitlines()
        assert lines[0] == "n,ratio,c1norm"
        assert len(lines) == 6
