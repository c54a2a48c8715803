"""Harness behavior: records, schemas, determinism, exit codes."""

import json
import os

import jsonschema
import numpy as np
import pytest

from stableavoid.cli import (
    CSV_HEADER,
    build_parser,
    main,
    reduce_general_interval,
)
from stableavoid.errors import DomainError

SCHEMA_PATH = os.path.join(
    os.path.dirname(__file__), "..", "src", "stableavoid", "schemas",
    "result_record.schema.json",
)


class TestReduceGeneralInterval:
    def test_identity_map(self):
        assert reduce_general_interval(-1.0, 1.0, 2.0) == (2.0, 1.0, 0.0)

    def test_shifted_interval(self):
        x_std, scale, shift = reduce_general_interval(0.0, 2.0, 3.0)
        assert x_std == 2.0
        assert scale == 1.0 and shift == 1.0

    @pytest.mark.parametrize("a,b,x", [
        (-1.0, 1.0, 1.7), (0.0, 2.0, -5.3), (-7.0, -3.0, 12.25),
        (2.5, 97.0, 1.0),
    ])
    def test_round_trip(self, a, b, x):
        x_std, scale, shift = reduce_general_interval(a, b, x)
        assert scale * x_std + shift == pytest.approx(x, abs=1e-12)
        # interval endpoints map onto +-1
        assert scale * 1.0 + shift == pytest.approx(b)
        assert scale * -1.0 + shift == pytest.approx(a)

    def test_rejects_inside_and_disorder(self):
        with pytest.raises(DomainError):
            reduce_general_interval(0.0, 2.0, 1.0)
        with pytest.raises(DomainError):
            reduce_general_interval(2.0, 0.0, 5.0)


class TestCliRuns:
    def test_verify_h_csv(self, tmp_path, capsys):
        out = tmp_path / "h.csv"
        code = main([
            "verify-h", "--alpha", "0.5", "--x0", "-3", "--n", "5000",
            "--seed", "1", "--out", str(out),
        ])
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == CSV_HEADER
        closed = lines[1].split(",")
        assert closed[0] == "h_closed_form"
        assert float(closed[1]) == pytest.approx(0.5, abs=1e-10)
        mc = lines[2].split(",")
        assert mc[0] == "mc_never_hit"
        assert abs(float(mc[1]) - 0.5) < 0.03

    def test_json_records_validate_against_schema(self, tmp_path):
        out = tmp_path / "r.json"
        code = main([
            "martingale", "--alpha", "1.5", "--x0", "2", "--t", "0.1",
            "--n", "4000", "--seed", "3", "--format", "json",
            "--out", str(out),
        ])
        assert code == 0
        records = json.loads(out.read_text())
        schema = json.loads(open(SCHEMA_PATH).read())
        assert len(records) >= 1
        for rec in records:
            jsonschema.validate(rec, schema)

    def test_profile_predicted_column(self, tmp_path):
        out = tmp_path / "p.csv"
        code = main([
            "profile", "--alpha", "1.5", "--xs=-2,-3", "--q", "1e-1",
            "--n", "2000", "--seed", "5", "--dt-cap", "2.0",
            "--out", str(out),
        ])
        assert code == 0
        text = out.read_text()
        assert "1.4142135623730951" in text

    def test_determinism_bytes_and_workers(self, tmp_path):
        argv = [
            "martingale", "--alpha", "1.5", "--x0", "2", "--t", "0.1",
            "--n", "20000", "--seed", "7",
        ]
        paths = [tmp_path / f"m{k}.csv" for k in range(3)]
        assert main(argv + ["--out", str(paths[0]), "--workers", "1"]) == 0
        assert main(argv + ["--out", str(paths[1]), "--workers", "1"]) == 0
        assert main(argv + ["--out", str(paths[2]), "--workers", "2"]) == 0
        blobs = [p.read_bytes() for p in paths]
        assert blobs[0] == blobs[1]
        assert blobs[0] == blobs[2]

    def test_overshoot_subcommand(self, tmp_path):
        out = tmp_path / "o.csv"
        code = main([
            "overshoot", "--alpha", "0.5", "--x0", "-3", "--n", "20000",
            "--seed", "11", "--out", str(out),
        ])
        assert code == 0
        rows = {
            line.split(",")[0]: line.split(",")
            for line in out.read_text().strip().splitlines()[1:]
        }
        assert abs(float(rows["p_overshoot_gt_2"][1]) - 0.5) < 0.02
        assert float(rows["overshoot_ks"][1]) < 0.02

    def test_config_file_supplies_defaults(self, tmp_path):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text("dt-cap = 1.0\n# comment\n")
        out = tmp_path / "c.csv"
        code = main([
            "martingale", "--alpha", "1.5", "--x0", "2", "--t", "0.05",
            "--n", "2000", "--seed", "2", "--config", str(cfgfile),
            "--out", str(out),
        ])
        assert code == 0

    def test_reduce_subcommand(self, capsys):
        assert main(["reduce", "--a", "0", "--b", "2", "--x", "3"]) == 0
        text = capsys.readouterr().out
        assert text.splitlines()[1].startswith("x_std,2.0")


class TestExitCodes:
    def test_unknown_flag_exits_two(self):
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args(["martingale", "--bogus", "1"])
        assert exc.value.code == 2

    def test_domain_error_exits_three(self, capsys):
        code = main([
            "verify-h", "--alpha", "1.0", "--x0", "-3", "--n", "100",
        ])
        assert code == 3

    def test_degenerate_conditioning_exits_four(self, tmp_path):
        code = main([
            "exp-cond", "--alpha", "1.5", "--x0", "1.0001", "--t", "1.0",
            "--q", "1e-9", "--a", "1", "--b", "2", "--n", "40", "--seed", "1",
            "--dt-cap", "1.0", "--out", str(tmp_path / "x.csv"),
        ])
        assert code == 4

    def test_self_check_subset_passes(self, capsys):
        code = main(["self-check", "--scale", "0.3", "--only", "1,9,11,12"])
        out = capsys.readouterr().out
        assert code == 0
        assert "[PASS]" in out
        assert "[XFAIL]" in out  # the two ledgered h-limit subchecks
