import io
import json
import subprocess
import sys

import numpy as np
import pytest

from palinscan import (
    average_rate,
    estimate_model,
    find_palindromes,
    iid_rate,
    markov_rate,
    parse_fasta_file,
)
from palinscan.cli import SCAN_REPORT_KEYS, build_parser, config_from_args, main, run


def invoke(*argv):
    """Run the CLI in-process; return (exit_code, stdout_text)."""
    parser = build_parser()
    config = config_from_args(parser.parse_args(list(argv)))
    buf = io.StringIO()
    code = run(config, out=buf)
    return code, buf.getvalue()


@pytest.fixture(scope="module")
def sample_path(data_dir):
    return str(data_dir / "sample.fa")


@pytest.fixture(scope="module")
def sample_record(sample_path):
    return parse_fasta_file(sample_path)[0]


class TestParser:
    def test_requires_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args([])
        assert exc.value.code == 2

    def test_bad_multiplier_list(self):
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args(["simulate", "--multipliers", "a,b"])
        assert exc.value.code == 2

    def test_defaults(self):
        args = build_parser().parse_args(["scan"])
        config = config_from_args(args)
        assert config.half_length == 6
        assert config.window == 1000
        assert config.alpha == 0.05
        assert config.score == "pls"
        assert config.multipliers == [(1.0, 1.0, 1.0)]

    def test_invalid_alpha_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["scan", "--alpha", "1.5"])
        assert exc.value.code == 2

    def test_invalid_half_length_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["scan", "--L", "0"])
        assert exc.value.code == 2


class TestEstimate:
    def test_requires_input(self):
        code, _ = invoke("estimate")
        assert code == 1

    def test_tsv_matches_library(self, sample_path, sample_record):
        code, text = invoke("estimate", "--input", sample_path)
        assert code == 0
        lines = text.splitlines()
        assert len(lines) == 2
        header = lines[0].split("\t")
        assert header[:6] == ["id", "length", "dropped", "lambda_avg",
                              "lambda_iid", "lambda_markov"]
        assert len(header) == 6 + 4 + 16
        row = dict(zip(header, lines[1].split("\t")))
        seq = sample_record.seq
        model = estimate_model(seq)
        events = find_palindromes(seq, 6)
        assert row["id"] == sample_record.id
        assert int(row["length"]) == seq.length
        assert float(row["lambda_avg"]) == pytest.approx(
            average_rate(events, seq.length, 6).value, rel=1e-9)
        assert float(row["lambda_iid"]) == pytest.approx(
            iid_rate(model.pi, 6).value, rel=1e-9)
        assert float(row["lambda_markov"]) == pytest.approx(
            markov_rate(model, 6).value, rel=1e-9)
        assert float(row["pi_A"]) == pytest.approx(model.pi[0], rel=1e-9)
        assert float(row["p_TT"]) == pytest.approx(model.trans[3, 3], rel=1e-9)

    def test_json_structure(self, sample_path):
        code, text = invoke("estimate", "--input", sample_path, "--json")
        assert code == 0
        payload = json.loads(text)
        assert len(payload) == 1
        entry = payload[0]
        assert set(entry) == {"id", "length", "dropped", "lambda_avg",
                              "lambda_iid", "lambda_markov", "model"}
        assert len(entry["model"]["trans"]) == 4

    def test_unestimable_record_exits_1(self, data_dir, capsys):
        code, _ = invoke("estimate", "--input", str(data_dir / "mixed.fa"))
        assert code == 1
        assert "palinscan estimate:" in capsys.readouterr().err

    def test_missing_file_exits_1(self):
        code, _ = invoke("estimate", "--input", "/no/such/file.fa")
        assert code == 1


class TestScan:
    def test_report_layout(self, sample_path):
        code, text = invoke("scan", "--input", sample_path, "--nu-fixed", "1.0")
        assert code == 0
        lines = text.splitlines()
        assert lines[0] == "\t".join(SCAN_REPORT_KEYS)
        row = dict(zip(lines[0].split("\t"), lines[1].split("\t")))
        assert row["kind"] == "pls"
        assert int(row["w"]) == 1000
        assert int(row["W"]) == 20_000
        assert 0.0 <= float(row["p"]) <= 1.0
        assert float(row["max"]) == pytest.approx(float(row["b"]))

    def test_lambda0_estimator_choice(self, sample_path, sample_record):
        seq = sample_record.seq
        model = estimate_model(seq)
        expect = {
            "markov": markov_rate(model, 6).value,
            "average": average_rate(find_palindromes(seq, 6), seq.length, 6).value,
            "iid": iid_rate(model.pi, 6).value,
        }
        for estimator, value in expect.items():
            _, text = invoke("scan", "--input", sample_path, "--nu-fixed", "1.0",
                             "--rate-estimator", estimator)
            row = dict(zip(*[l.split("\t") for l in text.splitlines()]))
            assert float(row["lambda0"]) == pytest.approx(value, rel=1e-9)

    def test_lambda0_override(self, sample_path):
        _, text = invoke("scan", "--input", sample_path, "--nu-fixed", "1.0",
                         "--lambda0", "0.002")
        row = dict(zip(*[l.split("\t") for l in text.splitlines()]))
        assert float(row["lambda0"]) == 0.002

    def test_json_key_order(self, sample_path):
        code, text = invoke("scan", "--input", sample_path, "--nu-fixed", "1.0",
                            "--json")
        assert code == 0
        assert tuple(json.loads(text)) == SCAN_REPORT_KEYS

    def test_threshold_below_mean_degenerates(self, sample_path):
        _, text = invoke("scan", "--input", sample_path, "--threshold", "0.001")
        row = dict(zip(*[l.split("\t") for l in text.splitlines()]))
        assert float(row["p"]) == 1.0
        assert float(row["theta1"]) == 0.0
        assert float(row["nu"]) == 1.0
        assert float(row["lambda1"]) == float(row["lambda0"])

    def test_compat_changes_p(self, sample_path):
        args = ("scan", "--input", sample_path, "--nu-fixed", "1.0",
                "--threshold", "9.0")
        _, plain = invoke(*args)
        _, compat = invoke(*args, "--compat-paper")
        p_plain = float(dict(zip(*[l.split("\t") for l in plain.splitlines()]))["p"])
        p_compat = float(dict(zip(*[l.split("\t") for l in compat.splitlines()]))["p"])
        assert p_plain != p_compat

    def test_monte_carlo_seeded(self, sample_path):
        args = ("scan", "--input", sample_path, "--threshold", "9.0",
                "--seed", "11")
        _, a = invoke(*args)
        _, b = invoke(*args)
        assert a == b

    def test_dump_series(self, sample_path, sample_record, tmp_path):
        out = tmp_path / "series.tsv"
        _, text = invoke("scan", "--input", sample_path, "--nu-fixed", "1.0",
                         "--dump-series", str(out))
        lines = out.read_text().splitlines()
        assert lines[0] == "t\tvalue"
        assert len(lines) == sample_record.seq.length - 1000 + 1 + 1
        series_max = max(float(l.split("\t")[1]) for l in lines[1:])
        row = dict(zip(*[l.split("\t") for l in text.splitlines()]))
        assert series_max == pytest.approx(float(row["max"]), rel=1e-9)

    def test_dump_events(self, sample_path, sample_record, tmp_path):
        out = tmp_path / "events.tsv"
        invoke("scan", "--input", sample_path, "--nu-fixed", "1.0",
               "--dump-events", str(out))
        lines = out.read_text().splitlines()
        assert lines[0] == "center\thalf_length\tpattern\tpcs\tpls\tbws"
        assert len(lines) - 1 == len(find_palindromes(sample_record.seq, 6))

    def test_requires_input(self):
        code, _ = invoke("scan")
        assert code == 1


class TestMgf:
    def test_grid_layout(self):
        code, text = invoke("mgf", "--points", "8")
        assert code == 0
        lines = text.splitlines()
        assert lines[0] == "t\tmgf_pls\tmgf_bws\tphi\tphi_prime\tphi_double_prime"
        assert len(lines) == 9
        t = [float(l.split("\t")[0]) for l in lines[1:]]
        assert t[0] == 0.0
        assert all(b > a for a, b in zip(t, t[1:]))
        first = lines[1].split("\t")
        assert float(first[1]) == pytest.approx(1.0, abs=1e-10)
        assert float(first[3]) == pytest.approx(0.0, abs=1e-10)
        assert float(first[4]) > 0.0

    def test_json_rows(self):
        code, text = invoke("mgf", "--points", "5", "--json")
        rows = json.loads(text)
        assert code == 0
        assert len(rows) == 5
        assert set(rows[0]) == {"t", "mgf_pls", "mgf_bws", "phi", "phi_prime",
                                "phi_double_prime"}

    def test_model_from_input(self, sample_path):
        _, default_text = invoke("mgf", "--points", "4")
        _, fitted_text = invoke("mgf", "--points", "4", "--input", sample_path)
        assert default_text != fitted_text

    def test_bws_grid_in_narrow_domain(self):
        # bws has t_max < 1, so the grid must stay finite and populated
        code, text = invoke("mgf", "--points", "6", "--score", "bws")
        values = [float(l.split("\t")[2]) for l in text.splitlines()[1:]]
        assert code == 0
        assert all(np.isfinite(v) for v in values)


class TestSimulate:
    ARGS = ("simulate", "--replicates", "2", "--length", "20000",
            "--multipliers", "5,5,5", "--seed", "7")

    def test_tsv(self):
        code, text = invoke(*self.ARGS)
        assert code == 0
        lines = text.splitlines()
        assert lines[0] == "a1\ta2\ta3\tlambda_avg\tlambda_markov"
        assert len(lines) == 2
        fields = lines[1].split("\t")
        assert fields[:3] == ["5", "5", "5"]
        assert float(fields[3]) > 0.0

    def test_rerun_byte_identical(self):
        _, a = invoke(*self.ARGS)
        _, b = invoke(*self.ARGS)
        assert a == b

    def test_multiple_scenarios(self):
        code, text = invoke("simulate", "--replicates", "2", "--length", "20000",
                            "--multipliers", "1,1,1", "--multipliers", "10,10,10",
                            "--seed", "7")
        assert code == 0
        assert len(text.splitlines()) == 3

    def test_json(self):
        code, text = invoke(*self.ARGS, "--json")
        payload = json.loads(text)
        assert code == 0
        assert payload[0]["multipliers"] == [5.0, 5.0, 5.0]
        assert payload[0]["replicates"] == 2
        assert payload[0]["lambda_avg"] > 0.0


class TestPower:
    ARGS = ("power", "--replicates", "2", "--length", "20000",
            "--multipliers", "10,10,10", "--nu-fixed", "1.0", "--seed", "3")

    def test_tsv(self):
        code, text = invoke(*self.ARGS)
        assert code == 0
        lines = text.splitlines()
        assert lines[0] == ("kind\talpha\tmultipliers\testimator\trate"
                            "\tthreshold\tpower1\tpower2\tpower3")
        assert len(lines) == 3
        assert lines[1].split("\t")[3] == "average"
        assert lines[2].split("\t")[3] == "markov"

    def test_rerun_byte_identical(self):
        _, a = invoke(*self.ARGS)
        _, b = invoke(*self.ARGS)
        assert a == b

    def test_json(self):
        code, text = invoke(*self.ARGS, "--json")
        payload = json.loads(text)
        assert code == 0
        assert payload[0]["kind"] == "pls"
        assert [r["estimator"] for r in payload[0]["rows"]] == ["average", "markov"]
        assert all(len(r["powers"]) == 3 for r in payload[0]["rows"])


class TestConsoleScript:
    def test_entry_point(self, sample_path):
        proc = subprocess.run(
            [sys.executable, "-m", "palinscan.cli", "estimate",
             "--input", sample_path],
            capture_output=True, text=True, timeout=120,
        )
        assert proc.returncode == 0
        assert proc.stdout.startswith("id\tlength\tdropped")

    def test_module_error_status(self):
        proc = subprocess.run(
            [sys.executable, "-m", "palinscan.cli", "scan"],
            capture_output=True, text=True, timeout=120,
        )
        assert proc.returncode == 1
        assert "palinscan scan:" in proc.stderr
