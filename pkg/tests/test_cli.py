import io
import json

import pandas as pd
import pytest

from stabkit import __version__, config
import stabkit.cli as cli
from stabkit.cli import EXIT_CHECK, EXIT_OK, EXIT_USAGE, build_parser, main

REP3 = str(config.CODES_DIR / "rep3.txt")
BITFLIP = str(config.CODES_DIR / "bitflip3.code")
SHOR9 = str(config.CODES_DIR / "shor9.code")


def run(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def test_we_brute(capsys):
    status, out, _ = run(capsys, "we-brute", "--code", REP3)
    assert status == EXIT_OK
    assert out == "1,0,0,1\n"


def test_we_extract(capsys, tmp_path):
    trace = tmp_path / "trace.json"
    status, out, _ = run(capsys, "we-extract", "--code", REP3, "--trace", str(trace))
    assert status == EXIT_OK
    assert out == "1,0,0,1\n"

    transcript = json.loads(trace.read_text(encoding="utf-8"))
    assert transcript["total_queries"] == len(transcript["queries"])
    assert set(transcript["queries"][0]) == {"v", "p", "p_lo", "p_hi", "answer", "coset"}
    assert "/" in transcript["queries"][0]["v"]


def test_we_extract_json_with_robustness(capsys):
    status, out, _ = run(
        capsys, "we-extract", "--code", REP3, "--format", "json", "--robustness-trials", "3", "--seed", "5"
    )
    payload = json.loads(out)
    robustness = payload["robustness"]
    assert payload["we"] == [1, 0, 0, 1]
    assert payload["verified"] is True
    assert robustness["correct"] + robustness["detected"] + robustness["wrong"] == 3
    assert status == (EXIT_OK if robustness["wrong"] == 0 else EXIT_CHECK)


class TestDecode:

    def test_zero_syndrome(self, capsys):
        status, out, _ = run(capsys, "decode", "--code", BITFLIP, "--channel", "xz:p=1/8", "--syndrome", "00")
        payload = json.loads(out)
        assert status == EXIT_OK
        assert payload["dqmld"]["winner"] == "I"
        assert payload["qmld"]["error"] == "III"

    def test_single_flip(self, capsys):
        status, out, _ = run(
            capsys, "decode", "--code", BITFLIP, "--channel", "xz:p=1/8", "--syndrome", "10", "--decoder", "qmld"
        )
        payload = json.loads(out)
        assert payload == {"syndrome": "10", "qmld": {"error": "XII", "class": "I"}}

    def test_channel_file(self, capsys, tmp_path):
        spec = tmp_path / "channel.json"
        spec.write_text(json.dumps({"n": 3, "qubits": [{"I": "9/10", "Z": "1/10"}] * 3}), encoding="utf-8")
        status, out, _ = run(capsys, "decode", "--code", BITFLIP, "--channel", str(spec), "--syndrome", "00")
        assert status == EXIT_OK
        assert json.loads(out)["dqmld"]["winner"] == "I"

    @pytest.mark.parametrize("syndrome", ["1", "102", "000"])
    def test_malformed_syndrome(self, capsys, syndrome):
        status, _, err = run(capsys, "decode", "--code", BITFLIP, "--channel", "xz:p=1/8", "--syndrome", syndrome)
        assert status == EXIT_USAGE
        assert "syndrome" in err


def test_enumerate_sum_rule(capsys):
    status, out, _ = run(capsys, "enumerate", "--code", SHOR9, "--syndrome", "0" * 8, "--format", "csv")
    df = pd.read_csv(io.StringIO(out))
    assert status == EXIT_OK
    assert list(df.columns) == ["weight", "count"]
    assert df["count"].sum() == 256
    assert df.loc[df["weight"] == 0, "count"].item() == 1


def test_enumerate_trivial_code(capsys, tmp_path):
    code = tmp_path / "free.code"
    code.write_text("2 2\n", encoding="utf-8")
    status, out, _ = run(capsys, "enumerate", "--code", str(code), "--syndrome", "", "--label", "II", "--format", "csv")
    df = pd.read_csv(io.StringIO(out))
    assert status == EXIT_OK
    assert df.to_dict(orient="list") == {"weight": [0], "count": [1]}


def test_enumerate_bad_label(capsys):
    status, _, _ = run(capsys, "enumerate", "--code", BITFLIP, "--syndrome", "00", "--label", "XX")
    assert status == EXIT_USAGE


class TestCompare:

    def test_two_class_threshold(self, capsys):
        status, out, _ = run(capsys, "compare", "--two-class", "2,1,12,3", "--format", "csv")
        df = pd.read_csv(io.StringIO(out))
        assert status == EXIT_OK
        assert len(df) == 6
        assert (df["agree"] == ~df["above_threshold"]).all()
        assert df["above_threshold"].sum() == 2

    def test_small_p_agrees(self, capsys):
        status, out, _ = run(capsys, "compare", "--code", BITFLIP, "--p-grid", "1/64,1/32", "--format", "json")
        rows = json.loads(out)
        assert status == EXIT_OK
        assert len(rows) == 8
        assert all(row["agree"] for row in rows)

    @pytest.mark.parametrize("grid", ["2", "0,1/8", "abc", ""])
    def test_invalid_grid(self, capsys, grid):
        status, _, _ = run(capsys, "compare", "--code", BITFLIP, "--p-grid", grid)
        assert status == EXIT_USAGE

    def test_needs_input(self, capsys):
        status, _, _ = run(capsys, "compare")
        assert status == EXIT_USAGE


def test_shor_validate(capsys):
    status, out, err = run(capsys, "shor-validate", "--n1", "2", "--n2", "3", "--p", "1/4", "--ell", "1", "--format", "csv")
    df = pd.read_csv(io.StringIO(out))
    assert status == EXIT_OK
    assert list(df["class"]) == ["I", "X", "Z", "Y"]
    assert df["match"].all()
    assert "leakage" in err


def test_shor_validate_bad_ell(capsys):
    status, _, _ = run(capsys, "shor-validate", "--n1", "2", "--n2", "3", "--p", "1/4", "--ell", "5")
    assert status == EXIT_USAGE


def test_fixtures(capsys, tmp_path):
    fixture_list = tmp_path / "codes.txt"
    fixture_list.write_text("rep3.txt\nid2.txt\n", encoding="utf-8")
    report = tmp_path / "report.json"
    status, out, _ = run(capsys, "fixtures", "--list", str(fixture_list), "--output", str(report))
    assert status == EXIT_OK
    assert "✅" in out
    assert [row["name"] for row in json.loads(report.read_text(encoding="utf-8"))["data"]] == ["rep3", "id2"]


def test_missing_file(capsys):
    status, _, err = run(capsys, "we-brute", "--code", "no/such/file.txt")
    assert status == EXIT_USAGE
    assert "file not found" in err


def test_no_subcommand(capsys):
    assert main([]) == EXIT_USAGE


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_verbosity_and_seed_on_subcommands():
    args = build_parser().parse_args(["we-brute", "--code", REP3, "-vv", "--seed", "3"])
    assert args.verbosity == 2
    assert args.seed == 3


def test_exit_code_for_failed_check(capsys, monkeypatch):
    monkeypatch.setattr(cli, "brute_force_we", lambda code: (9, 9, 9, 9))
    status, _, _ = run(capsys, "we-extract", "--code", REP3)
    assert status == EXIT_CHECK
