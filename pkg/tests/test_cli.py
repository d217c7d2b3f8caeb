import csv
import io
import json
import subprocess
import sys

from primebias import cli


def run_cli(args, **kw):
    return subprocess.run(
        [sys.executable, "-m", "primebias.cli", *args], capture_output=True, text=True, **kw
    )


def run_inproc(args):
    out = io.StringIO()
    cfg = cli.parse_config(args)
    code = cli.run(cfg, out)
    return code, out.getvalue()


class TestRatioCommand:
    def test_pretty_runs(self):
        code, text = run_inproc(["ratio", "--disc", "-4", "--eta", "-1", "--x", "1000,10000"])
        assert code == 0
        assert "ratio" in text and "1000" in text

    def test_csv_schema(self):
        code, text = run_inproc(["ratio", "--disc", "5", "--eta", "-1", "--x", "1000", "--format", "csv"])
        assert code == 0
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == ["x", "disc", "eta", "count", "total", "ratio", "predicted", "s_of_x", "lchi"]
        assert rows[1][0] == "1000" and rows[1][3] == "119" and rows[1][4] == "253"
        assert rows[1][5] == "1.881423"

    def test_csv_json_roundtrip(self):
        args = ["ratio", "--disc", "-4", "--eta", "-1", "--x", "1000,10000,100000"]
        _, csv_text = run_inproc(args + ["--format", "csv"])
        _, json_text = run_inproc(args + ["--format", "json"])
        doc = json.loads(json_text)
        csv_rows = list(csv.DictReader(io.StringIO(csv_text)))
        assert len(csv_rows) == len(doc["rows"]) == 3
        for crow, jrow in zip(csv_rows, doc["rows"]):
            for key in ("x", "count", "total"):
                assert int(crow[key]) == jrow[key]
            for key in ("ratio", "predicted", "s_of_x", "lchi"):
                assert crow[key] == f"{jrow[key]:.6f}"  # bit-for-bit at printed precision

    def test_json_carries_config_echo(self):
        _, text = run_inproc(["ratio", "--x", "1000", "--format", "json", "--convention", "lt"])
        doc = json.loads(text)
        assert doc["tool"] == "primebias"
        assert doc["version"]
        assert doc["config"]["convention"] == "lt"
        assert doc["config"]["tolerance"] == 1e-9

    def test_convention_flag_changes_counts(self):
        _, leq = run_inproc(["ratio", "--x", "1000", "--format", "json"])
        _, lt = run_inproc(["ratio", "--x", "1000", "--format", "json", "--convention", "lt"])
        assert json.loads(leq)["rows"][0]["count"] == 72
        assert json.loads(lt)["rows"][0]["count"] == 66

    def test_byte_identical_across_runs_and_workers(self):
        args = ["ratio", "--disc", "-4", "--x", "1000,10000", "--format", "csv"]
        outs = {run_inproc(args + ["--workers", str(w)])[1] for w in (1, 4, 1)}
        assert len(outs) == 1


class TestOtherCommands:
    def test_lchi(self):
        code, text = run_inproc(["lchi", "--disc", "-4"])
        assert code == 0
        assert "-0.334981" in text and "0.785398" in text

    def test_kfactor(self):
        code, text = run_inproc(["kfactor", "--disc", "-4", "--eta", "-1", "--k", "3", "--x", "10000"])
        assert code == 0

    def test_mixed(self):
        # values starting with "-" need the --opt=value form
        code, text = run_inproc(["mixed", "--specs=-4:-1,5:-1", "--x", "10000", "--format", "json"])
        assert code == 0
        row = json.loads(text)["rows"][0]
        assert row["count"] > 0 and row["c"] > 0

    def test_race(self):
        code, text = run_inproc(["race", "--disc", "-4", "--x", "100000", "--format", "json"])
        assert code == 0
        row = json.loads(text)["rows"][0]
        assert row["s_minus"] > row["s_plus"] > 0

    def test_pairs(self):
        code, text = run_inproc(
            ["pairs", "--mod-a", "4", "--classes-a", "3", "--mod-b", "5",
             "--classes-b", "2,3", "--x", "10000", "--format", "json"]
        )
        assert code == 0
        assert json.loads(text)["rows"][0]["ratio"] > 1

    def test_constants(self):
        code, text = run_inproc(["constants", "--format", "csv"])
        assert code == 0
        assert "-0.315718" in text and "-0.181982" in text


class TestExitCodes:
    def test_usage_error_is_1(self):
        assert run_cli(["ratio", "--eta", "7"]).returncode == 1
        assert run_cli(["ratio", "--disc", "9", "--x", "100"]).returncode == 1
        assert run_cli(["mixed", "--specs", "banana", "--x", "100"]).returncode == 1
        assert run_cli(["pairs", "--mod-a", "4", "--classes-a", "2", "--mod-b", "4",
                        "--classes-b", "3", "--x", "100"]).returncode == 1
        assert run_cli(["nonsense"]).returncode == 1

    def test_decreasing_x_is_usage_error(self):
        assert run_cli(["ratio", "--x", "1000,100"]).returncode == 1

    def test_resource_error_is_2(self):
        r = run_cli(["ratio", "--x", str(2**31 + 2)])
        assert r.returncode == 2
        assert "ceiling" in r.stderr

    def test_success_is_0(self):
        assert run_cli(["ratio", "--x", "1000"]).returncode == 0

    def test_version(self):
        r = run_cli(["--version"])
        assert r.returncode == 0
        assert "primebias" in r.stdout


class TestCache:
    def test_cache_flag_and_env(self, tmp_path):
        args = ["ratio", "--x", "10000", "--format", "csv"]
        plain = run_cli(args)
        cached1 = run_cli(args + ["--cache-dir", str(tmp_path)])
        assert (tmp_path / "primes_10000.bin").is_file()
        cached2 = run_cli(args + ["--cache-dir", str(tmp_path)])
        assert plain.stdout == cached1.stdout == cached2.stdout

        env_dir = tmp_path / "envcache"
        r = run_cli(args, env={**__import__("os").environ, "PRIMEBIAS_CACHE_DIR": str(env_dir)})
        assert r.returncode == 0
        assert (env_dir / "primes_10000.bin").is_file()
        assert r.stdout == plain.stdout
