import csv
import io
import json

import pytest

from defining_sets.cli import EXIT_BAD_INPUT, EXIT_OK, main


@pytest.fixture
def run(tmp_path, capsys):
    """Invoke the CLI with a private log directory and return (code, stdout, stderr)."""

    def invoke(*argv: str):
        code = main([*argv, "--log-dir", str(tmp_path / "logs")])
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return invoke


def rows_of(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


def test_sds_on_lambda_family(run):
    code, out, _ = run("sds", "--family", "lambda-k2k", "--k", "2", "--samples", "20", "--seed", "7")
    assert code == EXIT_OK
    rows = rows_of(out)
    assert len(rows) == 20
    assert [int(r["seed"]) for r in rows] == list(range(7, 27))
    for r in rows:
        assert int(r["sds"]) <= 8
        assert int(r["lambda_mn"]) == 8
        assert r["exact"] == "true"
        assert r["ratio"] == f"{int(r['sds']) / 8:.12f}"
        assert int(r["certificate"]) <= int(r["sds"])


def test_replay_is_byte_identical(run, tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run("sds", "--k", "2", "--samples", "5", "--seed", "3", "--out", str(first))[0] == EXIT_OK
    assert run("sds", "--k", "2", "--samples", "5", "--seed", "3", "--out", str(second))[0] == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    meta = json.loads((tmp_path / "a.csv.meta.json").read_text())
    assert meta["rng"] == "numpy.Philox4x64-10"
    assert meta["sampler"] == "exact"
    assert meta["config"]["seed"] == 3


def test_workers_do_not_change_output(run):
    _, single, _ = run("sds", "--k", "2", "--samples", "4", "--seed", "1")
    _, pooled, _ = run("sds", "--k", "2", "--samples", "4", "--seed", "1", "--workers", "2")
    assert single == pooled


def test_count_permutations(run):
    code, out, _ = run("count", "--margins", '{"s":[1,1,1],"t":[1,1,1]}', "--format", "json")
    assert code == EXIT_OK
    document = json.loads(out)
    assert document["results"][0]["exact"] == "6"
    assert document["results"][0]["degenerate"] == "false"
    assert isinstance(document["results"][0]["log_estimate"], float)
    assert isinstance(document["results"][0]["ratio_log"], float)
    assert "error_factor" in document
    assert document["metadata"]["config"]["family"] == "custom"


def test_count_margins_from_file(run, tmp_path):
    path = tmp_path / "margins.json"
    path.write_text('{"s": [2, 2, 2, 2], "t": [2, 2, 2, 2]}')
    code, out, _ = run("count", "--margins", str(path))
    assert code == EXIT_OK
    assert rows_of(out)[0]["exact"] == "90"


def test_chains_drive_switch_chain_samples(run):
    argv = ("discrepancy", "--k", "3", "--samples", "4", "--chains", "2", "--burnin", "40", "--thin", "9")
    code, out, _ = run(*argv, "--format", "json")
    assert code == EXIT_OK
    document = json.loads(out)
    assert document["metadata"]["sampler"] == "switch-chain"
    assert document["metadata"]["config"]["chains"] == 2
    assert len(document["results"]) == 4
    pooled = json.loads(run(*argv, "--workers", "2", "--format", "json")[1])
    assert pooled["results"] == document["results"]


def test_discrepancy_columns(run):
    code, out, _ = run("discrepancy", "--k", "2", "--samples", "3")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "m,n,k,seed,sample,maxdelta_num,maxdelta_den,threshold,ratio"
    assert len(rows_of(out)) == 3


def test_critical(run):
    code, out, _ = run("critical", "--k", "2", "--samples", "3", "--seed", "4")
    assert code == EXIT_OK
    for r in rows_of(out):
        assert r["is_critical"] == "true"
        assert r["complement_defining"] == "true"
        assert r["cells"] == "16"


def test_bounds(run):
    code, out, _ = run("bounds", "--k", "2", "--format", "json")
    assert code == EXIT_OK
    document = json.loads(out)
    names = [r["name"] for r in document["results"]]
    assert "balance" in names
    assert "failure_probability" in names
    assert document["hypotheses"]["overall"] is True


def test_maxsds_for_margins(run):
    code, out, _ = run("maxsds", "--margins", '{"s":[1,1],"t":[1,1]}')
    assert code == EXIT_OK
    assert rows_of(out)[0]["maxsds"] == "1"


def test_maxsds_over_shape(run):
    code, out, _ = run("maxsds", "--dims", "2,2", "--format", "json")
    assert code == EXIT_OK
    document = json.loads(out)
    assert document["maxsds_by_density"]["1/2"] == 1
    assert document["maxsds_by_density"]["1/1"] == 0


def test_verify(run):
    code, out, _ = run("verify", "--max-dim", "2", "--samples", "3")
    assert code == EXIT_OK
    assert "all oracle suites passed" in out


@pytest.mark.slow
def test_verify_full(run):
    code, out, _ = run("verify", "--max-dim", "3")
    assert code == EXIT_OK
    assert "all oracle suites passed" in out


@pytest.mark.parametrize(
    "argv",
    [
        ("count", "--margins", '{"s":[2,2],"t":[2,1]}'),
        ("count", "--margins", "{not json"),
        ("sds", "--margins", '{"s":[2,0],"t":[2,0]}'),
        ("sds",),
        ("maxsds", "--dims", "2x2"),
        ("bounds", "--k", "0"),
        ("sds", "--k", "2", "--margins", '{"s":[2,2,2,2],"t":[2,2,2,2]}'),
    ],
)
def test_bad_input(run, argv):
    code, _, err = run(*argv)
    assert code == EXIT_BAD_INPUT
    assert "[error]" in err


def test_writes_run_log(run, tmp_path):
    run("count", "--k", "1")
    log = (tmp_path / "logs" / "runs.log").read_text()
    assert "[EXPERIMENT] START | name=count" in log
    assert "[EXPERIMENT] END | name=count | rows=1" in log
