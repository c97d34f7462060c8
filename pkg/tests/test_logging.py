import logging

from defining_sets.logging_utils import (
    get_log_path,
    get_run_summary,
    get_suite_breakdown,
    print_failures,
    print_summary,
    read_logs,
)
from defining_sets.run_logger import (
    configure_run_logging,
    log_chain,
    log_experiment_end,
    log_experiment_start,
    log_sample_result,
    log_solver_fallback,
    log_suite_result,
)


def test_handlers_attached_once(tmp_path):
    first = configure_run_logging(tmp_path, console=False)
    second = configure_run_logging(tmp_path, console=False)
    assert first == second == tmp_path / "runs.log"
    handlers = logging.getLogger("defining_sets").handlers
    assert sum(isinstance(h, logging.FileHandler) for h in handlers) == 1


def test_default_directory_from_environment(isolated_run_log):
    log_file = configure_run_logging(console=False)
    assert log_file == isolated_run_log / "runs.log"
    assert get_log_path() == log_file


def test_summary_counts_records(tmp_path):
    configure_run_logging(tmp_path, console=False)
    log_experiment_start("sds", seed=7, samples=2, rng="numpy.Philox4x64-10")
    log_sample_result("sds", 0, 7, sds=3)
    log_sample_result("sds", 1, 8, sds=4)
    log_solver_fallback(9, 9, "cap", "numpy.Philox4x64-10", 7)
    log_chain(100, 12, 7)
    log_suite_result("goodform", 10, 0)
    log_suite_result("sds", 5, 2, "2 2/10/01")
    log_experiment_end("sds", rows=2)

    summary = get_run_summary(tmp_path)
    assert summary["experiments"] == 1
    assert summary["samples"] == 2
    assert summary["solver_fallbacks"] == 1
    assert summary["chains"] == 1
    assert summary["suite_failures"] == 1
    assert summary["suites"] == {("goodform", "PASS"): 1, ("sds", "FAIL"): 1}
    assert summary["total_lines"] == 8


def test_sample_line_format(tmp_path):
    configure_run_logging(tmp_path, console=False)
    log_sample_result("critical", 3, 10, critical_size=5)
    line = read_logs(limit=1, log_dir=tmp_path)[0]
    assert "[SAMPLE] CRITICAL | sample=3 | seed=10 | critical_size=5" in line


def test_suite_breakdown_ignores_other_lines():
    lines = [
        "x - defining_sets - INFO - [SUITE] PASS | suite=counting | cases=4\n",
        "x - defining_sets - INFO - [CHAIN] DONE | steps=1 | active=0 | seed=0\n",
    ]
    assert get_suite_breakdown(lines) == {("counting", "PASS"): 1}


def test_empty_log(tmp_path):
    assert read_logs(log_dir=tmp_path) == []
    assert get_run_summary(tmp_path) == {}


def test_printing(tmp_path, capsys):
    print_summary(tmp_path)
    configure_run_logging(tmp_path, console=False)
    log_suite_result("sds", 5, 1, "1 1/1")
    print_summary(tmp_path)
    print_failures(tmp_path)
    err = capsys.readouterr().err
    assert "No run logs found yet" in err
    assert "Run Log Summary" in err
    assert "suite=sds" in err
