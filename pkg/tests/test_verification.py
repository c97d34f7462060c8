import pytest

from defining_sets.config import CAP_CLASS
from defining_sets.counting import class_size
from defining_sets.logging_utils import get_run_summary
from defining_sets.run_logger import configure_run_logging
from defining_sets.state_matrix import MarginSpec
from defining_sets.verification import (
    _run_suite,
    all_matrices,
    all_partials,
    run_all_suites,
    subsets_of,
    suite_certificate,
    suite_counting,
    suite_critical,
    suite_defining,
    suite_discrepancy,
    suite_goodform,
    suite_sampler,
    suite_sds,
)


class TestGenerators:
    def test_all_matrices(self):
        assert len(set(all_matrices(2, 2))) == 16

    def test_subsets(self, identity2):
        subsets = list(subsets_of(identity2))
        assert len(subsets) == 16
        assert all(d.is_subset_of(identity2) for d in subsets)

    def test_all_partials(self):
        assert len(set(all_partials(1, 3))) == 27


class TestSuites:
    def test_goodform(self):
        result = suite_goodform(max_dim=2, samples=20)
        assert result.passed
        assert result.cases == sum(3 ** (m * n) for m in (1, 2) for n in (1, 2))

    def test_defining(self):
        assert suite_defining(max_dim=2, samples=10).passed

    def test_sds(self):
        assert suite_sds(max_dim=2, samples=3).passed

    def test_certificate(self):
        assert suite_certificate(max_dim=2, samples=3).passed

    def test_counting(self):
        assert suite_counting(max_dim=2).passed

    def test_discrepancy(self):
        assert suite_discrepancy(max_dim=2, samples=3, sampled_size=5).passed

    def test_critical(self):
        assert suite_critical(samples=5).passed

    def test_sampler(self):
        assert suite_sampler(steps=2000, samples=3000, seed=1).passed

    def test_sampler_margin_check_runs_above_class_cap(self):
        assert class_size(MarginSpec.regular(6, 3)) > CAP_CLASS
        result = suite_sampler(steps=500, samples=600)
        assert result.passed
        assert result.cases == 3

    def test_failure_is_recorded(self, tmp_path):
        configure_run_logging(tmp_path, console=False)
        result = _run_suite("demo", [(1,), (2,), (3,)], lambda x: x != 2)
        assert not result.passed
        assert result.failures == 1
        assert result.counterexample == "2"
        summary = get_run_summary(tmp_path)
        assert summary["suite_failures"] == 1
        assert summary["suites"] == {("demo", "FAIL"): 1}


@pytest.mark.slow
def test_every_suite_at_full_size():
    results = {r.name: r for r in run_all_suites(max_dim=3)}
    assert [name for name, r in results.items() if not r.passed] == []
    exhaustive_partials = sum(3 ** (m * n) for m in (1, 2, 3) for n in (1, 2, 3) if m * n <= 6)
    assert results["goodform"].cases == exhaustive_partials + 5000
    exhaustive_pairs = sum(4 ** (m * n) for m in (1, 2, 3) for n in (1, 2, 3))
    assert results["defining"].cases == exhaustive_pairs + 2 * 500
    assert results["critical"].cases == 100
