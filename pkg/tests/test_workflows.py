"""
Tests for the batch experiment workflows.
"""

import math
import os

import pytest

from ample_system.core.errors import ComplexInputError
from ample_system.core.random_complex import HashComplexOracle, ProbProfile
from ample_system.core.simplex_core import cycle_graph, full_simplex
from ample_system.workflows.experiments import (
    CharsumAuditWorkflow,
    ExperimentChain,
    FillBatchWorkflow,
    MedialBatchWorkflow,
    SolveBatchWorkflow,
    audit_plan,
)

long_test = pytest.mark.skipif(
    not os.environ.get("AMPLE_LONG_TESTS"), reason="set AMPLE_LONG_TESTS=1 for long acceptance runs"
)


class TestExperimentChain:
    def test_steps_run_in_order(self):
        def first(ctx):
            return {**ctx, "trace": ctx["trace"] + ["first"]}

        def second(ctx):
            return {**ctx, "trace": ctx["trace"] + ["second"]}

        ctx = ExperimentChain(first, second).run({"trace": []})
        assert ctx["trace"] == ["first", "second"]
        assert set(ctx["timings"]) == {"first", "second"}

    def test_error_skips_remaining_steps(self):
        def broken(ctx):
            raise ComplexInputError("bad input")

        def never(ctx):
            raise AssertionError("step after an error must not run")

        ctx = ExperimentChain(broken, never).run({})
        assert ctx["error"] == {"error": "input", "message": "bad input"}
        assert list(ctx["timings"]) == ["broken"]


def test_audit_plan_keeps_divisors_only():
    assert audit_plan((29, 13), (5, 4, 3, 2), (1,)) == [
        (13, 2, 1), (13, 3, 1), (13, 4, 1), (29, 2, 1), (29, 4, 1)
    ]


class TestCharsum:
    def test_small_grid_is_clean(self):
        ctx = CharsumAuditWorkflow().run({"qs": (13,), "ms": (3,), "ds": (1, 2), "trials": 2})
        report = ctx["report"]
        assert len(report["audits"]) == 2
        assert report["coset_violations"] == 0 and report["weil_violations"] == 0
        assert all(audit["rows"] == [] for audit in report["audits"])

    @pytest.mark.slow
    @long_test
    def test_full_grid_is_clean(self):
        report = CharsumAuditWorkflow(workers=4).run({})["report"]
        assert len(report["audits"]) == len(audit_plan((13, 29, 101, 257), (2, 3, 4, 5), (1, 2, 3)))
        assert all(audit["trials"] == 200 for audit in report["audits"])
        assert report["coset_violations"] == 0 and report["weil_violations"] == 0
        assert all(audit["rows"] == [] for audit in report["audits"])


class TestSolveBatch:
    def test_certified_field(self):
        report = SolveBatchWorkflow().run({"r": 1, "count": 3})["report"]
        assert report["params"]["p"] == 17 and report["params"]["n"] == 307
        assert report["solved"] == report["checked"] == 3

    def test_given_field(self, ctx13):
        report = SolveBatchWorkflow().run({"r": 1, "count": 4, "field": ctx13})["report"]
        assert report["params"] is None
        assert report["field"] == "field:n=13,p=3,g=2"
        assert report["checked"] == 4

    def test_out_of_range_level_records_an_error(self):
        ctx = SolveBatchWorkflow().run({"r": 3, "count": 1})
        assert ctx["error"]["error"] == "range"
        assert "report" not in ctx

    def test_workers_agree(self, ctx13):
        single = SolveBatchWorkflow(workers=1).run({"r": 1, "count": 6, "field": ctx13})["report"]
        pooled = SolveBatchWorkflow(workers=2).run({"r": 1, "count": 6, "field": ctx13})["report"]
        assert single == pooled

    @pytest.mark.slow
    @long_test
    def test_certified_level_two_acceptance_batch(self):
        report = SolveBatchWorkflow(workers=4).run({"r": 2, "count": 100})["report"]
        assert report["params"]["p"] == 257
        assert report["solved"] == report["checked"] == 100
        shapes = {
            tuple(tuple(row["U"].index(v) for v in s) for s in row["Y"])
            for row in report["rows"]
        }
        assert len(shapes) == 8


class TestMedialBatch:
    def test_small_batch(self):
        report = MedialBatchWorkflow().run(
            {"n": 16, "r": 1, "p": 0.5, "dim_cap": 2, "count": 3, "removals": 1}
        )["report"]
        assert report["seeds"] == 3
        assert [row["seed"] for row in report["rows"]] == [0, 1, 2]
        assert report["removal"]["level"] == 0
        assert report["removal"]["tested"] == min(1, report["ample"])
        assert 0.0 <= report["bound_not_ample"] <= 1.0
        assert 0.0 <= report["bound_not_ample_sum"] <= 1.0

    def test_no_removals(self):
        report = MedialBatchWorkflow().run({"n": 12, "r": 1, "count": 2, "removals": 0})["report"]
        assert report["removal"]["tested"] == 0

    @pytest.mark.slow
    def test_medial_regime_at_level_two(self):
        report = MedialBatchWorkflow(workers=2).run(
            {"n": 256, "r": 2, "p": 0.7, "dim_cap": 3, "count": 5, "removals": 2}
        )["report"]
        assert report["ample"] == 5
        assert report["removal"]["level"] == 1
        assert report["removal"]["ample"] == report["removal"]["tested"] == 2

    @pytest.mark.slow
    @long_test
    def test_medial_acceptance_batch(self):
        report = MedialBatchWorkflow(workers=4).run(
            {"n": 256, "r": 2, "p": 0.5, "dim_cap": 3, "count": 50, "removals": 20}
        )["report"]
        assert report["ample"] >= 40
        assert report["removal"]["tested"] == 20
        assert report["removal"]["ample"] == 20


class TestFillBatch:
    def test_loops_in_a_simplex(self):
        report = FillBatchWorkflow().run(
            {"oracle": full_simplex(range(12), 2), "r": 5, "count": 2, "min_length": 6, "max_length": 8}
        )["report"]
        assert report["filled"] == report["valid"] == 2
        for row in report["rows"]:
            assert row["triangles"] <= row["triangle_bound"]

    def test_stuck_on_a_bare_cycle(self):
        report = FillBatchWorkflow().run(
            {"oracle": cycle_graph(8), "r": 4, "count": 1, "min_length": 8, "max_length": 8}
        )["report"]
        assert report["filled"] == 0
        assert "stuck" in report["rows"][0]

    @pytest.mark.slow
    @long_test
    def test_cone_fills_on_a_huge_hash_complex(self):
        X = HashComplexOracle(2**23, ProbProfile(p=0.5), 5, seed=11)
        report = FillBatchWorkflow(workers=4).run({"oracle": X, "seed": 11})["report"]
        assert report["witness_mode"] == "cone" and report["r"] == 5
        assert report["filled"] == report["valid"] == 20
        for row in report["rows"]:
            assert 10 <= row["length"] <= 30
            half = math.ceil((row["length"] - 3) / 2)
            assert row["internal"] <= half
            assert row["triangles"] <= 4 * half + 1
