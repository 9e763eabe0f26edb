"""
Tests for the command-line interface.
"""

import json
import logging

import pytest
from click.testing import CliRunner

from ample_system.cli.main import cli
from ample_system.core.simplex_core import cycle_graph

pytestmark = pytest.mark.integration


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(autouse=True)
def detach_cli_logging():
    yield
    root = logging.getLogger("ample_system")
    for handler in list(root.handlers):
        root.removeHandler(handler)
    root.setLevel(logging.NOTSET)


def invoke(runner, *args):
    result = runner.invoke(cli, [str(a) for a in args])
    lines = [line for line in result.stdout.splitlines() if line.strip()]
    data = json.loads(lines[-1]) if lines else None
    return result, data


def save_report(tmp_path, data, name="report.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


class TestVerify:
    def test_example13_is_two_ample(self, runner):
        result, data = invoke(runner, "verify", "--oracle", "example13", "--r", 2)
        assert result.exit_code == 0
        assert data["verdict"] == "ample"
        assert data["oracle"] == "example13"
        assert "ms" not in data

    def test_counterexample_round_trip(self, runner, tmp_path):
        result, data = invoke(runner, "verify", "--oracle", "example13", "--r", 3)
        assert result.exit_code == 1
        assert data["verdict"] == "counterexample"
        path = save_report(tmp_path, data)
        result, outcome = invoke(runner, "recheck", path)
        assert result.exit_code == 0
        assert outcome == {"kind": "counterexample", "valid": True, "witness": None}

    def test_forged_counterexample_is_rejected(self, runner, tmp_path):
        report = {"oracle": "example13", "counterexample": {"U": [0, 1], "A_facets": [[0, 1]]}}
        result, outcome = invoke(runner, "recheck", save_report(tmp_path, report))
        assert result.exit_code == 1
        assert outcome["witness"] == 4

    def test_thread_count_does_not_change_output(self, runner):
        _, single = invoke(runner, "--threads", 1, "verify", "--oracle", "example13", "--r", 3)
        _, pooled = invoke(runner, "--threads", 2, "verify", "--oracle", "example13", "--r", 3)
        assert single == pooled

    def test_links(self, runner):
        result, data = invoke(runner, "verify", "--oracle", "example13", "--r", 2, "--links", 0)
        assert result.exit_code == 0
        assert data["all_ample"] and data["level"] == 1
        assert len(data["links"]) == 13
        assert data["link_counterexamples"] == []

    def test_failing_links_round_trip(self, runner, tmp_path):
        result, data = invoke(runner, "verify", "--oracle", "example13", "--r", 3, "--links", 0)
        assert result.exit_code == 1
        assert not data["all_ample"]
        failing = data["link_counterexamples"]
        assert len(failing) == 13
        assert all(len(entry["simplex"]) == 1 for entry in failing)
        result, outcome = invoke(runner, "recheck", save_report(tmp_path, data))
        assert result.exit_code == 0
        assert outcome == {"kind": "links", "valid": True, "checked": 13}

    def test_forged_link_counterexample_is_rejected(self, runner, tmp_path):
        _, data = invoke(runner, "verify", "--oracle", "example13", "--r", 3, "--links", 0)
        entry = data["link_counterexamples"][0]
        entry["counterexample"] = {"U": [], "A_facets": []}
        data["link_counterexamples"] = [entry]
        result, outcome = invoke(runner, "recheck", save_report(tmp_path, data))
        assert result.exit_code == 1
        assert outcome["valid"] is False

    def test_timing_flag(self, runner):
        _, data = invoke(runner, "--timing", "verify", "--oracle", "example13", "--r", 1)
        assert "ms" in data

    def test_sampled_mode(self, runner):
        result, data = invoke(runner, "--seed", 5, "verify", "--oracle", "example13", "--r", 2,
                              "--mode", "sampled", "--trials", 10)
        assert result.exit_code == 0
        assert data["verdict"] == "not-refuted" and data["seed"] == 5

    def test_bad_oracle(self, runner):
        result, data = invoke(runner, "verify", "--oracle", "bogus", "--r", 1)
        assert result.exit_code == 2
        assert data["error"] == "input"


class TestWitness:
    def test_cone_point(self, runner):
        result, data = invoke(runner, "witness", "--oracle", "example13", "--U", "0,1", "--A", "[[0,1]]")
        assert result.exit_code == 0
        assert data["witness"] == 4

    def test_missing_witness(self, runner):
        result, data = invoke(runner, "witness", "--oracle", "example13", "--U", "0,1,4", "--A", "[[0,1,4]]")
        assert result.exit_code == 1
        assert data["witness"] is None
        assert data["counterexample"]["U"] == [0, 1, 4]

    def test_bad_pattern_json(self, runner):
        result, _ = invoke(runner, "witness", "--oracle", "example13", "--U", "0", "--A", "[[0")
        assert result.exit_code == 2


class TestRandom:
    def test_single_sample(self, runner, tmp_path):
        out = tmp_path / "sample.json"
        result, data = invoke(runner, "--seed", 2, "random", "--n", 30, "--r", 1, "--out", out)
        assert result.exit_code in (0, 1)
        assert data["f_vector"][0] == 30
        assert 0.0 <= data["bound_not_ample"] <= 1.0
        _, again = invoke(runner, "verify", "--oracle", f"file:{out}", "--r", 1)
        assert again["verdict"] == data["verify"]["verdict"]
        assert data["oracle"] == "random:n=30,p=0.5,dim=2,seed=2"

    def test_counterexample_round_trip(self, runner, tmp_path):
        result, data = invoke(runner, "--seed", 1, "random", "--n", 4, "--r", 2)
        assert result.exit_code == 1
        assert data["verify"]["verdict"] == "counterexample"
        assert data["counterexample"] == data["verify"]["counterexample"]
        result, outcome = invoke(runner, "recheck", save_report(tmp_path, data))
        assert result.exit_code == 0
        assert outcome["kind"] == "counterexample" and outcome["valid"]

    def test_mu_needs_r(self, runner):
        result, data = invoke(runner, "random", "--n", 30, "--mu", 1.0)
        assert result.exit_code == 2
        assert data["error"] == "input"

    def test_batch_is_thread_independent(self, runner):
        args = ["random", "--n", 20, "--r", 1, "--count", 4, "--removals", 2]
        result, single = invoke(runner, "--threads", 1, *args)
        _, pooled = invoke(runner, "--threads", 2, *args)
        assert result.exit_code == 0
        assert single == pooled
        assert single["seeds"] == 4
        assert single["removal"]["level"] == 0


class TestFill:
    def test_triangle(self, runner, tmp_path):
        result, data = invoke(runner, "fill", "--oracle", "example13", "--loop", "0,1,4")
        assert result.exit_code == 0
        assert data["valid"] and data["triangles"] == 1
        result, outcome = invoke(runner, "recheck", save_report(tmp_path, data))
        assert result.exit_code == 0 and outcome["kind"] == "disc"

    def test_stuck_loop_round_trip(self, runner, tmp_path):
        complex_path = tmp_path / "c6.json"
        cycle_graph(6).save(complex_path)
        result, data = invoke(runner, "fill", "--oracle", f"file:{complex_path}", "--r", 4,
                              "--loop", "0,1,2,3,4,5")
        assert result.exit_code == 1
        assert data["stuck"]["arc"] == [0, 1, 2, 3]
        result, outcome = invoke(runner, "recheck", save_report(tmp_path, data))
        assert result.exit_code == 0 and outcome["valid"]

    def test_level_below_four_is_a_usage_error(self, runner):
        result = runner.invoke(cli, ["fill", "--oracle", "example13", "--r", "3", "--loop", "0,1,4"])
        assert result.exit_code == 2

    def test_random_batch_on_hash_oracle(self, runner):
        result, data = invoke(runner, "fill", "--oracle", "hash:n=3000,seed=1", "--r", 4, "--count", 2,
                              "--min-length", 5, "--max-length", 6)
        assert result.exit_code == 0
        assert data["valid"] == data["count"] == 2
        assert data["oracle"] == "hash:n=3000,p=0.5,dim=2,seed=1"

    def test_batch_output_is_byte_identical_across_threads(self, runner):
        args = ["fill", "--oracle", "hash:n=3000,seed=1", "--r", "4", "--count", "4",
                "--min-length", "5", "--max-length", "7"]
        single = runner.invoke(cli, ["--seed", "3", "--threads", "1", *args])
        pooled = runner.invoke(cli, ["--seed", "3", "--threads", "4", *args])
        assert single.exit_code == pooled.exit_code in (0, 1)
        assert single.stdout == pooled.stdout


class TestSmallCommands:
    def test_betti(self, runner):
        result, data = invoke(runner, "betti", "--oracle", "example13")
        assert result.exit_code == 0
        assert data["betti"] == [1, 14, 0]
        assert data["euler_characteristic"] == -13

    def test_betti_needs_explicit_complex(self, runner):
        result, data = invoke(runner, "betti", "--oracle", "hash:n=10")
        assert result.exit_code == 2

    def test_dedekind(self, runner):
        _, data = invoke(runner, "dedekind", "--k", 4, "--antichains")
        assert data == {"k": 4, "M_prime": 167, "antichains": 168, "matches": True}

    def test_dedekind_budget(self, runner):
        result, data = invoke(runner, "dedekind", "--k", 9)
        assert result.exit_code == 2
        assert data["error"] == "budget"

    def test_resilience(self, runner):
        _, data = invoke(runner, "resilience", "--r", 5, "--family", "[[7]]")
        assert data["level"] == 4 and data["simply_connected"]
        assert data["min_vertices"] == {"exact": 7585, "binomial": 1029}

    def test_params(self, runner):
        _, data = invoke(runner, "params", "--r", 1)
        assert (data["p"], data["n"], data["lower"]) == (17, 307, 289)

    def test_params_out_of_range(self, runner):
        result, data = invoke(runner, "params", "--r", 3)
        assert result.exit_code == 2
        assert data["error"] == "range" and data["required_bits"] > 63

    def test_sphere_shapes(self, runner):
        _, data = invoke(runner, "sphere-audit", "--shape", "octahedron")
        assert data["ok"] and data["pair"] == [0, 2]
        result, data = invoke(runner, "sphere-audit", "--shape", "random:15")
        assert result.exit_code == 0 and data["vertices"] == 19
        result, _ = invoke(runner, "sphere-audit", "--shape", "cube")
        assert result.exit_code == 2

    def test_sphere_input(self, runner, tmp_path):
        path = save_report(tmp_path, {"triangles": [[0, 1, 2], [0, 2, 3]]}, "open.json")
        result, data = invoke(runner, "sphere-audit", "--input", path)
        assert result.exit_code == 1
        assert data["shape"] == "input" and not data["ok"]

    def test_explore(self, runner):
        result, data = invoke(runner, "explore", "--field", "field:n=13,p=3", "--r", 1, "--trials", 3)
        assert result.exit_code == 0
        assert data["trials"] == 3 and len(data["cases"]) == 3


class TestSolve:
    def test_single_problem_round_trip(self, runner, tmp_path):
        result, data = invoke(runner, "solve", "--field", "field:n=13,p=3", "--U", "0", "--Y", "[[0]]")
        assert result.exit_code == 0
        assert (data["x"], data["checked"]) == (2, True)
        result, outcome = invoke(runner, "recheck", save_report(tmp_path, data))
        assert result.exit_code == 0 and outcome["kind"] == "solve"

    def test_certified_batch(self, runner, tmp_path):
        result, data = invoke(runner, "solve", "--r", 1, "--count", 3)
        assert result.exit_code == 0
        assert data["field"].startswith("field:n=307,p=17,")
        assert data["checked"] == 3
        result, outcome = invoke(runner, "recheck", save_report(tmp_path, data))
        assert outcome == {"kind": "solve", "valid": True, "checked": 3}

    def test_batch_output_is_byte_identical_across_threads(self, runner):
        args = ["solve", "--r", "1", "--count", "8"]
        single = runner.invoke(cli, ["--seed", "5", "--threads", "1", *args])
        pooled = runner.invoke(cli, ["--seed", "5", "--threads", "4", *args])
        assert single.exit_code == pooled.exit_code == 0
        assert single.stdout == pooled.stdout

    def test_u_needs_field(self, runner):
        result, _ = invoke(runner, "solve", "--U", "0")
        assert result.exit_code == 2


class TestAuditAndConfig:
    def test_charsum_round_trip(self, runner, tmp_path):
        result, data = invoke(runner, "audit-charsum", "--q", 13, "--m", 3, "--d", 2, "--trials", 3)
        assert result.exit_code == 0
        assert data["coset_violations"] == 0 and data["weil_violations"] == 0
        result, outcome = invoke(runner, "recheck", save_report(tmp_path, data))
        assert result.exit_code == 0 and outcome["kind"] == "charsum"

    def test_unknown_report(self, runner, tmp_path):
        result, data = invoke(runner, "recheck", save_report(tmp_path, {"hello": 1}))
        assert result.exit_code == 2

    def test_bad_config(self, runner, tmp_path):
        config = tmp_path / "bad.yaml"
        config.write_text("budgets:\n  max_everything: 1\n")
        result, data = invoke(runner, "--config", config, "dedekind", "--k", 2)
        assert result.exit_code == 2
        assert data["error"] == "config"

    def test_config_budget_applies(self, runner, tmp_path):
        config = tmp_path / "tight.yaml"
        config.write_text("budgets:\n  max_subsets: 5\n")
        result, data = invoke(runner, "--config", config, "verify", "--oracle", "example13", "--r", 2)
        assert result.exit_code == 2
        assert data["budget"] == "max_subsets"
