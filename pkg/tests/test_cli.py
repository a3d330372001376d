import json
from fractions import Fraction

import pytest

from bplp import cli
from bplp.cli import EXIT_CONTRADICTION, EXIT_OK, EXIT_PARSE, EXIT_USAGE, main
from bplp.instance_store import parse_instance, save_instance
from bplp.problems import NoiseSpec

from conftest import edge, four_cycle, instance, three_node_path


@pytest.fixture
def path_file(tmp_path):
    path = tmp_path / "path.yaml"
    save_instance(three_node_path(), str(path))
    return str(path)


@pytest.fixture
def cycle_file(tmp_path):
    path = tmp_path / "cycle.yaml"
    save_instance(four_cycle(noise=NoiseSpec(seed=1, magnitude=Fraction(1, 1000))), str(path))
    return str(path)


def test_gen_writes_instance_to_stdout(capsys):
    assert main(["gen", "tsp", "--nodes", "4", "--seed", "1"]) == EXIT_OK
    inst = parse_instance(capsys.readouterr().out)
    assert inst.num_nodes == 4
    assert inst.noise.seed == 1


def test_gen_to_file_then_solve(tmp_path, capsys):
    target = tmp_path / "pm.yaml"
    assert main(["gen", "perfect_matching", "--nodes", "4", "--seed", "2", "--out", str(target)]) == EXIT_OK
    assert main(["solve", str(target), "--format", "structured"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["command"] == "solve"
    assert payload["kind"] == "perfect_matching"


def test_gen_explicit_noise(capsys):
    assert main(["gen", "tsp", "--nodes", "4", "--noise", "1/64"]) == EXIT_OK
    assert parse_instance(capsys.readouterr().out).noise.magnitude == Fraction(1, 64)


def test_solve_human_output(path_file, capsys):
    assert main(["solve", path_file]) == EXIT_OK
    out = capsys.readouterr().out
    assert "decision: 110" in out
    assert "objective: 2" in out


def test_solve_writes_out_file(path_file, tmp_path):
    target = tmp_path / "report.json"
    assert main(["solve", path_file, "--format", "structured", "--out", str(target), "--max-iters", "50"]) == EXIT_OK
    payload = json.loads(target.read_text(encoding="utf-8"))
    assert payload["solution"]["values"] == ["1", "1", "0"]


def test_check_structured(cycle_file, capsys):
    assert main(["check", cycle_file, "--format", "structured"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["conditions"]["all_hold"]


def test_compare_structured(cycle_file, capsys):
    assert main(["compare", cycle_file, "--format", "structured"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["comparison"]["verdict"] == "match"
    assert payload["contradiction"] is False


def test_compare_contradiction_exit_code(cycle_file, monkeypatch, capsys):
    monkeypatch.setattr(cli, "compare_report", lambda *args, **kwargs: {"command": "compare", "contradiction": True})
    assert main(["compare", cycle_file, "--format", "structured"]) == EXIT_CONTRADICTION


def test_random_init_preset(cycle_file, capsys):
    assert main(["--preset", "random_init", "compare", cycle_file, "--format", "structured"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["comparison"]["verdict"] == "match"


def test_config_file_flag(tmp_path, path_file, capsys):
    config = tmp_path / "config.yaml"
    config.write_text("bp:\n  max_iters: 1\n", encoding="utf-8")
    assert main(["--config", str(config), "solve", path_file, "--format", "structured"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["decision"]["iterations"] == 1
    assert payload["decision"]["converged"] is False


def test_parse_errors_exit_2(tmp_path, capsys):
    broken = tmp_path / "broken.yaml"
    broken.write_text("kind: [\n", encoding="utf-8")
    assert main(["solve", str(broken)]) == EXIT_PARSE
    unknown = tmp_path / "unknown.yaml"
    unknown.write_text("kind: knapsack\n", encoding="utf-8")
    assert main(["check", str(unknown)]) == EXIT_PARSE
    assert main(["solve", str(tmp_path / "missing.yaml")]) == EXIT_PARSE
    assert capsys.readouterr().err


def test_invalid_instance_exits_1(tmp_path, capsys):
    path = tmp_path / "odd.yaml"
    save_instance(instance("perfect_matching", 3, [edge(0, 1, 1)]), str(path))
    assert main(["solve", str(path)]) == EXIT_USAGE
    assert capsys.readouterr().err


def test_bad_bp_setting_exits_1(path_file, capsys):
    assert main(["solve", path_file, "--max-iters", "0"]) == EXIT_USAGE


def test_generator_error_exits_1(capsys):
    assert main(["gen", "perfect_matching", "--nodes", "5"]) == EXIT_USAGE


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["solve"],
        ["gen", "knapsack"],
        ["gen", "tsp", "--noise", "-1"],
        ["gen", "tsp", "--noise", "abc"],
    ],
)
def test_usage_errors_exit_1(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == EXIT_USAGE


def test_bench_structured(capsys):
    argv = ["bench", "tsp", "--count", "2", "--nodes", "4", "--seed", "5", "--format", "structured"]
    assert main(argv) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3
    records = [json.loads(line) for line in lines]
    assert [r["seed"] for r in records[:2]] == [5, 6]
    assert records[-1]["aggregate"] is True
    assert records[-1]["count"] == 2


def test_bench_human(capsys):
    assert main(["bench", "shortest_path", "--count", "1", "--nodes", "4"]) == EXIT_OK
    assert "instances: 1" in capsys.readouterr().out


def test_presets_listing(capsys):
    assert main(["presets"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "default" in out
    assert "strict" in out
