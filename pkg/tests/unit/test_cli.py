import json

import pytest

from fermion_boson_sim.cli.main import run
from fermion_boson_sim.cli.parser import build_parser, float_list, int_list
from fermion_boson_sim.model.hamiltonian import load_model


def test_list_arguments():
    """
    Test comma-separated parsers
    """
    assert int_list("4,5, 6") == [4, 5, 6]
    assert float_list("0.5,1") == [0.5, 1.0]
    args = build_parser().parse_args(["fig", "fig2", "--nx", "5,6"])
    assert args.nx == [5, 6]


def test_fig1_csv_output(capsys):
    """
    Test the config echo, header and row count of a CSV table
    """
    assert run(["fig", "fig1", "--nx", "5", "--levels", "4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("# config: ")
    echo = json.loads(lines[0][len("# config: "):])
    assert echo["command"] == "fig" and echo["params"]["nx"] == 5
    assert lines[1] == "n,energy,exact,error,overlap"
    assert len(lines) == 2 + 4


def test_json_table_output(capsys):
    """
    Test the JSON rendering of a table
    """
    assert run(["oscdiag", "spectrum", "--nx", "4", "--levels", "3", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["columns"][0] == "n"
    assert [row["n"] for row in payload["rows"]] == [0, 1, 2]


def test_unknown_flag_exit_code(capsys):
    """
    Test that argparse errors map to exit code 2
    """
    assert run(["fig", "fig1", "--bogus"]) == 2


def test_missing_seed_exit_code(capsys):
    """
    Test that stochastic subcommands refuse to run without a seed
    """
    assert run(["prep", "gaussian", "--nx", "4", "--ns", "1"]) == 2
    assert "seed" in capsys.readouterr().err


def test_build_holstein_needs_one_coupling(capsys):
    """
    Test the exclusive --g / --alpha choice
    """
    assert run(["model", "build-holstein", "--g", "1.0", "--alpha", "1.0"]) == 2
    assert run(["model", "build-holstein"]) == 2


def test_build_holstein_writes_model(tmp_path):
    """
    Test that --out writes a loadable model file
    """
    target = tmp_path / "model.json"
    assert run(["model", "build-holstein", "--alpha", "1.0", "--out", str(target)]) == 0
    spec = load_model(target)
    assert spec.n_orbitals == 2 and spec.n_oscillators == 2


def test_numeric_guard_exit_code(capsys):
    """
    Test that dimension limits surface as a configuration exit
    """
    assert run(["oracle", "ed", "--sites", "3", "--nph", "40"]) == 2
    assert "error: " in capsys.readouterr().err


def test_oracle_ed_json(capsys):
    """
    Test the ED payload
    """
    assert run(["oracle", "ed", "--alpha", "0.5", "--nph", "10"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["nph"] == 10
    assert sum(payload["Z"]) == pytest.approx(1.0)


def test_synth_report_json(capsys):
    """
    Test the resource report subcommand
    """
    assert run(["synth", "report", "--nx", "3", "--alpha", "1.0"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["report"]["totals"]["qubits"] == 2 + 2 * 3
    assert payload["config"]["params"]["nx"] == 3


def test_prep_gaussian_schedule(capsys):
    """
    Test a short variational run through the CLI
    """
    assert run(["prep", "gaussian", "--nx", "4", "--ns", "1", "--seed", "3", "--restarts", "1", "--budget", "20"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["n_x"] == 4 and payload["steps"] == 1
    assert payload["seed"] == 3
