import json

import pytest

from fermion_boson_sim.core.errors import ConfigurationError
from fermion_boson_sim.services.figures import fig1, fig2, fig3, fig9
from fermion_boson_sim.services.golden_service import GOLDEN_FILE, GoldenService
from fermion_boson_sim.services.storage_service import render_csv, render_json


def test_render_csv_layout():
    """
    Test the config comment row, header and float formatting
    """
    text = render_csv([{"n": 0, "value": 0.1}, {"n": 1}], ["n", "value"], {"seed": 3, "cmd": "x"})
    lines = text.split("\n")
    assert lines[0] == '# config: {"cmd": "x", "seed": 3}'
    assert lines[1] == "n,value"
    assert lines[2] == "0,0.1"
    assert lines[3] == "1,"
    assert text.endswith("\n")


def test_render_json_sorted():
    """
    Test stable key order
    """
    assert render_json({"b": 1, "a": 2}).index('"a"') < render_json({"b": 1, "a": 2}).index('"b"')


def test_storage_round_trip(storage):
    """
    Test saving, loading and deleting artifacts
    """
    path = storage.save_json({"x": [1, 2]}, "nested/out.json")
    assert path.endswith("out.json")
    assert storage.load_json("nested/out.json") == {"x": [1, 2]}
    assert storage.delete_file("nested/out.json") is True
    assert storage.delete_file("nested/out.json") is False
    with pytest.raises(FileNotFoundError):
        storage.get_file("nested/out.json")


def test_storage_csv(storage):
    """
    Test the CSV helper writes the rendered text
    """
    storage.save_csv([{"a": 1}], ["a"], {}, "t.csv")
    assert storage.get_file("t.csv").decode() == "# config: {}\na\n1\n"


def test_golden_service_generates_and_loads(storage):
    """
    Test regeneration and reload with a reduced cutoff
    """
    service = GoldenService(storage)
    service.generate(alphas=(0.5, 1.0), n_ph=8, n_check=10)
    payload = json.loads(storage.get_file(GOLDEN_FILE))
    assert [item["alpha"] for item in payload] == [0.5, 1.0]

    fresh = GoldenService(storage)
    records = fresh.load()
    assert [r.nph for r in records] == [8, 8]
    assert fresh.record(1.0).E0 == pytest.approx(records[1].E0)


def test_golden_service_missing_and_corrupt(storage):
    """
    Test an absent table and an unreadable one
    """
    service = GoldenService(storage)
    assert service.load() == []
    storage.save_file("not json", GOLDEN_FILE)
    with pytest.raises(ConfigurationError):
        service.load()


def test_fig1_table():
    """
    Test the low spectrum rows at n_x = 6
    """
    columns, rows = fig1(6, 16)
    assert columns[0] == "n"
    assert len(rows) == 16
    assert max(row["error"] for row in rows) <= 1e-6
    assert min(row["overlap"] for row in rows) > 0.999


def test_fig2_table_respects_bound():
    """
    Test commutator residuals against the envelope
    """
    _, rows = fig2([5, 6])
    assert {row["n_x"] for row in rows} == {5, 6}
    assert all(row["residual"] <= row["bound"] + 1e-10 for row in rows)


def test_fig3_panels():
    """
    Test both panels are present and the cutoff grows with the grid
    """
    _, rows = fig3([4, 5, 6], [2, 8])
    panel_a = [row for row in rows if row["panel"] == "a"]
    panel_b = [row for row in rows if row["panel"] == "b"]
    assert [row["x"] for row in panel_a] == [16, 32, 64]
    assert panel_a[0]["value"] <= panel_a[1]["value"] <= panel_a[2]["value"]
    assert [row["x"] for row in panel_b] == [2, 8]
    assert all(row["empirical"] <= row["x"] for row in panel_a)


def test_fig9_rows():
    """
    Test the polaron table shape and weights
    """
    _, rows = fig9([0.5, 2.0], n_ph=12, n_show=5)
    assert len(rows) == 10
    weak = [row for row in rows if row["alpha"] == 0.5]
    strong = [row for row in rows if row["alpha"] == 2.0]
    assert weak[0]["Z0"] > strong[0]["Z0"]
    assert weak[0]["E0"] > strong[0]["E0"]
