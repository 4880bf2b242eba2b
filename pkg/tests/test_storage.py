import json

import pytest

from rof.storage import render, rows_to_frame, write_report

ROWS = [
    {"trial": 0, "verdict": "reject", "queries": 12},
    {"trial": 1, "verdict": "accept", "queries": 9},
    {"trial": "aggregate", "reject_rate": 0.5},
]


def test_frame_keeps_first_seen_column_order():
    assert list(rows_to_frame(ROWS).columns) == ["trial", "verdict", "queries", "reject_rate"]


def test_csv():
    text = render(ROWS, "csv")
    lines = text.splitlines()
    assert lines[0] == "trial,verdict,queries,reject_rate"
    assert lines[1].startswith("0,reject,12")
    assert "\r" not in text


def test_json_with_meta():
    payload = json.loads(render(ROWS, "json", {"seed": 3}))
    assert payload["meta"] == {"seed": 3}
    assert payload["rows"][2]["reject_rate"] == 0.5


def test_unknown_format():
    with pytest.raises(ValueError):
        render(ROWS, "xml")


def test_write_report_uses_extension(tmp_path):
    path = tmp_path / "out" / "report.csv"
    assert write_report(ROWS, str(path)) == 3
    assert path.read_text().startswith("trial,verdict")
    json_path = tmp_path / "report.json"
    write_report(ROWS, str(json_path))
    assert json.loads(json_path.read_text())[0]["trial"] == 0
