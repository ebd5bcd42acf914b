import json

import pytest

from feikit import construct
from feikit.errors import BadParams, SizeLimit
from feikit.io import dump_json, load_json, parse_truth_table, read_truth_table, write_truth_table


def test_file_round_trip(tmp_path):
    f = construct("tribes", w=2, s=3)
    path = tmp_path / "t.txt"
    write_truth_table(f, path)
    assert path.read_text().startswith("n=6\n")
    assert read_truth_table(path) == f


def test_json_helpers(tmp_path):
    path = tmp_path / "x.json"
    path.write_text(dump_json({"a": [1, 2]}))
    assert load_json(path) == {"a": [1, 2]}
    path.write_text("{bad")
    with pytest.raises(BadParams):
        load_json(path)
    assert json.loads(dump_json({"k": 1})) == {"k": 1}


def test_caps_and_headers():
    with pytest.raises(SizeLimit):
        parse_truth_table("n=30\n0")
    with pytest.raises(BadParams):
        parse_truth_table("n=-1\n0")
    assert parse_truth_table("n=0\n1").values.tolist() == [-1]
