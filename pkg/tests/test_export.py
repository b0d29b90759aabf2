"""
Tests for result export
"""

import json

import numpy as np

from fluid_polling.core.export import ResultExporter
from fluid_polling.utils.config import Config


def test_json_document_has_schema_header(tmp_path):
    exporter = ResultExporter(tmp_path)
    path = exporter.export_json("run.json", "simulate", {"mu": 1.0}, 7,
                                {"value": np.float64(0.5), "grid": np.arange(3), "z": 1 + 2j})
    with open(path, encoding="utf-8") as f:
        document = json.load(f)
    assert list(document) == ["schema_version", "command", "parameters", "seed", "results"]
    assert document["schema_version"] == Config.SCHEMA_VERSION
    assert document["seed"] == 7
    assert document["results"] == {"value": 0.5, "grid": [0, 1, 2], "z": {"re": 1.0, "im": 2.0}}


def test_csv_has_comment_then_header(tmp_path):
    exporter = ResultExporter(tmp_path)
    path = exporter.export_grid("grid.csv", [0.1, 1.0 / 3.0], [1.0, 2.0], {"command": "ht-density", "mu": 1.0})
    lines = open(path, encoding="utf-8").read().splitlines()
    assert lines[0] == "# command=ht-density; mu=1.0"
    assert lines[1] == "x,value"
    assert lines[2] == "0.1,1.0"
    assert lines[3] == f"{1.0 / 3.0!r},2.0"


def test_lst_grid_splits_real_and_imaginary(tmp_path):
    exporter = ResultExporter(tmp_path)
    path = exporter.export_lst_grid("lst.csv", [0.0, 1.0], [1.0 + 0j, 0.5 - 0.25j], {"command": "x"})
    lines = open(path, encoding="utf-8").read().splitlines()
    assert lines[1] == "s,re,im"
    assert lines[3] == "1.0,0.5,-0.25"


def test_reruns_are_byte_identical(tmp_path):
    exporter = ResultExporter(tmp_path)
    curve = [(0.0, 0.25), (1.5, 1.0)]
    first = open(exporter.export_ecdf("e.csv", curve, {"seed": 1}), "rb").read()
    second = open(exporter.export_ecdf("e.csv", curve, {"seed": 1}), "rb").read()
    assert first == second


def test_output_directory_is_created(tmp_path):
    target = tmp_path / "nested" / "out"
    ResultExporter(target).export_path("p.csv", np.zeros((2, 3)), {"command": "rbm"})
    assert (target / "p.csv").exists()
