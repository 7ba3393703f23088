import json
from fractions import Fraction

import numpy as np
import pandas as pd
from mpmath import mp

from src.analysis import solve_functional_equation
from src.storage import ResultWriter, coefficient_frame, dumps, series_frame


def test_coefficient_frame_is_lossless():
    frame = coefficient_frame([(1, 0, Fraction(3, 7)), (2, 1, mp.mpf("0.5"))])
    assert frame.loc[0, "num"] == "3"
    assert frame.loc[0, "den"] == "7"
    assert frame.loc[1, "den"] == "1"


def test_series_frame_rows(poly_101):
    F, _ = solve_functional_equation(poly_101, 3, 3)
    frame = series_frame(F)
    assert len(frame) == 4 * 4
    row = frame[(frame["n"] == 2) & (frame["p"] == 2)].iloc[0]
    assert row["value"] == "1/1"


def test_writer_round_trip(tmp_path):
    writer = ResultWriter(tmp_path / "out")
    path = writer.write_table("table", pd.DataFrame({"n": [1, 2], "p": [0, 1]}))
    assert path.suffix == ".csv"
    assert path.read_text(encoding="utf-8").splitlines()[0] == "n,p"

    report = {"value": Fraction(1, 2), "count": np.int64(3), "nested": {"x": mp.mpf(2)}}
    json_path = writer.write_json("report", report)
    loaded = json.loads(json_path.read_text(encoding="utf-8"))
    assert loaded == {"count": 3, "nested": {"x": "2.0"}, "value": "1/2"}
    assert json.loads(dumps(report)) == loaded
