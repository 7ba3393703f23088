"""
CSV and JSON result files.

Tables go to CSV through pandas; reports go to JSON with sorted keys so
that identical runs produce byte-identical files. Rationals are written as
"num/den" strings plus separate numerator/denominator columns.
"""

import json
import logging
from pathlib import Path
from typing import Any, Iterable

import pandas as pd

from ..series import BivariateSeries, Scalar, format_scalar, split_scalar

logger = logging.getLogger(__name__)


def _jsonable(value: Any) -> Any:
    """Recursively convert rationals, big floats and numpy scalars."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, int):
        return int(value)
    if isinstance(value, float):
        return value
    if hasattr(value, "item"):
        return value.item()
    return format_scalar(value)


def coefficient_frame(rows: Iterable[tuple[int, int, Scalar]]) -> pd.DataFrame:
    """DataFrame with columns n, p, value, num, den from (n, p, value) triples."""
    records = []
    for n, p, value in rows:
        num, den = split_scalar(value)
        records.append({"n": n, "p": p, "value": format_scalar(value), "num": num, "den": den})
    return pd.DataFrame(records, columns=["n", "p", "value", "num", "den"])


def series_frame(F: BivariateSeries) -> pd.DataFrame:
    """Coefficients of F (x outer, y inner) as an (n, p) table."""
    return coefficient_frame(F.rows())


class ResultWriter:
    """
    Writes run outputs below one directory.

    Attributes:
        directory: Output directory, created on first write.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)

    def _path(self, name: str, suffix: str) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.directory / name
        return path if path.suffix == suffix else path.with_suffix(suffix)

    def write_table(self, name: str, frame: pd.DataFrame) -> Path:
        """Write a DataFrame as CSV; float columns keep full repr precision."""
        path = self._path(name, ".csv")
        frame.to_csv(path, index=False, lineterminator="\n")
        logger.info(f"Wrote {len(frame)} rows to {path}")
        return path

    def write_json(self, name: str, report: dict) -> Path:
        path = self._path(name, ".json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump(_jsonable(report), f, indent=2, sort_keys=True, ensure_ascii=False)
            f.write("\n")
        logger.info(f"Wrote report to {path}")
        return path


def dumps(report: dict) -> str:
    """The JSON text write_json would produce."""
    return json.dumps(_jsonable(report), indent=2, sort_keys=True, ensure_ascii=False)
