"""JSON/CSV export helpers: exact rationals leave the program as "num/den"."""

from __future__ import annotations

import json
from dataclasses import asdict, is_dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from stabkit.exact import format_rational


def clean_json_value(value: Any) -> Any:
    """Turn Fractions, numpy scalars and tuples into plain JSON values."""

    if value is None:
        return None

    if isinstance(value, Fraction):
        return format_rational(value)

    if isinstance(value, (np.bool_, bool)):
        return bool(value)

    if isinstance(value, np.integer):
        return int(value)

    if isinstance(value, Path):
        return str(value)

    return value


def clean_nested_json(value: Any) -> Any:
    if is_dataclass(value) and not isinstance(value, type):
        value = asdict(value)

    if isinstance(value, dict):
        return {str(key): clean_nested_json(item) for key, item in value.items()}

    if isinstance(value, (list, tuple)):
        return [clean_nested_json(item) for item in value]

    return clean_json_value(value)


def dataframe_to_records(df: pd.DataFrame) -> list[dict[str, Any]]:
    return [
        {key: clean_json_value(value) for key, value in row.items()}
        for row in df.to_dict(orient="records")
    ]


def dumps(data: Any) -> str:
    return json.dumps(clean_nested_json(data), ensure_ascii=False, indent=2)


def write_json(path: str | Path, data: Any) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as file:
        file.write(dumps(data))
        file.write("\n")


def render_frame(df: pd.DataFrame, fmt: str) -> str:
    """Render a table as text, CSV or JSON records; Fractions become strings."""

    export = df.map(clean_json_value) if hasattr(df, "map") else df.applymap(clean_json_value)

    if fmt == "csv":
        return export.to_csv(index=False)
    if fmt == "json":
        return dumps(dataframe_to_records(export))
    return export.to_string(index=False) + "\n"
