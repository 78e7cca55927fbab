"""
Table writers for the CLI.

CSV goes through pandas with 17 significant digits so a re-ingested file
reproduces every float exactly; JSON uses the shortest round-trip repr.
Both writers return the text they produced so the caller can re-verify it.
"""
import io
import json
import logging
import math
logger = logging.getLogger(__name__)
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from engine.channel_spectrum import is_unbounded

FLOAT_FORMAT = "%.17g"


def records_to_frame(records: List[Dict], columns: Sequence[str]) -> pd.DataFrame:
    return pd.DataFrame.from_records(records, columns=list(columns))


def _write_text(text: str, path: Optional[Union[str, Path]]) -> None:
    if path is None:
        return
    target = Path(path)
    if target.parent and not target.parent.exists():
        target.parent.mkdir(parents=True, exist_ok=True)
    # newline="" keeps "\n" line endings on every platform
    with open(target, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logger.info(f"Wrote {len(text)} bytes to {target}")


def _format_mixed_columns(frame: pd.DataFrame) -> pd.DataFrame:
    # float_format only reaches float-dtype columns; floats mixed with markers are formatted here
    mixed = [name for name in frame.columns if frame[name].dtype == object]
    if not mixed:
        return frame
    out = frame.copy()
    for name in mixed:
        out[name] = [FLOAT_FORMAT % v if isinstance(v, float) and math.isfinite(v) else v for v in out[name]]
    return out


def write_csv(frame: pd.DataFrame, path: Optional[Union[str, Path]] = None) -> str:
    buffer = io.StringIO()
    _format_mixed_columns(frame).to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    text = buffer.getvalue()
    _write_text(text, path)
    return text


def read_csv(source: Union[str, Path, io.StringIO]) -> pd.DataFrame:
    return pd.read_csv(source, float_precision="round_trip", keep_default_na=True)


def read_csv_text(text: str) -> pd.DataFrame:
    return read_csv(io.StringIO(text))


def _default(value: Any) -> Any:
    if is_unbounded(value):
        return str(value)
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value  # str enums
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def to_json_text(payload: Dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False, default=_default) + "\n"


def write_json(payload: Dict, path: Optional[Union[str, Path]] = None) -> str:
    text = to_json_text(payload)
    _write_text(text, path)
    return text


def write_svg(svg: str, path: Optional[Union[str, Path]] = None) -> str:
    _write_text(svg, path)
    return svg
