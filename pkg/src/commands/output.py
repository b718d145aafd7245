"""
Output helpers shared by the commands: JSON and CSV writers, range parsing.

Data goes to stdout (or --out); diagnostics go to stderr through logging.
"""
import json
from pathlib import Path

import click
import numpy as np
import pandas as pd

from src.config import get_settings
from src.services.errors import ParameterError


def write_text(text: str, out: Path | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def emit_json(payload: dict, out: Path | None = None) -> None:
    write_text(json.dumps(payload, indent=2) + "\n", out)


def frame_to_csv(frame: pd.DataFrame, header_lines: list[str] | None = None) -> str:
    """CSV with LF endings and Settings.csv_precision significant digits; header_lines become '# ' comments."""
    precision = get_settings().csv_precision
    body = frame.to_csv(index=False, float_format=f"%.{precision}g", lineterminator="\n")
    prefix = "".join(f"# {line}\n" for line in header_lines or [])
    return prefix + body


def emit_csv(frame: pd.DataFrame, out: Path | None = None, header_lines: list[str] | None = None) -> None:
    write_text(frame_to_csv(frame, header_lines), out)


def parse_range(text: str, integer: bool = False) -> list:
    """
    Parse a sweep range.

    Accepted forms: "start:stop:count" (linspace, count >= 1), "a..b"
    (inclusive integers), or a comma-separated list.

    Raises:
        ParameterError: malformed or empty range.
    """
    text = (text or "").strip()
    if not text:
        raise ParameterError("empty range")
    cast = int if integer else float
    try:
        if ".." in text:
            lo, hi = (int(part) for part in text.split(".."))
            values = list(range(lo, hi + 1))
        elif ":" in text:
            start, stop, count = text.split(":")
            count = int(count)
            if count < 1:
                raise ParameterError(f"range count must be at least 1, got {count}")
            values = [cast(v) for v in np.linspace(float(start), float(stop), count)]
        else:
            values = [cast(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ParameterError(f"malformed range {text!r}") from None
    if not values:
        raise ParameterError(f"range {text!r} is empty")
    return values
