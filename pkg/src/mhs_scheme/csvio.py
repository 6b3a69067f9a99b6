"""CSV emission with exact float round-trip, and flat key=value config files."""
from __future__ import annotations

import csv
import math
from pathlib import Path

CONVERGENCE_COLUMNS = ("K", "M", "dx", "dt", "linf_error", "observed_order")
FITS_COLUMNS = ("quantity", "slope", "intercept", "r_squared", "estimated_time", "window")
SNAPSHOT_COLUMNS = ("x", "u")


def fmt(value) -> str:
    """17 significant digits for floats (round-trips a double exactly); ints and strings verbatim."""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float) or hasattr(value, "dtype"):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if value.is_integer() and abs(value) < 1e16:
            return repr(value)
        return f"{value:.17g}"
    return str(value)


def write_csv(path, columns, rows) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(f"row of length {len(row)} for {len(columns)} columns in {path}")
            w.writerow([fmt(x) for x in row])
    return path


def _parse(cell: str):
    try:
        return int(cell)
    except ValueError:
        pass
    try:
        return float(cell)
    except ValueError:
        return cell


def read_csv(path):
    """Return ``(header, rows)`` with numeric cells parsed back to int/float."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[_parse(c) for c in row] for row in reader]
    return header, rows


def read_config(path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment, blank lines are ignored."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out
