"""Small serialization helpers shared by the CSV/JSON writers."""

import json
import os

#: 17 significant digits round-trip any double exactly.
FLOAT_FMT = "%.17g"


def fmt17(x) -> str:
    """Format a float with 17 significant digits (lossless round-trip)."""
    return FLOAT_FMT % float(x)


def fmt_sci17(x) -> str:
    """Scientific notation with 17 significant digits."""
    return "%.16e" % float(x)


def atomic_write(path, text: str) -> None:
    """Write text to ``path`` via a temp file + rename in the same directory."""
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def dump_json(obj, path) -> None:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")
