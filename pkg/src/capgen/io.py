"""Reading and writing batches of capacities.

CSV: a header of subset masks ``0 .. 2**n - 1`` in ascending order, then one
row per capacity with values printed to 17 significant digits (enough to
round-trip a double). JSONL: one ``{"n", "seed", "index", "values"}`` object
per line.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import IO

import numpy as np

FORMATS = ("csv", "jsonl", "json-report")


class FormatError(ValueError):
    pass


def format_value(x: float) -> str:
    return f"{x:.17g}"


def write_csv(fh: IO[str], values: np.ndarray, header: bool = True) -> None:
    values = np.asarray(values, dtype=np.float64)
    w = csv.writer(fh, lineterminator="\n")
    if header:
        w.writerow(range(values.shape[1]))
    for row in values:
        w.writerow([format_value(x) for x in row])


def write_jsonl(fh: IO[str], values: np.ndarray, n: int, seed: int, start: int = 0) -> None:
    for i, row in enumerate(np.asarray(values, dtype=np.float64)):
        rec = {"n": n, "seed": seed, "index": start + i, "values": [float(x) for x in row]}
        fh.write(json.dumps(rec) + "\n")


def _check_width(width: int, where: str) -> int:
    n = width.bit_length() - 1
    if width < 2 or width != 1 << n:
        raise FormatError(f"{where}: {width} values is not 2**n for n >= 1")
    return n


def read_csv(fh: IO[str]) -> tuple[np.ndarray, int]:
    rows = csv.reader(fh)
    try:
        header = next(rows)
    except StopIteration:
        raise FormatError("empty CSV file") from None
    n = _check_width(len(header), "CSV header")
    try:
        masks = [int(h) for h in header]
    except ValueError:
        raise FormatError("CSV header must list subset masks") from None
    if masks != list(range(1 << n)):
        raise FormatError("CSV header must list masks 0 .. 2**n - 1 in ascending order")
    out = []
    for lineno, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise FormatError(f"line {lineno}: expected {len(header)} values, got {len(row)}")
        try:
            out.append([float(x) for x in row])
        except ValueError as e:
            raise FormatError(f"line {lineno}: {e}") from None
    if not out:
        raise FormatError("CSV file has no capacities")
    return np.array(out), n


def read_jsonl(fh: IO[str]) -> tuple[np.ndarray, int]:
    out = []
    n = None
    for lineno, line in enumerate(fh, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            vals = [float(x) for x in rec["values"]]
            rec_n = int(rec["n"])
        except (ValueError, KeyError, TypeError) as e:
            raise FormatError(f"line {lineno}: malformed record ({e})") from None
        if n is None:
            n = rec_n
        elif rec_n != n:
            raise FormatError(f"line {lineno}: n={rec_n} differs from n={n}")
        if len(vals) != 1 << n:
            raise FormatError(f"line {lineno}: expected {1 << n} values, got {len(vals)}")
        out.append(vals)
    if not out:
        raise FormatError("JSONL file has no capacities")
    return np.array(out), n


def read_capacities(path: str | Path) -> tuple[np.ndarray, int]:
    """Load a CSV or JSONL capacity file, sniffing the format from the first character."""
    path = Path(path)
    with path.open(newline="") as fh:
        head = fh.read(1)
        fh.seek(0)
        if head == "{":
            return read_jsonl(fh)
        if not head:
            raise FormatError(f"{path} is empty")
        return read_csv(fh)


def write_capacities(fh: IO[str], values: np.ndarray, n: int, fmt: str, seed: int) -> None:
    if fmt == "csv":
        write_csv(fh, values)
    elif fmt == "jsonl":
        write_jsonl(fh, values, n, seed)
    else:
        raise FormatError(f"capacities cannot be written as {fmt!r}; use csv or jsonl")


def dump_report(fh: IO[str], report: dict) -> None:
    json.dump(report, fh, indent=2, sort_keys=False)
    fh.write("\n")

