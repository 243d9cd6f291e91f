"""Artifact readers with column-level validation.

These functions only read; no physics is ever recomputed here.  Every
schema violation names the file and the offending column so a broken
pipeline is diagnosable from the error alone.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .spec import SpecError


def read_csv_columns(path, required: tuple[str, ...]) -> dict[str, np.ndarray]:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SpecError(f"{path}: empty CSV, no header row") from None
        for col in required:
            if col not in header:
                raise SpecError(f"{path}: missing column {col!r} (header: {header})")
        rows = list(reader)
    if not rows:
        raise SpecError(f"{path}: no data rows")
    # boolean columns are serialized as true/false
    table = [[{"true": "1", "false": "0"}.get(cell, cell) for cell in row] for row in rows]
    try:
        data = np.asarray(table, dtype=float)
    except ValueError as exc:
        raise SpecError(f"{path}: non-numeric cell ({exc})") from exc
    if data.shape[1] != len(header):
        raise SpecError(f"{path}: ragged rows")
    return {name: data[:, i] for i, name in enumerate(header)}


def read_json(path) -> dict:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON ({exc})") from exc


def read_manifest_value(path, *keys):
    payload = read_json(path)
    node = payload
    trail = []
    for key in keys:
        trail.append(key)
        if not isinstance(node, dict) or key not in node:
            raise SpecError(f"{path}: missing manifest entry {'.'.join(trail)!r}")
        node = node[key]
    return node
