"""Readers for the artifacts a diagnostic run leaves on disk.

Two inputs are understood, both written by the ``bpdiag`` command:

- pair dumps ``pairs_n<size>.csv``: header ``t_plus,t_minus`` followed by
  one shifted-cost pair per Monte-Carlo sample; values lie in [-1, 1] for
  the single-Pauli observable that produces them
- ``summary.json``: per-size statistics in ``points`` (keys ``n``,
  ``var_grad``, ``one_minus_r``, ``second_moment``) plus the stored
  straight-line fits of the log10 decays in ``fits``

Nothing here recomputes statistics; files are parsed and validated only.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

_PAIR_NAME = re.compile(r"pairs_n(\d+)\.csv$")
_PAIR_HEADER = "t_plus,t_minus"

SERIES_KEYS = ("var_grad", "one_minus_r", "second_moment")
FIT_KEYS = ("slope", "intercept", "r_squared")


@dataclass(frozen=True)
class PairDump:
    """Shifted-cost pairs for one circuit size."""

    n_qubits: int
    t_plus: np.ndarray
    t_minus: np.ndarray

    def __len__(self) -> int:
        return int(self.t_plus.size)


@dataclass(frozen=True)
class DecaySummary:
    """Per-size decay statistics plus the stored log10 line fits."""

    sizes: np.ndarray
    series: dict[str, np.ndarray]
    fits: dict[str, dict | None]


def load_pair_dump(path: str | Path) -> PairDump:
    """Parse one ``pairs_n<size>.csv`` dump; the size comes from the name."""
    path = Path(path)
    match = _PAIR_NAME.search(path.name)
    if match is None:
        raise ValueError(f"{path.name}: pair dumps are named pairs_n<size>.csv")
    lines = path.read_text().splitlines()
    if not lines or lines[0] != _PAIR_HEADER:
        raise ValueError(f"{path.name}: expected header '{_PAIR_HEADER}'")
    rows = [line.split(",") for line in lines[1:] if line]
    if any(len(row) != 2 for row in rows):
        raise ValueError(f"{path.name}: every row must hold two comma-separated values")
    try:
        t_plus = np.array([float(a) for a, _ in rows])
        t_minus = np.array([float(b) for _, b in rows])
    except ValueError as err:
        raise ValueError(f"{path.name}: non-numeric pair value") from err
    for column, values in (("t_plus", t_plus), ("t_minus", t_minus)):
        if values.size and np.max(np.abs(values)) > 1.0 + 1e-9:
            raise ValueError(f"{path.name}: {column} outside [-1, 1]")
    return PairDump(int(match.group(1)), t_plus, t_minus)


def discover_pair_dumps(directory: str | Path) -> list[PairDump]:
    """All ``pairs_n*.csv`` under ``directory``, sorted by circuit size."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ValueError(f"{directory} is not a directory")
    names = [p for p in directory.iterdir() if _PAIR_NAME.search(p.name)]
    return sorted((load_pair_dump(p) for p in names), key=lambda d: d.n_qubits)


def load_summary(path: str | Path) -> DecaySummary:
    """Parse a sweep ``summary.json`` into size-ordered series and fits."""
    path = Path(path)
    payload = json.loads(path.read_text())
    points = payload.get("points") if isinstance(payload, dict) else None
    if not isinstance(points, list) or not points:
        raise ValueError(f"{path.name}: summary holds no points")
    for point in points:
        for key in ("n", *SERIES_KEYS):
            if key not in point:
                raise ValueError(f"{path.name}: point missing column '{key}'")
    points = sorted(points, key=lambda p: p["n"])
    sizes = np.array([float(p["n"]) for p in points])
    series = {key: np.array([float(p[key]) for p in points]) for key in SERIES_KEYS}
    fits: dict[str, dict | None] = {}
    for key in SERIES_KEYS:
        fit = payload.get("fits", {}).get(key)
        if fit is not None and any(field not in fit for field in FIT_KEYS):
            raise ValueError(f"{path.name}: fit for '{key}' missing slope/intercept")
        fits[key] = fit
    return DecaySummary(sizes, series, fits)
