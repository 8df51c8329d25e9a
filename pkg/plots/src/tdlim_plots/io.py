"""Reading tdlim CSV outputs.

Every tdlim file starts with a `#`-prefixed JSON config line followed by a
column header. This module parses those files into plain column arrays and
never touches the dynamics: figures are drawn from the numbers on disk only.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class MissingColumnError(KeyError):
    """A figure referenced a column the input CSV does not provide."""


@dataclass
class TableFile:
    """One parsed tdlim CSV: config header, column arrays, source checksum."""

    path: Path
    config: dict
    columns: list[str]
    data: dict
    checksum: str

    def __getitem__(self, column: str) -> np.ndarray:
        try:
            return self.data[column]
        except KeyError:
            raise MissingColumnError(
                f"{self.path} has no column {column!r}; available: {', '.join(self.columns)}"
            ) from None

    def require(self, *names: str) -> None:
        for name in names:
            if name not in self.data:
                raise MissingColumnError(
                    f"{self.path} has no column {name!r}; available: {', '.join(self.columns)}"
                )

    @property
    def label(self) -> str:
        learner = self.config.get("learner", "?")
        return str(learner).upper()

    def sidecar(self) -> dict | None:
        meta = Path(f"{self.path}.meta.json")
        if meta.exists():
            return json.loads(meta.read_text())
        return None

    def profile_columns(self) -> list[str]:
        return [c for c in self.columns if c.startswith("X_")]


def file_checksum(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def read_table(path) -> TableFile:
    path = Path(path)
    raw = path.read_text().splitlines()
    if not raw or not raw[0].startswith("# "):
        raise ValueError(f"{path} does not look like a tdlim CSV (missing config header)")
    config = json.loads(raw[0][2:])
    columns = raw[1].split(",")
    rows = [line.split(",") for line in raw[2:] if line]
    data: dict = {}
    for k, name in enumerate(columns):
        values = [row[k] if k < len(row) else "" for row in rows]
        if name == "error":
            data[name] = np.array(values, dtype=object)
            continue
        numeric = np.empty(len(values))
        for j, v in enumerate(values):
            numeric[j] = float(v) if v != "" else np.nan
        data[name] = numeric
    return TableFile(
        path=path,
        config=config,
        columns=columns,
        data=data,
        checksum=file_checksum(path),
    )


def input_metadata(tables) -> dict:
    """Image metadata payload recording every input file's checksum."""
    payload = {str(t.path.name): t.checksum for t in tables}
    return {"tdlim-inputs": json.dumps(payload, sort_keys=True)}
