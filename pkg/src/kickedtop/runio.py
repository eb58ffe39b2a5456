"""Sweep output plumbing: atomic CSV rows, run manifests, row parsing.

Every QFI sample lands in one flat schema so any figure can be assembled
from the same files.  Rows are appended with single O_APPEND writes, so a
killed run leaves whole lines only.  All columns except wall_ms are
deterministic for a fixed (config, seed); wall_ms is measured time.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

from .qfi import QfiRecord

__all__ = ["CSV_COLUMNS", "RowWriter", "RunManifest", "format_row", "read_rows",
           "rows_equal_ignoring_wall_ms"]

CSV_COLUMNS = ("experiment_id", "config_hash", "kappa", "alpha", "N", "Q",
               "theta", "phi", "label", "t", "qfi", "qfi_fractional", "wall_ms")
HEADER = ",".join(CSV_COLUMNS) + "\n"


def format_row(experiment_id: str, config_hash: str, record: QfiRecord,
               fractional: float | None, wall_ms: int) -> str:
    """One CSV line; floats use repr so values round-trip exactly."""
    frac = "" if fractional is None else repr(float(fractional))
    fields = (experiment_id, config_hash, repr(float(record.kappa)),
              repr(float(record.alpha)), str(record.n_qubits),
              str(record.n_accessible), repr(float(record.theta)),
              repr(float(record.phi)), record.label, str(record.t),
              repr(float(record.qfi)), frac, str(int(wall_ms)))
    return ",".join(fields) + "\n"


class RowWriter:
    """Appends complete CSV lines with one write syscall each."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        existed = self.path.exists() and self.path.stat().st_size > 0
        self._fd = os.open(self.path, os.O_APPEND | os.O_CREAT | os.O_WRONLY, 0o644)
        if not existed:
            os.write(self._fd, HEADER.encode())

    def write_line(self, line: str) -> None:
        os.write(self._fd, line.encode())

    def close(self) -> None:
        os.close(self._fd)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


def read_rows(path: str | Path) -> list[dict]:
    """Parse a sweep CSV back into dicts with typed fields."""
    rows = []
    with open(path) as fh:
        header = fh.readline().rstrip("\n").split(",")
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header in {path}")
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            rows.append({
                "experiment_id": parts[0],
                "config_hash": parts[1],
                "kappa": float(parts[2]),
                "alpha": float(parts[3]),
                "N": int(parts[4]),
                "Q": int(parts[5]),
                "theta": float(parts[6]),
                "phi": float(parts[7]),
                "label": parts[8],
                "t": int(parts[9]),
                "qfi": float(parts[10]),
                "qfi_fractional": None if parts[11] == "" else float(parts[11]),
                "wall_ms": int(parts[12]),
            })
    return rows


def rows_equal_ignoring_wall_ms(path_a: str | Path, path_b: str | Path) -> bool:
    """Byte equality after masking the wall-clock column."""
    def masked(path):
        with open(path) as fh:
            return [line.rsplit(",", 1)[0] for line in fh]
    return masked(path_a) == masked(path_b)


@dataclass
class RunManifest:
    """Provenance for one CLI invocation; every CSV row traces to one manifest
    through the config hash."""

    config_hash: str
    code_version: str
    command: str
    started_at: float = field(default_factory=time.time)
    finished_at: float | None = None
    tasks: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)

    def task_status(self, task_id: str, status: str) -> None:
        self.tasks[task_id] = status

    def add_output(self, path: str | Path) -> None:
        name = str(path)
        if name not in self.outputs:
            self.outputs.append(name)

    def finish(self) -> None:
        self.finished_at = time.time()

    def save(self, path: str | Path) -> None:
        path = Path(path)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps({
            "config_hash": self.config_hash,
            "code_version": self.code_version,
            "command": self.command,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "tasks": self.tasks,
            "outputs": self.outputs,
        }, indent=2) + "\n")
        tmp.replace(path)
