"""Binary state files, CSV exports, JSON reports and run manifests.

Binary layout (little-endian): header ``uint32 n, uint32 N, float64 L,
uint32 field_count`` followed by ``field_count`` row-major float64 arrays
of shape ``(N,)*n``; fields are ``phi, m_1, ..., m_n``.
"""
from __future__ import annotations

import csv
import datetime as _dt
import json
import struct
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path

import numpy as np

from .spectral import Grid, State

HEADER = struct.Struct("<IIdI")
CSV_MAX_POINTS = 1 << 16


def write_state(path, state: State) -> Path:
    g = state.grid
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(g.n, g.N, g.L, 1 + g.n))
        for arr in (state.phi, *state.m):
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    return path


def read_state(path) -> State:
    with open(path, "rb") as fh:
        n, N, L, count = HEADER.unpack(fh.read(HEADER.size))
        grid = Grid(n, N, L)
        if count != 1 + n:
            raise ValueError(f"expected {1 + n} fields, file declares {count}")
        data = np.frombuffer(fh.read(), dtype="<f8")
    size = N ** n
    if data.size != count * size:
        raise ValueError("payload length does not match the header")
    arrs = data.reshape((count,) + grid.shape).astype(float)
    return State(grid, arrs[0].copy(), arrs[1:].copy())


def state_to_csv(path, state: State) -> Path:
    """One row per grid point: coordinates, ``phi`` and the components of ``m``."""
    g = state.grid
    if g.N ** g.n > CSV_MAX_POINTS:
        raise ValueError(f"CSV export is limited to {CSV_MAX_POINTS} grid points")
    coords = [c.ravel() for c in g.x]
    cols = ["x%d" % (i + 1) for i in range(g.n)] + ["phi"] + ["m%d" % (i + 1) for i in range(g.n)]
    data = np.column_stack(coords + [state.phi.ravel()] + [c.ravel() for c in state.m])
    return write_rows(path, cols, data.tolist())


def _fmt(v):
    return repr(float(v)) if isinstance(v, (float, np.floating)) else v


def write_rows(path, header, rows) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def write_series_csv(path, series) -> Path:
    return write_rows(path, ["t", "value"], zip(series.times.tolist(), series.values.tolist()))


def write_normlog_csv(path, log) -> Path:
    return write_rows(path, ["t", "quantity", "band", "norm_p", "value"], log.rows)


def write_energy_csv(path, records) -> Path:
    return write_rows(path, ["t", "E_high", "D_high"], [(r.t, r.E_high, r.D_high) for r in records])


def _default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if hasattr(o, "value"):
        return o.value
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def write_json(path, obj) -> Path:
    path = Path(path)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_default)
        fh.write("\n")
    return path


def code_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:  # pragma: no cover - running from a checkout
        return "unknown"


@dataclass
class RunManifest:
    command: str
    config_path: str | None
    out_dir: Path
    seed: int
    timestamp: str = field(default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat())
    code_version: str = field(default_factory=code_version)
    files: list = field(default_factory=list)
    status: str = "running"

    @property
    def path(self) -> Path:
        return Path(self.out_dir) / "manifest.json"

    def add(self, path) -> Path:
        p = Path(path)
        self.files.append(p.name)
        return p

    def write(self) -> Path:
        Path(self.out_dir).mkdir(parents=True, exist_ok=True)
        return write_json(self.path, {
            "command": self.command,
            "config_path": self.config_path,
            "out_dir": str(self.out_dir),
            "seed": self.seed,
            "timestamp": self.timestamp,
            "code_version": self.code_version,
            "files": sorted(set(self.files) | {"manifest.json"}),
            "status": self.status,
        })

    def finalize(self, status: str) -> Path:
        self.status = status
        return self.write()
