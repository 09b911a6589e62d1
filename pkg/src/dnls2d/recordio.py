"""Bit-exact on-disk formats for time series and field snapshots.

Two formats, both versioned:

Time series: a line-oriented CSV. First line is the magic comment
``# dnls2d-series v1``, second the column header
``t,linf,mass_rel_drift,resolution,v1,v2``, then one row per sample printed
with %.17g (lossless for binary64), and a final comment trailer
``# status=<kind>`` optionally followed by `` t=<time>``. Reading inverts
writing exactly: the parsed samples and status reproduce the written ones
bit for bit.

Snapshots: a little-endian binary layout. Header fields in order: magic
bytes ``DNLS``; format version u32; N1, N2 u32; L1, L2, t f64; space tag u8
(0 physical, 1 spectral). Payload: N1*N2 complex values as interleaved
(re, im) f64 pairs, row-major with x2 fastest, 16*N1*N2 bytes total. The
reader rejects wrong magic, unknown versions, and truncated payloads.

Writers assume exclusive ownership of their path; concurrent readers are
safe once a file exists.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from .evolution import RunRecord, RunStatus, Sample
from .spectral import Field, Grid

__all__ = [
    "SERIES_MAGIC",
    "SNAPSHOT_MAGIC",
    "SNAPSHOT_VERSION",
    "SnapshotMeta",
    "read_snapshot",
    "read_time_series",
    "write_snapshot",
    "write_time_series",
]

SERIES_MAGIC = "# dnls2d-series v1"
_SERIES_COLUMNS = "t,linf,mass_rel_drift,resolution,v1,v2"

SNAPSHOT_MAGIC = b"DNLS"
SNAPSHOT_VERSION = 1
_HEADER = struct.Struct("<4sIIIdddB")

_PathLike = Union[str, Path]


# ---------------------------------------------------------------------------
# time series


def write_time_series(record: RunRecord, path: _PathLike) -> None:
    """Serialize the sampled scalars of a run; snapshots are not included."""
    lines = [SERIES_MAGIC, _SERIES_COLUMNS]
    for s in record.samples:
        lines.append(",".join(f"{x:.17g}" for x in s))
    status = record.status
    trailer = f"# status={status.kind}"
    if status.t is not None:
        trailer += f" t={status.t:.17g}"
    lines.append(trailer)
    Path(path).write_text("\n".join(lines) + "\n")


def read_time_series(path: _PathLike) -> RunRecord:
    """Parse a series file back into a RunRecord (samples and status only)."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != SERIES_MAGIC:
        raise ValueError(f"{path}: not a dnls2d series file (bad or missing magic line)")
    if len(lines) < 2 or lines[1] != _SERIES_COLUMNS:
        raise ValueError(f"{path}: unexpected column header")
    if len(lines) < 3 or not lines[-1].startswith("# status="):
        raise ValueError(f"{path}: missing status trailer")
    body, trailer = lines[2:-1], lines[-1][len("# status=") :]
    parts = trailer.split(" t=")
    kind = parts[0]
    t = float(parts[1]) if len(parts) == 2 else None
    samples = []
    for k, line in enumerate(body):
        cells = line.split(",")
        if len(cells) != 6:
            raise ValueError(f"{path}: row {k + 1} has {len(cells)} columns, expected 6")
        samples.append(Sample(*(float(c) for c in cells)))
    return RunRecord(
        samples=samples, snapshots=[], status=RunStatus(kind, t), warnings=[]
    )


# ---------------------------------------------------------------------------
# snapshots


@dataclass(frozen=True)
class SnapshotMeta:
    """Run context a field snapshot carries: domain extent and time."""

    L1: float
    L2: float
    t: float

    @classmethod
    def of(cls, grid: Grid, t: float) -> "SnapshotMeta":
        return cls(L1=grid.L1, L2=grid.L2, t=t)


def write_snapshot(field: Field, meta: SnapshotMeta, path: _PathLike) -> None:
    n1, n2 = field.values.shape
    header = _HEADER.pack(
        SNAPSHOT_MAGIC,
        SNAPSHOT_VERSION,
        n1,
        n2,
        meta.L1,
        meta.L2,
        meta.t,
        0 if field.space == "physical" else 1,
    )
    payload = np.empty((n1, n2, 2), dtype="<f8")
    payload[:, :, 0] = field.values.real
    payload[:, :, 1] = field.values.imag
    with open(path, "wb") as handle:
        handle.write(header)
        handle.write(payload.tobytes(order="C"))


def read_snapshot(path: _PathLike) -> Tuple[Field, SnapshotMeta]:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated snapshot header")
    magic, version, n1, n2, L1, L2, t, space_tag = _HEADER.unpack_from(raw)
    if magic != SNAPSHOT_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != SNAPSHOT_VERSION:
        raise ValueError(f"{path}: unsupported snapshot version {version}")
    if space_tag not in (0, 1):
        raise ValueError(f"{path}: unknown space tag {space_tag}")
    expected = 16 * n1 * n2
    body = raw[_HEADER.size :]
    if len(body) != expected:
        raise ValueError(
            f"{path}: payload is {len(body)} bytes, expected {expected} for {n1}x{n2}"
        )
    pairs = np.frombuffer(body, dtype="<f8").reshape(n1, n2, 2)
    values = pairs[:, :, 0] + 1j * pairs[:, :, 1]
    field = Field(values, "physical" if space_tag == 0 else "spectral")
    return field, SnapshotMeta(L1=L1, L2=L2, t=t)
