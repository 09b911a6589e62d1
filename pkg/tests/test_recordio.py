"""Round-trip and rejection tests for the series and snapshot file formats."""

import struct

import numpy as np
import pytest

from dnls2d.evolution import RunRecord, RunStatus, Sample
from dnls2d.recordio import (
    SERIES_MAGIC,
    SNAPSHOT_MAGIC,
    SNAPSHOT_VERSION,
    SnapshotMeta,
    read_snapshot,
    read_time_series,
    write_snapshot,
    write_time_series,
)
from dnls2d.spectral import Field, Grid


def awkward_record(status):
    # values chosen to stress %.17g: non-terminating binary fractions,
    # tiny and huge magnitudes, signed zeros
    samples = [
        Sample(0.0, 2.2062048075812917, 0.0, 7.3e-14, -0.0, 0.0),
        Sample(0.1, 1.0 / 3.0, 1.1102230246251565e-16, 1e-300, 0.4, -0.8),
        Sample(0.2, 1e17 + 1.0, 9.26e-3, 0.25, -1.0 / 7.0, 2.0**-52),
    ]
    return RunRecord(samples=samples, snapshots=[], status=status, warnings=[])


class TestTimeSeries:
    def test_round_trip_is_bit_exact(self, tmp_path):
        rec = awkward_record(RunStatus("mass_drift_stop", 0.1 + 0.2))
        path = tmp_path / "run.csv"
        write_time_series(rec, path)
        back = read_time_series(path)
        assert len(back.samples) == len(rec.samples)
        for a, b in zip(rec.samples, back.samples):
            for xa, xb in zip(a, b):
                assert struct.pack("<d", xa) == struct.pack("<d", xb)
        assert back.status.kind == "mass_drift_stop"
        assert struct.pack("<d", back.status.t) == struct.pack("<d", rec.status.t)

    def test_status_without_time(self, tmp_path):
        rec = awkward_record(RunStatus("completed"))
        path = tmp_path / "run.csv"
        write_time_series(rec, path)
        back = read_time_series(path)
        assert back.status.kind == "completed"
        assert back.status.t is None

    def test_empty_sample_list(self, tmp_path):
        rec = RunRecord(
            samples=[], snapshots=[], status=RunStatus("completed"), warnings=[]
        )
        path = tmp_path / "empty.csv"
        write_time_series(rec, path)
        back = read_time_series(path)
        assert back.samples == []
        assert back.snapshots == [] and back.warnings == []

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# other-tool v9\nt,linf\n# status=completed\n")
        with pytest.raises(ValueError, match="magic"):
            read_time_series(path)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(SERIES_MAGIC + "\nt,linf\n# status=completed\n")
        with pytest.raises(ValueError, match="column header"):
            read_time_series(path)

    def test_missing_trailer_rejected(self, tmp_path):
        rec = awkward_record(RunStatus("completed"))
        path = tmp_path / "run.csv"
        write_time_series(rec, path)
        body = path.read_text().splitlines()[:-1]
        path.write_text("\n".join(body) + "\n")
        with pytest.raises(ValueError, match="status trailer"):
            read_time_series(path)

    def test_wrong_column_count_names_the_row(self, tmp_path):
        rec = awkward_record(RunStatus("completed"))
        path = tmp_path / "run.csv"
        write_time_series(rec, path)
        lines = path.read_text().splitlines()
        lines[3] = "1.0,2.0,3.0"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ValueError, match="row 2 has 3 columns"):
            read_time_series(path)


class TestSnapshots:
    @pytest.mark.parametrize("space", ["physical", "spectral"])
    def test_round_trip_is_bitwise(self, tmp_path, space):
        rng = np.random.default_rng(3)
        vals = rng.standard_normal((8, 16)) + 1j * rng.standard_normal((8, 16))
        field = Field(vals, space)
        meta = SnapshotMeta(L1=3.0, L2=5.0, t=2.5)
        path = tmp_path / "snap.bin"
        write_snapshot(field, meta, path)
        back, meta_back = read_snapshot(path)
        assert back.space == space
        assert back.values.tobytes() == vals.tobytes()
        assert (meta_back.L1, meta_back.L2, meta_back.t) == (3.0, 5.0, 2.5)

    def test_meta_of_grid(self):
        g = Grid(3.0, 5.0, 8, 8)
        meta = SnapshotMeta.of(g, 1.25)
        assert (meta.L1, meta.L2, meta.t) == (3.0, 5.0, 1.25)

    def test_layout_matches_documented_header(self, tmp_path):
        field = Field(np.zeros((4, 2), complex), "physical")
        path = tmp_path / "snap.bin"
        write_snapshot(field, SnapshotMeta(1.0, 2.0, 0.5), path)
        raw = path.read_bytes()
        assert raw[:4] == SNAPSHOT_MAGIC
        version, n1, n2 = struct.unpack_from("<III", raw, 4)
        assert (version, n1, n2) == (SNAPSHOT_VERSION, 4, 2)
        assert len(raw) == struct.calcsize("<4sIIIdddB") + 16 * 4 * 2

    def _valid_snapshot(self, tmp_path):
        field = Field(np.ones((4, 4), complex), "physical")
        path = tmp_path / "snap.bin"
        write_snapshot(field, SnapshotMeta(1.0, 1.0, 0.0), path)
        return path

    def test_truncated_header_rejected(self, tmp_path):
        path = self._valid_snapshot(tmp_path)
        path.write_bytes(path.read_bytes()[:10])
        with pytest.raises(ValueError, match="truncated snapshot header"):
            read_snapshot(path)

    def test_bad_magic_rejected(self, tmp_path):
        path = self._valid_snapshot(tmp_path)
        raw = bytearray(path.read_bytes())
        raw[:4] = b"WAVE"
        path.write_bytes(bytes(raw))
        with pytest.raises(ValueError, match="bad magic"):
            read_snapshot(path)

    def test_unknown_version_rejected(self, tmp_path):
        path = self._valid_snapshot(tmp_path)
        raw = bytearray(path.read_bytes())
        struct.pack_into("<I", raw, 4, 99)
        path.write_bytes(bytes(raw))
        with pytest.raises(ValueError, match="version 99"):
            read_snapshot(path)

    def test_unknown_space_tag_rejected(self, tmp_path):
        path = self._valid_snapshot(tmp_path)
        raw = bytearray(path.read_bytes())
        tag_offset = struct.calcsize("<4sIIIddd")
        raw[tag_offset] = 7
        path.write_bytes(bytes(raw))
        with pytest.raises(ValueError, match="space tag 7"):
            read_snapshot(path)

    def test_truncated_payload_rejected(self, tmp_path):
        path = self._valid_snapshot(tmp_path)
        raw = path.read_bytes()
        path.write_bytes(raw[:-8])
        with pytest.raises(ValueError, match="payload"):
            read_snapshot(path)

    def test_trailing_garbage_rejected(self, tmp_path):
        path = self._valid_snapshot(tmp_path)
        path.write_bytes(path.read_bytes() + b"\x00" * 4)
        with pytest.raises(ValueError, match="payload"):
            read_snapshot(path)
