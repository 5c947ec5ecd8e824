import numpy as np
import pytest

from sectorlab import ring, serialization as ser
from sectorlab.errors import MalformedWordError


class TestPacketCsv:
    def test_round_trip(self, tmp_path):
        grid = ring.Grid1D(64, 1.0)
        psi = ring.gaussian_ring_packet(grid, 0.5, 0.1, momentum=3.0)
        path = tmp_path / "packet.csv"
        ser.write_packet_csv(path, psi)
        back = ser.read_packet_csv(path)
        assert back.grid.n_points == 64
        assert np.max(np.abs(back.amplitudes - psi.amplitudes)) == 0.0

    def test_header_present(self, tmp_path):
        grid = ring.Grid1D(8, 1.0)
        path = tmp_path / "p.csv"
        ser.write_packet_csv(path, ring.Wavepacket(grid, np.ones(8)))
        assert path.read_text().splitlines()[0] == "x,re,im"


class TestKernelContainer:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        kernel = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
        path = tmp_path / "k.bin"
        ser.write_kernel(path, kernel, 0.0, 0.25, 1.1)
        back, meta = ser.read_kernel(path)
        assert np.array_equal(back, kernel)
        assert meta == {"n_points": 16, "t_i": 0.0, "t_f": 0.25, "theta": 1.1}

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"NOPE" + b"\0" * 64)
        with pytest.raises(MalformedWordError):
            ser.read_kernel(path)

    def test_non_square_rejected(self, tmp_path):
        with pytest.raises(MalformedWordError):
            ser.write_kernel(tmp_path / "x.bin", np.zeros((3, 4)), 0.0, 1.0)


class TestBandsCsv:
    def test_format(self, tmp_path):
        rows = np.array([[0.0, 1.0, 2.0], [0.5, 1.5, 2.5]])
        path = tmp_path / "bands.csv"
        ser.write_bands_csv(path, rows)
        lines = path.read_text().splitlines()
        assert lines[0] == "k,E_1,E_2"
        parsed = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
        assert np.array_equal(parsed, rows)


class TestJson:
    def test_deterministic_bytes(self):
        payload = {"b": 1.0 / 3.0, "a": [1, 2], "c": {"y": 2, "x": 1}}
        assert ser.dumps_json(payload) == ser.dumps_json(dict(reversed(payload.items())))
