import csv
import io
import math

import numpy as np
import pytest

from symrad import fileio
from symrad.errors import BadMagic, TruncatedFile
from symrad.radon import sinogram
from symrad.states import Axis, GaussianState, WaveFunction, hermite_state, sample_gaussian
from symrad.wigner import WignerFunction, wigner

AX = Axis(-8.0, 8.0, 256)

pytestmark = pytest.mark.filterwarnings("ignore::symrad.errors.BadCoverage")


def psi1():
    return sample_gaussian(GaussianState([[1.3]], [[0.4]]), (AX,))


def test_wf1_round_trip_bit_identical(tmp_path):
    ax2 = Axis(-3.0, 4.5, 10)
    for psi in (psi1(), sample_gaussian(GaussianState(np.eye(2), 0.1 * np.eye(2), 0.5), (ax2, Axis(-5.0, 5.0, 12)))):
        path = tmp_path / "a.wf1"
        fileio.write_wf1(path, psi)
        back = fileio.read_wf1(path)
        assert back.axes == psi.axes and back.hbar == psi.hbar
        assert back.values.tobytes() == psi.values.tobytes()
        fileio.write_wf1(tmp_path / "b.wf1", back)
        assert (tmp_path / "b.wf1").read_bytes() == path.read_bytes()


def test_wg1_round_trip_bit_identical(tmp_path):
    Wf = wigner(hermite_state((Axis(-6.0, 6.0, 64),), order=1))
    path = tmp_path / "w.wg1"
    fileio.write_wg1(path, Wf)
    back = fileio.read_wg1(path)
    assert back.x_axes == Wf.x_axes and back.p_axes == Wf.p_axes
    assert back.values.tobytes() == Wf.values.tobytes()
    assert fileio.sniff(path) == "wg1"


def test_bad_magic_and_truncation(tmp_path):
    data = fileio.wf1_bytes(psi1())
    with pytest.raises(BadMagic):
        fileio.wf1_from_bytes(b"XXXXXXXX" + data[8:])
    with pytest.raises(BadMagic):
        fileio.wg1_from_bytes(data)
    with pytest.raises(TruncatedFile):
        fileio.wf1_from_bytes(data[:-1])
    with pytest.raises(TruncatedFile):
        fileio.wf1_from_bytes(data[:20])
    bad_version = data[:8] + (7).to_bytes(4, "little") + data[12:]
    with pytest.raises(BadMagic):
        fileio.wf1_from_bytes(bad_version)
    p = tmp_path / "junk.bin"
    p.write_bytes(b"not a grid file")
    with pytest.raises(BadMagic):
        fileio.sniff(p)
    p.write_bytes(b"abc")
    with pytest.raises(TruncatedFile):
        fileio.sniff(p)


def _rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_csv_row_counts_and_lossless_values():
    psi = psi1()
    rows = _rows(fileio.wf1_csv(psi))
    assert rows[0] == ["x1", "re", "im"] and len(rows) == 257
    re = np.array([float(r[1]) for r in rows[1:]])
    assert np.array_equal(re, psi.values.real)
    Wf = wigner(psi, (Axis(-8.0, 8.0, 128),))
    rows = _rows(fileio.wg1_csv(Wf))
    assert rows[0] == ["x1", "p1", "value"] and len(rows) == 256 * 128 + 1
    assert np.array_equal(np.array([float(r[2]) for r in rows[1:]]), Wf.values.ravel())


def test_wg1_128x128_rows():
    ax = Axis(-5.0, 5.0, 128)
    Wf = WignerFunction((ax,), (ax,), np.zeros((128, 128)))
    assert len(_rows(fileio.wg1_csv(Wf))) == 16384 + 1


def test_sinogram_csv_round_trip(tmp_path):
    s = sinogram(psi1(), 6)
    path = tmp_path / "s.csv"
    fileio.write_sinogram_csv(path, s)
    back = fileio.read_sinogram_csv(path)
    assert np.array_equal(back.values, s.values)
    assert np.allclose(back.angles, s.angles, rtol=0, atol=0)
    assert back.X_axis.count == s.X_axis.count
    assert np.allclose(back.X_axis.points, s.X_axis.points, rtol=0, atol=1e-12)
    rows = _rows(path.read_text())
    assert rows[0] == ["X", "theta", "value"] and len(rows) == 6 * 256 + 1
    assert float(rows[1][1]) == 0.0 and float(rows[257][1]) == pytest.approx(math.pi / 6)


def test_sinogram_csv_errors(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(BadMagic):
        fileio.read_sinogram_csv(p)
    p.write_text("X,theta,value\n")
    with pytest.raises(TruncatedFile):
        fileio.read_sinogram_csv(p)


def test_values_are_read_only_copies(tmp_path):
    path = tmp_path / "a.wf1"
    fileio.write_wf1(path, psi1())
    back = fileio.read_wf1(path)
    assert isinstance(back, WaveFunction)
    with pytest.raises(ValueError):
        back.values[0] = 0
