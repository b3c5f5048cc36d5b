"""Binary grid formats (WF1 wavefunctions, WG1 real grids) and CSV exports.

All binary fields are little-endian. Axes are stored as (f64 min, f64 max,
u32 count), so a write/read round trip is bit-identical.
"""

from __future__ import annotations

import csv
import io
import struct
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import BadMagic, DimensionMismatch, TruncatedFile, ValidationError
from .radon import Sinogram
from .states import Axis, WaveFunction, grid_points
from .wigner import WignerFunction

WF1_MAGIC = b"SYMRADWF"
WG1_MAGIC = b"SYMRADWG"
VERSION = 1
_AXIS = struct.Struct("<ddI")


def _pack_axes(axes: Sequence[Axis]) -> bytes:
    return b"".join(_AXIS.pack(ax.min, ax.max, ax.count) for ax in axes)


class _Reader:
    def __init__(self, data: bytes, what: str):
        self.data, self.pos, self.what = data, 0, what

    def take(self, size: int) -> bytes:
        if self.pos + size > len(self.data):
            raise TruncatedFile(f"{self.what}: needed {size} bytes at offset {self.pos}, file has {len(self.data)}")
        out = self.data[self.pos:self.pos + size]
        self.pos += size
        return out

    def unpack(self, fmt: str):
        s = struct.Struct(fmt)
        return s.unpack(self.take(s.size))

    def axes(self, count: int) -> tuple[Axis, ...]:
        out = []
        for _ in range(count):
            lo, hi, cnt = self.unpack("<ddI")
            try:
                out.append(Axis(lo, hi, cnt))
            except ValidationError as exc:
                raise TruncatedFile(f"{self.what}: corrupt axis record ({exc})") from None
        return tuple(out)


def _header(r: _Reader, magic: bytes) -> None:
    got = r.take(len(magic))
    if got != magic:
        raise BadMagic(f"{r.what}: expected magic {magic!r}, found {got!r}")
    (version,) = r.unpack("<I")
    if version != VERSION:
        raise BadMagic(f"{r.what}: unsupported version {version}")


def wf1_bytes(psi: WaveFunction) -> bytes:
    head = WF1_MAGIC + struct.pack("<IId", VERSION, psi.n, psi.hbar) + _pack_axes(psi.axes)
    body = np.ascontiguousarray(psi.values, dtype="<c16").tobytes()
    return head + body


def wf1_from_bytes(data: bytes, what: str = "WF1") -> WaveFunction:
    r = _Reader(data, what)
    _header(r, WF1_MAGIC)
    n, hbar = r.unpack("<Id")
    axes = r.axes(n)
    shape = tuple(ax.count for ax in axes)
    raw = r.take(16 * int(np.prod(shape)))
    values = np.frombuffer(raw, dtype="<c16").reshape(shape).astype(complex)
    return WaveFunction(axes, values, hbar)


def wg1_bytes(axes: Sequence[Axis], values: np.ndarray, hbar: float) -> bytes:
    head = WG1_MAGIC + struct.pack("<IId", VERSION, len(axes), hbar) + _pack_axes(axes)
    vals = np.asarray(values, dtype=float)
    if vals.shape != tuple(ax.count for ax in axes):
        raise DimensionMismatch(f"values {vals.shape} do not match the axes")
    return head + np.ascontiguousarray(vals, dtype="<f8").tobytes()


def wg1_from_bytes(data: bytes, what: str = "WG1") -> tuple[tuple[Axis, ...], np.ndarray, float]:
    r = _Reader(data, what)
    _header(r, WG1_MAGIC)
    two_n, hbar = r.unpack("<Id")
    axes = r.axes(two_n)
    shape = tuple(ax.count for ax in axes)
    raw = r.take(8 * int(np.prod(shape)))
    values = np.frombuffer(raw, dtype="<f8").reshape(shape).astype(float)
    return axes, values, hbar


def write_wf1(path, psi: WaveFunction) -> None:
    Path(path).write_bytes(wf1_bytes(psi))


def read_wf1(path) -> WaveFunction:
    return wf1_from_bytes(Path(path).read_bytes(), str(path))


def write_wg1(path, Wf: WignerFunction) -> None:
    Path(path).write_bytes(wg1_bytes(Wf.axes, Wf.values, Wf.hbar))


def read_wg1(path) -> WignerFunction:
    axes, values, hbar = wg1_from_bytes(Path(path).read_bytes(), str(path))
    if len(axes) % 2:
        raise DimensionMismatch(f"WG1 phase-space grid has an odd number of axes ({len(axes)})")
    n = len(axes) // 2
    return WignerFunction(axes[:n], axes[n:], values, hbar)


def sniff(path) -> str:
    """'wf1', 'wg1' or BadMagic."""
    with open(path, "rb") as fh:
        head = fh.read(8)
    if head == WF1_MAGIC:
        return "wf1"
    if head == WG1_MAGIC:
        return "wg1"
    if len(head) < 8:
        raise TruncatedFile(f"{path}: too short for a header")
    raise BadMagic(f"{path}: unknown magic {head!r}")


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _grid_rows(axes: Sequence[Axis]) -> np.ndarray:
    pts = np.broadcast_arrays(*grid_points(axes))
    return np.stack([p.ravel() for p in pts], axis=1)


def wf1_csv(psi: WaveFunction) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow([f"x{i + 1}" for i in range(psi.n)] + ["re", "im"])
    coords = _grid_rows(psi.axes)
    vals = psi.values.ravel()
    for c, v in zip(coords, vals):
        w.writerow([_fmt(x) for x in c] + [_fmt(v.real), _fmt(v.imag)])
    return out.getvalue()


def wg1_csv(Wf: WignerFunction) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow([f"x{i + 1}" for i in range(Wf.n)] + [f"p{i + 1}" for i in range(Wf.n)] + ["value"])
    coords = _grid_rows(Wf.axes)
    for c, v in zip(coords, Wf.values.ravel()):
        w.writerow([_fmt(x) for x in c] + [_fmt(v)])
    return out.getvalue()


def sinogram_csv(s: Sinogram) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["X", "theta", "value"])
    X = s.X_axis.points
    for j, th in enumerate(s.angles):
        for i in range(X.size):
            w.writerow([_fmt(X[i]), _fmt(th), _fmt(s.values[j, i])])
    return out.getvalue()


def write_sinogram_csv(path, s: Sinogram) -> None:
    Path(path).write_text(sinogram_csv(s))


def read_sinogram_csv(path, hbar: float = 1.0) -> Sinogram:
    """Inverse of :func:`sinogram_csv`; the X axis is rebuilt from its midpoints."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["X", "theta", "value"]:
        raise BadMagic(f"{path}: expected header X,theta,value")
    data = np.array([[float(c) for c in row] for row in rows[1:] if row], dtype=float)
    if data.size == 0:
        raise TruncatedFile(f"{path}: no samples")
    thetas, first = np.unique(data[:, 1], return_index=True)
    thetas = data[np.sort(first), 1]
    n_ang = thetas.size
    if data.shape[0] % n_ang:
        raise TruncatedFile(f"{path}: {data.shape[0]} rows do not fill {n_ang} angles")
    count = data.shape[0] // n_ang
    block = data.reshape(n_ang, count, 3)
    X = block[0, :, 0]
    if not np.allclose(block[:, :, 0], X[None, :], rtol=0, atol=1e-12):
        raise ValidationError(f"{path}: angles use different X grids")
    h = (X[-1] - X[0]) / (count - 1)
    axis = Axis(X[0] - h / 2, X[-1] + h / 2, count)
    return Sinogram(axis, thetas, block[:, :, 2], hbar)


def profile_csv(prof) -> str:
    """Radon profile as X1..Xn,value."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow([f"X{i + 1}" for i in range(len(prof.X_axes))] + ["value"])
    for c, v in zip(_grid_rows(prof.X_axes), np.asarray(prof.values).ravel()):
        w.writerow([_fmt(x) for x in c] + [_fmt(v)])
    return out.getvalue()
